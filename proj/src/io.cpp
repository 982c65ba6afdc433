#include "chisqalt/io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace chisqalt {

LoadedData read_data(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");

  std::string first;
  if (!std::getline(in, first)) throw std::runtime_error("'" + path + "' is empty");
  if (first.ends_with('\r')) first.pop_back();

  LoadedData out;
  if (first == "lower,upper,count") {
    in.clear();
    in.seekg(0);
    out.is_binned = true;
    out.binned = read_binned_csv(in);
    return out;
  }

  std::vector<double> values;
  int line_no = 0;
  std::string line = first;
  do {
    ++line_no;
    if (line.ends_with('\r')) line.pop_back();
    // trim surrounding whitespace
    std::size_t b = line.find_first_not_of(" \t");
    std::size_t e = line.find_last_not_of(" \t");
    if (b == std::string::npos) continue;  // blank line
    std::string cell = line.substr(b, e - b + 1);
    char* end = nullptr;
    double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0')
      throw std::runtime_error("'" + path + "': cannot parse '" + cell + "' on line " +
                               std::to_string(line_no));
    values.push_back(v);
  } while (std::getline(in, line));

  if (values.empty()) throw std::runtime_error("'" + path + "' contains no observations");
  out.values = Eigen::Map<const Eigen::ArrayXd>(values.data(),
                                                static_cast<Eigen::Index>(values.size()));
  return out;
}

}  // namespace chisqalt
