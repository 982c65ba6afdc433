#ifndef CHISQALT_IO_HPP
#define CHISQALT_IO_HPP

#include <string>

#include "chisqalt/binning.hpp"

namespace chisqalt {

/// A data file: either raw observations (one decimal per line) or pre-binned
/// counts (the `lower,upper,count` CSV). The format is detected from the
/// header line.
struct LoadedData {
  bool is_binned = false;
  Eigen::ArrayXd values;
  BinnedData binned;
};

LoadedData read_data(const std::string& path);

}  // namespace chisqalt

#endif  // CHISQALT_IO_HPP
