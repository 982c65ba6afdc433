#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chisqalt/io.hpp"
#include "chisqalt/studies.hpp"
#include "chisqalt/svg.hpp"

namespace {

using namespace chisqalt;

struct CommonOpts {
  std::string null_spec;
  std::string alt_spec;
  std::string data_path;
  std::string out_path;
  std::string format;
  double alpha = 0.05;
  int B = 2000;
  int B_inner = 500;
  std::uint64_t seed = kDefaultSeed;
  double n = 0.0;
  double lambda = 0.0;
  std::string grid_k;
  std::string grid_kappa;
  std::string kinds;
  std::string methods;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

// --grid-k accepts "2:21" or "2,3,5"
std::vector<int> parse_k_list(const std::string& text) {
  std::vector<int> ks;
  if (auto colon = text.find(':'); colon != std::string::npos) {
    int lo = std::stoi(text.substr(0, colon));
    int hi = std::stoi(text.substr(colon + 1));
    for (int k = lo; k <= hi; ++k) ks.push_back(k);
  } else {
    for (const std::string& s : split(text, ',')) ks.push_back(std::stoi(s));
  }
  return ks;
}

std::optional<SelectionGrid> build_grid(const CommonOpts& opts, int p, double n) {
  if (opts.grid_k.empty() && opts.grid_kappa.empty() && opts.kinds.empty())
    return std::nullopt;
  SelectionGrid grid = SelectionGrid::defaults(p, n);
  if (!opts.grid_k.empty()) grid.k_values = parse_k_list(opts.grid_k);
  if (!opts.grid_kappa.empty()) {
    grid.kappa_values.clear();
    for (const std::string& s : split(opts.grid_kappa, ',')) grid.kappa_values.push_back(std::stod(s));
  }
  if (!opts.kinds.empty()) {
    grid.kinds.clear();
    for (const std::string& s : split(opts.kinds, ',')) {
      auto kind = statistic_from_name(s);
      if (!kind) throw CLI::ValidationError("--kinds", "unknown statistic '" + s + "'");
      grid.kinds.push_back(*kind);
    }
  }
  return grid;
}

void emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
  out << content;
}

std::string table_csv(const PowerTable& table) {
  std::ostringstream ss;
  write_power_csv(ss, table);
  return ss.str();
}

std::string swap_extension(const std::string& path, const std::string& ext) {
  auto dot = path.find_last_of('.');
  auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + ext;
  return path.substr(0, dot) + ext;
}

int run(int argc, char** argv) {
  CLI::App app{"RG chi-square goodness-of-fit testing against a declared alternative"};
  app.require_subcommand(1);
  CommonOpts opts;

  auto add_common = [&](CLI::App* cmd, bool with_grid) {
    cmd->add_option("--alpha", opts.alpha, "test level")->capture_default_str();
    cmd->add_option("--seed", opts.seed, "rng seed")->capture_default_str();
    cmd->add_option("--out", opts.out_path, "output path (stdout when omitted)");
    if (with_grid) {
      cmd->add_option("--grid-k", opts.grid_k, "bin counts, e.g. 2:21 or 2,3,4");
      cmd->add_option("--grid-kappa", opts.grid_kappa, "kappa values, e.g. 0,0.5,1");
      cmd->add_option("--kinds", opts.kinds,
                      "statistics: pearson,freeman-tukey,lambda-p,g2,neyman-modified,cr23");
    }
  };

  CLI::App* test = app.add_subcommand("test", "run the RG test on a data file");
  test->add_option("--null", opts.null_spec, "null distribution spec")->required();
  test->add_option("--alt", opts.alt_spec, "alternative distribution spec")->required();
  test->add_option("--data", opts.data_path, "data file")->required();
  test->add_option("--lambda", opts.lambda, "Poisson sample-size rate (enables Poisson mode)");
  add_common(test, true);

  CLI::App* test_binned = app.add_subcommand("test-binned", "RG test on pre-binned data");
  test_binned->add_option("--null", opts.null_spec)->required();
  test_binned->add_option("--alt", opts.alt_spec)->required();
  test_binned->add_option("--data", opts.data_path, "lower,upper,count CSV")->required();
  add_common(test_binned, true);

  CLI::App* select = app.add_subcommand("select", "inspect the merit grid");
  select->add_option("--null", opts.null_spec)->required();
  select->add_option("--alt", opts.alt_spec)->required();
  select->add_option("--n", opts.n, "sample size the test will see")->required();
  add_common(select, true);

  CLI::App* power = app.add_subcommand("power", "Monte Carlo power of the methods");
  power->add_option("--null", opts.null_spec)->required();
  power->add_option("--alt", opts.alt_spec)->required();
  power->add_option("--n", opts.n, "sample size");
  power->add_option("--lambda", opts.lambda, "Poisson rate (instead of --n)");
  power->add_option("--B", opts.B, "replications")->capture_default_str();
  power->add_option("--B-inner", opts.B_inner, "bootstrap size for EDF methods")
      ->capture_default_str();
  power->add_option("--methods", opts.methods, "comma list, default all nine");
  add_common(power, true);

  CLI::App* type1 = app.add_subcommand("type1", "RG type-I error at 1%/5%/10%");
  std::vector<std::string> type1_nulls;
  type1->add_option("--null", type1_nulls, "null spec (repeatable; default: the seven study nulls)");
  type1->add_option("--n", opts.n, "sample size")->capture_default_str();
  type1->add_option("--B", opts.B, "replications")->capture_default_str();
  add_common(type1, false);

  CLI::App* repro = app.add_subcommand("reproduce", "re-run a study from the paper's suite");
  std::string study_name;
  repro->add_option("name", study_name, "table1, fig1..fig10, or mixture-demo")->required();
  repro->add_option("--B", opts.B, "replications")->capture_default_str();
  repro->add_option("--B-inner", opts.B_inner, "EDF bootstrap size")->capture_default_str();
  repro->add_option("--n", opts.n, "sample size override");
  repro->add_option("--format", opts.format, "csv (default) or svg");
  add_common(repro, false);

  CLI::App* sample = app.add_subcommand("sample", "draw observations from a spec");
  sample->add_option("--null", opts.null_spec, "distribution spec")->required();
  sample->add_option("--n", opts.n, "number of draws")->required();
  add_common(sample, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);  // prints the message / help text
    return code == 0 ? 0 : 2;
  }

  if (test->parsed() || test_binned->parsed()) {
    DistributionSpec null_spec = DistributionSpec::parse(opts.null_spec);
    Distribution f1 = DistributionSpec::parse(opts.alt_spec).bind();
    LoadedData data = read_data(opts.data_path);

    TestReport report;
    if (test_binned->parsed()) {
      if (!data.is_binned) throw std::runtime_error("test-binned expects the lower,upper,count CSV");
      double n = data.binned.counts.sum();
      report = rg_test_prebinned(data.binned, null_spec, f1, opts.alpha,
                                 build_grid(opts, null_spec.free_parameter_count(), n));
    } else if (data.is_binned) {
      double n = data.binned.counts.sum();
      report = rg_test_prebinned(data.binned, null_spec, f1, opts.alpha,
                                 build_grid(opts, null_spec.free_parameter_count(), n));
    } else if (opts.lambda > 0.0) {
      report = rg_test_poisson(data.values, opts.lambda, null_spec, f1, opts.alpha,
                               build_grid(opts, null_spec.free_parameter_count(), opts.lambda));
    } else {
      report = rg_test(data.values, null_spec, f1, opts.alpha,
                       build_grid(opts, null_spec.free_parameter_count(),
                                  static_cast<double>(data.values.size())));
    }
    emit(report_to_json(report) + "\n", opts.out_path);
    return 0;
  }

  if (select->parsed()) {
    DistributionSpec null_spec = DistributionSpec::parse(opts.null_spec);
    Distribution f1 = DistributionSpec::parse(opts.alt_spec).bind();
    auto grid = build_grid(opts, null_spec.free_parameter_count(), opts.n);
    SchemeChoice choice = select_scheme(
        null_spec, f1, opts.n,
        grid ? *grid : SelectionGrid::defaults(null_spec.free_parameter_count(), opts.n));
    std::ostringstream ss;
    write_grid_csv(ss, choice.grid_report);
    emit(ss.str(), opts.out_path);
    return 0;
  }

  if (power->parsed()) {
    DistributionSpec null_spec = DistributionSpec::parse(opts.null_spec);
    Distribution f1 = DistributionSpec::parse(opts.alt_spec).bind();
    const bool poisson = opts.lambda > 0.0;
    const double n = poisson ? opts.lambda : opts.n;
    if (!(n > 0.0)) throw CLI::ValidationError("power", "need --n or --lambda");
    std::vector<Method> methods;
    if (opts.methods.empty()) {
      methods.assign(kAllMethods.begin(), kAllMethods.end());
    } else {
      for (const std::string& s : split(opts.methods, ',')) {
        auto m = method_from_name(s);
        if (!m) throw CLI::ValidationError("--methods", "unknown method '" + s + "'");
        methods.push_back(*m);
      }
    }
    auto results = run_power_cell(null_spec, f1, methods, n, poisson, opts.alpha, opts.B,
                                  opts.B_inner, opts.seed);
    PowerTable table;
    for (Method m : methods) {
      const PowerResult& pr = results[m];
      table.rows.push_back(PowerRow{"power", 0.0, std::string(method_name(m)), pr.power,
                                    pr.se, opts.B, n, opts.alpha, opts.seed});
    }
    emit(table_csv(table), opts.out_path);
    return 0;
  }

  if (type1->parsed()) {
    if (opts.n <= 0.0) opts.n = 1000.0;
    std::vector<std::pair<std::string, DistributionSpec>> nulls;
    if (type1_nulls.empty()) {
      nulls = table1_nulls();
    } else {
      for (const std::string& s : type1_nulls) nulls.emplace_back(s, DistributionSpec::parse(s));
    }
    PowerTable table = type1_table(nulls, {0.01, 0.05, 0.10}, opts.n, opts.B, opts.seed);
    emit(table_csv(table), opts.out_path);
    return 0;
  }

  if (repro->parsed()) {
    PowerTable table = reproduce(study_name, opts.B, opts.B_inner,
                                 opts.n > 0.0 ? opts.n : 1000.0, opts.seed);
    if (opts.format == "svg") {
      emit(render_svg(table, study_name == "table1" ? "bar" : "line"), opts.out_path);
    } else {
      emit(table_csv(table), opts.out_path);
      if (!opts.out_path.empty() && study_name != "mixture-demo")
        emit(render_svg(table, study_name == "table1" ? "bar" : "line"),
             swap_extension(opts.out_path, ".svg"));
    }
    return 0;
  }

  if (sample->parsed()) {
    Distribution dist = DistributionSpec::parse(opts.null_spec).bind();
    RngStream stream(opts.seed);
    Eigen::ArrayXd values = dist.sample(static_cast<Eigen::Index>(opts.n), stream);
    std::string out;
    char buf[64];
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g\n", values[i]);
      out += buf;
    }
    emit(out, opts.out_path);
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const chisqalt::ParseError& e) {
    std::cerr << "spec error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
