#include "chisqalt/power.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "chisqalt/edf.hpp"
#include "chisqalt/estimation.hpp"
#include "chisqalt/parallel.hpp"

namespace chisqalt {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::RG: return "RG";
    case Method::EqualSize: return "EqualSize";
    case Method::EqualProb: return "EqualProb";
    case Method::Histogram: return "Histogram";
    case Method::KS: return "KS";
    case Method::AD: return "AD";
    case Method::ZK: return "ZK";
    case Method::ZA: return "ZA";
    case Method::ZC: return "ZC";
  }
  return "?";
}

std::optional<Method> method_from_name(std::string_view name) {
  for (Method m : kAllMethods)
    if (name == method_name(m)) return m;
  return std::nullopt;
}

bool method_is_edf(Method m) {
  switch (m) {
    case Method::KS:
    case Method::AD:
    case Method::ZK:
    case Method::ZA:
    case Method::ZC:
      return true;
    default:
      return false;
  }
}

namespace {

EdfKind edf_kind_of(Method m) {
  switch (m) {
    case Method::KS: return EdfKind::KS;
    case Method::AD: return EdfKind::AD;
    case Method::ZK: return EdfKind::ZK;
    case Method::ZA: return EdfKind::ZA;
    default: return EdfKind::ZC;
  }
}

int sturges_bins(double n) {
  return static_cast<int>(std::ceil(std::log2(n) + 1.0));
}

enum class Outcome : std::uint8_t { Accept = 0, Reject = 1, Failed = 2 };

PowerResult reduce_outcomes(const std::vector<Outcome>& flags, Eigen::Index stride,
                            Eigen::Index offset, int B, std::string_view label) {
  long rejects = 0, successes = 0, failures = 0;
  for (int r = 0; r < B; ++r) {
    switch (flags[static_cast<std::size_t>(r) * static_cast<std::size_t>(stride) +
                  static_cast<std::size_t>(offset)]) {
      case Outcome::Reject: ++rejects; ++successes; break;
      case Outcome::Accept: ++successes; break;
      case Outcome::Failed: ++failures; break;
    }
  }
  if (failures * 100 > B)
    throw std::runtime_error(std::string(label) + ": estimation failed on " +
                             std::to_string(failures) + "/" + std::to_string(B) +
                             " replicates");
  PowerResult out;
  out.replicates = successes;
  out.failures = failures;
  out.power = successes > 0 ? static_cast<double>(rejects) / static_cast<double>(successes) : 0.0;
  out.se = successes > 0 ? std::sqrt(out.power * (1.0 - out.power) / static_cast<double>(successes))
                         : 0.0;
  return out;
}

}  // namespace

void write_power_csv(std::ostream& out, const PowerTable& table) {
  out << "study,param,method,power,se,B,n,alpha,seed\n";
  char buf[256];
  for (const PowerRow& r : table.rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.10g,%s,%.6f,%.6f,%d,%.10g,%g,%llu",
                  r.study.c_str(), r.param, r.method.c_str(), r.power, r.se, r.B, r.n,
                  r.alpha, static_cast<unsigned long long>(r.seed));
    out << buf << '\n';
  }
}

PowerResult power_fast(const Distribution& f0, const Distribution& f1,
                       const BinningScheme& scheme, StatisticKind kind, double n,
                       double alpha, int B, std::uint64_t seed) {
  if (B < 1) throw std::invalid_argument("power_fast: B must be >= 1");
  if (!admissible(n, scheme.null_probs))
    throw std::invalid_argument("power_fast: scheme is inadmissible at this n");
  (void)f0;

  Eigen::ArrayXd alt_probs = bin_probabilities(f1, scheme.edges);
  const double covered = alt_probs.sum();
  const bool overflow = covered < 1.0 - 1e-12;
  Eigen::ArrayXd draw_probs = alt_probs;
  if (overflow) {
    draw_probs.conservativeResize(alt_probs.size() + 1);
    draw_probs[alt_probs.size()] = 1.0 - covered;  // mass outside the edges is dropped
  }
  const Eigen::ArrayXd expected = n * scheme.null_probs;
  const double crit = chisq_quantile(1.0 - alpha, scheme.k - 1);
  const long long trials = static_cast<long long>(std::llround(n));

  RngStream root(seed);
  std::vector<Outcome> flags(static_cast<std::size_t>(B), Outcome::Failed);
  parallel_for(B, [&](Eigen::Index begin, Eigen::Index end) {
    for (Eigen::Index r = begin; r < end; ++r) {
      RngStream sub = root.substream(static_cast<std::uint64_t>(r));
      Eigen::ArrayXd counts = sub.multinomial(trials, draw_probs);
      if (overflow) counts.conservativeResize(alt_probs.size());
      try {
        double stat = chisq_stat(kind, counts, expected);
        flags[static_cast<std::size_t>(r)] = stat > crit ? Outcome::Reject : Outcome::Accept;
      } catch (const std::exception&) {
        flags[static_cast<std::size_t>(r)] = Outcome::Failed;  // e.g. Neyman with a zero count
      }
    }
  });
  return reduce_outcomes(flags, 1, 0, B, "power_fast");
}

namespace {

// Data-independent per-cell plan for one chi-square-family method.
struct ChiSqPlan {
  Method method = Method::RG;
  bool per_replicate_edges = false;  // composite competitors rebuild edges per fit
  int k = 0;
  double kappa = 0.0;
  StatisticKind kind = StatisticKind::Pearson;
  BinningScheme scheme;               // when data-independent
  Eigen::ArrayXd start;               // estimation start (composite)
  std::optional<BinningScheme> fallback_scheme;  // RG Neyman zero-count fallback
  StatisticKind fallback_kind = StatisticKind::Pearson;
};

struct CellPlan {
  std::vector<Method> methods;
  std::vector<ChiSqPlan> chisq;     // aligned with chi-square methods
  std::vector<EdfKind> edf_kinds;   // requested EDF statistics
  std::vector<Eigen::Index> edf_offsets;  // method slot per EDF kind
  std::vector<Eigen::Index> chisq_offsets;
};

}  // namespace

std::map<Method, PowerResult> run_power_cell(const DistributionSpec& null_spec,
                                             const Distribution& f1,
                                             const std::vector<Method>& methods,
                                             double n_or_lambda, bool poisson,
                                             double alpha, int B, int B_inner,
                                             std::uint64_t seed,
                                             const std::optional<SelectionGrid>& rg_grid) {
  if (methods.empty()) throw std::invalid_argument("run_power_cell: no methods");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("run_power_cell: bad alpha");
  if (B < 1) throw std::invalid_argument("run_power_cell: B must be >= 1");

  const int p = null_spec.free_parameter_count();
  const bool composite = p > 0;
  const double n_select = poisson ? std::max(1.0, std::round(n_or_lambda)) : n_or_lambda;
  const int df_offset = poisson ? 0 : 1;
  const Eigen::Index n_fixed = static_cast<Eigen::Index>(std::llround(n_or_lambda));

  // reference null member used for data-independent edges
  Eigen::ArrayXd theta_ref;
  std::optional<SchemeChoice> rg_choice;
  if (std::find(methods.begin(), methods.end(), Method::RG) != methods.end()) {
    SelectionGrid grid = rg_grid ? *rg_grid : SelectionGrid::defaults(p, n_select);
    if (poisson) grid.kinds = {StatisticKind::Pearson, StatisticKind::LambdaP};
    rg_choice = select_scheme(null_spec, f1, n_select, grid);
    theta_ref = rg_choice->theta_ref;
  } else if (composite) {
    theta_ref = unbinned_mle(null_spec, perfect_sample(f1, static_cast<Eigen::Index>(n_select))).theta;
  }
  const Distribution f0_ref = composite ? null_spec.bind(theta_ref) : null_spec.bind();

  CellPlan plan;
  plan.methods = methods;
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    const Method m = methods[mi];
    if (method_is_edf(m)) {
      plan.edf_kinds.push_back(edf_kind_of(m));
      plan.edf_offsets.push_back(static_cast<Eigen::Index>(mi));
      continue;
    }
    ChiSqPlan cp;
    cp.method = m;
    switch (m) {
      case Method::RG: {
        cp.scheme = rg_choice->scheme;
        cp.k = cp.scheme.k;
        cp.kappa = cp.scheme.kappa;
        cp.kind = rg_choice->kind;
        cp.start = rg_choice->theta.size() ? rg_choice->theta : theta_ref;
        if (cp.kind == StatisticKind::NeymanModified) {
          const GridEntry* best = nullptr;
          for (const GridEntry& e : rg_choice->grid_report) {
            if (!e.admissible || e.kind == StatisticKind::NeymanModified) continue;
            if (!best || e.merit > best->merit) best = &e;
          }
          if (best) {
            cp.fallback_scheme = make_scheme(f0_ref, best->k, best->kappa);
            cp.fallback_kind = best->kind;
          }
        }
        break;
      }
      case Method::EqualProb:
      case Method::EqualSize: {
        cp.k = std::max(sturges_bins(n_select), p + 2);
        cp.kappa = m == Method::EqualProb ? 0.0 : 1.0;
        cp.kind = StatisticKind::Pearson;
        if (composite) {
          cp.per_replicate_edges = true;
        } else {
          cp.scheme = make_scheme(f0_ref, cp.k, cp.kappa);
        }
        break;
      }
      case Method::Histogram: {
        cp.kind = StatisticKind::Pearson;
        if (composite) {
          cp.per_replicate_edges = true;
        } else {
          cp.scheme = histogram_scheme(f0_ref, n_select, 50);
          cp.k = cp.scheme.k;
        }
        break;
      }
      default:
        break;
    }
    plan.chisq_offsets.push_back(static_cast<Eigen::Index>(mi));
    plan.chisq.push_back(std::move(cp));
  }

  const Eigen::Index stride = static_cast<Eigen::Index>(methods.size());
  std::vector<Outcome> flags(static_cast<std::size_t>(B) * static_cast<std::size_t>(stride),
                             Outcome::Failed);
  const bool any_edf = !plan.edf_kinds.empty();

  RngStream root(seed);
  parallel_for(B, [&](Eigen::Index begin, Eigen::Index end) {
    for (Eigen::Index r = begin; r < end; ++r) {
      RngStream stream_r = root.substream(static_cast<std::uint64_t>(r));
      RngStream data_stream = stream_r.substream(0);
      RngStream size_stream = stream_r.substream(1);
      auto flag = [&](Eigen::Index offset, Outcome o) {
        flags[static_cast<std::size_t>(r) * static_cast<std::size_t>(stride) +
              static_cast<std::size_t>(offset)] = o;
      };

      Eigen::Index n_rep = poisson
                               ? static_cast<Eigen::Index>(size_stream.poisson(n_or_lambda))
                               : n_fixed;
      if (n_rep < 1) continue;  // empty replicate: every method fails
      const Eigen::ArrayXd data = f1.sample(n_rep, data_stream);
      const double total = poisson ? n_or_lambda : static_cast<double>(n_rep);

      // shared MLE for composite competitors and EDF refits
      Eigen::ArrayXd theta_mle;
      bool mle_ok = true;
      const bool need_mle =
          composite &&
          (any_edf || std::any_of(plan.chisq.begin(), plan.chisq.end(),
                                  [](const ChiSqPlan& c) { return c.per_replicate_edges; }));
      if (need_mle) {
        try {
          theta_mle = unbinned_mle(null_spec, data).theta;
        } catch (const std::exception&) {
          mle_ok = false;
        }
      }

      for (std::size_t ci = 0; ci < plan.chisq.size(); ++ci) {
        const ChiSqPlan& cp = plan.chisq[ci];
        const Eigen::Index offset = plan.chisq_offsets[ci];
        try {
          BinningScheme scheme;
          StatisticKind kind = cp.kind;
          Eigen::ArrayXd start = cp.start;
          if (cp.per_replicate_edges) {
            if (!mle_ok) throw std::runtime_error("mle failed");
            const Distribution fitted = null_spec.bind(theta_mle);
            if (cp.method == Method::Histogram)
              scheme = histogram_scheme(fitted, total, 50);
            else
              scheme = make_scheme(fitted, cp.k, cp.kappa);
            start = theta_mle;
          } else {
            scheme = cp.scheme;
          }

          Eigen::ArrayXd counts = bin_counts(data, scheme.edges);
          if (kind == StatisticKind::NeymanModified && (counts <= 0.0).any()) {
            if (!cp.fallback_scheme) throw std::runtime_error("neyman zero count");
            scheme = *cp.fallback_scheme;
            kind = cp.fallback_kind;
            counts = bin_counts(data, scheme.edges);
          }

          Eigen::ArrayXd expected;
          int df = scheme.k - df_offset - p;
          if (composite) {
            FitResult fit = minimum_chisq(null_spec, counts, scheme.edges, kind, start, total);
            expected = total *
                       bin_probabilities(null_spec.bind(fit.theta), scheme.edges).max(1e-12);
          } else {
            expected = total * scheme.null_probs;
          }
          if (df < 1) throw std::runtime_error("no degrees of freedom");
          double stat = std::max(chisq_stat(kind, counts, expected), 0.0);
          double pvalue = 1.0 - chisq_cdf(stat, df);
          flag(offset, pvalue <= alpha ? Outcome::Reject : Outcome::Accept);
        } catch (const std::exception&) {
          flag(offset, Outcome::Failed);
        }
      }

      if (any_edf) {
        try {
          if (composite && !mle_ok) throw std::runtime_error("mle failed");
          const Distribution fitted = composite ? null_spec.bind(theta_mle) : f0_ref;
          std::vector<double> observed(plan.edf_kinds.size());
          for (std::size_t ei = 0; ei < plan.edf_kinds.size(); ++ei)
            observed[ei] = edf_statistic(plan.edf_kinds[ei], data, fitted);

          std::vector<long> exceed(plan.edf_kinds.size(), 0);
          long inner_ok = 0, inner_failed = 0;
          for (int j = 0; j < B_inner; ++j) {
            RngStream inner = stream_r.substream(10000 + static_cast<std::uint64_t>(j));
            try {
              Eigen::Index inner_n =
                  poisson ? static_cast<Eigen::Index>(inner.poisson(n_or_lambda)) : n_rep;
              if (inner_n < 1) throw std::runtime_error("empty inner replicate");
              Eigen::ArrayXd rep = fitted.sample(inner_n, inner);
              Distribution null_j =
                  composite ? null_spec.bind(unbinned_mle(null_spec, rep).theta) : fitted;
              ++inner_ok;
              for (std::size_t ei = 0; ei < plan.edf_kinds.size(); ++ei)
                if (edf_statistic(plan.edf_kinds[ei], rep, null_j) >= observed[ei])
                  ++exceed[ei];
            } catch (const std::exception&) {
              ++inner_failed;
            }
          }
          if (inner_failed * 100 > B_inner)
            throw std::runtime_error("inner estimation failures");
          for (std::size_t ei = 0; ei < plan.edf_kinds.size(); ++ei) {
            double pvalue = (1.0 + static_cast<double>(exceed[ei])) /
                            (static_cast<double>(inner_ok) + 1.0);
            flag(plan.edf_offsets[ei], pvalue <= alpha ? Outcome::Reject : Outcome::Accept);
          }
        } catch (const std::exception&) {
          for (Eigen::Index offset : plan.edf_offsets) flag(offset, Outcome::Failed);
        }
      }
    }
  });

  std::map<Method, PowerResult> results;
  for (std::size_t mi = 0; mi < methods.size(); ++mi)
    results[methods[mi]] =
        reduce_outcomes(flags, stride, static_cast<Eigen::Index>(mi), B,
                        method_name(methods[mi]));
  return results;
}

PowerResult power_full(Method method, const DistributionSpec& null_spec,
                       const Distribution& f1, double n_or_lambda, bool poisson,
                       double alpha, int B, int B_inner, std::uint64_t seed,
                       const std::optional<SelectionGrid>& rg_grid) {
  return run_power_cell(null_spec, f1, {method}, n_or_lambda, poisson, alpha, B, B_inner,
                        seed, rg_grid)[method];
}

PowerTable power_curve(const StudySpec& study) {
  if (study.B < 100) throw std::invalid_argument("power_curve: B must be >= 100");
  if (!(study.alpha > 0.0 && study.alpha < 1.0))
    throw std::invalid_argument("power_curve: alpha outside (0,1)");

  if (!study.per_param_nulls.empty() &&
      study.per_param_nulls.size() != study.alternatives.size())
    throw std::invalid_argument("power_curve: per_param_nulls size mismatch");

  PowerTable table;
  std::map<Method, double> mean_power;
  std::map<Method, double> mean_var;
  RngStream root(study.seed);
  for (std::size_t cell = 0; cell < study.alternatives.size(); ++cell) {
    const auto& [param, f1] = study.alternatives[cell];
    const DistributionSpec& null_spec =
        study.per_param_nulls.empty() ? study.null_spec : study.per_param_nulls[cell];
    const std::uint64_t cell_seed = root.substream(cell).key();
    auto results = run_power_cell(null_spec, f1, study.methods, study.n,
                                  study.poisson, study.alpha, study.B, study.B_inner,
                                  cell_seed);
    for (Method m : study.methods) {
      const PowerResult& pr = results[m];
      table.rows.push_back(PowerRow{study.name, param, std::string(method_name(m)),
                                    pr.power, pr.se, study.B, study.n, study.alpha,
                                    study.seed});
      mean_power[m] += pr.power;
      mean_var[m] += pr.se * pr.se;
    }
  }
  const double cells = static_cast<double>(study.alternatives.size());
  for (Method m : study.methods)
    table.rows.push_back(PowerRow{study.name + "-mean", 0.0,
                                  std::string(method_name(m)), mean_power[m] / cells,
                                  std::sqrt(mean_var[m]) / cells, study.B, study.n,
                                  study.alpha, study.seed});
  return table;
}

Distribution reference_member(const DistributionSpec& spec) {
  if (!spec.is_composite()) return spec.bind();
  return spec.bind(default_start(spec, Eigen::ArrayXd()));
}

PowerTable type1_table(const std::vector<std::pair<std::string, DistributionSpec>>& nulls,
                       const std::vector<double>& alphas, double n, int B,
                       std::uint64_t seed) {
  PowerTable table;
  RngStream root(seed);
  for (std::size_t i = 0; i < nulls.size(); ++i) {
    const auto& [label, null_spec] = nulls[i];
    const Distribution f1 = reference_member(null_spec);
    const std::uint64_t cell_seed = root.substream(i).key();
    for (double alpha : alphas) {
      auto results = run_power_cell(null_spec, f1, {Method::RG}, n, false, alpha, B,
                                    /*B_inner=*/0, cell_seed);
      const PowerResult& pr = results[Method::RG];
      table.rows.push_back(
          PowerRow{label, alpha, "RG", pr.power, pr.se, B, n, alpha, seed});
    }
  }
  return table;
}

}  // namespace chisqalt
