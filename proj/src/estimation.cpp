#include "chisqalt/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "chisqalt/binning.hpp"
#include "chisqalt/rng.hpp"

namespace chisqalt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kProbFloor = 1e-12;

double guarded(double v) { return std::isnan(v) ? kInf : v; }

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const Eigen::ArrayXd&)>& fn,
                             const Eigen::ArrayXd& start, const NelderMeadOptions& options) {
  const Eigen::Index p = start.size();
  const int max_iter = options.max_iterations > 0
                           ? options.max_iterations
                           : 500 * static_cast<int>(std::max<Eigen::Index>(p, 1));
  long evals = 0;
  auto eval = [&](const Eigen::ArrayXd& x) {
    ++evals;
    return guarded(fn(x));
  };

  std::vector<Eigen::ArrayXd> xs(p + 1, start);
  std::vector<double> fs(p + 1);
  for (Eigen::Index i = 0; i < p; ++i) xs[static_cast<std::size_t>(i) + 1][i] += options.step;
  for (std::size_t i = 0; i < xs.size(); ++i) fs[i] = eval(xs[i]);

  std::vector<std::size_t> order(xs.size());
  bool converged = false;
  for (int iter = 0; iter < max_iter; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];
    if (std::isfinite(fs[best]) && fs[worst] - fs[best] <= options.tol) {
      converged = true;
      break;
    }

    Eigen::ArrayXd centroid = Eigen::ArrayXd::Zero(p);
    for (std::size_t i = 0; i < order.size(); ++i)
      if (order[i] != worst) centroid += xs[order[i]];
    centroid /= static_cast<double>(p);

    Eigen::ArrayXd reflected = centroid + (centroid - xs[worst]);
    double fr = eval(reflected);
    if (fr < fs[best]) {
      Eigen::ArrayXd expanded = centroid + 2.0 * (reflected - centroid);
      double fe = eval(expanded);
      if (fe < fr) { xs[worst] = expanded; fs[worst] = fe; }
      else { xs[worst] = reflected; fs[worst] = fr; }
    } else if (fr < fs[second]) {
      xs[worst] = reflected;
      fs[worst] = fr;
    } else {
      const bool outside = fr < fs[worst];
      Eigen::ArrayXd contracted = outside ? centroid + 0.5 * (reflected - centroid)
                                          : centroid + 0.5 * (xs[worst] - centroid);
      double fc = eval(contracted);
      if (fc < (outside ? fr : fs[worst])) {
        xs[worst] = contracted;
        fs[worst] = fc;
      } else {
        for (std::size_t i = 0; i < xs.size(); ++i) {
          if (i == best) continue;
          xs[i] = xs[best] + 0.5 * (xs[i] - xs[best]);
          fs[i] = eval(xs[i]);
        }
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < fs.size(); ++i)
    if (fs[i] < fs[best]) best = i;
  return NelderMeadResult{xs[best], fs[best], converged, evals};
}

namespace {

// Reorder a fully-free two-or-more-component normal mixture so the component
// means increase; other shapes pass through unchanged.
Eigen::ArrayXd canonicalize(const DistributionSpec& family, const Eigen::ArrayXd& theta) {
  if (!family.free_weights() || family.components().size() < 2) return theta;
  const std::size_t m = family.components().size();
  for (const auto& comp : family.components()) {
    if (comp.family != Family::Normal) return theta;
    for (const auto& a : comp.args)
      if (!a.free) return theta;
  }
  struct Comp { double w, mu, sigma; };
  std::vector<Comp> comps(m);
  double wsum = 0.0;
  Eigen::Index next = 0;
  for (std::size_t j = 0; j < m; ++j) {
    double w = (j + 1 < m) ? theta[next++] : 1.0 - wsum;
    wsum += w;
    comps[j].w = w;
    comps[j].mu = theta[next++];
    comps[j].sigma = theta[next++];
  }
  std::stable_sort(comps.begin(), comps.end(),
                   [](const Comp& a, const Comp& b) { return a.mu < b.mu; });
  Eigen::ArrayXd out(theta.size());
  next = 0;
  for (std::size_t j = 0; j < m; ++j) {
    if (j + 1 < m) out[next++] = comps[j].w;
    out[next++] = comps[j].mu;
    out[next++] = comps[j].sigma;
  }
  return out;
}

// Multi-start driver: the given start plus 4 deterministic perturbations in
// the unconstrained space; best objective wins, ties by restart index.
FitResult multistart_fit(const DistributionSpec& family,
                         const std::function<double(const Eigen::ArrayXd&)>& objective,
                         const Eigen::ArrayXd& start) {
  const int p = family.free_parameter_count();
  if (p < 1) throw std::invalid_argument("fit: family has no free parameters");
  if (start.size() != p) throw std::invalid_argument("fit: start has wrong length");

  Eigen::ArrayXd u0 = family.to_unconstrained(start);
  RngStream perturb(0x5eed5eedULL);  // fixed: fits are deterministic functions

  FitResult best;
  best.objective = kInf;
  long total_evals = 0;
  for (int r = 0; r < 5; ++r) {
    Eigen::ArrayXd u = u0;
    if (r > 0)
      for (Eigen::Index i = 0; i < u.size(); ++i) u[i] += perturb.uniform(-1.0, 1.0);
    NelderMeadResult nm = nelder_mead(objective, u);
    total_evals += nm.evaluations;
    if (nm.converged && nm.value < best.objective) {
      best.theta = canonicalize(family, family.from_unconstrained(nm.x));
      best.objective = nm.value;
      best.converged = true;
    }
  }
  if (!best.converged) throw std::runtime_error("fit: no restart converged");
  // polish: a short, tight descent from the winner sharpens exact-fit optima
  NelderMeadOptions polish;
  polish.tol = 1e-12;
  polish.step = 0.05;
  NelderMeadResult fin = nelder_mead(objective, family.to_unconstrained(best.theta), polish);
  total_evals += fin.evaluations;
  if (fin.value < best.objective) {
    best.theta = canonicalize(family, family.from_unconstrained(fin.x));
    best.objective = fin.value;
  }
  best.evaluations = total_evals;
  return best;
}

Eigen::ArrayXd floored_probs(const Distribution& dist, const Eigen::ArrayXd& edges,
                             bool* floored) {
  Eigen::ArrayXd probs = bin_probabilities(dist, edges);
  if ((probs < kProbFloor).any()) {
    if (floored) *floored = true;
    probs = probs.max(kProbFloor);
  }
  return probs;
}

}  // namespace

FitResult minimum_chisq(const DistributionSpec& family, const Eigen::ArrayXd& counts,
                        const Eigen::ArrayXd& edges, StatisticKind kind,
                        const Eigen::ArrayXd& start, double expected_total) {
  const int p = family.free_parameter_count();
  const Eigen::Index k = counts.size();
  if (edges.size() != k + 1) throw std::invalid_argument("minimum_chisq: edges/counts mismatch");
  if (k < p + 1) throw std::invalid_argument("minimum_chisq: need k >= p + 1 bins");
  const double n = expected_total > 0.0 ? expected_total : counts.sum();

  bool floored = false;
  auto objective = [&](const Eigen::ArrayXd& u) -> double {
    try {
      Distribution dist = family.bind(family.from_unconstrained(u));
      Eigen::ArrayXd probs = floored_probs(dist, edges, &floored);
      return chisq_stat(kind, counts, n * probs);
    } catch (const std::exception&) {
      return kInf;
    }
  };
  FitResult fit = multistart_fit(family, objective, start);
  floored = false;  // re-evaluate to see whether the optimum itself is floored
  fit.objective = objective(family.to_unconstrained(fit.theta));
  fit.floored = floored;
  return fit;
}

FitResult binned_mle(const DistributionSpec& family, const Eigen::ArrayXd& counts,
                     const Eigen::ArrayXd& edges, const Eigen::ArrayXd& start) {
  const int p = family.free_parameter_count();
  const Eigen::Index k = counts.size();
  if (edges.size() != k + 1) throw std::invalid_argument("binned_mle: edges/counts mismatch");
  if (k < p + 1) throw std::invalid_argument("binned_mle: need k >= p + 1 bins");
  if ((counts > 0.0).count() < 2)
    throw std::invalid_argument("binned_mle: need at least two occupied bins");

  bool floored = false;
  auto objective = [&](const Eigen::ArrayXd& u) -> double {
    try {
      Distribution dist = family.bind(family.from_unconstrained(u));
      Eigen::ArrayXd probs = floored_probs(dist, edges, &floored);
      double ll = 0.0;
      for (Eigen::Index i = 0; i < k; ++i)
        if (counts[i] > 0.0) ll += counts[i] * std::log(probs[i]);
      return -ll;
    } catch (const std::exception&) {
      return kInf;
    }
  };
  FitResult fit = multistart_fit(family, objective, start);
  floored = false;  // re-evaluate to see whether the optimum itself is floored
  fit.objective = objective(family.to_unconstrained(fit.theta));
  fit.floored = floored;
  return fit;
}

FitResult unbinned_mle(const DistributionSpec& family, const Eigen::ArrayXd& data,
                       const Eigen::ArrayXd& start) {
  if (data.size() == 0) throw std::invalid_argument("unbinned_mle: data is empty");
  const int p = family.free_parameter_count();
  if (p < 1) throw std::invalid_argument("unbinned_mle: family has no free parameters");

  // closed forms for plain normal / exponential with all parameters free
  if (family.components().size() == 1 && !family.truncated()) {
    const SpecAtom& atom = family.components()[0];
    const bool all_free = std::all_of(atom.args.begin(), atom.args.end(),
                                      [](const SpecArg& a) { return a.free; });
    if (atom.family == Family::Normal && all_free) {
      const double mean = data.mean();
      const double sd = std::sqrt((data - mean).square().sum() / static_cast<double>(data.size()));
      if (!(sd > 0.0)) throw std::runtime_error("unbinned_mle: degenerate sample (zero spread)");
      FitResult fit;
      fit.theta = Eigen::ArrayXd(2);
      fit.theta << mean, sd;
      fit.objective = -family.bind(fit.theta).log_density(data).sum();
      fit.converged = true;
      fit.evaluations = 1;
      return fit;
    }
    if (atom.family == Family::Exponential && all_free) {
      if ((data < 0.0).any()) throw std::runtime_error("unbinned_mle: data outside family support");
      const double mean = data.mean();
      if (!(mean > 0.0)) throw std::runtime_error("unbinned_mle: degenerate sample");
      FitResult fit;
      fit.theta = Eigen::ArrayXd(1);
      fit.theta << 1.0 / mean;
      fit.objective = -family.bind(fit.theta).log_density(data).sum();
      fit.converged = true;
      fit.evaluations = 1;
      return fit;
    }
  }

  auto objective = [&](const Eigen::ArrayXd& u) -> double {
    try {
      Distribution dist = family.bind(family.from_unconstrained(u));
      double ll = dist.log_density(data).sum();
      return std::isfinite(ll) ? -ll : kInf;
    } catch (const std::exception&) {
      return kInf;
    }
  };
  return multistart_fit(family, objective, start);
}

FitResult unbinned_mle(const DistributionSpec& family, const Eigen::ArrayXd& data) {
  return unbinned_mle(family, data, default_start(family, data));
}

// ---------------------------------------------------------------------------
// Starting values
// ---------------------------------------------------------------------------

namespace {

struct Moments {
  double mean = 0.0, sd = 1.0, min = 0.0, max = 1.0;
  bool valid = false;
};

Moments moments_of(const Eigen::ArrayXd& data) {
  Moments m;
  if (data.size() == 0) return m;
  m.mean = data.mean();
  m.sd = data.size() > 1
             ? std::sqrt((data - m.mean).square().sum() / static_cast<double>(data.size()))
             : 1.0;
  if (!(m.sd > 0.0)) m.sd = 1.0;
  m.min = data.minCoeff();
  m.max = data.maxCoeff();
  m.valid = true;
  return m;
}

// full parameter guess for one atom family from sample moments
Eigen::ArrayXd atom_guess(Family f, const Moments& m) {
  Eigen::ArrayXd g(family_arity(f));
  switch (f) {
    case Family::Uniform:
      if (m.valid && m.min < m.max) {
        double pad = 0.05 * (m.max - m.min);
        g << m.min - pad, m.max + pad;
      } else {
        g << 0.0, 1.0;
      }
      break;
    case Family::Normal:
      g << (m.valid ? m.mean : 0.0), (m.valid ? m.sd : 1.0);
      break;
    case Family::StudentT:
      g << 5.0;
      break;
    case Family::Beta: {
      double mean = m.valid ? std::clamp(m.mean, 0.05, 0.95) : 0.5;
      double var = m.valid ? std::clamp(m.sd * m.sd, 1e-4, mean * (1.0 - mean) * 0.99) : 1.0 / 12.0;
      double c = mean * (1.0 - mean) / var - 1.0;
      c = std::max(c, 0.1);
      g << std::max(mean * c, 0.05), std::max((1.0 - mean) * c, 0.05);
      break;
    }
    case Family::Gamma: {
      double mean = m.valid && m.mean > 0.0 ? m.mean : 1.0;
      double sd = m.valid ? m.sd : 1.0;
      double shape = std::max((mean / sd) * (mean / sd), 0.05);
      g << shape, std::max(shape / mean, 1e-6);
      break;
    }
    case Family::Exponential:
      g << (m.valid && m.mean > 0.0 ? 1.0 / m.mean : 1.0);
      break;
    case Family::Linear:
      g << (m.valid ? std::clamp(6.0 * (m.mean - 0.5), -0.95, 0.95) : 0.0);
      break;
  }
  return g;
}

Eigen::ArrayXd start_from(const DistributionSpec& family, const Eigen::ArrayXd& sorted_data) {
  const std::size_t m = family.components().size();
  const Moments overall = moments_of(sorted_data);
  std::vector<double> theta;
  for (std::size_t j = 0; j < m; ++j) {
    if (family.free_weights() && j + 1 < m)
      theta.push_back(1.0 / static_cast<double>(m));

    // component moments from the j-th quantile block when there are several
    Moments block = overall;
    if (m > 1 && sorted_data.size() >= static_cast<Eigen::Index>(2 * m)) {
      Eigen::Index n = sorted_data.size();
      Eigen::Index lo = static_cast<Eigen::Index>(j) * n / static_cast<Eigen::Index>(m);
      Eigen::Index hi = static_cast<Eigen::Index>(j + 1) * n / static_cast<Eigen::Index>(m);
      block = moments_of(sorted_data.segment(lo, hi - lo));
      block.sd = std::max(block.sd, 0.1 * overall.sd);
    }
    const SpecAtom& atom = family.components()[j];
    Eigen::ArrayXd guess = atom_guess(atom.family, block);
    for (std::size_t i = 0; i < atom.args.size(); ++i)
      if (atom.args[i].free) theta.push_back(guess[static_cast<Eigen::Index>(i)]);
  }
  return Eigen::Map<const Eigen::ArrayXd>(theta.data(), static_cast<Eigen::Index>(theta.size()));
}

}  // namespace

Eigen::ArrayXd default_start(const DistributionSpec& family, const Eigen::ArrayXd& data) {
  Eigen::ArrayXd sorted = data;
  std::sort(sorted.begin(), sorted.end());
  return start_from(family, sorted);
}

Eigen::ArrayXd default_start_binned(const DistributionSpec& family,
                                    const Eigen::ArrayXd& counts,
                                    const Eigen::ArrayXd& edges) {
  // midpoint pseudo-sample; infinite outer edges borrow the adjacent width
  const Eigen::Index k = counts.size();
  Eigen::ArrayXd lo_edges = edges;
  if (k >= 2) {
    if (std::isinf(lo_edges[0])) lo_edges[0] = edges[1] - (edges[2] - edges[1]);
    if (std::isinf(lo_edges[k])) lo_edges[k] = edges[k - 1] + (edges[k - 1] - edges[k - 2]);
  }
  double total = counts.sum();
  if (total <= 0.0) return start_from(family, Eigen::ArrayXd());
  const double scale = total > 10000.0 ? 10000.0 / total : 1.0;
  std::vector<double> pseudo;
  for (Eigen::Index i = 0; i < k; ++i) {
    long reps = std::lround(counts[i] * scale);
    double mid = 0.5 * (lo_edges[i] + lo_edges[i + 1]);
    for (long r = 0; r < reps; ++r) pseudo.push_back(mid);
  }
  if (pseudo.empty()) pseudo.push_back(0.5 * (lo_edges[0] + lo_edges[k]));
  Eigen::ArrayXd data = Eigen::Map<const Eigen::ArrayXd>(pseudo.data(), static_cast<Eigen::Index>(pseudo.size()));
  return default_start(family, data);
}

}  // namespace chisqalt
