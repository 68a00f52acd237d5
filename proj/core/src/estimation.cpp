#include "dgbfit/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dgbfit/gof.hpp"
#include "dgbfit/uncertainty.hpp"

#include "accum.hpp"

namespace dgbfit {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-16;
constexpr double kMaxStep = 1e6;
constexpr double kSimplexDiameterTol = 1e-10;
constexpr int kSimplexMaxIters = 4000;
constexpr double kLogLikTieTol = 1e-9;   // normalized scale
constexpr double kInteriorMargin = 1e-6;

// Data enters the likelihood only through N, the total weight and the
// weighted means of log r and log(N+1-r).
struct SeriesStats {
  int n = 0;
  double total = 0.0;
  double mean_log_rank = 0.0;
  double mean_log_rev = 0.0;
  std::vector<double> log_rank;  // index r-1
  std::vector<double> log_rev;
};

SeriesStats compute_stats(const RankSizeSeries& series) {
  SeriesStats st;
  st.n = series.size();
  st.log_rank.resize(static_cast<std::size_t>(st.n));
  st.log_rev.resize(static_cast<std::size_t>(st.n));
  for (int r = 1; r <= st.n; ++r) {
    st.log_rank[static_cast<std::size_t>(r - 1)] =
        std::log(static_cast<double>(r));
    st.log_rev[static_cast<std::size_t>(r - 1)] =
        std::log(static_cast<double>(st.n + 1 - r));
  }
  detail::KahanSum total, s1, s2;
  for (const auto& e : series.entries) {
    total.add(e.size);
    s1.add(e.size * st.log_rank[static_cast<std::size_t>(e.rank - 1)]);
    s2.add(e.size * st.log_rev[static_cast<std::size_t>(e.rank - 1)]);
  }
  st.total = total.value();
  st.mean_log_rank = s1.value() / st.total;
  st.mean_log_rev = s2.value() / st.total;
  return st;
}

struct Moments {
  double log_norm = 0.0;
  double e_log_rank = 0.0;
  double e_log_rev = 0.0;
  double var_log_rank = 0.0;
  double var_log_rev = 0.0;
  double cov = 0.0;
};

// Normalized objective: ll(a, b) / total = b*m2 - a*m1 + log A. Holds a
// scratch buffer so repeated evaluations do not allocate.
class Objective {
public:
  explicit Objective(const SeriesStats& st)
      : st_(st), lw_(static_cast<std::size_t>(st.n)) {}

  double value(double a, double b) const {
    return b * st_.mean_log_rev - a * st_.mean_log_rank - log_partition(a, b);
  }

  std::pair<double, double> grad(double a, double b) const {
    const Moments m = moments(a, b);
    return {m.e_log_rank - st_.mean_log_rank,
            st_.mean_log_rev - m.e_log_rev};
  }

  Moments moments(double a, double b) const {
    fill_log_weights(a, b);
    const double max_lw = *std::max_element(lw_.begin(), lw_.end());
    detail::KahanSum s0, s1, s2;
    for (std::size_t i = 0; i < lw_.size(); ++i) {
      const double w = std::exp(lw_[i] - max_lw);
      s0.add(w);
      s1.add(w * st_.log_rank[i]);
      s2.add(w * st_.log_rev[i]);
    }
    Moments m;
    const double z = s0.value();
    m.log_norm = -(max_lw + std::log(z));
    m.e_log_rank = s1.value() / z;
    m.e_log_rev = s2.value() / z;
    detail::KahanSum v1, v2, c;
    for (std::size_t i = 0; i < lw_.size(); ++i) {
      const double w = std::exp(lw_[i] - max_lw);
      const double d1 = st_.log_rank[i] - m.e_log_rank;
      const double d2 = st_.log_rev[i] - m.e_log_rev;
      v1.add(w * d1 * d1);
      v2.add(w * d2 * d2);
      c.add(w * d1 * d2);
    }
    m.var_log_rank = v1.value() / z;
    m.var_log_rev = v2.value() / z;
    m.cov = c.value() / z;
    return m;
  }

  const SeriesStats& stats() const { return st_; }

private:
  double log_partition(double a, double b) const {
    fill_log_weights(a, b);
    const double max_lw = *std::max_element(lw_.begin(), lw_.end());
    detail::KahanSum s0;
    for (double lw : lw_) s0.add(std::exp(lw - max_lw));
    return max_lw + std::log(s0.value());
  }

  void fill_log_weights(double a, double b) const {
    for (std::size_t i = 0; i < lw_.size(); ++i) {
      lw_[i] = b * st_.log_rev[i] - a * st_.log_rank[i];
    }
  }

  const SeriesStats& st_;
  mutable std::vector<double> lw_;
};

struct Candidate {
  double a = 0.0;
  double b = 0.0;
  double ll = -std::numeric_limits<double>::infinity();  // normalized
  bool converged = false;
  int iters = 0;
};

double inf_norm(double x, double y) {
  return std::max(std::abs(x), std::abs(y));
}

double clamp_to(double v, double clamp) {
  return std::max(-clamp, std::min(clamp, v));
}

// Steepest ascent with backtracking (Armijo) line search, projected onto
// the clamp box. Sets *line_search_failed when no step makes progress.
Candidate gradient_ascent(const Objective& obj, double a0, double b0,
                          const FitConfig& cfg, bool* line_search_failed) {
  *line_search_failed = false;
  Candidate cand;
  cand.a = clamp_to(a0, cfg.param_clamp);
  cand.b = clamp_to(b0, cfg.param_clamp);
  cand.ll = obj.value(cand.a, cand.b);
  auto [ga, gb] = obj.grad(cand.a, cand.b);
  double step = 1.0;

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    cand.iters = iter;
    if (inf_norm(ga, gb) < cfg.grad_tol) {
      cand.converged = true;
      return cand;
    }
    bool accepted = false;
    for (double alpha = step; alpha >= kMinStep; alpha *= 0.5) {
      const double na = clamp_to(cand.a + alpha * ga, cfg.param_clamp);
      const double nb = clamp_to(cand.b + alpha * gb, cfg.param_clamp);
      const double da = na - cand.a;
      const double db = nb - cand.b;
      if (da == 0.0 && db == 0.0) continue;  // pinned against the box
      const double trial = obj.value(na, nb);
      if (std::isfinite(trial) &&
          trial >= cand.ll + kArmijo * (ga * da + gb * db)) {
        cand.a = na;
        cand.b = nb;
        cand.ll = trial;
        std::tie(ga, gb) = obj.grad(cand.a, cand.b);
        step = std::min(alpha * 2.0, kMaxStep);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      *line_search_failed = true;
      return cand;
    }
  }
  return cand;  // iteration budget exhausted
}

// Nelder-Mead on the negated objective, used when the line search stalls.
// Vertices are clamped into the box; convergence requires the simplex to
// shrink below the diameter tolerance at a point strictly inside the box,
// so fits pinned against the clamp stay flagged as non-converged.
Candidate nelder_mead(const Objective& obj, double a0, double b0,
                      const FitConfig& cfg) {
  struct Vertex {
    double a, b, ll;
  };
  auto make = [&](double a, double b) {
    a = clamp_to(a, cfg.param_clamp);
    b = clamp_to(b, cfg.param_clamp);
    return Vertex{a, b, obj.value(a, b)};
  };
  const double spread = 0.25;
  std::array<Vertex, 3> v = {make(a0, b0), make(a0 + spread, b0),
                             make(a0, b0 + spread)};

  Candidate cand;
  int iter = 0;
  for (; iter < kSimplexMaxIters; ++iter) {
    std::sort(v.begin(), v.end(),
              [](const Vertex& x, const Vertex& y) { return x.ll > y.ll; });
    double diameter = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        diameter = std::max(diameter, std::hypot(v[static_cast<std::size_t>(i)].a - v[static_cast<std::size_t>(j)].a,
                                                 v[static_cast<std::size_t>(i)].b - v[static_cast<std::size_t>(j)].b));
      }
    }
    if (diameter < kSimplexDiameterTol) break;

    const double ca = (v[0].a + v[1].a) / 2.0;
    const double cb = (v[0].b + v[1].b) / 2.0;
    const Vertex reflected = make(ca + (ca - v[2].a), cb + (cb - v[2].b));
    if (reflected.ll > v[0].ll) {
      const Vertex expanded = make(ca + 2.0 * (ca - v[2].a),
                                   cb + 2.0 * (cb - v[2].b));
      v[2] = expanded.ll > reflected.ll ? expanded : reflected;
    } else if (reflected.ll > v[1].ll) {
      v[2] = reflected;
    } else {
      const Vertex contracted = make(ca + 0.5 * (v[2].a - ca),
                                     cb + 0.5 * (v[2].b - cb));
      if (contracted.ll > v[2].ll) {
        v[2] = contracted;
      } else {
        for (int i = 1; i < 3; ++i) {
          v[static_cast<std::size_t>(i)] =
              make(v[0].a + 0.5 * (v[static_cast<std::size_t>(i)].a - v[0].a),
                   v[0].b + 0.5 * (v[static_cast<std::size_t>(i)].b - v[0].b));
        }
      }
    }
  }

  std::sort(v.begin(), v.end(),
            [](const Vertex& x, const Vertex& y) { return x.ll > y.ll; });
  cand.a = v[0].a;
  cand.b = v[0].b;
  cand.ll = v[0].ll;
  cand.iters = iter;
  const double interior = cfg.param_clamp - kInteriorMargin;
  cand.converged = iter < kSimplexMaxIters &&
                   std::abs(cand.a) < interior && std::abs(cand.b) < interior;
  return cand;
}

// Damped Newton refinement with the analytic 2x2 Hessian
//   H = [[-Var(log r), Cov], [Cov, -Var(log(N+1-r))]].
// Skipped on degenerate ridges where the Hessian is near singular.
void newton_polish(const Objective& obj, const FitConfig& cfg,
                   Candidate* cand) {
  for (int k = 0; k < 8; ++k) {
    const Moments m = obj.moments(cand->a, cand->b);
    const double ga = m.e_log_rank - obj.stats().mean_log_rank;
    const double gb = obj.stats().mean_log_rev - m.e_log_rev;
    if (inf_norm(ga, gb) < 1e-15) break;
    const double det = m.var_log_rank * m.var_log_rev - m.cov * m.cov;
    const double scale = std::max(m.var_log_rank * m.var_log_rev, 1e-300);
    if (det <= 1e-12 * scale) break;
    // solve H * delta = -g
    double da = (m.var_log_rev * ga + m.cov * gb) / det;
    double db = (m.cov * ga + m.var_log_rank * gb) / det;
    bool improved = false;
    for (int halvings = 0; halvings < 20; ++halvings) {
      const double na = clamp_to(cand->a + da, cfg.param_clamp);
      const double nb = clamp_to(cand->b + db, cfg.param_clamp);
      const double trial = obj.value(na, nb);
      if (std::isfinite(trial) && trial >= cand->ll - 1e-12) {
        cand->a = na;
        cand->b = nb;
        cand->ll = trial;
        improved = true;
        break;
      }
      da *= 0.5;
      db *= 0.5;
    }
    if (!improved) break;
    ++cand->iters;
  }
}

}  // namespace

std::vector<std::array<double, 2>> FitConfig::default_restart_grid() {
  std::vector<std::array<double, 2>> grid;
  for (double a : {-1.0, 0.0, 1.0}) {
    for (double b : {-1.0, 0.0, 1.0}) {
      grid.push_back({a, b});
    }
  }
  return grid;
}

void FitConfig::validate() const {
  if (min_units < 1) {
    throw InvalidParameterError("min_units must be at least 1");
  }
  if (!(grad_tol > 0.0) || !(param_clamp > 0.0)) {
    throw InvalidParameterError("tolerances must be strictly positive");
  }
  if (max_iters < 1) {
    throw InvalidParameterError("max_iters must be at least 1");
  }
  if (restart_grid.empty()) {
    throw InvalidParameterError("restart grid must contain at least one start");
  }
}

double log_likelihood(const RankSizeSeries& series, double a, double b) {
  series.validate();
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidParameterError("exponents must be finite");
  }
  const SeriesStats st = compute_stats(series);
  const Objective obj(st);
  return st.total * obj.value(a, b);
}

std::pair<double, double> grad_log_likelihood(const RankSizeSeries& series,
                                              double a, double b) {
  series.validate();
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidParameterError("exponents must be finite");
  }
  const SeriesStats st = compute_stats(series);
  const Objective obj(st);
  auto [ga, gb] = obj.grad(a, b);
  return {st.total * ga, st.total * gb};
}

FitResult fit_mle(const RankSizeSeries& series, const FitConfig& config) {
  config.validate();
  series.validate();
  if (series.size() < config.min_units) {
    throw StratumTooSmallError(series.stratum_id, series.size(),
                               config.min_units);
  }

  const SeriesStats st = compute_stats(series);
  const Objective obj(st);

  std::vector<Candidate> candidates;
  candidates.reserve(config.restart_grid.size());
  bool any_converged = false;
  for (const auto& start : config.restart_grid) {
    bool ls_failed = false;
    Candidate cand = gradient_ascent(obj, start[0], start[1], config,
                                     &ls_failed);
    if (ls_failed && !cand.converged) {
      Candidate fallback = nelder_mead(obj, cand.a, cand.b, config);
      fallback.iters += cand.iters;
      cand = fallback;
    }
    any_converged = any_converged || cand.converged;
    candidates.push_back(cand);
  }

  // Best terminal point; likelihood ties (degenerate ridges) resolve to the
  // smallest-norm maximizer, then lexicographically for full determinism.
  double best_ll = -std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) best_ll = std::max(best_ll, c.ll);
  const Candidate* chosen = nullptr;
  for (const auto& c : candidates) {
    if (c.ll < best_ll - kLogLikTieTol) continue;
    if (chosen == nullptr) {
      chosen = &c;
      continue;
    }
    const double norm_c = c.a * c.a + c.b * c.b;
    const double norm_ch = chosen->a * chosen->a + chosen->b * chosen->b;
    if (norm_c < norm_ch - 1e-15 ||
        (std::abs(norm_c - norm_ch) <= 1e-15 &&
         (c.a < chosen->a || (c.a == chosen->a && c.b < chosen->b)))) {
      chosen = &c;
    }
  }

  Candidate final = *chosen;
  newton_polish(obj, config, &final);

  auto [ga, gb] = obj.grad(final.a, final.b);
  const bool converged =
      inf_norm(ga, gb) < config.grad_tol || final.converged;

  const DgbParams params(final.a, final.b, st.n);
  FitResult result{params,
                   st.total * final.ll,
                   ks_measure(series, params),
                   entropy(params),
                   st.n >= 2 ? uncertainty_percentage(params)
                             : std::numeric_limits<double>::quiet_NaN(),
                   converged,
                   final.iters,
                   static_cast<int>(config.restart_grid.size())};

  if (!converged && !any_converged) {
    throw NonConvergenceError(
        "no restart reached a stationary point for stratum '" +
            series.stratum_id + "' (best point a=" + std::to_string(final.a) +
            ", b=" + std::to_string(final.b) + ")",
        result);
  }
  return result;
}

}  // namespace dgbfit
