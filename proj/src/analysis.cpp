#include "qcs/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "qcs/thresholds.hpp"
#include "qcs/version.hpp"

namespace qcs::analysis {

namespace {

constexpr double kLn2 = M_LN2;

// Components of the split average: (n_reject, q(n_reject)) pairs.
// Binomial weights below ~1e-19 of the peak are dropped; n_reject = 0 is
// dropped outright since a rejection claim is impossible there and its
// term vanishes.
struct ActiveComponent {
  long long n_reject = 0;
  double weight = 0.0;
};

std::vector<ActiveComponent> active_components(long long total,
                                               SplitModel split) {
  std::vector<ActiveComponent> comps;
  if (split.kind == SplitModel::Kind::FixedEqual) {
    if (total % 2 != 0) {
      throw std::invalid_argument("split: fixed-equal requires an even N");
    }
    comps.push_back({total / 2, 1.0});
    return comps;
  }
  const double log_peak = log_binom_coeff(total, total / 2);
  for (long long r = 1; r <= total; ++r) {
    const double lq = log_binom_coeff(total, r);
    if (log_peak - lq > 45.0) continue;
    comps.push_back({r, std::exp(lq - static_cast<double>(total) * kLn2)});
  }
  return comps;
}

// Shared state for a curve sweep: component weights, per-component
// threshold ranges over the alpha support, breakpoint pieces, and the
// per-piece table index of every component (none of which depend on m).
struct SweepContext {
  long long total = 0;
  const AlphaDistribution* dist = nullptr;
  double quad_tol = 1e-5;

  std::vector<ActiveComponent> comps;
  std::vector<long long> t_lo, t_hi;       // per component
  std::vector<std::size_t> table_offset;   // per component, into flat buffer
  std::size_t table_size = 0;

  std::vector<double> bounds;              // piece boundaries, lo..hi
  std::vector<std::int32_t> piece_index;   // [piece * comps + c] table index
};

SweepContext make_sweep_context(long long total,
                                const AlphaDistribution& dist,
                                SplitModel split, double quad_tol) {
  SweepContext ctx;
  ctx.total = total;
  ctx.dist = &dist;
  ctx.quad_tol = quad_tol;
  ctx.comps = active_components(total, split);

  const double lo = dist.support_lo();
  const double hi = dist.support_hi();

  ctx.t_lo.resize(ctx.comps.size());
  ctx.t_hi.resize(ctx.comps.size());
  ctx.table_offset.resize(ctx.comps.size());
  std::size_t offset = 0;
  for (std::size_t c = 0; c < ctx.comps.size(); ++c) {
    const long long r = ctx.comps[c].n_reject;
    // T is non-increasing in alpha; pad one either side for safety.
    ctx.t_lo[c] = std::max(0ll, allowed_wrong_count(hi, r) - 1);
    ctx.t_hi[c] = std::max(ctx.t_lo[c], allowed_wrong_count(lo, r) + 1);
    ctx.table_offset[c] = offset;
    offset += static_cast<std::size_t>(ctx.t_hi[c] - ctx.t_lo[c] + 1);
  }
  ctx.table_size = offset;

  // Jump points of the reject threshold: alpha = 1 - j/n_reject.
  std::vector<double> points;
  for (const auto& comp : ctx.comps) {
    const double r = static_cast<double>(comp.n_reject);
    const long long j_lo = snapped_floor((1.0 - hi) * r) + 1;
    const long long j_hi = snapped_ceil((1.0 - lo) * r) - 1;
    for (long long j = std::max(1ll, j_lo); j <= j_hi; ++j) {
      const double a = 1.0 - static_cast<double>(j) / r;
      if (a > lo && a < hi) points.push_back(a);
    }
  }
  for (double a : dist.density_breakpoints()) {
    if (a > lo && a < hi) points.push_back(a);
  }
  std::sort(points.begin(), points.end());

  ctx.bounds.push_back(lo);
  for (double a : points) {
    if (a - ctx.bounds.back() > 1e-13) ctx.bounds.push_back(a);
  }
  if (hi - ctx.bounds.back() > 1e-13) {
    ctx.bounds.push_back(hi);
  } else if (ctx.bounds.size() > 1) {
    ctx.bounds.back() = hi;
  } else {
    ctx.bounds.push_back(hi);
  }

  const std::size_t pieces = ctx.bounds.size() - 1;
  ctx.piece_index.resize(pieces * ctx.comps.size());
  for (std::size_t p = 0; p < pieces; ++p) {
    const double mid = 0.5 * (ctx.bounds[p] + ctx.bounds[p + 1]);
    for (std::size_t c = 0; c < ctx.comps.size(); ++c) {
      long long t = allowed_wrong_count(mid, ctx.comps[c].n_reject);
      t = std::clamp(t, ctx.t_lo[c], ctx.t_hi[c]);
      ctx.piece_index[p * ctx.comps.size() + c] =
          static_cast<std::int32_t>(t - ctx.t_lo[c]);
    }
  }
  return ctx;
}

// Fills H[t - t_lo] = sum_n pmf(n; m) * P(Bin(n, 1/2) <= t) for one
// component. Runs in the linear domain with O(1) recurrences in both n
// and t; the accumulated error is absolute (~1e-12), which is all the
// alpha-integral needs. Criterion-grade relative accuracy comes from the
// direct log-domain path in prob_reject.
void fill_reject_table(long long m, long long total, long long n_reject,
                       long long t_lo, long long t_hi, double* out) {
  const long long width = t_hi - t_lo + 1;
  std::fill(out, out + width, 0.0);
  const long long n_accept = total - n_reject;
  const long long n_lo = std::max(0ll, m - n_accept);
  const long long n_hi = std::min(m, n_reject);
  if (n_lo > n_hi) return;

  const double log_denom = log_binom_coeff(total, n_reject);

  // Column seeds at t = t_lo: cdf(n, t) = P(Bin(n,1/2) <= t) and
  // term(n, t) = C(n, t) 2^{-n}.
  double cdfn, termn;
  if (n_lo <= t_lo) {
    cdfn = 1.0;
    termn = (n_lo == t_lo)
                ? std::exp(-static_cast<double>(n_lo) * kLn2)
                : 0.0;
  } else {
    cdfn = binom_tail(n_lo, t_lo).linear();
    termn = std::exp(log_binom_coeff(n_lo, t_lo) -
                     static_cast<double>(n_lo) * kLn2);
  }

  for (long long n = n_lo; n <= n_hi; ++n) {
    const double lpmf = log_binom_coeff(m, n) +
                        log_binom_coeff(total - m, n_reject - n) - log_denom;
    const double pmf = std::exp(lpmf);

    double cdf_t = cdfn;
    double term_t = termn;
    for (long long t = t_lo; t <= t_hi; ++t) {
      out[t - t_lo] += pmf * cdf_t;
      term_t *= t < n ? static_cast<double>(n - t) /
                            static_cast<double>(t + 1)
                      : 0.0;
      cdf_t += term_t;
      if (cdf_t > 1.0) cdf_t = 1.0;
    }

    if (n + 1 > n_hi) break;
    if (n + 1 <= t_lo) {
      cdfn = 1.0;
      termn = (n + 1 == t_lo)
                  ? std::exp(-static_cast<double>(n + 1) * kLn2)
                  : 0.0;
    } else {
      cdfn = std::max(0.0, cdfn - 0.5 * termn);
      termn = termn * static_cast<double>(n + 1) /
              (2.0 * static_cast<double>(n + 1 - t_lo));
    }
  }
}

void fill_all_tables(const SweepContext& ctx, long long m,
                     std::vector<double>& buffer) {
  buffer.resize(ctx.table_size);
  for (std::size_t c = 0; c < ctx.comps.size(); ++c) {
    fill_reject_table(m, ctx.total, ctx.comps[c].n_reject, ctx.t_lo[c],
                      ctx.t_hi[c], buffer.data() + ctx.table_offset[c]);
  }
}

// Gauss-Legendre nodes/weights on [-1, 1], cached per order. Newton
// iteration on the Legendre recurrence.
const std::vector<std::pair<double, double>>& gauss_legendre(int order) {
  static std::map<int, std::vector<std::pair<double, double>>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  std::vector<std::pair<double, double>> rule(order);
  const int half = (order + 1) / 2;
  for (int i = 1; i <= half; ++i) {
    double z = std::cos(M_PI * (i - 0.25) / (order + 0.5));
    double pp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= order; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = order * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 3e-15) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule[i - 1] = {-z, w};
    rule[order - i] = {z, w};
  }
  return cache.emplace(order, std::move(rule)).first->second;
}

double gl_density_mass(const AlphaDistribution& dist, double a, double b,
                       int order) {
  const auto& rule = gauss_legendre(order);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (const auto& [x, w] : rule) {
    sum += w * dist.density(mid + half * x);
  }
  return sum * half;
}

struct MassResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  int doublings = 0;
};

// Node-doubling Gauss-Legendre on one smooth piece, capped at 20
// doublings.
MassResult integrate_density(const AlphaDistribution& dist, double a,
                             double b, double tol) {
  MassResult res;
  double prev = gl_density_mass(dist, a, b, 2);
  for (int d = 1; d <= 20; ++d) {
    const int order = 2 << d;
    const double cur = gl_density_mass(dist, a, b, order);
    res.value = cur;
    res.error = std::abs(cur - prev);
    res.doublings = d;
    if (res.error < tol) return res;
    prev = cur;
  }
  res.converged = false;
  return res;
}

// One m of the curve: walk the pieces, look up the piecewise-constant
// P_ch value, and weight it by the density mass of the piece.
QuadratureResult integrate_cheat_over_alpha(const SweepContext& ctx,
                                            const std::vector<double>& tables,
                                            double* prob_below_threshold,
                                            double threshold) {
  QuadratureResult result;
  const std::size_t n_pieces = ctx.bounds.size() - 1;
  const std::size_t n_comps = ctx.comps.size();
  const double support = ctx.bounds.back() - ctx.bounds.front();

  double total = 0.0, total_comp = 0.0;
  double below = 0.0;
  for (std::size_t p = 0; p < n_pieces; ++p) {
    double s = 0.0, s_comp = 0.0;
    const std::int32_t* idx = ctx.piece_index.data() + p * n_comps;
    for (std::size_t c = 0; c < n_comps; ++c) {
      const double term =
          ctx.comps[c].weight * tables[ctx.table_offset[c] + idx[c]];
      const double t = s + term;
      s_comp += std::abs(s) >= std::abs(term) ? (s - t) + term : (term - t) + s;
      s = t;
    }
    s += s_comp;
    s = std::clamp(s, 0.0, 1.0);
    const double cheat = s * (1.0 - s);

    const double a = ctx.bounds[p];
    const double b = ctx.bounds[p + 1];
    const MassResult mass = integrate_density(
        *ctx.dist, a, b, ctx.quad_tol * (b - a) / support);
    if (!mass.converged) result.converged = false;
    result.max_doublings_used =
        std::max(result.max_doublings_used, mass.doublings);
    result.error_bound += mass.error * 0.25 + 1e-12 * mass.value;

    const double contrib = cheat * mass.value;
    const double t = total + contrib;
    total_comp +=
        std::abs(total) >= std::abs(contrib) ? (total - t) + contrib
                                             : (contrib - t) + total;
    total = t;
    if (prob_below_threshold && cheat < threshold) below += mass.value;
  }
  result.value = std::clamp(total + total_comp, 0.0, 0.25);
  if (prob_below_threshold) *prob_below_threshold = std::min(1.0, below);
  return result;
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

}  // namespace

LogProb binom_tail(long long n, long long t) {
  if (t < 0) return LogProb::zero();
  if (n < 0) throw std::invalid_argument("binom_tail: negative n");
  const long long top = std::min(t, n);
  if (top >= n) return LogProb::one();
  LogSumAccumulator acc;
  const double shift = -static_cast<double>(n) * kLn2;
  for (long long i = 0; i <= top; ++i) {
    acc.add(LogProb::from_log(log_binom_coeff(n, i) + shift));
  }
  return acc.total();
}

LogProb reject_ability(long long n, double alpha, long long n_reject) {
  const long long t = allowed_wrong_count(alpha, n_reject);
  return binom_tail(n, std::min(n, t));
}

LogProb hypergeom_pmf(long long n, long long m, long long n_reject,
                      long long total) {
  if (m < 0 || n_reject < 0 || m > total || n_reject > total) {
    throw std::invalid_argument("hypergeom_pmf: counts out of range");
  }
  if (n < std::max(0ll, m - (total - n_reject)) ||
      n > std::min(m, n_reject)) {
    return LogProb::zero();
  }
  return LogProb::from_log(log_binom_coeff(m, n) +
                           log_binom_coeff(total - m, n_reject - n) -
                           log_binom_coeff(total, n_reject));
}

LogProb prob_reject(long long m, double alpha, long long n_reject,
                    long long total) {
  if (m < 0 || m > total) {
    throw std::invalid_argument("prob_reject: m out of range");
  }
  if (n_reject == 0) return LogProb::zero();
  const long long t = allowed_wrong_count(alpha, n_reject);
  // Below the threshold even an all-wrong record still rejects.
  if (m <= t) return LogProb::one();

  const long long n_lo = std::max(0ll, m - (total - n_reject));
  const long long n_hi = std::min(m, n_reject);
  LogSumAccumulator acc;
  for (long long n = n_lo; n <= n_hi; ++n) {
    acc.add(hypergeom_pmf(n, m, n_reject, total) *
            binom_tail(n, std::min(n, t)));
  }
  return acc.total();
}

LogProb prob_reject_avg(long long m, double alpha, long long total,
                        SplitModel split) {
  if (split.kind == SplitModel::Kind::FixedEqual) {
    if (total % 2 != 0) {
      throw std::invalid_argument("split: fixed-equal requires an even N");
    }
    return prob_reject(m, alpha, total / 2, total);
  }
  LogSumAccumulator acc;
  const double shift = -static_cast<double>(total) * kLn2;
  for (long long r = 1; r <= total; ++r) {
    acc.add(LogProb::from_log(log_binom_coeff(total, r) + shift) *
            prob_reject(m, alpha, r, total));
  }
  return acc.total();
}

LogProb prob_cheat(long long m, double alpha, long long total,
                   SplitModel split) {
  const LogProb p = prob_reject_avg(m, alpha, total, split);
  return p * p.complement();
}

QuadratureResult expected_prob_cheat_full(long long m, long long total,
                                          const AlphaDistribution& alpha_dist,
                                          SplitModel split, double quad_tol) {
  if (quad_tol <= 0.0) {
    throw std::invalid_argument("quad_tol: must be positive");
  }
  if (alpha_dist.kind() == AlphaDistribution::Kind::PointMass) {
    QuadratureResult res;
    res.value = prob_cheat(m, alpha_dist.support_lo(), total, split).linear();
    return res;
  }
  const SweepContext ctx =
      make_sweep_context(total, alpha_dist, split, quad_tol);
  std::vector<double> tables;
  fill_all_tables(ctx, m, tables);
  return integrate_cheat_over_alpha(ctx, tables, nullptr, 0.0);
}

double expected_prob_cheat(long long m, long long total,
                           const AlphaDistribution& alpha_dist,
                           SplitModel split, double quad_tol) {
  return expected_prob_cheat_full(m, total, alpha_dist, split, quad_tol)
      .value;
}

FairnessCurve sup_expected_cheat(long long total,
                                 const AlphaDistribution& alpha_dist,
                                 SplitModel split, double quad_tol,
                                 unsigned threads) {
  if (total < 1) throw std::invalid_argument("n: must be at least 1");
  FairnessCurve curve;
  curve.total = total;
  curve.split = split;
  curve.alpha_dist = alpha_dist;
  curve.quad_tol = quad_tol;
  curve.values.assign(static_cast<std::size_t>(total) + 1, 0.0);

  const bool point = alpha_dist.kind() == AlphaDistribution::Kind::PointMass;
  SweepContext ctx;
  if (!point) ctx = make_sweep_context(total, alpha_dist, split, quad_tol);

  const unsigned n_threads =
      std::min<unsigned>(resolve_threads(threads),
                         static_cast<unsigned>(total) + 1);
  std::vector<std::future<bool>> workers;
  std::atomic<bool> all_converged{true};
  auto run_slice = [&](unsigned slice) {
    std::vector<double> tables;
    bool converged = true;
    for (long long m = slice; m <= total;
         m += static_cast<long long>(n_threads)) {
      if (point) {
        curve.values[static_cast<std::size_t>(m)] =
            prob_cheat(m, alpha_dist.support_lo(), total, split).linear();
      } else {
        fill_all_tables(ctx, m, tables);
        const QuadratureResult r =
            integrate_cheat_over_alpha(ctx, tables, nullptr, 0.0);
        curve.values[static_cast<std::size_t>(m)] = r.value;
        converged = converged && r.converged;
      }
    }
    return converged;
  };
  for (unsigned s = 1; s < n_threads; ++s) {
    workers.push_back(std::async(std::launch::async, run_slice, s));
  }
  if (!run_slice(0)) all_converged = false;
  for (auto& w : workers) {
    if (!w.get()) all_converged = false;
  }
  curve.quadrature_converged = all_converged;

  curve.sup_m = 0;
  curve.sup_value = curve.values[0];
  for (long long m = 1; m <= total; ++m) {
    if (curve.values[static_cast<std::size_t>(m)] > curve.sup_value) {
      curve.sup_value = curve.values[static_cast<std::size_t>(m)];
      curve.sup_m = m;
    }
  }
  return curve;
}

PowerLawFit scaling_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) {
    throw std::invalid_argument("scaling: need at least three points");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (points[i].first == points[j].first) {
        throw std::invalid_argument("scaling: duplicate N in point list");
      }
    }
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(points.size());
  for (const auto& [N, sup] : points) {
    if (N <= 0.0 || sup <= 0.0) {
      throw std::invalid_argument("scaling: points must be positive");
    }
    const double x = std::log(N);
    const double y = std::log(sup);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  PowerLawFit fit;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  double rss = 0.0;
  for (const auto& [N, sup] : points) {
    const double r = std::log(sup) - (fit.intercept + fit.slope * std::log(N));
    rss += r * r;
  }
  fit.residual_norm = std::sqrt(rss);
  return fit;
}

double detection_prob(long long delta_m) {
  if (delta_m < 0) throw std::invalid_argument("delta_m: must be >= 0");
  return 1.0 - std::pow(0.75, static_cast<double>(delta_m));
}

double detection_prob_rotated(long long k_a, double q_a) {
  if (k_a < 0 || q_a < 0.0 || q_a > 1.0) {
    throw std::invalid_argument("detection_prob_rotated: bad arguments");
  }
  return 1.0 - std::pow(0.5, (1.0 - q_a) * static_cast<double>(k_a));
}

double detection_prob_rotated_exact(long long k_a, double q_a) {
  if (k_a < 0 || q_a < 0.0 || q_a > 1.0) {
    throw std::invalid_argument("detection_prob_rotated_exact: bad arguments");
  }
  return 1.0 - std::pow(0.5 * (1.0 + q_a), static_cast<double>(k_a));
}

ChebyshevCheck chebyshev_risk_check(long long total, long long m, double delta,
                                    const AlphaDistribution& alpha_dist,
                                    SplitModel split, double quad_tol) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta: must lie in (0, 1)");
  }
  ChebyshevCheck check;
  check.threshold = delta + delta * delta * delta;

  if (alpha_dist.kind() == AlphaDistribution::Kind::PointMass) {
    const double y =
        prob_cheat(m, alpha_dist.support_lo(), total, split).linear();
    check.expected_cheat = y;
    check.prob_below = y < check.threshold ? 1.0 : 0.0;
  } else {
    const SweepContext ctx =
        make_sweep_context(total, alpha_dist, split, quad_tol);
    std::vector<double> tables;
    fill_all_tables(ctx, m, tables);
    double below = 0.0;
    const QuadratureResult r =
        integrate_cheat_over_alpha(ctx, tables, &below, check.threshold);
    check.expected_cheat = r.value;
    check.prob_below = below;
  }
  check.precondition_holds =
      check.expected_cheat <= delta * delta * delta + 1e-12;
  check.bound_satisfied = check.prob_below + 1e-12 >= 1.0 - delta;
  return check;
}

double prob_cheat_strategy_avg(
    long long m, double alpha, long long total, SplitModel split,
    std::span<const std::pair<long long, double>> delta_m_weights) {
  const double miss = prob_reject_avg(m, alpha, total, split)
                          .complement()
                          .linear();
  double sum = 0.0;
  for (const auto& [delta_m, weight] : delta_m_weights) {
    if (delta_m < 0 || delta_m > m) {
      throw std::invalid_argument("delta_m: must lie in [0, m]");
    }
    if (weight < 0.0) {
      throw std::invalid_argument("delta_m weight: must be non-negative");
    }
    sum += weight * miss *
           prob_reject_avg(m - delta_m, alpha, total, split).linear();
  }
  return sum;
}

std::string alpha_dist_label(const AlphaDistribution& dist) {
  std::ostringstream out;
  switch (dist.kind()) {
    case AlphaDistribution::Kind::Uniform:
      out << "uniform[" << dist.support_lo() << "," << dist.support_hi()
          << "]";
      break;
    case AlphaDistribution::Kind::PointMass:
      out << "point[" << dist.support_lo() << "]";
      break;
    case AlphaDistribution::Kind::Tabulated:
      out << "tabulated[" << dist.nodes().size() << " nodes on "
          << dist.support_lo() << "," << dist.support_hi() << "]";
      break;
  }
  return out.str();
}

void write_curve_csv(const FairnessCurve& curve, std::ostream& out) {
  out << "# qcs fairness curve, version " << kVersion << "\n";
  out << "# n=" << curve.total << " split=" << curve.split.name()
      << " alpha=" << alpha_dist_label(curve.alpha_dist)
      << " quad_tol=" << curve.quad_tol << "\n";
  out << "m,expected_cheat_probability\n";
  char row[64];
  for (std::size_t m = 0; m < curve.values.size(); ++m) {
    std::snprintf(row, sizeof(row), "%zu,%.12e\n", m, curve.values[m]);
    out << row;
  }
}

std::string curve_summary_json(const FairnessCurve& curve) {
  nlohmann::json alpha;
  alpha["kind"] = curve.alpha_dist.kind() == AlphaDistribution::Kind::Uniform
                      ? "uniform"
                  : curve.alpha_dist.kind() == AlphaDistribution::Kind::PointMass
                      ? "point"
                      : "tabulated";
  alpha["lo"] = curve.alpha_dist.support_lo();
  alpha["hi"] = curve.alpha_dist.support_hi();
  if (curve.alpha_dist.kind() == AlphaDistribution::Kind::Tabulated) {
    alpha["nodes"] = curve.alpha_dist.nodes();
    alpha["densities"] = curve.alpha_dist.node_densities();
  }

  nlohmann::json doc;
  doc["version"] = std::string(kVersion);
  doc["n"] = curve.total;
  doc["split"] = curve.split.name();
  doc["alpha"] = alpha;
  doc["quad_tol"] = curve.quad_tol;
  doc["quadrature_converged"] = curve.quadrature_converged;
  doc["sup"] = {{"m", curve.sup_m}, {"value", curve.sup_value}};
  doc["values"] = curve.values;
  return doc.dump(2);
}

}  // namespace qcs::analysis
