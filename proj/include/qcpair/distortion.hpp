/**
 * @file distortion.hpp
 * @brief Empirical quasisymmetric / quasi-Möbius distortion profiles,
 *        quasicircle constants and the pair verdict.
 */
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "qcpair/geom.hpp"
#include "qcpair/metric.hpp"
#include "qcpair/util.hpp"

namespace qcpair {

/// Distance oracle on sample indices.
using IndexMetric = std::function<double(std::size_t, std::size_t)>;

inline IndexMetric point_metric(std::vector<ExtPoint> pts, Metric m) {
  return [pts = std::move(pts), m](std::size_t i, std::size_t j) { return distance(pts[i], pts[j], m); };
}

inline IndexMetric table_metric(Matrix M) {
  return [M = std::move(M)](std::size_t i, std::size_t j) { return M[i][j]; };
}

inline constexpr int kMinBinExp = -10;
inline constexpr int kMaxBinExp = 10;
inline constexpr int kBinCount = kMaxBinExp - kMinBinExp + 1;

struct DistortionProfile {
  std::vector<double> bins;        ///< 2^k, k = -10..10
  std::vector<double> eta_hat;     ///< max target ratio per bin; 0 where unrealized
  std::vector<double> source_max;  ///< max source ratio realized per bin
  std::vector<std::size_t> counts;
  std::vector<std::array<std::size_t, 4>> witness;  ///< sample indices; triples leave the last slot unused
  std::size_t sample_count = 0;
  std::size_t skipped = 0;
  std::size_t clamped_low = 0, clamped_high = 0;
  int arity = 3;

  DistortionProfile() {
    bins.resize(kBinCount);
    for (int k = 0; k < kBinCount; ++k) bins[k] = std::ldexp(1.0, k + kMinBinExp);
    eta_hat.assign(kBinCount, 0.0);
    source_max.assign(kBinCount, 0.0);
    counts.assign(kBinCount, 0);
    witness.assign(kBinCount, {0, 0, 0, 0});
  }

  static int bin_of(double t) {
    const double e = std::round(std::log2(t));
    return static_cast<int>(std::clamp(e, static_cast<double>(kMinBinExp), static_cast<double>(kMaxBinExp))) -
           kMinBinExp;
  }

  bool realized(int k) const { return counts[k] > 0; }

  /// Running max over realized bins from small to large ratios.
  std::vector<double> envelope() const {
    std::vector<double> env(kBinCount, 0.0);
    double run = 0.0;
    for (int k = 0; k < kBinCount; ++k) {
      if (realized(k)) run = std::max(run, eta_hat[k]);
      env[k] = run;
    }
    return env;
  }

  /// Envelope value in the bin containing t.
  double at(double t) const { return envelope()[bin_of(t)]; }

  void record(double src, double tgt, const std::array<std::size_t, 4>& w) {
    if (src < std::ldexp(1.0, kMinBinExp) / std::sqrt(2.0)) ++clamped_low;
    if (src > std::ldexp(1.0, kMaxBinExp) * std::sqrt(2.0)) ++clamped_high;
    const int k = bin_of(src);
    ++counts[k];
    ++sample_count;
    if (tgt > eta_hat[k] || counts[k] == 1) {
      eta_hat[k] = tgt;
      witness[k] = w;
    }
    source_max[k] = std::max(source_max[k], src);
  }

  void merge(const DistortionProfile& o) {
    for (int k = 0; k < kBinCount; ++k) {
      if (o.counts[k] == 0) continue;
      if (counts[k] == 0 || o.eta_hat[k] > eta_hat[k]) {
        eta_hat[k] = o.eta_hat[k];
        witness[k] = o.witness[k];
      }
      source_max[k] = std::max(source_max[k], o.source_max[k]);
      counts[k] += o.counts[k];
    }
    sample_count += o.sample_count;
    skipped += o.skipped;
    clamped_low += o.clamped_low;
    clamped_high += o.clamped_high;
  }

  /// Least-squares slope of log eta_hat against log t over the top realized bins.
  double end_slope(int top = 3) const {
    std::vector<std::pair<double, double>> pts;
    for (int k = kBinCount - 1; k >= 0 && static_cast<int>(pts.size()) < top; --k)
      if (realized(k) && eta_hat[k] > 0) pts.emplace_back(std::log(bins[k]), std::log(eta_hat[k]));
    if (pts.size() < 2) return 0.0;
    double mx = 0, my = 0;
    for (auto [x, y] : pts) {
      mx += x;
      my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxy = 0, sxx = 0;
    for (auto [x, y] : pts) {
      sxy += (x - mx) * (y - my);
      sxx += (x - mx) * (x - mx);
    }
    return sxx > 0 ? sxy / sxx : 0.0;
  }
};

struct ProfileOptions {
  std::size_t budget = 200000;
  std::uint64_t seed = 0;
};

namespace detail {

inline constexpr std::size_t kChunk = 16384;

/// Count of ordered tuples of `arity` distinct indices out of n, saturating.
inline double ordered_tuples(std::size_t n, int arity) {
  double c = 1.0;
  for (int k = 0; k < arity; ++k) c *= static_cast<double>(n) - k;
  return c;
}

/// Structured dyadic tuples: consecutive index gaps that are powers of two.
inline std::vector<std::array<std::size_t, 4>> dyadic_tuples(std::size_t n, int arity, std::size_t cap) {
  std::vector<std::array<std::size_t, 4>> out;
  std::vector<std::size_t> pow2;
  for (std::size_t p = 1; p < n; p *= 2) pow2.push_back(p);
  const std::size_t m = pow2.size();
  const std::size_t per_base = arity == 3 ? m * m * 2 : m * m * m;
  const std::size_t stride = std::max<std::size_t>(1, n * per_base / std::max<std::size_t>(cap, 1));
  for (std::size_t a = 0; a < n && out.size() < cap; a += stride) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        if (arity == 3) {
          // c on either side of a, b ahead of a
          out.push_back({a, (a + pow2[i]) % n, (a + n - pow2[j] % n) % n, 0});
          out.push_back({a, (a + pow2[i]) % n, (a + pow2[i] + pow2[j]) % n, 0});
        } else {
          for (std::size_t k = 0; k < m; ++k) {
            const std::size_t b = (a + pow2[i]) % n, c = (b + pow2[j]) % n, d = (c + pow2[k]) % n;
            out.push_back({a, b, c, d});
          }
        }
        if (out.size() >= cap) return out;
      }
  }
  return out;
}

template <class Eval>
DistortionProfile run_profile(std::size_t n, int arity, const ProfileOptions& opt, Eval&& eval) {
  DistortionProfile total;
  total.arity = arity;
  const double all = ordered_tuples(n, arity);
  std::vector<std::array<std::size_t, 4>> fixed;
  std::size_t random_count = 0;
  if (all <= static_cast<double>(opt.budget)) {
    std::array<std::size_t, 4> t{0, 0, 0, 0};
    std::function<void(int)> rec = [&](int depth) {
      if (depth == arity) {
        fixed.push_back(t);
        return;
      }
      for (std::size_t i = 0; i < n; ++i) {
        bool used = false;
        for (int d = 0; d < depth; ++d) used |= (t[d] == i);
        if (used) continue;
        t[depth] = i;
        rec(depth + 1);
      }
    };
    rec(0);
  } else {
    fixed = dyadic_tuples(n, arity, opt.budget / 2);
    random_count = opt.budget - fixed.size();
  }

  const std::size_t fixed_chunks = (fixed.size() + kChunk - 1) / kChunk;
  const std::size_t random_chunks = (random_count + kChunk - 1) / kChunk;
  std::vector<DistortionProfile> parts(fixed_chunks + random_chunks);
  parallel_for(parts.size(), [&](std::size_t c) {
    DistortionProfile& p = parts[c];
    p.arity = arity;
    if (c < fixed_chunks) {
      const std::size_t end = std::min(fixed.size(), (c + 1) * kChunk);
      for (std::size_t s = c * kChunk; s < end; ++s) eval(fixed[s], p);
    } else {
      const std::size_t rc = c - fixed_chunks;
      std::seed_seq seq{opt.seed, static_cast<std::uint64_t>(rc), static_cast<std::uint64_t>(arity)};
      std::mt19937_64 rng(seq);
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      const std::size_t count = std::min(kChunk, random_count - rc * kChunk);
      for (std::size_t s = 0; s < count; ++s) {
        std::array<std::size_t, 4> t{0, 0, 0, 0};
        for (int d = 0; d < arity; ++d) {
          bool fresh;
          do {
            t[d] = pick(rng);
            fresh = true;
            for (int e = 0; e < d; ++e) fresh &= (t[e] != t[d]);
          } while (!fresh);
        }
        eval(t, p);
      }
    }
  });
  for (const auto& p : parts) total.merge(p);
  return total;
}

}  // namespace detail

/**
 * Quasisymmetric profile of the sampled map i -> i between (samples, d_src)
 * and (samples, d_tgt): for triples (a,b,c), t = d_src(a,b)/d_src(a,c) is
 * binned and the max of d_tgt(a,b)/d_tgt(a,c) recorded.
 */
inline DistortionProfile qs_profile(std::size_t n, const IndexMetric& d_src, const IndexMetric& d_tgt,
                                    const ProfileOptions& opt = {}) {
  require(n >= 3, ErrorCode::TooFewSamples, "quasisymmetric profile needs at least 3 samples");
  return detail::run_profile(n, 3, opt, [&](const std::array<std::size_t, 4>& t, DistortionProfile& p) {
    const double sab = d_src(t[0], t[1]), sac = d_src(t[0], t[2]);
    const double tab = d_tgt(t[0], t[1]), tac = d_tgt(t[0], t[2]);
    if (!(sab > 0) || !(sac > 0) || !(tab > 0) || !(tac > 0) || !std::isfinite(sab / sac) ||
        !std::isfinite(tab / tac)) {
      ++p.skipped;
      return;
    }
    p.record(sab / sac, tab / tac, t);
  });
}

/// Quasi-Möbius profile: cross-ratios of quadruples on both sides.
inline DistortionProfile qm_profile(std::size_t n, const IndexMetric& d_src, const IndexMetric& d_tgt,
                                    const ProfileOptions& opt = {}) {
  require(n >= 4, ErrorCode::TooFewSamples, "quasi-Möbius profile needs at least 4 samples");
  auto cr = [](const IndexMetric& d, const std::array<std::size_t, 4>& q) {
    return d(q[0], q[2]) * d(q[1], q[3]) / (d(q[0], q[3]) * d(q[1], q[2]));
  };
  return detail::run_profile(n, 4, opt, [&](const std::array<std::size_t, 4>& q, DistortionProfile& p) {
    const double s = cr(d_src, q), t = cr(d_tgt, q);
    if (!(s > 0) || !(t > 0) || !std::isfinite(s) || !std::isfinite(t)) {
      ++p.skipped;
      return;
    }
    p.record(s, t, q);
  });
}

/// Convenience: profile of a sampled map given as parallel point lists.
inline DistortionProfile qs_profile(const std::vector<ExtPoint>& src, const std::vector<ExtPoint>& tgt,
                                    Metric m_src = Metric::euclidean, Metric m_tgt = Metric::euclidean,
                                    const ProfileOptions& opt = {}) {
  require(src.size() == tgt.size(), ErrorCode::InvalidArgument, "source and target lists differ in length");
  return qs_profile(src.size(), point_metric(src, m_src), point_metric(tgt, m_tgt), opt);
}

inline DistortionProfile qm_profile(const std::vector<ExtPoint>& src, const std::vector<ExtPoint>& tgt,
                                    Metric m_src = Metric::euclidean, Metric m_tgt = Metric::euclidean,
                                    const ProfileOptions& opt = {}) {
  require(src.size() == tgt.size(), ErrorCode::InvalidArgument, "source and target lists differ in length");
  return qm_profile(src.size(), point_metric(src, m_src), point_metric(tgt, m_tgt), opt);
}

/// Boundedness heuristic: eta_hat(1) under the threshold and end-bin log-log slope below 1.5.
inline bool profile_bounded(const DistortionProfile& p, double threshold) {
  const int one = DistortionProfile::bin_of(1.0);
  return p.realized(one) && p.eta_hat[one] < threshold && p.end_slope() < 1.5;
}

// ---------------------------------------------------------------------------
// Increasing real functions

struct QsRatioResult {
  double sup = 0.0;
  double x = 0.0, t = 0.0;
  double sup_inverse = 0.0;  ///< sup of the reciprocal ratio
};

inline double qs_ratio_at(const std::function<double(double)>& F, double x, double t) {
  return (F(x + t) - F(x)) / (F(x) - F(x - t));
}

/// sup over grid (x, t) of (F(x+t)-F(x)) / (F(x)-F(x-t)) with x±t inside [lo, hi].
inline QsRatioResult increasing_qs_ratio(const std::function<double(double)>& F, double lo, double hi, double step) {
  require(hi > lo && step > 0, ErrorCode::InvalidArgument, "need lo < hi and step > 0");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = F(lo + static_cast<double>(i) * step);
  for (std::size_t i = 1; i < n; ++i)
    require(v[i] > v[i - 1], ErrorCode::NotMonotone,
            "F is not strictly increasing near x = " + std::to_string(lo + static_cast<double>(i) * step));
  QsRatioResult r;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const std::size_t kmax = std::min(i, n - 1 - i);
    for (std::size_t k = 1; k <= kmax; ++k) {
      const double q = (v[i + k] - v[i]) / (v[i] - v[i - k]);
      if (q > r.sup) {
        r.sup = q;
        r.x = lo + static_cast<double>(i) * step;
        r.t = static_cast<double>(k) * step;
      }
      r.sup_inverse = std::max(r.sup_inverse, 1.0 / q);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Quasicircles

struct QuasicircleReport {
  double three_point_L = 0.0;
  double min_cross_ratio_delta = kInf;
  std::array<std::size_t, 2> worst_pair{0, 0};
  std::array<std::size_t, 4> worst_quadruple{0, 0, 0, 0};
  std::size_t quadruples_checked = 0;
};

/**
 * Three-point constant over sample pairs, using for each pair the arc with
 * fewer samples (ties: the arc running forward from the first index), and the
 * minimal cross-ratio over cyclically ordered quadruples.
 */
inline QuasicircleReport quasicircle_constants(const std::vector<Complex>& pts, std::size_t quad_budget = 2'000'000,
                                               std::uint64_t seed = 0) {
  const std::size_t n = pts.size();
  require(n >= 8, ErrorCode::TooFewSamples, "quasicircle constants need at least 8 samples");
  QuasicircleReport rep;
  std::vector<double> best(n, 0.0);
  std::vector<std::size_t> best_j(n, 0);
  parallel_for(n, [&](std::size_t i) {
    // forward arc i -> j: interior samples j-i-1; the other arc has n-(j-i)-1
    double diam = 0.0;
    for (std::size_t s = 1; s < n; ++s) {
      const std::size_t j = (i + s) % n;
      for (std::size_t q = 0; q < s; ++q) diam = std::max(diam, std::abs(pts[j] - pts[(i + q) % n]));
      if (s - 1 > n - s - 1) break;  // from here the backward arc has fewer samples; it is handled from j
      if (s - 1 == n - s - 1 && j < i) continue;  // tie: forward arc of the smaller index is used
      const double chord = std::abs(pts[j] - pts[i]);
      if (chord == 0) continue;
      const double L = diam / chord;
      if (L > best[i]) {
        best[i] = L;
        best_j[i] = j;
      }
    }
  });
  for (std::size_t i = 0; i < n; ++i)
    if (best[i] > rep.three_point_L) {
      rep.three_point_L = best[i];
      rep.worst_pair = {i, best_j[i]};
    }

  auto consider = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
    const double den = std::abs(pts[a] - pts[d]) * std::abs(pts[b] - pts[c]);
    if (den == 0) return;
    const double v = std::abs(pts[a] - pts[c]) * std::abs(pts[b] - pts[d]) / den;
    ++rep.quadruples_checked;
    if (v < rep.min_cross_ratio_delta) {
      rep.min_cross_ratio_delta = v;
      rep.worst_quadruple = {a, b, c, d};
    }
  };
  const double total = static_cast<double>(n) * (n - 1) * (n - 2) * (n - 3) / 24.0;
  if (total <= static_cast<double>(quad_budget)) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        for (std::size_t c = b + 1; c < n; ++c)
          for (std::size_t d = c + 1; d < n; ++d) consider(a, b, c, d);
  } else {
    // adjacent-gap quadruples carry the small cross-ratios; add seeded random ones
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t g = 1; g < n / 3; ++g) consider(a, (a + 1) % n, (a + 1 + g) % n, (a + 2 + g) % n);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    while (rep.quadruples_checked < quad_budget) {
      std::array<std::size_t, 4> q{pick(rng), pick(rng), pick(rng), pick(rng)};
      std::sort(q.begin(), q.end());
      if (q[0] == q[1] || q[1] == q[2] || q[2] == q[3]) continue;
      consider(q[0], q[1], q[2], q[3]);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Pair verdict

struct PairVerdict {
  DistortionProfile profile;
  bool bounded_at_scale = false;
  double threshold = 0.0;
  double h = 0.0;
  int connectivity = 16;
  std::size_t samples = 0;
  DensityModel density_model;
  Matrix metric;
};

/**
 * Quasi-Möbius profile of the identity from (samples, d_{V,U}) to (samples, chordal).
 * The flag is advisory and tied to the grid step and sample set.
 */
inline PairVerdict pair_verdict(const Region& U, const Region& V, const std::vector<ExtPoint>& samples,
                                const GridSpec& spec = {}, const ProfileOptions& opt = {}, double threshold = 1e3) {
  require(samples.size() >= 4, ErrorCode::TooFewSamples, "pair verdict needs at least 4 samples");
  PairVerdict v;
  std::vector<Complex> pts;
  for (const auto& s : samples) {
    check_relative_endpoint(U, s);
    pts.push_back(s.value());
  }
  const MetricGrid grid = relative_grid(U, V, spec, std::nullopt, pts);
  v.metric = metric_table(grid, samples);
  v.density_model = grid.density_model();
  v.profile = qm_profile(samples.size(), table_metric(v.metric), point_metric(samples, Metric::chordal), opt);
  v.threshold = threshold;
  v.bounded_at_scale = profile_bounded(v.profile, threshold);
  v.h = spec.h;
  v.connectivity = spec.connectivity;
  v.samples = samples.size();
  return v;
}

}  // namespace qcpair
