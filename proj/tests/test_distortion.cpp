#include <gtest/gtest.h>

#include <random>

#include "qcpair/distortion.hpp"

using namespace qcpair;

namespace {

std::vector<ExtPoint> line_points(int n, double lo, double hi) {
  std::vector<ExtPoint> v;
  for (int k = 0; k < n; ++k) v.emplace_back(lo + (hi - lo) * k / (n - 1));
  return v;
}

std::vector<ExtPoint> map_points(const std::vector<ExtPoint>& v, const std::function<Complex(Complex)>& f) {
  std::vector<ExtPoint> out;
  for (const auto& p : v) out.emplace_back(f(p.value()));
  return out;
}

void expect_identity_profile(const DistortionProfile& p, double tol) {
  int realized = 0;
  for (int k = 0; k < kBinCount; ++k) {
    if (!p.realized(k)) continue;
    ++realized;
    EXPECT_NEAR(p.eta_hat[k] / p.source_max[k], 1.0, tol) << "bin " << p.bins[k];
  }
  EXPECT_GT(realized, 3);
}

}  // namespace

TEST(QsProfile, IdentityIsExact) {
  const auto pts = line_points(100, -1, 1);
  expect_identity_profile(qs_profile(pts, pts), 0.0);
}

TEST(QsProfile, CubeHasLargeRatioAtOne) {
  const auto pts = line_points(11, -5, 5);
  const auto img = map_points(pts, [](Complex z) { return z * z * z; });
  const auto p = qs_profile(pts, img);
  EXPECT_GE(p.eta_hat[DistortionProfile::bin_of(1.0)], 13.0);
}

TEST(QsProfile, MobiusMatchesExhaustiveOracle) {
  std::vector<ExtPoint> pts;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) pts.emplace_back(u(rng), u(rng));
  const MobiusMap T(1.0, 0.5, 0.3, 2.0);
  std::vector<ExtPoint> img;
  for (const auto& p : pts) img.push_back(apply_mobius(T, p));
  const auto prof = qs_profile(pts, img);
  std::vector<double> oracle(kBinCount, 0.0);
  for (int a = 0; a < 20; ++a)
    for (int b = 0; b < 20; ++b)
      for (int c = 0; c < 20; ++c) {
        if (a == b || a == c || b == c) continue;
        const double t = std::abs(pts[a].value() - pts[b].value()) / std::abs(pts[a].value() - pts[c].value());
        const double s = std::abs(img[a].value() - img[b].value()) / std::abs(img[a].value() - img[c].value());
        auto& o = oracle[DistortionProfile::bin_of(t)];
        o = std::max(o, s);
      }
  for (int k = 0; k < kBinCount; ++k) EXPECT_DOUBLE_EQ(prof.eta_hat[k], oracle[k]);
  EXPECT_EQ(prof.sample_count, 20u * 19u * 18u);
}

TEST(QsProfile, TooFewSamples) {
  try {
    qs_profile(line_points(2, 0, 1), line_points(2, 0, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewSamples);
  }
}

TEST(QsProfile, DeterministicAcrossThreadCounts) {
  const auto pts = line_points(80, 0, 1);
  const auto img = map_points(pts, [](Complex z) { return z * z; });
  ProfileOptions opt;
  opt.budget = 50000;
  opt.seed = 7;
  setenv("QCPAIR_THREADS", "1", 1);
  const auto a = qs_profile(pts, img, Metric::euclidean, Metric::euclidean, opt);
  setenv("QCPAIR_THREADS", "4", 1);
  const auto b = qs_profile(pts, img, Metric::euclidean, Metric::euclidean, opt);
  unsetenv("QCPAIR_THREADS");
  EXPECT_EQ(a.eta_hat, b.eta_hat);
  EXPECT_EQ(a.witness, b.witness);
  EXPECT_EQ(a.sample_count + a.skipped, opt.budget);
}

TEST(QmProfile, MobiusIsIdentityProfile) {
  std::vector<ExtPoint> pts;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 50; ++k) pts.emplace_back(u(rng), u(rng));
  for (bool conj : {false, true}) {
    const MobiusMap T(Complex(1, 1), 0.5, Complex(0.2, -0.1), 3.0, conj);
    std::vector<ExtPoint> img;
    for (const auto& p : pts) img.push_back(apply_mobius(T, p));
    expect_identity_profile(qm_profile(pts, img), 1e-9);
  }
}

TEST(QmProfile, ChordalToEuclideanIdentity) {
  std::vector<ExtPoint> pts;
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int k = 0; k < 40; ++k) pts.emplace_back(u(rng), u(rng));
  expect_identity_profile(qm_profile(pts, pts, Metric::chordal, Metric::euclidean), 1e-9);
}

TEST(QmProfile, CircleScalingMapBoundedInN) {
  // S(0, e^{-n}) -> S(0, 1/n), identity on the unit circle.
  std::vector<double> eta1;
  ProfileOptions opt;
  opt.budget = 100000;
  for (int n = 2; n <= 6; ++n) {
    std::vector<ExtPoint> src, tgt;
    for (int k = 0; k < 24; ++k) {
      const Complex u = std::polar(1.0, 2 * kPi * k / 24);
      src.emplace_back(u);
      tgt.emplace_back(u);
      src.emplace_back(std::exp(-n) * u);
      tgt.emplace_back(u / static_cast<double>(n));
    }
    const auto p = qm_profile(src, tgt, Metric::euclidean, Metric::euclidean, opt);
    eta1.push_back(p.at(1.0));
  }
  // measured: eta(1) falls from 8 at n=2 to about 1.94 at n=6; no growth in n
  for (double v : eta1) {
    EXPECT_LT(v, 20.0);
    EXPECT_LE(v, eta1.front() * (1 + 1e-12));
  }
}

TEST(Profile, InverseEnvelopeRelation) {
  // The triple realizing eta_inv in bin k has f-source ratio r = eta_inv[k] and f-target
  // ratio in bin k, so eta_f(r) is at least the lower edge of bin k.
  const auto pts = line_points(40, 0.2, 2.0);
  const auto img = map_points(pts, [](Complex z) { return z * z * z; });
  const auto ef = qs_profile(pts, img).envelope();
  const auto inv = qs_profile(img, pts);
  int checked = 0;
  for (int k = 0; k < kBinCount; ++k) {
    if (!inv.realized(k)) continue;
    EXPECT_GE(ef[DistortionProfile::bin_of(inv.eta_hat[k])], inv.bins[k] / std::sqrt(2.0));
    ++checked;
  }
  EXPECT_GT(checked, 5);
}

TEST(Profile, DiameterTwoSidedBound) {
  // For A subset B: diam f(A)/diam f(B) lies in [1/(2 eta(diam B/diam A)), eta(2 diam A/diam B)].
  const auto pts = line_points(60, -1, 1);
  const auto img = map_points(pts, [](Complex z) { return z + 0.3 * z * z * z; });
  const auto p = qs_profile(pts, img);
  const auto env = p.envelope();
  auto eta = [&](double t) {
    // envelope evaluated at the upper edge of t's bin to absorb bin width
    const int k = std::min(DistortionProfile::bin_of(t) + 1, kBinCount - 1);
    return env[k];
  };
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> pick(0, 59);
  for (int trial = 0; trial < 100; ++trial) {
    int b0 = pick(rng), b1 = pick(rng);
    if (b0 > b1) std::swap(b0, b1);
    if (b1 - b0 < 3) continue;
    std::uniform_int_distribution<int> sub(b0, b1);
    int a0 = sub(rng), a1 = sub(rng);
    if (a0 > a1) std::swap(a0, a1);
    if (a1 == a0) continue;
    const double dA = pts[a1].value().real() - pts[a0].value().real();
    const double dB = pts[b1].value().real() - pts[b0].value().real();
    const double fA = std::abs(img[a1].value() - img[a0].value()), fB = std::abs(img[b1].value() - img[b0].value());
    EXPECT_GE(fA / fB, 1.0 / (2.0 * eta(dB / dA)));
    EXPECT_LE(fA / fB, eta(2.0 * dA / dB));
  }
}

TEST(Profile, RelativeDistanceBound) {
  // dist(fE,fF)/diam fE <= eta(2 dist(E,F)/diam E) for interval clouds E, F.
  const auto pts = line_points(60, -1, 1);
  const auto img = map_points(pts, [](Complex z) { return z + 0.3 * z * z * z; });
  const auto env = qs_profile(pts, img).envelope();
  auto eta = [&](double t) { return env[std::min(DistortionProfile::bin_of(t) + 1, kBinCount - 1)]; };
  for (int e0 = 0; e0 < 50; e0 += 7)
    for (int f0 = e0 + 4; f0 < 58; f0 += 5) {
      const int e1 = e0 + 3;
      const double dE = pts[e1].value().real() - pts[e0].value().real();
      const double dEF = pts[f0].value().real() - pts[e1].value().real();
      const double fdE = std::abs(img[e1].value() - img[e0].value());
      const double fdEF = std::abs(img[f0].value() - img[e1].value());
      if (dEF <= 0) continue;
      EXPECT_LE(fdEF / fdE, eta(2.0 * dEF / dE));
    }
}

TEST(Profile, BoundednessFlag) {
  const auto pts = line_points(50, -1, 1);
  EXPECT_TRUE(profile_bounded(qs_profile(pts, pts), 10.0));
  EXPECT_FALSE(profile_bounded(qs_profile(pts, pts), 0.5));
}

TEST(IncreasingRatio, Identity) {
  const auto r = increasing_qs_ratio([](double x) { return x; }, -5, 5, 0.25);
  EXPECT_NEAR(r.sup, 1.0, 1e-12);
  EXPECT_NEAR(r.sup_inverse, 1.0, 1e-12);
}

TEST(IncreasingRatio, ExponentialGrowsPolynomialBounded) {
  auto Fexp = [](double x) { return std::copysign(std::expm1(std::abs(x)), x); };
  EXPECT_NEAR(qs_ratio_at(Fexp, 3, 3), std::exp(3.0), 1e-9 * std::exp(3.0));
  for (int x = 1; x <= 6; ++x) {
    const auto r = increasing_qs_ratio(Fexp, -2.0 * x, 2.0 * x, 0.05);
    EXPECT_GE(r.sup, std::exp(static_cast<double>(x)) * (1 - 1e-12));
  }
  auto Fpow = [](double x) { return std::copysign(((std::abs(x) + 1) * (std::abs(x) + 1) - 1) / 2, x); };
  const auto small = increasing_qs_ratio(Fpow, -10, 10, 0.1);
  const auto big = increasing_qs_ratio(Fpow, -100, 100, 0.1);
  EXPECT_LT(big.sup, 10.0);
  EXPECT_LT(big.sup / small.sup, 1.5);
}

TEST(IncreasingRatio, NotMonotone) {
  try {
    increasing_qs_ratio([](double x) { return x * x; }, -1, 1, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotMonotone);
  }
}

namespace {

std::vector<Complex> polygon_samples(const std::vector<Complex>& v, double spacing) {
  std::vector<Complex> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Complex a = v[i], b = v[(i + 1) % v.size()];
    const int m = static_cast<int>(std::lround(std::abs(b - a) / spacing));
    for (int k = 0; k < m; ++k) out.push_back(a + (b - a) * (static_cast<double>(k) / m));
  }
  return out;
}

// Independent oracle: arc diameter by direct enumeration of the arc's points.
double brute_L(const std::vector<Complex>& p) {
  const std::size_t n = p.size();
  double L = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t fwd = j - i - 1, bwd = n - (j - i) - 1;
      std::vector<Complex> arc;
      if (fwd <= bwd)
        for (std::size_t k = i; k <= j; ++k) arc.push_back(p[k]);
      else
        for (std::size_t k = j; k <= i + n; ++k) arc.push_back(p[k % n]);
      double d = 0;
      for (std::size_t a = 0; a < arc.size(); ++a)
        for (std::size_t b = a + 1; b < arc.size(); ++b) d = std::max(d, std::abs(arc[a] - arc[b]));
      L = std::max(L, d / std::abs(p[i] - p[j]));
    }
  return L;
}

}  // namespace

TEST(Quasicircle, RoundCircle) {
  std::vector<Complex> c;
  for (int k = 0; k < 256; ++k) c.push_back(std::polar(1.0, 2 * kPi * k / 256));
  const auto r = quasicircle_constants(c);
  EXPECT_GE(r.three_point_L, 1.0);
  EXPECT_LE(r.three_point_L, 1.05);
  EXPECT_GT(r.min_cross_ratio_delta, 0.0);
  EXPECT_GE(r.min_cross_ratio_delta, 1.0 - 1e-9);  // Ptolemy: cyclic quadruples on a circle
}

TEST(Quasicircle, UnitSquareMatchesBruteForce) {
  const auto sq = polygon_samples({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, 1.0 / 64);
  ASSERT_EQ(sq.size(), 256u);
  const auto r = quasicircle_constants(sq);
  EXPECT_NEAR(r.three_point_L, brute_L(sq), 1e-12);
  // worst pair (3/8, 0) and (5/8, 1): arc diameter sqrt(1 + (5/8)^2) over chord sqrt(1 + (1/4)^2)
  EXPECT_NEAR(r.three_point_L, std::sqrt(1 + 25.0 / 64) / std::sqrt(1 + 1.0 / 16), 1e-12);
}

TEST(Quasicircle, NeedleBlowsUp) {
  const auto nd = polygon_samples({{0, 0}, {100, 0}, {100, 1}, {0, 1}}, 0.5);
  const auto r = quasicircle_constants(nd, 200000);
  EXPECT_GE(r.three_point_L, 50.0);
  EXPECT_THROW(quasicircle_constants({0, 1, Complex(0, 1)}), Error);
}

TEST(Verdict, ParallelHalfPlanesNearIdentity) {
  std::vector<ExtPoint> s;
  for (int k = 0; k < 10; ++k) s.emplace_back(-3.0 + 6.0 * k / 9);
  GridSpec g;
  g.h = 0.02;
  g.window = Box{-5, -4, 5, 1};
  const auto v = pair_verdict(Region::above(1), Region::below(0), s, g);
  for (int k = 0; k < kBinCount; ++k) {
    if (!v.profile.realized(k)) continue;
    EXPECT_GE(v.profile.eta_hat[k], v.profile.source_max[k] / 1.1);
    EXPECT_LE(v.profile.eta_hat[k], v.profile.source_max[k] * 1.1);
  }
  EXPECT_TRUE(v.bounded_at_scale);
}

TEST(Verdict, ConcentricBounded) {
  std::vector<ExtPoint> s;
  for (int k = 0; k < 16; ++k) s.emplace_back(std::polar(1.0, 2 * kPi * k / 16));
  GridSpec g;
  g.h = 0.02;
  const auto v = pair_verdict(Region::disk_exterior(0, 2), Region::disk(0, 1), s, g, {}, 50.0);
  EXPECT_TRUE(v.bounded_at_scale);
  EXPECT_EQ(v.density_model.kind, DensityKind::DiskExact);
}

TEST(Verdict, SimilarityInvariance) {
  std::vector<ExtPoint> s, s2;
  const auto T = MobiusMap::affine(Complex(0, 2), 1.0);
  for (int k = 0; k < 8; ++k) {
    s.emplace_back(-2.0 + 4.0 * k / 7);
    s2.push_back(apply_mobius(T, s.back()));
  }
  GridSpec g;
  g.h = 0.02;
  g.window = Box{-4, -3, 4, 1};
  const auto a = pair_verdict(Region::above(1), Region::below(0), s, g);
  GridSpec g2;
  g2.h = 0.04;
  g2.window = Box{-1, -8, 7, 8};
  const auto b = pair_verdict(Region::half_plane({-1, 0}, 1.0), Region::half_plane({1, 0}, 1.0), s2, g2);
  const int one = DistortionProfile::bin_of(1.0);
  EXPECT_NEAR(b.profile.eta_hat[one] / a.profile.eta_hat[one], 1.0, 0.06);
  EXPECT_EQ(a.profile.witness[one], b.profile.witness[one]);
}
