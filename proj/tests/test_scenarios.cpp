#include <gtest/gtest.h>

#include "qcpair/scenarios.hpp"

using namespace qcpair;

namespace {

std::vector<Outcome> run_ok(const ScenarioBundle& b) {
  auto out = run_scenario(b);
  for (std::size_t i = 0; i < out.size(); ++i)
    EXPECT_TRUE(out[i].pass) << b.name << " " << b.expected[i].quantity << " = " << out[i].value << " not in ["
                             << b.expected[i].lo << ", " << b.expected[i].hi << "] " << out[i].note;
  return out;
}

const Expectation& find(const ScenarioBundle& b, const std::string& q) {
  for (const auto& e : b.expected)
    if (e.quantity == q) return e;
  throw std::runtime_error("no expectation " + q);
}

bool same_expectations(const ScenarioBundle& a, const ScenarioBundle& b) {
  if (a.expected.size() != b.expected.size()) return false;
  for (std::size_t i = 0; i < a.expected.size(); ++i) {
    const auto &x = a.expected[i], &y = b.expected[i];
    if (x.op != y.op || x.points != y.points || x.lo != y.lo || x.hi != y.hi) return false;
  }
  return true;
}

/// max over metric entries of d / |z-w| and its reciprocal
std::pair<double, double> slope_range(const ScenarioBundle& b, const std::vector<Outcome>& out) {
  double lo = kInf, hi = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& e = b.expected[i];
    if (e.op != "relative_hyperbolic_distance") continue;
    const double s = out[i].value / std::abs(e.points[0].value() - e.points[1].value());
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return {lo, hi};
}

}  // namespace

TEST(Parallel, ExactValuesAndScaling) {
  const auto b1 = parallel_halfplanes(1), b2 = parallel_halfplanes(2);
  EXPECT_DOUBLE_EQ(find(b1, "d_VU(0,3)").lo, 3.0);
  EXPECT_DOUBLE_EQ(find(b2, "d_VU(0,3)").lo, 1.5);
  // gap scaling halves every expected value
  ASSERT_EQ(b1.expected.size(), b2.expected.size());
  for (std::size_t i = 0; i < b1.expected.size(); ++i) EXPECT_DOUBLE_EQ(b1.expected[i].hi, 2 * b2.expected[i].hi);
  const auto out = run_ok(b1);
  EXPECT_NEAR(out[1].value, 3.0, 0.09);
}

TEST(Parallel, ZeroOnDiagonal) {
  const auto b = parallel_halfplanes(1);
  const Matrix M = metric_table(b.scene.region("U"), b.scene.region("V"), {Complex(0, 0), Complex(3, 0)}, b.grid);
  EXPECT_EQ(M[0][0], 0.0);
  EXPECT_EQ(M[1][1], 0.0);
  EXPECT_NEAR(M[0][1], 3.0, 0.09);
  EXPECT_EQ(M[0][1], M[1][0]);
}

TEST(Parallel, RejectsBadGap) {
  EXPECT_THROW(parallel_halfplanes(0), Error);
  EXPECT_THROW(parallel_halfplanes(-1), Error);
}

TEST(Concentric, SharpAndBandValues) {
  const auto b = concentric_annulus(1, 2);
  const auto& sharp = find(b, "d_VU(1,-1)");
  EXPECT_NEAR(sharp.lo, 4 * kPi / 3, 1e-12);
  const auto& band = find(b, "d_VU_band(1,-1)");
  EXPECT_DOUBLE_EQ(band.lo, 2.0);
  EXPECT_DOUBLE_EQ(band.hi, 2 * kPi);
  // outer circle, z = 2, w = -2: |z-w| = 4, dist 1, diameter ratio 1/2
  const auto& outer = find(b, "d_UV_band(2,-2)");
  EXPECT_DOUBLE_EQ(outer.lo, 2.0);
  EXPECT_DOUBLE_EQ(outer.hi, 2 * kPi);
  run_ok(b);
}

TEST(Concentric, BadRadii) {
  try {
    concentric_annulus(2, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadRadii);
  }
  EXPECT_THROW(concentric_annulus(0, 1), Error);
}

TEST(NearParallel, FlatReducesToParallel) {
  Perturbation flat;
  flat.amplitude = 0;
  const auto b = near_parallel_quasidisks(2, 1.5, flat);
  EXPECT_TRUE(same_expectations(b, parallel_halfplanes(1.5)));
  EXPECT_EQ(b.name, "near_parallel");
}

TEST(NearParallel, BandViolation) {
  Perturbation p;
  p.amplitude = 1.2;
  try {
    near_parallel_quasidisks(1.5, 1, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BandViolation);
  }
}

TEST(NearParallel, BandsHoldAndSlopeIsBounded) {
  const auto b = near_parallel_quasidisks(1.5, 1);
  const auto out = run_ok(b);
  const auto [lo, hi] = slope_range(b, out);
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi / lo, 5.0);
}

TEST(NearConcentric, FlatReducesToConcentric) {
  Perturbation flat;
  flat.amplitude = 0;
  EXPECT_TRUE(same_expectations(near_concentric_quasidisks(2, 1, 3, flat), concentric_annulus(1, 3)));
}

TEST(NearConcentric, BandsHold) { run_ok(near_concentric_quasidisks(1.5, 1, 2)); }

TEST(Wormhole, StraightCoreLinearBand) {
  const auto b = make_scenario("wormhole");
  const auto out = run_ok(b);
  const auto [lo, hi] = slope_range(b, out);
  // measured C with slope in [1/C, C]
  const double C = std::max(hi, 1 / lo);
  EXPECT_TRUE(std::isfinite(C));
  EXPECT_LT(C, 10.0);
}

TEST(Separated, RatioBandIsNarrow) {
  const auto b = separated_quasidisks(2);
  const auto out = run_ok(b);
  double c1 = kInf, c2 = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& e = b.expected[i];
    const double r = out[i].value * 10.0 / std::abs(e.points[0].value() - e.points[1].value());
    c1 = std::min(c1, r);
    c2 = std::max(c2, r);
  }
  EXPECT_GT(c1, 0.0);
  EXPECT_LE(c2 / c1, 20.0);
}

TEST(Separated, DistanceIsExact) {
  const auto b = separated_quasidisks(2, 4);
  const auto& U = b.scene.region("U");
  double d = kInf;
  for (const auto& z : b.scene.region("V").boundary_samples(2048)) d = std::min(d, U.boundary_distance(z));
  EXPECT_NEAR(d, 4.0, 1e-2);
}

TEST(Lipschitz, ConstantReducesToParallel) {
  const auto b = constant_graph(1);
  EXPECT_DOUBLE_EQ(find(b, "d_VU(0,3)").lo, 3.0);
  run_ok(b);
}

TEST(Lipschitz, PowerDecaySupIsFinite) {
  const auto b = power_decay_graph(1);
  EXPECT_DOUBLE_EQ(b.functions.at("F")(3.0), 7.5);
  const auto q = increasing_qs_ratio(b.functions.at("F"), -100, 100, 0.5);
  EXPECT_NEAR(q.sup, 4.04861, 1e-5);
}

TEST(Lipschitz, PowerDecayBands) { run_ok(power_decay_graph(1)); }

TEST(Lipschitz, ExponentialDecayUnbounded) {
  const auto b = exponential_decay_graph();
  const auto& F = b.functions.at("F");
  for (double x : {1.0, 4.0, 9.0}) EXPECT_NEAR(qs_ratio_at(F, x, x), std::exp(x), 1e-9 * std::exp(x));
  run_ok(b);
}

TEST(Lipschitz, NumericAntiderivativeMatchesClosedForm) {
  auto f = [](double x) { return 1.0 / (std::abs(x) + 1); };
  const auto b = lipschitz_graph_pair(f, 1.0);
  for (double x : {-7.0, -0.3, 0.0, 2.5, 9.0}) {
    const double exact = std::copysign((std::pow(std::abs(x) + 1, 2) - 1) / 2, x);
    EXPECT_NEAR(b.functions.at("F")(x), exact, 1e-8 * (1 + std::abs(exact)));
  }
}

TEST(Lipschitz, Errors) {
  try {
    lipschitz_graph_pair([](double x) { return x; }, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPositive);
  }
  EXPECT_THROW(constant_graph(0), Error);
  EXPECT_THROW(lipschitz_graph_pair([](double x) { return 2 + std::sin(3 * x); }, 1.0), Error);
}

TEST(Cusp, ProfileChecks) {
  for (double a : {1.5, 2.0, 3.0}) {
    const auto b = cusp_straighten(a);
    const auto &t = b.functions.at("t"), &s = b.functions.at("s"), &h = b.functions.at("h");
    EXPECT_DOUBLE_EQ(t(1), 0.5);
    EXPECT_NEAR(s(0.5), 1.0, 1e-11);
    for (double x : {0.05, 0.3, 0.9}) EXPECT_NEAR(s(t(x)), x, 1e-10);
    EXPECT_DOUBLE_EQ(h(0.2), 0.5);
    EXPECT_DOUBLE_EQ(h(-0.2), 0.5);
    EXPECT_NEAR(h(-3.0), h(3.0), 1e-15);
    run_ok(b);
  }
}

TEST(Cusp, ArcLandsOnSemicircle) {
  const auto b = cusp_straighten(2.5);
  const auto& g = b.maps.at("composed");
  for (double x : {0.02, 0.2, 0.6, 1.0}) {
    const Complex w = g(Complex(x, std::pow(x, 2.5)));
    EXPECT_NEAR(std::abs(w - Complex(0, 0.5)), 0.5, 1e-9);
    EXPECT_GE(w.real(), -1e-12);
  }
}

TEST(Cusp, StraightenFixesRealLine) {
  const auto b = cusp_straighten(2);
  const auto& F = b.maps.at("straighten");
  const auto& H = b.functions.at("H");
  for (double t : {-5.0, -0.25, 0.0, 1.0, 7.0}) EXPECT_NEAR(std::abs(F(Complex(t, 0)) - H(t)), 0.0, 1e-12);
}

TEST(Cusp, AlphaOutOfRange) {
  for (double a : {1.0, 0.5, std::numeric_limits<double>::infinity()}) {
    try {
      cusp_straighten(a);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::AlphaOutOfRange);
    }
  }
}

TEST(Squares, RelativeDistanceAndMonotoneVerdict) {
  double prev = 0;
  for (double d : {0.2, 0.05, 0.0125}) {
    const auto b = squares_pair(d);
    const auto out = run_scenario(b);
    EXPECT_NEAR(out[0].value, d, 1e-12);
    ASSERT_TRUE(out[1].pass) << out[1].note;
    EXPECT_GT(out[1].value, prev) << "delta " << d;
    prev = out[1].value;
  }
}

TEST(Registry, UnknownNamesAndParameters) {
  EXPECT_THROW(make_scenario("nope"), Error);
  EXPECT_THROW(make_scenario("parallel", {{"width", 1}}), Error);
  EXPECT_NO_THROW(make_scenario("cusp", {{"alpha", 2}}));
  EXPECT_EQ(make_scenario("parallel", {{"gap", 2}}).parameters.at("gap"), "2");
}

TEST(Registry, DefaultSuiteBuilds) {
  const auto suite = default_suite();
  EXPECT_EQ(suite.size(), 17u);
  for (const auto& [name, params] : suite) {
    if (name == "separated" || name == "near_concentric") continue;  // covered above
    const auto b = make_scenario(name, params);
    EXPECT_FALSE(b.expected.empty()) << name;
    for (const auto& e : b.expected) EXPECT_FALSE(e.op.empty());
  }
}

TEST(Registry, RestoreHooks) {
  auto b = make_scenario("cusp", {{"alpha", 2}});
  const Complex z(0.3, 0.09);
  const Complex want = b.maps.at("composed")(z);
  b.functions.clear();
  b.maps.clear();
  restore_hooks(b);
  EXPECT_EQ(b.maps.at("composed")(z), want);
  EXPECT_EQ(b.functions.count("H"), 1u);
}

TEST(Params, FormatParseRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, 2.0, 1e-300, -7.25, 123456789.123}) EXPECT_EQ(parse_param(format_param(x)), x);
  EXPECT_THROW(parse_param("abc"), Error);
  EXPECT_THROW(parse_param("1.5x"), Error);
}

TEST(Perturbation, DeterministicAndBounded) {
  const TrigProfile a(3, 7, 1.0), b(3, 7, 1.0), c(3, 8, 1.0);
  bool differs = false;
  for (double x = -5; x < 5; x += 0.37) {
    EXPECT_EQ(a(x), b(x));
    EXPECT_GE(a(x), 0.0);
    EXPECT_LE(a(x), 1.0);
    differs |= a(x) != c(x);
  }
  EXPECT_TRUE(differs);
}
