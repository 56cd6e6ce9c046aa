#include <gtest/gtest.h>

#include "qcpair/dilatation.hpp"
#include "qcpair/extensions.hpp"

using namespace qcpair;

namespace {

/// Polar-grid mesh of r0 <= |z| <= r1 pushed through f.
PLMap polar_mesh(double r0, double r1, int nr, int nt, const std::function<Complex(Complex)>& f) {
  PLMap m;
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i <= nr; ++i) {
      const Complex z = std::polar(r0 + (r1 - r0) * i / nr, 2 * kPi * j / nt);
      m.vertices.push_back(z);
      m.image_vertices.push_back(f(z));
    }
  auto id = [&](int i, int j) { return static_cast<std::uint32_t>(((j + nt) % nt) * (nr + 1) + i); };
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < nr; ++i) {
      m.triangles.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.triangles.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return m;
}

std::vector<Complex> ring_nodes(double r0, double r1, int n) {
  std::vector<Complex> out;
  for (int k = 0; k < n; ++k) out.push_back(std::polar(r0 + (r1 - r0) * (k + 0.5) / n, 2.0 * k));
  return out;
}

double round_mod(double r, double R) { return std::log(R / r) / (2 * kPi); }

}  // namespace

TEST(PLDilatation, IdentityAndStretch) {
  EXPECT_EQ(pl_dilatation(polar_mesh(1, 2, 4, 16, [](Complex z) { return z; })).max_K, 1.0);
  PLMap t;
  t.vertices = {0.0, 1.0, Complex(0, 1)};
  t.triangles = {{0, 1, 2}};
  for (auto v : t.vertices) t.image_vertices.push_back(Complex(v.real(), 2 * v.imag()));
  const Affine f = t.piece(0);
  EXPECT_NEAR(std::abs(f.a - 1.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(f.b + 0.5), 0.0, 1e-15);
  EXPECT_NEAR(pl_dilatation(t).max_K, 2.0, 1e-14);
}

TEST(PLDilatation, PowerMapConverges) {
  const auto rep = pl_dilatation(polar_mesh(1, 2, 40, 125, power_map(2.0)));
  EXPECT_EQ(rep.K.size(), 10000u);
  EXPECT_NEAR(rep.max_K / 2.0, 1.0, 0.02);
  EXPECT_TRUE(rep.reversed.empty());
}

TEST(PLDilatation, ReversalFlaggedAndDegenerateRejected) {
  const auto rep = pl_dilatation(polar_mesh(1, 2, 3, 12, [](Complex z) { return std::conj(z); }));
  EXPECT_EQ(rep.reversed.size(), rep.K.size());
  PLMap d;
  d.vertices = {0.0, 1.0, 2.0};
  d.image_vertices = d.vertices;
  d.triangles = {{0, 1, 2}};
  try {
    pl_dilatation(d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateTriangle);
  }
}

TEST(NumericBeltrami, ConformalAndAffine) {
  const MobiusMap T(Complex(1, 2), 3.0, Complex(0.5, 0), Complex(-1, 1));
  const auto nodes = ring_nodes(0.5, 3.0, 200);
  const auto mob = numeric_beltrami([&](Complex z) { return apply_mobius(T, z).value(); }, nodes);
  EXPECT_NEAR(mob.max_K, 1.0, 1e-6);
  const auto aff = numeric_beltrami([](Complex z) { return z + 0.5 * std::conj(z); }, nodes);
  for (double k : aff.K) EXPECT_NEAR(k, 3.0, 1e-9);
}

TEST(NumericBeltrami, MiddleRingPowerMap) {
  const double beta = power_exponent(std::exp(4.0), std::exp(8.0), std::sqrt(2.0));
  const double R = std::sqrt(2.0);
  const auto p = power_map(beta);
  const auto rep = numeric_beltrami([&](Complex z) { return R * p(z / R); }, ring_nodes(R, std::exp(4.0) / R, 300));
  EXPECT_NEAR(rep.max_K, beta, 1e-3);
  for (double k : rep.K) EXPECT_NEAR(k, beta, 1e-3);
}

TEST(NumericBeltrami, ReversalRaisesStepTooLarge) {
  const auto nodes = ring_nodes(1, 2, 50);
  try {
    numeric_beltrami([](Complex z) { return std::conj(z); }, nodes);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StepTooLarge);
  }
  EXPECT_EQ(numeric_beltrami([](Complex z) { return std::conj(z); }, nodes, 0.0, false).reversed.size(), 50u);
}

TEST(Dilatation, MeshAndFiniteDifferencesAgreeOnAffineMaps) {
  const auto f = [](Complex z) { return Complex(2, 1) * z + Complex(0.3, -0.4) * std::conj(z) + 1.0; };
  const auto mesh = pl_dilatation(polar_mesh(1, 2, 3, 12, f));
  const auto fd = numeric_beltrami(f, ring_nodes(1, 2, 20));
  EXPECT_NEAR(mesh.max_K, fd.max_K, 1e-6);
}

TEST(RingModulus, ClosedForms) {
  EXPECT_NEAR(ring_modulus({Region::disk(0, 1), Region::disk_exterior(0, std::exp(2 * kPi))}).modulus, 1.0, 1e-12);
  const auto e = ring_modulus({Region::disk(0, 1), Region::disk_exterior(0, std::exp(1.0))});
  EXPECT_EQ(e.method, "closed_form");
  EXPECT_NEAR(e.modulus, 0.159155, 1e-6);
}

TEST(RingModulus, NumericRoundAnnuli) {
  const auto cart = ring_modulus({Region::disk(0, 1), Region::disk_exterior(0, 2), 400, true});
  EXPECT_EQ(cart.method, "cartesian");
  EXPECT_NEAR(cart.modulus / round_mod(1, 2), 1.0, 0.01);
  const auto lp = ring_modulus({Region::disk(0, 1), Region::disk_exterior(0, std::exp(2 * kPi)), 256, true});
  EXPECT_EQ(lp.method, "log_polar");
  EXPECT_NEAR(lp.modulus, 1.0, 0.01);
}

TEST(RingModulus, MobiusInvariance) {
  // z -> 1/(z - 3) sends |z|=1, |z|=2 to the circles (-3/8, 1/8) and (-3/5, 2/5)
  const auto img = ring_modulus({Region::disk(-0.375, 0.125), Region::disk_exterior(-0.6, 0.4), 400});
  EXPECT_EQ(img.method, "cartesian");
  EXPECT_NEAR(img.modulus / round_mod(1, 2), 1.0, 0.02);
}

TEST(RingModulus, QuasiInvarianceUnderPowerMaps) {
  const double base = ring_modulus({Region::disk(0, 1), Region::disk_exterior(0, 2), 300, true}).modulus;
  for (double beta : {1.5, 2.0, 3.0}) {
    const double R = std::pow(2.0, beta);
    const double pushed = ring_modulus({Region::disk(0, 1), Region::disk_exterior(0, R), 300, true}).modulus;
    EXPECT_GE(pushed / base, (1.0 / beta) * 0.98);
    EXPECT_LE(pushed / base, beta * 1.02);
  }
}

TEST(RingModulus, SquareInsideCircleIsSandwiched) {
  const Region sq = Region::polygon({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
  const double m = ring_modulus({sq, Region::disk_exterior(0, 4), 400}).modulus;
  EXPECT_GT(m, round_mod(std::sqrt(2.0), 4));
  EXPECT_LT(m, round_mod(1, 4));
}

TEST(RingModulus, Errors) {
  auto code = [](const RingSpec& s) {
    try {
      ring_modulus(s);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code({Region::disk(0, 1), Region::disk_exterior(0.5, 1.5), 200}), ErrorCode::NotARing);
  EXPECT_EQ(code({Region::disk(0, 1), Region::disk(5, 1)}), ErrorCode::NotARing);
  EXPECT_EQ(code({Region::disk(0, 1), Region::disk_exterior(0, 0.5)}), ErrorCode::NotARing);
}

TEST(ExtensionCondition, Examples) {
  const auto same = extension_condition_check(Region::disk_exterior(0, 2), Region::disk(0, 1),
                                              Region::disk_exterior(0, 2), Region::disk(0, 1));
  EXPECT_DOUBLE_EQ(same.ratio, 1.0);
  const auto two = extension_condition_check(Region::disk_exterior(0, 2), Region::disk(0, 1),
                                             Region::disk_exterior(0, 4), Region::disk(0, 1), 2.5, 1.0);
  EXPECT_NEAR(two.ratio, 2.0, 1e-12);
  EXPECT_TRUE(two.ratio_ok);
  EXPECT_TRUE(two.modulus_ok);
  const auto big = extension_condition_check(Region::disk_exterior(0, std::exp(2 * kPi)), Region::disk(0, 1),
                                             Region::disk_exterior(0, std::exp(4 * kPi)), Region::disk(0, 1), 1.5, 0.5);
  EXPECT_NEAR(big.modulus, 1.0, 1e-12);
  EXPECT_NEAR(big.ratio, 2.0, 1e-12);
  EXPECT_FALSE(big.ratio_ok);
  EXPECT_FALSE(big.modulus_ok);
}
