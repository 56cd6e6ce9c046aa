/**
 * @file dilatation.hpp
 * @brief Dilatation of PL meshes and sampled maps; conformal modulus of ring domains.
 */
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qcpair/geom.hpp"
#include "qcpair/plmap.hpp"
#include "qcpair/util.hpp"

namespace qcpair {

struct DilatationReport {
  double max_K = 1.0;
  std::vector<double> K;               // per triangle or per node
  std::size_t worst = 0;               // index attaining max_K
  std::string method;                  // "affine_exact" or "finite_difference"
  double step = 0.0;                   // finite-difference step (0 = per-node auto)
  std::vector<std::size_t> reversed;   // orientation-reversing simplices / nodes
};

namespace detail {

inline double dilatation_of(Complex fz, Complex fzb) {
  const double a = std::abs(fz), b = std::abs(fzb);
  if (a == b) return kInf;
  return (a + b) / std::abs(a - b);
}

inline void finish(DilatationReport& r) {
  if (r.K.empty()) return;
  r.worst = static_cast<std::size_t>(std::max_element(r.K.begin(), r.K.end()) - r.K.begin());
  r.max_K = std::max(1.0, r.K[r.worst]);
}

}  // namespace detail

/// Per-triangle K of the affine pieces z -> a z + b conj(z) + c.
inline DilatationReport pl_dilatation(const PLMap& m) {
  DilatationReport r;
  r.method = "affine_exact";
  r.K.resize(m.triangles.size());
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto s = m.source(t);
    if (!(std::abs(signed_area(s[0], s[1], s[2])) > 0))
      fail(ErrorCode::DegenerateTriangle, "source triangle " + std::to_string(t) + " is degenerate");
    const Affine f = m.piece(t);
    if (std::abs(f.b) >= std::abs(f.a)) r.reversed.push_back(t);
    r.K[t] = detail::dilatation_of(f.a, f.b);
  }
  detail::finish(r);
  return r;
}

/**
 * Central differences: f_z = (f_x - i f_y)/2, f_zbar = (f_x + i f_y)/2.
 * step <= 0 picks 1e-5 * max(1, |z|) per node.
 */
inline DilatationReport numeric_beltrami(const std::function<Complex(Complex)>& f, std::span<const Complex> nodes,
                                         double step = 0.0, bool orientation_preserving = true) {
  DilatationReport r;
  r.method = "finite_difference";
  r.step = step;
  r.K.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Complex z = nodes[i];
    const double h = step > 0 ? step : 1e-5 * std::max(1.0, std::abs(z));
    const Complex fx = (f(z + h) - f(z - h)) / (2 * h);
    const Complex fy = (f(z + Complex(0, h)) - f(z - Complex(0, h))) / (2 * h);
    const Complex fz = 0.5 * (fx - Complex(0, 1) * fy), fzb = 0.5 * (fx + Complex(0, 1) * fy);
    r.K[i] = detail::dilatation_of(fz, fzb);
    if (std::abs(fzb) > std::abs(fz)) r.reversed.push_back(i);
  }
  if (orientation_preserving && !nodes.empty() && r.reversed.size() * 100 > nodes.size())
    fail(ErrorCode::StepTooLarge, std::to_string(r.reversed.size()) + " of " + std::to_string(nodes.size()) +
                                      " nodes look orientation-reversing");
  detail::finish(r);
  return r;
}

// ---------------------------------------------------------------------------
// ring modulus

/// Ring domain between a bounded continuum `inner` and an unbounded continuum `outer` (closures of the regions).
struct RingSpec {
  Region inner, outer;
  int resolution = 400;        // cells along the longer side (cartesian) or around (log-polar)
  bool force_numeric = false;  // skip the round closed form
};

struct ModulusResult {
  double modulus = 0.0;  // of the separating family; the connecting family has 1/modulus
  std::string method;    // "closed_form", "cartesian", "log_polar"
  std::size_t unknowns = 0;
  std::size_t iterations = 0;
  double h = 0.0;
};

namespace detail {

/// Grid chart: node (i, j) -> plane point; optionally periodic in j.
struct RingChart {
  double x0 = 0, y0 = 0, h = 0;
  long nx = 0, ny = 0;
  bool log_polar = false;
  Complex center;

  Complex at(double x, double y) const {
    return log_polar ? center + std::exp(Complex(x, y)) : Complex(x, y);
  }
  Complex node(long i, long j) const { return at(x0 + static_cast<double>(i) * h, y0 + static_cast<double>(j) * h); }
};

/// Preconditioned conjugate gradient for a symmetric M-matrix in compressed rows.
struct SparseSym {
  std::vector<double> diag;
  std::vector<std::vector<std::pair<std::size_t, double>>> off;

  void apply(const std::vector<double>& x, std::vector<double>& y) const {
    parallel_for(diag.size(), [&](std::size_t i) {
      double s = diag[i] * x[i];
      for (const auto& [j, a] : off[i]) s += a * x[j];
      y[i] = s;
    });
  }
};

inline std::size_t pcg(const SparseSym& A, const std::vector<double>& b, std::vector<double>& x, double rtol,
                       std::size_t max_iter) {
  const std::size_t n = b.size();
  std::vector<double> r(n), z(n), p(n), q(n);
  A.apply(x, q);
  double bnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = b[i] - q[i];
    bnorm += b[i] * b[i];
  }
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0) bnorm = 1.0;
  double rz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = r[i] / A.diag[i];
    p[i] = z[i];
    rz += r[i] * z[i];
  }
  for (std::size_t it = 0; it < max_iter; ++it) {
    double rn = 0.0;
    for (double v : r) rn += v * v;
    if (std::sqrt(rn) <= rtol * bnorm) return it;
    A.apply(p, q);
    double pq = 0.0;
    for (std::size_t i = 0; i < n; ++i) pq += p[i] * q[i];
    const double alpha = rz / pq;
    double rz_new = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
      z[i] = r[i] / A.diag[i];
      rz_new += r[i] * z[i];
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  fail(ErrorCode::SolverDiverged, "conjugate gradient did not reach the tolerance in " + std::to_string(max_iter) +
                                      " iterations");
}

inline ModulusResult solve_ring(const RingSpec& spec, const RingChart& C) {
  const long nx = C.nx, ny = C.ny;
  const std::size_t total = static_cast<std::size_t>(nx * ny);
  // 0 domain, 1 inner, 2 outer
  std::vector<unsigned char> kind(total);
  parallel_for(static_cast<std::size_t>(ny), [&](std::size_t jj) {
    const long j = static_cast<long>(jj);
    for (long i = 0; i < nx; ++i) {
      const Complex z = C.node(i, j);
      const bool in = spec.inner.contains_closed(z), out = spec.outer.contains_closed(z);
      if (in && out) fail(ErrorCode::NotARing, "inner and outer continua intersect");
      kind[static_cast<std::size_t>(j * nx + i)] = in ? 1 : out ? 2 : 0;
    }
  });
  // grid frame belongs to the components; in cartesian charts the frame must be outer
  std::vector<std::size_t> index(total, SIZE_MAX);
  std::size_t n = 0;
  for (std::size_t k = 0; k < total; ++k)
    if (kind[k] == 0) index[k] = n++;
  require(n > 0, ErrorCode::NotARing, "no grid nodes between the continua");

  auto neighbor = [&](long i, long j, int d, long& ni, long& nj) {
    static constexpr int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
    ni = i + dx[d];
    nj = j + dy[d];
    if (C.log_polar) nj = (nj + ny) % ny;
    return ni >= 0 && ni < nx && nj >= 0 && nj < ny;
  };
  // fraction of the chart edge from p to the component containing q
  auto crossing = [&](long i, long j, int d, const Region& comp) {
    static constexpr int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
    const double x = C.x0 + static_cast<double>(i) * C.h, y = C.y0 + static_cast<double>(j) * C.h;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (comp.contains_closed(C.at(x + mid * dx[d] * C.h, y + mid * dy[d] * C.h))) hi = mid;
      else lo = mid;
    }
    return std::max(hi, 1e-6);
  };

  SparseSym A;
  A.diag.assign(n, 0.0);
  A.off.assign(n, {});
  std::vector<double> b(n, 0.0);
  struct Cut {
    std::size_t row;
    double weight, value;
  };
  std::vector<std::vector<Cut>> cuts(static_cast<std::size_t>(ny));
  parallel_for(static_cast<std::size_t>(ny), [&](std::size_t jj) {
    const long j = static_cast<long>(jj);
    for (long i = 0; i < nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j * nx + i);
      if (kind[k] != 0) {
        if (kind[k] == 1) {
          for (int d = 0; d < 4; ++d) {
            long ni, nj;
            if (neighbor(i, j, d, ni, nj) && kind[static_cast<std::size_t>(nj * nx + ni)] == 2)
              fail(ErrorCode::NotARing, "continua touch at grid scale");
          }
        }
        continue;
      }
      const std::size_t row = index[k];
      for (int d = 0; d < 4; ++d) {
        long ni, nj;
        if (!neighbor(i, j, d, ni, nj)) {
          A.diag[row] += 1.0;
          b[row] += 1.0;  // frame counts as outer
          cuts[jj].push_back({row, 1.0, 1.0});
          continue;
        }
        const std::size_t nk = static_cast<std::size_t>(nj * nx + ni);
        if (kind[nk] == 0) {
          A.diag[row] += 1.0;
          A.off[row].emplace_back(index[nk], -1.0);
        } else {
          const double theta = crossing(i, j, d, kind[nk] == 1 ? spec.inner : spec.outer);
          const double w = 1.0 / theta, g = kind[nk] == 1 ? 0.0 : 1.0;
          A.diag[row] += w;
          b[row] += w * g;
          cuts[jj].push_back({row, w, g});
        }
      }
    }
  });

  std::vector<double> u(n, 0.5);
  ModulusResult res;
  res.unknowns = n;
  res.h = C.h;
  res.iterations = pcg(A, b, u, 1e-8, 20 * static_cast<std::size_t>(std::sqrt(static_cast<double>(n))) + 5000);

  // discrete Dirichlet energy: interior edges once, cut edges with their weights
  double E = 0.0;
  for (std::size_t r = 0; r < n; ++r)
    for (const auto& [c, a] : A.off[r])
      if (c > r) E += (u[r] - u[c]) * (u[r] - u[c]);
  for (const auto& row : cuts)
    for (const auto& c : row) E += c.weight * (u[c.row] - c.value) * (u[c.row] - c.value);
  require(E > 0, ErrorCode::SolverDiverged, "zero energy");
  res.modulus = 1.0 / E;
  return res;
}

}  // namespace detail

/// Modulus of the family of curves separating the two continua; 1/(2 pi) log(R/r) for round annuli.
inline ModulusResult ring_modulus(const RingSpec& spec) {
  require(spec.inner.bounded(), ErrorCode::NotARing, "inner continuum must be bounded");
  require(!spec.outer.bounded() && !spec.outer.boundary_box().empty(), ErrorCode::NotARing,
          "outer continuum must contain infinity and have a bounded boundary");
  require(spec.resolution >= 16, ErrorCode::InvalidArgument, "resolution too small");
  const auto* di = std::get_if<Disk>(&spec.inner.shape());
  const auto* dout = std::get_if<Disk>(&spec.outer.shape());
  if (di && dout && std::abs(di->center - dout->center) <= 1e-12 * dout->radius) {
    require(di->radius < dout->radius, ErrorCode::NotARing, "inner radius must be below outer radius");
    if (!spec.force_numeric) return {std::log(dout->radius / di->radius) / (2 * kPi), "closed_form", 0, 0, 0.0};
  }

  const Box ib = spec.inner.boundary_box(), ob = spec.outer.boundary_box();
  const Complex c((ib.xmin + ib.xmax) / 2, (ib.ymin + ib.ymax) / 2);
  detail::RingChart C;
  if (spec.inner.contains(c)) {
    const double rmin = spec.inner.boundary_distance(c);
    double rmax = 0.0;
    for (Complex q : {Complex(ob.xmin, ob.ymin), Complex(ob.xmax, ob.ymin), Complex(ob.xmin, ob.ymax),
                      Complex(ob.xmax, ob.ymax)})
      rmax = std::max(rmax, std::abs(q - c));
    if (rmax / rmin > 8.0) {
      C.log_polar = true;
      C.center = c;
      C.ny = spec.resolution;
      C.h = 2 * kPi / static_cast<double>(C.ny);
      C.y0 = 0.0;
      C.x0 = std::log(rmin) - 2 * C.h;
      C.nx = static_cast<long>(std::ceil((std::log(rmax) + 2 * C.h - C.x0) / C.h)) + 1;
    }
  }
  if (!C.log_polar) {
    const double side = std::max(ob.width(), ob.height());
    C.h = side / spec.resolution;
    C.x0 = ob.xmin - 2 * C.h;
    C.y0 = ob.ymin - 2 * C.h;
    C.nx = static_cast<long>(std::ceil((ob.width() + 4 * C.h) / C.h)) + 1;
    C.ny = static_cast<long>(std::ceil((ob.height() + 4 * C.h) / C.h)) + 1;
  }
  ModulusResult r = detail::solve_ring(spec, C);
  r.method = C.log_polar ? "log_polar" : "cartesian";
  return r;
}

struct ExtensionConditionReport {
  double modulus = 0.0, modulus_image = 0.0;
  double ratio = 1.0;       // modulus_image / modulus
  bool ratio_ok = true;     // within [1/K0, K0]
  bool modulus_ok = true;   // modulus <= M
};

/// Ring conditions for the pairs (U, V) and (U', V'): V bounded, U containing infinity.
inline ExtensionConditionReport extension_condition_check(const Region& U, const Region& V, const Region& U2,
                                                          const Region& V2, double K0 = kInf, double M = kInf,
                                                          int resolution = 400) {
  ExtensionConditionReport r;
  r.modulus = ring_modulus({V, U, resolution, false}).modulus;
  r.modulus_image = ring_modulus({V2, U2, resolution, false}).modulus;
  r.ratio = r.modulus_image / r.modulus;
  r.ratio_ok = r.ratio >= 1.0 / K0 && r.ratio <= K0;
  r.modulus_ok = r.modulus <= M;
  return r;
}

}  // namespace qcpair
