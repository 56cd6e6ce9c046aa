/**
 * @file extensions.hpp
 * @brief Explicit quasiconformal extensions of boundary homeomorphisms:
 *        dyadic PL strip extension, trapezoid strip extension, circle lifts,
 *        annulus extensions, Beurling-Ahlfors integral, power maps.
 */
#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "qcpair/geom.hpp"
#include "qcpair/plmap.hpp"

namespace qcpair {

// ---------------------------------------------------------------------------
// boundary data

/// Increasing homeomorphism between horizontal lines, sampled and linearly interpolated.
struct LineHomeo {
  std::vector<double> xs, ys;
  std::optional<int> period;
  double level = 0.0;        // source line y = level
  double image_level = 0.0;  // target line y = image_level

  /// Aperiodic data extends by unit-slope translation this far past the samples.
  static constexpr double kGuard = 2.0;

  void validate() const {
    require(xs.size() >= 2 && xs.size() == ys.size(), ErrorCode::InvalidArgument, "need >= 2 samples");
    for (std::size_t i = 1; i < xs.size(); ++i) {
      require(xs[i] > xs[i - 1], ErrorCode::NotIncreasing, "sample parameters not increasing");
      require(ys[i] > ys[i - 1], ErrorCode::NotIncreasing, "sample values not increasing");
    }
    if (period) {
      require(*period > 0, ErrorCode::InvalidArgument, "period must be positive");
      const double N = *period;
      require(std::abs(xs.back() - xs.front() - N) < 1e-12 * N, ErrorCode::InvalidArgument,
              "periodic samples must span exactly one period");
      require(std::abs(ys.back() - ys.front() - N) < 1e-9 * N, ErrorCode::InvalidArgument,
              "periodic data must satisfy h(x+N)=h(x)+N");
    }
  }

  double lo() const { return xs.front(); }
  double hi() const { return xs.back(); }

  double operator()(double x) const {
    if (period) {
      const double N = *period;
      const double n = std::floor((x - xs.front()) / N);
      return interp(x - n * N) + n * N;
    }
    if (x < xs.front()) {
      require(xs.front() - x <= kGuard, ErrorCode::InvalidArgument, "evaluation outside guard margin");
      return ys.front() + (x - xs.front());
    }
    if (x > xs.back()) {
      require(x - xs.back() <= kGuard, ErrorCode::InvalidArgument, "evaluation outside guard margin");
      return ys.back() + (x - xs.back());
    }
    return interp(x);
  }

  /// Samples fn at lo + k*step; step should be dyadic so mesh vertices hit samples exactly.
  static LineHomeo sample(const std::function<double(double)>& fn, double lo, double hi, double step,
                          std::optional<int> period = std::nullopt) {
    require(hi > lo && step > 0, ErrorCode::InvalidArgument, "bad sampling range");
    LineHomeo h;
    h.period = period;
    const auto n = static_cast<long>(std::llround((hi - lo) / step));
    h.xs.reserve(n + 1);
    for (long k = 0; k <= n; ++k) {
      const double x = (k == n) ? hi : lo + static_cast<double>(k) * step;
      h.xs.push_back(x);
      h.ys.push_back(fn(x));
    }
    if (period) h.ys.back() = h.ys.front() + *period;
    h.validate();
    return h;
  }

  static LineHomeo identity(double lo, double hi) {
    LineHomeo h;
    h.xs = {lo, hi};
    h.ys = {lo, hi};
    return h;
  }

 private:
  double interp(double x) const {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.begin()) return ys.front();
    if (it == xs.end()) return ys.back();
    const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    if (x == xs[i]) return ys[i];
    // slope first: unit-slope data reproduces x exactly
    return ys[i] + (x - xs[i]) * ((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]));
  }
};

/// Orientation-preserving homeomorphism S(0, radius) -> S(0, image_radius), stored as a lift
/// in turn coordinates: z = radius e^{2 pi i t} goes to image_radius e^{2 pi i lift(t)}.
struct CircleHomeo {
  double radius = 1.0, image_radius = 1.0;
  std::vector<double> ts;     // increasing, within [ts[0], ts[0] + 1)
  std::vector<double> lifts;  // increasing, lifts.back() < lifts.front() + 1

  void validate() const {
    require(radius > 0 && image_radius > 0, ErrorCode::InvalidArgument, "radii must be positive");
    require(ts.size() >= 3 && ts.size() == lifts.size(), ErrorCode::InvalidArgument, "need >= 3 samples");
    require(ts.back() < ts.front() + 1.0, ErrorCode::InvalidArgument, "parameters must lie within one turn");
    for (std::size_t i = 1; i < ts.size(); ++i) {
      require(ts[i] > ts[i - 1], ErrorCode::InvalidArgument, "parameters not increasing");
      require(lifts[i] > lifts[i - 1], ErrorCode::NotOrientationPreserving, "lift not increasing");
    }
    require(lifts.back() < lifts.front() + 1.0, ErrorCode::NotOrientationPreserving, "lift winds more than once");
  }

  double lift(double t) const {
    const double n = std::floor(t - ts.front());
    const double r = t - n;
    auto it = std::upper_bound(ts.begin(), ts.end(), r);
    const std::size_t i = static_cast<std::size_t>(it - ts.begin()) - 1;
    if (r == ts[i]) return lifts[i] + n;
    const bool wrap = i + 1 == ts.size();
    const double t1 = wrap ? ts.front() + 1.0 : ts[i + 1];
    const double l1 = wrap ? lifts.front() + 1.0 : lifts[i + 1];
    return lifts[i] + (r - ts[i]) / (t1 - ts[i]) * (l1 - lifts[i]) + n;
  }

  Complex at_turn(double t) const { return image_radius * std::polar(1.0, 2 * kPi * lift(t)); }
  Complex operator()(Complex z) const { return at_turn(std::arg(z) / (2 * kPi)); }

  /// Samples fn at n equally spaced points of S(0, radius).
  static CircleHomeo from_function(const std::function<Complex(Complex)>& fn, double radius, std::size_t n = 4096) {
    require(n >= 3, ErrorCode::InvalidArgument, "need >= 3 samples");
    CircleHomeo c;
    c.radius = radius;
    std::vector<Complex> w(n);
    double rsum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(n);
      c.ts.push_back(t);
      w[k] = fn(radius * std::polar(1.0, 2 * kPi * t));
      rsum += std::abs(w[k]);
    }
    c.image_radius = rsum / static_cast<double>(n);
    for (const auto& v : w)
      require(std::abs(std::abs(v) - c.image_radius) <= 1e-9 * c.image_radius, ErrorCode::InvalidArgument,
              "images do not lie on a centered circle");
    auto step = [](Complex a, Complex b) { return std::arg(b / a) / (2 * kPi); };
    c.lifts.push_back(std::arg(w[0]) / (2 * kPi));
    for (std::size_t k = 1; k < n; ++k) {
      const double d = step(w[k - 1], w[k]);
      require(d > 0, ErrorCode::NotOrientationPreserving, "boundary map reverses orientation");
      c.lifts.push_back(c.lifts.back() + d);
    }
    const double total = c.lifts.back() + step(w[n - 1], w[0]) - c.lifts.front();
    require(std::abs(total - 1.0) < 1e-6, ErrorCode::NotOrientationPreserving, "boundary map has degree != 1");
    c.validate();
    return c;
  }

  static CircleHomeo rotation(double radius, double image_radius, double angle, std::size_t n = 64) {
    CircleHomeo c;
    c.radius = radius;
    c.image_radius = image_radius;
    for (std::size_t k = 0; k < n; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(n);
      c.ts.push_back(t);
      c.lifts.push_back(t + angle / (2 * kPi));
    }
    return c;
  }

  static CircleHomeo identity(double radius) { return rotation(radius, radius, 0.0); }
};

/// Boundary data on S(0,1) u S(0,L): inner maps onto S(0,1), outer onto S(0,L').
struct AnnulusHomeo {
  CircleHomeo inner, outer;

  double L() const { return outer.radius; }
  double L_image() const { return outer.image_radius; }
  Complex operator()(Complex z) const {
    return std::abs(std::abs(z) - 1.0) <= std::abs(std::abs(z) - L()) ? inner(z) : outer(z);
  }
  void validate() const {
    inner.validate();
    outer.validate();
    require(std::abs(inner.radius - 1.0) < 1e-12 && std::abs(inner.image_radius - 1.0) < 1e-12,
            ErrorCode::InvalidArgument, "inner circle must be the unit circle");
    require(L() > 1.0 && L_image() > 1.0, ErrorCode::InvalidArgument, "outer radii must exceed 1");
  }
};

// ---------------------------------------------------------------------------
// mesh utilities

using Edge = std::pair<std::uint32_t, std::uint32_t>;

inline Edge edge_key(std::uint32_t a, std::uint32_t b) { return {std::min(a, b), std::max(a, b)}; }

/// One conforming pass: bisects every marked edge, splitting each triangle into 2, 3 or 4.
inline void split_edges(PLMap& m, const std::vector<Edge>& marked) {
  std::map<Edge, std::uint32_t> mid;
  for (const auto& e : marked) {
    if (mid.contains(e)) continue;
    mid[e] = static_cast<std::uint32_t>(m.vertices.size());
    m.vertices.push_back(0.5 * (m.vertices[e.first] + m.vertices[e.second]));
    m.image_vertices.push_back(0.5 * (m.image_vertices[e.first] + m.image_vertices[e.second]));
  }
  if (mid.empty()) return;
  std::vector<Tri> next;
  next.reserve(m.triangles.size() + 3 * mid.size());
  for (const auto& t : m.triangles) {
    std::array<std::optional<std::uint32_t>, 3> M;
    int count = 0;
    for (int e = 0; e < 3; ++e) {
      auto it = mid.find(edge_key(t[e], t[(e + 1) % 3]));
      if (it != mid.end()) {
        M[e] = it->second;
        ++count;
      }
    }
    if (count == 0) {
      next.push_back(t);
    } else if (count == 3) {
      next.push_back({t[0], *M[0], *M[2]});
      next.push_back({t[1], *M[1], *M[0]});
      next.push_back({t[2], *M[2], *M[1]});
      next.push_back({*M[0], *M[1], *M[2]});
    } else {
      // fan the polygon (triangle plus edge midpoints) from a midpoint
      std::vector<std::uint32_t> ring;
      std::size_t root = 0;
      for (int e = 0; e < 3; ++e) {
        ring.push_back(t[e]);
        if (M[e]) {
          if (root == 0) root = ring.size();
          ring.push_back(*M[e]);
        }
      }
      const std::size_t n = ring.size();
      for (std::size_t k = 1; k + 1 < n; ++k)
        next.push_back({ring[root], ring[(root + k) % n], ring[(root + k + 1) % n]});
    }
  }
  m.triangles = std::move(next);
}

/// Splits edges longer than target(source midpoint, image midpoint), in source or image, until none remain.
inline PLMap refine_edges(const PLMap& m, const std::function<double(Complex, Complex)>& target,
                          int max_passes = 24) {
  PLMap out = m;
  for (int pass = 0; pass < max_passes; ++pass) {
    std::vector<Edge> marked;
    for (const auto& t : out.triangles)
      for (int e = 0; e < 3; ++e) {
        const auto a = t[e], b = t[(e + 1) % 3];
        const Complex sa = out.vertices[a], sb = out.vertices[b], ia = out.image_vertices[a],
                      ib = out.image_vertices[b];
        const double lim = target(0.5 * (sa + sb), 0.5 * (ia + ib));
        if (std::abs(sa - sb) > lim || std::abs(ia - ib) > lim) marked.push_back(edge_key(a, b));
      }
    if (marked.empty()) break;
    split_edges(out, marked);
  }
  return out;
}

inline PLMap refine_edges(const PLMap& m, double target, int max_passes = 24) {
  return refine_edges(m, [target](Complex, Complex) { return target; }, max_passes);
}

/// Largest |H(v+N) - H(v) - N| over vertex pairs related by the period; 0 when none pair up.
inline double periodicity_defect(const PLMap& m, int N) {
  std::map<std::pair<long long, long long>, std::size_t> index;
  const double q = 1e-9;
  auto key = [q](Complex p) { return std::make_pair(std::llround(p.real() / q), std::llround(p.imag() / q)); };
  for (std::size_t i = 0; i < m.vertices.size(); ++i) index[key(m.vertices[i])] = i;
  double worst = 0.0;
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    auto it = index.find(key(m.vertices[i] + static_cast<double>(N)));
    if (it == index.end()) continue;
    worst = std::max(worst, std::abs(m.image_vertices[it->second] - m.image_vertices[i] - static_cast<double>(N)));
  }
  return worst;
}

inline double max_dilatation(const PLMap& m) {
  double K = 1.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) K = std::max(K, affine_dilatation(m.piece(t)));
  return K;
}

// ---------------------------------------------------------------------------
// dyadic extension

/**
 * PL extension of h (h(n)=n) to the strip R x [0,1] over source window [a,b] x [0,1].
 * Levels 0..m_max-1 use the three triangle types; the band below y = 2^{-m_max}
 * is closed by two triangles per cell interpolating h on y = 0.
 */
inline PLMap dyadic_pl_extend(const LineHomeo& h, int a, int b, int m_max) {
  require(b > a, ErrorCode::InvalidArgument, "empty window");
  require(m_max >= 1 && m_max <= 20, ErrorCode::InvalidArgument, "depth must be in [1, 20]");
  h.validate();
  for (int n = a; n <= b + 1; ++n)
    require(std::abs(h(n) - n) <= 1e-12 * std::max(1.0, std::abs(static_cast<double>(n))), ErrorCode::NotAnchored,
            "h(" + std::to_string(n) + ") != " + std::to_string(n));

  PLMap out;
  out.depth = m_max;
  out.period = h.period;
  // row m holds vertices (k 2^-m, 2^-m) for k in [a 2^m, b 2^m]; row m_max+1 is y = 0 at the finest spacing
  std::vector<std::uint32_t> row_start(m_max + 2);
  for (int m = 0; m <= m_max; ++m) {
    row_start[m] = static_cast<std::uint32_t>(out.vertices.size());
    const double s = std::ldexp(1.0, -m);
    const long k0 = static_cast<long>(a) << m, k1 = static_cast<long>(b) << m;
    for (long k = k0; k <= k1; ++k) {
      const double x = static_cast<double>(k) * s;
      const double hx = h(x);
      out.vertices.emplace_back(x, s);
      out.image_vertices.emplace_back(hx, h(x + s) - hx);
    }
  }
  row_start[m_max + 1] = static_cast<std::uint32_t>(out.vertices.size());
  {
    const double s = std::ldexp(1.0, -m_max);
    const long k0 = static_cast<long>(a) << m_max, k1 = static_cast<long>(b) << m_max;
    for (long k = k0; k <= k1; ++k) {
      const double x = static_cast<double>(k) * s;
      out.vertices.emplace_back(x, 0.0);
      out.image_vertices.emplace_back(h(x), 0.0);
    }
  }
  auto V = [&](int m, long j) { return row_start[m] + static_cast<std::uint32_t>(j); };
  for (int m = 0; m < m_max; ++m) {
    const long cells = static_cast<long>(b - a) << m;
    for (long j = 0; j < cells; ++j) {
      out.triangles.push_back({V(m, j), V(m + 1, 2 * j + 1), V(m, j + 1)});          // top edge + bottom midpoint
      out.triangles.push_back({V(m, j), V(m + 1, 2 * j), V(m + 1, 2 * j + 1)});      // left
      out.triangles.push_back({V(m, j + 1), V(m + 1, 2 * j + 1), V(m + 1, 2 * j + 2)});  // right
    }
  }
  const long cells = static_cast<long>(b - a) << m_max;
  for (long j = 0; j < cells; ++j) {
    const auto A = V(m_max + 1, j), B = V(m_max + 1, j + 1), C = V(m_max, j + 1), D = V(m_max, j);
    out.triangles.push_back({A, B, C});
    out.triangles.push_back({A, C, D});
  }
  return out;
}

// ---------------------------------------------------------------------------
// trapezoid strip extension

namespace detail {

struct ClipVertex {
  Complex img;  // position in the unit-cell picture
  Complex src;  // corresponding source point (affine along edges)
};

/// Sutherland-Hodgman against a positively oriented triangle.
inline std::vector<ClipVertex> clip_to_triangle(std::vector<ClipVertex> poly, const std::array<Complex, 3>& C) {
  for (int e = 0; e < 3 && !poly.empty(); ++e) {
    const Complex p = C[e], d = C[(e + 1) % 3] - C[e];
    auto side = [&](Complex z) { return cross(d, z - p); };
    std::vector<ClipVertex> next;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const ClipVertex& u = poly[i];
      const ClipVertex& v = poly[(i + 1) % poly.size()];
      const double su = side(u.img), sv = side(v.img);
      if (su >= 0) next.push_back(u);
      if ((su > 0 && sv < 0) || (su < 0 && sv > 0)) {
        const double t = su / (su - sv);
        next.push_back({u.img + t * (v.img - u.img), u.src + t * (v.src - u.src)});
      }
    }
    poly = std::move(next);
  }
  return poly;
}

}  // namespace detail

struct TrapezoidOptions {
  int depth = 8;
  double cell_bound = 64.0;  // a: cell image mutual distances must lie in [1/a, a]
};

/**
 * Extension of the pair (h0 on y=0, h1 on y=1) to the strip, over source window [a,b].
 * Trapezoids with corners h0(n), h0(n+1), h1(n+1)+i, h1(n)+i are split along the
 * lower-left/upper-right diagonal; the normalized data is extended on each half-strip
 * by the dyadic construction and the result is pulled back through the split map.
 */
inline PLMap trapezoid_strip_extend(const LineHomeo& h0, const LineHomeo& h1, int a, int b,
                                    const TrapezoidOptions& opt = {}) {
  require(b > a, ErrorCode::InvalidArgument, "empty window");
  h0.validate();
  h1.validate();
  const double abound = opt.cell_bound;
  auto corners = [&](long n) {
    const double x = static_cast<double>(n);
    return std::array<Complex, 4>{Complex(h0(x), 0), Complex(h0(x + 1), 0), Complex(h1(x + 1), 1),
                                  Complex(h1(x), 1)};
  };
  for (long n = a; n < b; ++n) {
    const auto P = corners(n);
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        const double d = std::abs(P[i] - P[j]);
        if (d < 1.0 / abound || d > abound)
          fail(ErrorCode::CellDistortionTooLarge,
               "cell [" + std::to_string(n) + "," + std::to_string(n + 1) + "] has corner distance " +
                   std::to_string(d) + " outside [1/a, a]");
      }
  }

  // normalized boundary data, integers fixed
  const double step = std::ldexp(1.0, -opt.depth);
  auto normalize = [&](const LineHomeo& h) {
    auto w = [&h](double x) {
      const double n = std::floor(x);
      const double lo = h(n), hi = h(n + 1);
      return n + (h(x) - lo) / (hi - lo);
    };
    if (h.period) return LineHomeo::sample(w, 0.0, *h.period, step, h.period);
    return LineHomeo::sample(w, a, b + 1, step);
  };
  const LineHomeo w0 = normalize(h0), w1 = normalize(h1);
  const PLMap D0 = dyadic_pl_extend(w0, a, b, opt.depth);
  const PLMap D1 = dyadic_pl_extend(w1, a, b, opt.depth);

  // unit-cell triangles and their trapezoid images
  struct Cell {
    std::array<Complex, 3> unit;
    Affine to_trap;
  };
  std::vector<std::array<Cell, 2>> cells;
  for (long n = a; n < b; ++n) {
    const auto P = corners(n);
    const double x = static_cast<double>(n);
    const std::array<Complex, 3> A{Complex(x, 0), Complex(x + 1, 0), Complex(x + 1, 1)};
    const std::array<Complex, 3> B{Complex(x, 0), Complex(x + 1, 1), Complex(x, 1)};
    cells.push_back({Cell{A, affine_from_triangles(A, {P[0], P[1], P[2]})},
                     Cell{B, affine_from_triangles(B, {P[0], P[2], P[3]})}});
  }

  PLMap out;
  out.depth = opt.depth;
  if (h0.period && h1.period && *h0.period == *h1.period) out.period = h0.period;
  VertexPool pool(1e-11);
  auto emit = [&](const std::array<Complex, 3>& src, const std::array<Complex, 3>& img) {
    std::vector<detail::ClipVertex> tri{{img[0], src[0]}, {img[1], src[1]}, {img[2], src[2]}};
    double xmin = kInf, xmax = -kInf;
    for (const auto& p : img) {
      xmin = std::min(xmin, p.real());
      xmax = std::max(xmax, p.real());
    }
    const long n0 = std::max<long>(a, static_cast<long>(std::floor(xmin)));
    const long n1 = std::min<long>(b - 1, static_cast<long>(std::floor(xmax)));
    Box sb;
    for (const auto& p : src) sb.expand(p);
    const double tiny = 1e-14 * sb.diameter() * sb.diameter();
    for (long n = n0; n <= n1; ++n)
      for (const Cell& c : cells[static_cast<std::size_t>(n - a)]) {
        auto poly = detail::clip_to_triangle(tri, c.unit);
        if (poly.size() < 3) continue;
        std::vector<std::uint32_t> ids;
        for (const auto& v : poly) {
          const auto id = pool.add(v.src, c.to_trap(v.img));
          if (ids.empty() || ids.back() != id) ids.push_back(id);
        }
        while (ids.size() > 1 && ids.back() == ids.front()) ids.pop_back();
        for (std::size_t k = 1; k + 1 < ids.size(); ++k) {
          const Tri t{ids[0], ids[k], ids[k + 1]};
          const auto& S = pool.sources();
          if (signed_area(S[t[0]], S[t[1]], S[t[2]]) > tiny) out.triangles.push_back(t);
        }
      }
  };
  // lower half-strip: (x,y) -> (x, y/2), (u,v) -> (u, v/2)
  for (std::size_t t = 0; t < D0.triangles.size(); ++t) {
    auto s = D0.source(t), i = D0.image(t);
    for (auto& p : s) p = Complex(p.real(), 0.5 * p.imag());
    for (auto& p : i) p = Complex(p.real(), 0.5 * p.imag());
    emit(s, i);
  }
  // upper half-strip: reflected; swap two vertices to restore orientation
  for (std::size_t t = 0; t < D1.triangles.size(); ++t) {
    auto s = D1.source(t), i = D1.image(t);
    for (auto& p : s) p = Complex(p.real(), 1.0 - 0.5 * p.imag());
    for (auto& p : i) p = Complex(p.real(), 1.0 - 0.5 * p.imag());
    std::swap(s[1], s[2]);
    std::swap(i[1], i[2]);
    emit(s, i);
  }
  out.vertices = std::move(pool.sources());
  out.image_vertices = std::move(pool.images());
  return out;
}

// ---------------------------------------------------------------------------
// circle lifts

struct LiftPair {
  std::function<double(double)> F, G;  // F(t+1) = F(t)+1, G already shifted by -k
  long k = 0;
  double sup_gap = 0.0;  // sup |F - G| on the grid
  double sup_fg = 0.0;   // sup |f - g| on the grid
};

/// Lifts under t -> e^{2 pi i t}; G is shifted by the integer minimizing sup |F - G - k|.
inline LiftPair circle_lift_pair(const CircleHomeo& f, const CircleHomeo& g, std::size_t grid = 4096) {
  f.validate();
  g.validate();
  std::vector<double> D(grid);
  LiftPair out;
  for (std::size_t i = 0; i < grid; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(grid);
    D[i] = f.lift(t) - g.lift(t);
    out.sup_fg = std::max(out.sup_fg, std::abs(f.at_turn(t) / f.image_radius - g.at_turn(t) / g.image_radius));
  }
  const auto [lo, hi] = std::minmax_element(D.begin(), D.end());
  const double centre = 0.5 * (*lo + *hi);
  double best = kInf;
  for (long k : {static_cast<long>(std::floor(centre)), static_cast<long>(std::ceil(centre))}) {
    const double gap = std::max(std::abs(*hi - k), std::abs(*lo - k));
    if (gap < best) {
      best = gap;
      out.k = k;
    }
  }
  out.sup_gap = best;
  out.F = [f](double t) { return f.lift(t); };
  out.G = [g, k = out.k](double t) { return g.lift(t) + static_cast<double>(k); };
  return out;
}

// ---------------------------------------------------------------------------
// annulus extensions

struct AnnulusOptions {
  int depth = 6;
  double spread_bound = 128.0;  // a
  double chord = 0.125;         // max edge length, in strip units, before descending
};

/// Radial map of the annulus 1 <= r <= L onto 1 <= r <= lambda, linear in r.
inline Complex radial_stretch(Complex z, double L, double lambda) {
  const double r = std::abs(z);
  return z / r * (1.0 + (lambda - 1.0) / (L - 1.0) * (r - 1.0));
}

/**
 * Extension on an annulus 1 <= |z| <= L, carried by a strip mesh over [0,N] x [0,1].
 * Evaluation goes through the strip exactly; `mesh` is the straight-triangle descent,
 * for export and mesh checks.
 */
struct AnnulusExtension {
  PLMap mesh;
  std::shared_ptr<const PLMap> strip;
  int N = 0;
  double L = 0, L_image = 0, lambda = 0;  // lambda = e^{2 pi/N}

  Complex operator()(Complex z) const {
    require(z != Complex(0.0), ErrorCode::InvalidArgument, "origin is not in the annulus");
    const Complex s = L == lambda ? z : radial_stretch(z, L, lambda);
    const double Nd = N;
    double x = -Nd * std::arg(s) / (2 * kPi);
    if (x < 0) x += Nd;
    const double y = std::clamp(Nd * std::log(std::abs(s)) / (2 * kPi), 0.0, 1.0);
    require(std::abs(std::abs(z) - std::clamp(std::abs(z), 1.0, L)) <= 1e-9 * L, ErrorCode::InvalidArgument,
            "point outside the annulus");
    const auto w = (*eval_)(Complex(std::min(x, Nd), y));
    require(w.has_value(), ErrorCode::InvalidArgument, "point outside the strip mesh");
    const Complex img = std::exp(Complex(0, -2 * kPi) * *w / Nd);
    return L_image == lambda ? img : radial_stretch(img, lambda, L_image);
  }

  void build_evaluator() { eval_ = std::make_shared<PLEvaluator>(*strip); }

 private:
  std::shared_ptr<PLEvaluator> eval_;
};

namespace detail {

/**
 * Straight-triangle image of the strip mesh under psi, followed by the radial stretches
 * to radii L (source) and Lp (image). Edges of triangles that flip or overlap after
 * descent are bisected in the strip until the descended mesh is an embedding.
 */
inline PLMap annulus_descend(const PLMap& strip, int N, double L, double Lp, double chord, int max_passes = 8) {
  const double Nd = N, lambda = std::exp(2 * kPi / N);
  auto down = [&](Complex z, double R) {
    const Complex w = std::exp(Complex(0, -2 * kPi) * z / Nd);
    return R == lambda ? w : radial_stretch(w, lambda, R);
  };
  // edge length keeping chord sagitta below ~1/10 of the (radially squeezed) triangle height
  auto target = [&](Complex s, Complex i) {
    auto limit = [&](double y, double R) {
      const double c = (R - 1.0) / (lambda - 1.0), rho = std::exp(2 * kPi * std::clamp(y, 0.0, 1.0) / Nd);
      return 0.8 * c * rho / (1.0 + c * (rho - 1.0)) * Nd / (2 * kPi);
    };
    return std::min({chord, limit(s.imag(), L), limit(i.imag(), Lp)});
  };
  PLMap fine = refine_edges(strip, target);
  for (int pass = 0;; ++pass) {
    PLMap out;
    out.depth = strip.depth;
    VertexPool pool(1e-11);
    std::vector<std::uint32_t> remap(fine.vertices.size());
    for (std::size_t i = 0; i < fine.vertices.size(); ++i)
      remap[i] = pool.add(down(fine.vertices[i], L), down(fine.image_vertices[i], Lp));
    std::vector<std::size_t> origin;
    for (std::size_t t = 0; t < fine.triangles.size(); ++t) {
      const auto& f = fine.triangles[t];
      const Tri u{remap[f[0]], remap[f[1]], remap[f[2]]};
      if (u[0] != u[1] && u[1] != u[2] && u[0] != u[2]) {
        out.triangles.push_back(u);
        origin.push_back(t);
      }
    }
    out.vertices = std::move(pool.sources());
    out.image_vertices = std::move(pool.images());
    if (pass == max_passes) return out;

    std::vector<char> bad(out.triangles.size(), 0);
    bool any = false;
    for (std::size_t t = 0; t < out.triangles.size(); ++t) {
      const auto s = out.source(t), i = out.image(t);
      if (!(signed_area(s[0], s[1], s[2]) > 0) || !(signed_area(i[0], i[1], i[2]) > 0)) bad[t] = any = true;
    }
    for (const auto& [a, b] : find_image_overlaps(out, std::numeric_limits<std::size_t>::max())) bad[a] = bad[b] = any = true;
    if (!any) return out;
    std::vector<Edge> marked;
    for (std::size_t t = 0; t < out.triangles.size(); ++t)
      if (bad[t]) {
        const auto& f = fine.triangles[origin[t]];
        for (int e = 0; e < 3; ++e) marked.push_back(edge_key(f[e], f[(e + 1) % 3]));
      }
    split_edges(fine, marked);
  }
}

inline AnnulusExtension annulus_extend_impl(const AnnulusHomeo& h, int N, const AnnulusOptions& opt, double L_src,
                                            double L_img);

}  // namespace detail

/**
 * Extension of h on S(0,1) u S(0,e^{2 pi/N}), each circle preserved, to the annulus.
 * Lifts to the strip through psi(z) = e^{-2 pi i z/N} and extends there.
 */
inline AnnulusExtension annulus_extend_unit(const AnnulusHomeo& h, int N, const AnnulusOptions& opt = {}) {
  const double lambda = std::exp(2 * kPi / N);
  return detail::annulus_extend_impl(h, N, opt, lambda, lambda);
}

inline AnnulusExtension detail::annulus_extend_impl(const AnnulusHomeo& h, int N, const AnnulusOptions& opt,
                                                    double L_src, double L_img) {
  require(N >= 2, ErrorCode::InvalidArgument, "N must be >= 2");
  h.validate();
  const double L = std::exp(2 * kPi / N);
  require(std::abs(h.L() - L) < 1e-9 * L && std::abs(h.L_image() - L) < 1e-9 * L, ErrorCode::InvalidArgument,
          "outer circle must have radius e^{2 pi/N} and be preserved");
  const double Nd = N;
  auto psi = [Nd](Complex z) { return std::exp(Complex(0, -2 * kPi) * z / Nd); };

  // spread of the images of each arc's four endpoints
  for (int t = 0; t < N; ++t) {
    const std::array<Complex, 4> P{h(psi(t)), h(psi(t + 1.0)), h(psi(Complex(t, 1))), h(psi(Complex(t + 1.0, 1)))};
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) {
        const double d = std::abs(P[i] - P[j]) * Nd;
        if (d < 1.0 / opt.spread_bound || d > opt.spread_bound)
          fail(ErrorCode::PreconditionSpread, "arc " + std::to_string(t) + ": endpoint distance " +
                                                  std::to_string(d / Nd) + " outside [1/(aN), a/N]");
      }
  }

  const LiftPair lp = circle_lift_pair(h.inner, h.outer);
  // lifts under t -> e^{-2 pi i t}: F_(t) = -F(-t)
  const double step = std::ldexp(1.0, -opt.depth);
  const LineHomeo b0 = LineHomeo::sample([&](double t) { return -Nd * lp.F(-t / Nd); }, 0.0, Nd, step, N);
  const LineHomeo b1 = LineHomeo::sample([&](double t) { return -Nd * lp.G(-t / Nd); }, 0.0, Nd, step, N);
  TrapezoidOptions to;
  to.depth = opt.depth;
  to.cell_bound = opt.spread_bound;

  AnnulusExtension out;
  out.N = N;
  out.lambda = L;
  out.L = L_src;
  out.L_image = L_img;
  out.strip = std::make_shared<const PLMap>(trapezoid_strip_extend(b0, b1, 0, N, to));
  out.mesh = annulus_descend(*out.strip, N, L_src, L_img, opt.chord);
  out.build_evaluator();
  return out;
}

/// N >= 2 with (M-1)/N <= L-1 < (M-1)/(N-1).
inline int annulus_subdivision(double L, double M) {
  require(L > 1.0 && L < M, ErrorCode::RadiusOutOfRange, "need 1 < L < M");
  const double x = (M - 1.0) / (L - 1.0);
  return std::max(2, static_cast<int>(std::ceil(x - 1e-12)));
}

/// Extension of h: S(0,1) u S(0,L) -> S(0,1) u S(0,L') for L < M.
inline AnnulusExtension annulus_extend_general(const AnnulusHomeo& h, double M, const AnnulusOptions& opt = {}) {
  h.validate();
  const double L = h.L(), Lp = h.L_image();
  const int N = annulus_subdivision(L, M);
  const double lambda = std::exp(2 * kPi / N);
  AnnulusHomeo hat = h;
  hat.outer.radius = lambda;
  hat.outer.image_radius = lambda;
  return detail::annulus_extend_impl(hat, N, opt, L, Lp);
}

/// z = r e^{i theta} -> r^beta e^{i theta}.
inline std::function<Complex(Complex)> power_map(double beta) {
  require(beta > 0, ErrorCode::InvalidArgument, "beta must be positive");
  return [beta](Complex z) {
    require(z != Complex(0.0), ErrorCode::OriginExcluded, "power map undefined at 0");
    const double r = std::abs(z);
    return z / r * std::pow(r, beta);
  };
}

/// beta solving (L/R^2)^beta = L'/R^2.
inline double power_exponent(double L, double Lp, double R) {
  const double den = std::log(L) - 2 * std::log(R);
  require(den > 0 && std::log(Lp) - 2 * std::log(R) > 0, ErrorCode::InvalidArgument, "need L, L' > R^2");
  return (std::log(Lp) - 2 * std::log(R)) / den;
}

/// Piecewise extension on S(0,1) u S(0,L): inner collar, power-map middle ring, outer collar.
struct AnnulusComposite {
  double L = 0, L_image = 0, R = 0, beta = 1;
  std::vector<AnnulusExtension> pieces;  // one piece when delegated, else inner and (rescaled) outer collar

  bool delegated() const { return pieces.size() == 1; }

  Complex operator()(Complex z) const {
    const double r = std::abs(z);
    if (delegated() || r <= R) return pieces[0](z);
    if (r >= L / R) return L_image / R * pieces[1](z * R / L);
    return R * power_map(beta)(z / R);
  }
};

/// Log-ratio-controlled extension for large annuli; L < 2 delegates to the general case.
inline AnnulusComposite annulus_extend_large(const AnnulusHomeo& h, double c0, const AnnulusOptions& opt = {}) {
  h.validate();
  const double L = h.L(), Lp = h.L_image();
  const double ratio = std::log(Lp) / std::log(L);
  if (ratio < 1.0 / c0 || ratio > c0)
    fail(ErrorCode::LogRatioViolation, "log L'/log L = " + std::to_string(ratio) + " outside [1/c0, c0]");
  AnnulusComposite out;
  out.L = L;
  out.L_image = Lp;
  if (L < 2.0) {
    out.R = L;
    out.pieces.push_back(annulus_extend_general(h, 2.0, opt));
    return out;
  }
  const double L0 = std::min(L, Lp);
  const double R = 0.5 * (1.0 + std::sqrt(std::min(2.0, L0)));
  out.R = R;
  out.beta = power_exponent(L, Lp, R);

  out.pieces.push_back(annulus_extend_general(AnnulusHomeo{h.inner, CircleHomeo::identity(R)}, 2.0, opt));

  // outer collar rescaled to 1 <= r <= R: identity inside, h on the outside
  AnnulusHomeo outer{CircleHomeo::identity(1.0), h.outer};
  outer.outer.radius = R;
  outer.outer.image_radius = R;
  AnnulusExtension e = annulus_extend_general(outer, 2.0, opt);
  for (auto& v : e.mesh.vertices) v *= L / R;
  for (auto& v : e.mesh.image_vertices) v *= Lp / R;
  out.pieces.push_back(std::move(e));
  return out;
}

// ---------------------------------------------------------------------------
// Beurling-Ahlfors

/// (u, v) at each point of the upper half-plane, Simpson's rule on 129 nodes; h must cover [x-y, x+y].
inline std::vector<Complex> ba_extend(const std::function<double(double)>& h, double lo, double hi,
                                      std::span<const Complex> points) {
  constexpr int kNodes = 129;
  std::vector<Complex> out;
  out.reserve(points.size());
  for (const Complex& p : points) {
    const double x = p.real(), y = p.imag();
    require(y >= 0, ErrorCode::InvalidArgument, "point below the real axis");
    if (x - y < lo || x + y > hi)
      fail(ErrorCode::QuadratureRangeExceeded, "need h on [" + std::to_string(x - y) + ", " + std::to_string(x + y) +
                                                   "], have [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    if (y == 0) {
      out.emplace_back(h(x), 0.0);
      continue;
    }
    double su = 0.0, sv = 0.0;
    for (int k = 0; k < kNodes; ++k) {
      const double t = static_cast<double>(k) / (kNodes - 1);
      const double w = (k == 0 || k == kNodes - 1) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      const double a = h(x + t * y), b = h(x - t * y);
      su += w * (a + b);
      sv += w * (a - b);
    }
    const double scale = 1.0 / (3.0 * (kNodes - 1));
    out.emplace_back(0.5 * su * scale, 0.5 * sv * scale);
  }
  return out;
}

inline std::vector<Complex> ba_extend(const LineHomeo& h, std::span<const Complex> points) {
  h.validate();
  const double lo = h.period ? -kInf : h.lo(), hi = h.period ? kInf : h.hi();
  return ba_extend([&h](double x) { return h(x); }, lo, hi, points);
}

// ---------------------------------------------------------------------------
// boundary estimates

struct StripBounds {
  double lo = kInf, hi = -kInf;  // range of Im f on y = 1
  double eta1 = 1.0;             // empirical eta at ratio exactly 1
  bool within_band = true;       // [lo, hi] inside [1/eta1, eta1]
};

/**
 * pairs: (z, f(z)) with z on y = 0 (f identity there) or y = 1.
 * eta1 is the largest |f(a)-f(b)|/|f(a)-f(c)| over sampled triples with |a-b| = |a-c|.
 */
inline StripBounds strip_bounds_check(std::span<const std::pair<Complex, Complex>> pairs) {
  StripBounds out;
  double scale = 1.0;
  for (const auto& [z, w] : pairs) scale = std::max(scale, std::abs(z));
  for (const auto& [z, w] : pairs) {
    if (std::abs(z.imag()) < 1e-12) {
      require(std::abs(w - z) <= 1e-9 * scale, ErrorCode::InvalidArgument, "f must fix the line y = 0");
    } else if (std::abs(z.imag() - 1.0) < 1e-12) {
      if (!(w.imag() > 0)) fail(ErrorCode::WrongSideOfLine, "image of y = 1 not in the upper half-plane");
      out.lo = std::min(out.lo, w.imag());
      out.hi = std::max(out.hi, w.imag());
    } else {
      fail(ErrorCode::InvalidArgument, "samples must lie on y = 0 or y = 1");
    }
  }
  const std::size_t n = pairs.size();
  std::vector<double> best(n, 1.0);
  parallel_for(n, [&](std::size_t i) {
    std::vector<std::pair<double, double>> d;  // (source distance, target distance)
    d.reserve(n);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) d.emplace_back(std::abs(pairs[i].first - pairs[j].first), std::abs(pairs[i].second - pairs[j].second));
    std::sort(d.begin(), d.end());
    for (std::size_t s = 0; s < d.size();) {
      std::size_t e = s;
      double tmin = kInf, tmax = 0.0;
      while (e < d.size() && d[e].first <= d[s].first * (1 + 1e-9)) {
        tmin = std::min(tmin, d[e].second);
        tmax = std::max(tmax, d[e].second);
        ++e;
      }
      if (e - s >= 2 && tmin > 0) best[i] = std::max(best[i], tmax / tmin);
      s = e;
    }
  });
  out.eta1 = *std::max_element(best.begin(), best.end());
  const double tol = 1e-9;
  out.within_band = out.lo >= 1.0 / out.eta1 - tol && out.hi <= out.eta1 + tol;
  return out;
}

struct AnnuliGap {
  double L_image = 0.0;  // min |f| on the outer circle
  double K_gap = 0.0;    // (max |f| - L') / (L' - 1)
};

/// outer: (z, f(z)) for z on S(0,L).
inline AnnuliGap annuli_identity_check(std::span<const std::pair<Complex, Complex>> outer) {
  require(!outer.empty(), ErrorCode::InvalidArgument, "no samples");
  double lo = kInf, hi = 0.0;
  for (const auto& [z, w] : outer) {
    const double r = std::abs(w);
    if (!(r > 1.0)) fail(ErrorCode::ImageInsideDisk, "outer image meets the closed unit disk");
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return {lo, (hi - lo) / (lo - 1.0)};
}

}  // namespace qcpair
