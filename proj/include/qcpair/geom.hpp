/**
 * @file geom.hpp
 * @brief Extended-plane points, chordal metric, cross-ratios, Möbius maps,
 *        regions bounded by lines, circles and Jordan polygons.
 *
 * All coordinates are dimensionless doubles. The point at infinity is a
 * tagged value; every operation documents what it does with it.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qcpair/error.hpp"

namespace qcpair {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A point of the Riemann sphere: a finite complex value or infinity.
class ExtPoint {
 public:
  constexpr ExtPoint() = default;
  ExtPoint(Complex z) : value_(z) {  // NOLINT(google-explicit-constructor)
    require(std::isfinite(z.real()) && std::isfinite(z.imag()), ErrorCode::InvalidArgument,
            "finite ExtPoint needs finite coordinates");
  }
  ExtPoint(double x, double y = 0.0) : ExtPoint(Complex(x, y)) {}

  static constexpr ExtPoint infinity() {
    ExtPoint p;
    p.infinite_ = true;
    return p;
  }

  constexpr bool is_infinity() const { return infinite_; }
  constexpr bool is_finite() const { return !infinite_; }

  Complex value() const {
    require(!infinite_, ErrorCode::InfinityNotSupported, "point at infinity has no planar value");
    return value_;
  }

  friend bool operator==(const ExtPoint& a, const ExtPoint& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }

 private:
  Complex value_{};
  bool infinite_ = false;
};

enum class Metric { euclidean, chordal };

/// Chordal metric of the sphere of diameter 2; range [0, 2].
inline double chordal_distance(const ExtPoint& z, const ExtPoint& w) {
  if (z.is_infinity() && w.is_infinity()) return 0.0;
  if (z.is_infinity()) return 2.0 / std::sqrt(1.0 + std::norm(w.value()));
  if (w.is_infinity()) return 2.0 / std::sqrt(1.0 + std::norm(z.value()));
  const Complex a = z.value(), b = w.value();
  return 2.0 * std::abs(a - b) / (std::sqrt(1.0 + std::norm(a)) * std::sqrt(1.0 + std::norm(b)));
}

/// Euclidean distance; infinity is at infinite distance from every finite point.
inline double euclidean_distance(const ExtPoint& z, const ExtPoint& w) {
  if (z.is_infinity() && w.is_infinity()) return 0.0;
  if (z.is_infinity() || w.is_infinity()) return kInf;
  return std::abs(z.value() - w.value());
}

inline double distance(const ExtPoint& z, const ExtPoint& w, Metric m) {
  return m == Metric::chordal ? chordal_distance(z, w) : euclidean_distance(z, w);
}

/**
 * Cross-ratio [a,b,c,d] = d(a,c) d(b,d) / (d(a,d) d(b,c)).
 *
 * With the Euclidean metric the factors containing infinity are omitted,
 * which is the value the chordal metric gives for the same quadruple.
 */
inline double cross_ratio(const ExtPoint& a, const ExtPoint& b, const ExtPoint& c, const ExtPoint& d,
                          Metric m = Metric::euclidean) {
  const std::array<const ExtPoint*, 4> pts{&a, &b, &c, &d};
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      require(!(*pts[i] == *pts[j]), ErrorCode::DegenerateQuadruple, "cross-ratio needs four distinct points");

  if (m == Metric::chordal)
    return chordal_distance(a, c) * chordal_distance(b, d) / (chordal_distance(a, d) * chordal_distance(b, c));

  auto factor = [](const ExtPoint& p, const ExtPoint& q) {
    return (p.is_infinity() || q.is_infinity()) ? 1.0 : std::abs(p.value() - q.value());
  };
  return factor(a, c) * factor(b, d) / (factor(a, d) * factor(b, c));
}

/// z -> (a w + b)/(c w + d) with w = z or conj(z).
struct MobiusMap {
  Complex a{1.0}, b{0.0}, c{0.0}, d{1.0};
  bool conjugate_first = false;

  MobiusMap() = default;
  MobiusMap(Complex a_, Complex b_, Complex c_, Complex d_, bool conj = false)
      : a(a_), b(b_), c(c_), d(d_), conjugate_first(conj) {
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    require(scale > 0 && std::abs(a * d - b * c) > 1e-12 * scale * scale, ErrorCode::DegenerateMap,
            "Möbius map needs ad - bc != 0");
  }

  static MobiusMap identity() { return {}; }
  /// z -> 1/conj(z), the reflection in the unit circle.
  static MobiusMap inversion() { return {0.0, 1.0, 1.0, 0.0, true}; }
  static MobiusMap reciprocal() { return {0.0, 1.0, 1.0, 0.0, false}; }
  static MobiusMap affine(Complex scale, Complex shift) { return {scale, shift, 0.0, 1.0, false}; }
  /// z -> 1/(z - p), which sends p to infinity.
  static MobiusMap pole_at(Complex p) { return {0.0, 1.0, 1.0, -p, false}; }

  bool is_orientation_preserving() const { return !conjugate_first; }
};

inline ExtPoint apply_mobius(const MobiusMap& T, const ExtPoint& z) {
  if (z.is_infinity()) {
    if (T.c == Complex(0.0)) return ExtPoint::infinity();
    return ExtPoint(T.a / T.c);
  }
  const Complex w = T.conjugate_first ? std::conj(z.value()) : z.value();
  const Complex den = T.c * w + T.d;
  if (den == Complex(0.0)) return ExtPoint::infinity();
  return ExtPoint((T.a * w + T.b) / den);
}

/// Composition outer ∘ inner.
inline MobiusMap compose(const MobiusMap& outer, const MobiusMap& inner) {
  // outer(w) with w = inner(z); conjugating a Möbius map conjugates its coefficients.
  Complex a = outer.a, b = outer.b, c = outer.c, d = outer.d;
  if (outer.conjugate_first) {
    // outer(inner(z)) = M(conj(inner(z))) and conj(inner) has conjugated coefficients.
    const Complex ia = std::conj(inner.a), ib = std::conj(inner.b), ic = std::conj(inner.c), id = std::conj(inner.d);
    return {a * ia + b * ic, a * ib + b * id, c * ia + d * ic, c * ib + d * id, !inner.conjugate_first};
  }
  return {a * inner.a + b * inner.c, a * inner.b + b * inner.d, c * inner.a + d * inner.c,
          c * inner.b + d * inner.d, inner.conjugate_first};
}

inline MobiusMap inverse(const MobiusMap& T) {
  if (!T.conjugate_first) return {T.d, -T.b, -T.c, T.a, false};
  // w = (a conj(z) + b)/(c conj(z) + d)  =>  conj(z) = (d w - b)/(-c w + a)
  //  =>  z = (conj(d) conj(w) - conj(b)) / (-conj(c) conj(w) + conj(a))
  return {std::conj(T.d), -std::conj(T.b), -std::conj(T.c), std::conj(T.a), true};
}

// ---------------------------------------------------------------------------
// Segment helpers

inline double cross(Complex u, Complex v) { return u.real() * v.imag() - u.imag() * v.real(); }
inline double dot(Complex u, Complex v) { return u.real() * v.real() + u.imag() * v.imag(); }

inline double point_segment_distance(Complex p, Complex a, Complex b) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return std::abs(p - (a + t * ab));
}

/// True when closed segments [a,b] and [c,d] share a point.
inline bool segments_intersect(Complex a, Complex b, Complex c, Complex d) {
  auto orient = [](Complex p, Complex q, Complex r) {
    const double v = cross(q - p, r - p);
    return (v > 0) - (v < 0);
  };
  auto on_seg = [](Complex p, Complex q, Complex r) {
    return std::min(p.real(), q.real()) <= r.real() && r.real() <= std::max(p.real(), q.real()) &&
           std::min(p.imag(), q.imag()) <= r.imag() && r.imag() <= std::max(p.imag(), q.imag());
  };
  const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_seg(a, b, c)) return true;
  if (o2 == 0 && on_seg(a, b, d)) return true;
  if (o3 == 0 && on_seg(c, d, a)) return true;
  if (o4 == 0 && on_seg(c, d, b)) return true;
  return false;
}

struct Box {
  double xmin = kInf, ymin = kInf, xmax = -kInf, ymax = -kInf;

  void expand(Complex p) {
    xmin = std::min(xmin, p.real());
    xmax = std::max(xmax, p.real());
    ymin = std::min(ymin, p.imag());
    ymax = std::max(ymax, p.imag());
  }
  void expand(const Box& b) {
    xmin = std::min(xmin, b.xmin);
    xmax = std::max(xmax, b.xmax);
    ymin = std::min(ymin, b.ymin);
    ymax = std::max(ymax, b.ymax);
  }
  Box inflated(double m) const { return {xmin - m, ymin - m, xmax + m, ymax + m}; }
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double diameter() const { return std::hypot(width(), height()); }
  bool empty() const { return !(xmin <= xmax && ymin <= ymax); }
  bool contains(Complex p) const {
    return p.real() >= xmin && p.real() <= xmax && p.imag() >= ymin && p.imag() <= ymax;
  }
  double distance(Complex p) const {
    const double dx = std::max({xmin - p.real(), 0.0, p.real() - xmax});
    const double dy = std::max({ymin - p.imag(), 0.0, p.imag() - ymax});
    return std::hypot(dx, dy);
  }
};

/**
 * Bucket index over the edges of a closed polygon: exact nearest-edge
 * distance and crossing-number containment in sublinear time.
 */
class SegmentIndex {
 public:
  explicit SegmentIndex(std::span<const Complex> ring) : pts_(ring.begin(), ring.end()) {
    const std::size_t n = pts_.size();
    for (const auto& p : pts_) box_.expand(p);
    const double span = std::max({box_.width(), box_.height(), 1e-300});
    const auto side = static_cast<std::size_t>(std::clamp(std::sqrt(static_cast<double>(n)), 1.0, 512.0));
    cell_ = span / static_cast<double>(side);
    nx_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(box_.width() / cell_)) + 1);
    ny_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(box_.height() / cell_)) + 1);
    cells_.assign(nx_ * ny_, {});
    bands_.assign(ny_, {});
    for (std::size_t e = 0; e < n; ++e) {
      const Complex a = pts_[e], b = pts_[(e + 1) % n];
      const auto [i0, j0] = cell_of(Complex(std::min(a.real(), b.real()), std::min(a.imag(), b.imag())));
      const auto [i1, j1] = cell_of(Complex(std::max(a.real(), b.real()), std::max(a.imag(), b.imag())));
      for (std::size_t j = j0; j <= j1; ++j) {
        bands_[j].push_back(static_cast<std::uint32_t>(e));
        for (std::size_t i = i0; i <= i1; ++i) cells_[j * nx_ + i].push_back(static_cast<std::uint32_t>(e));
      }
    }
  }

  double distance(Complex p) const {
    // rings around p's own (possibly virtual) cell; ring k is at least (k-1) cells away
    const auto NX = static_cast<long>(nx_), NY = static_cast<long>(ny_);
    auto idx = [this](double off) {
      return static_cast<long>(std::clamp(std::floor(off / cell_), -1e9, 1e9));
    };
    const long ui = idx(p.real() - box_.xmin), uj = idx(p.imag() - box_.ymin);
    const long dx0 = ui < 0 ? -ui : (ui >= NX ? ui - NX + 1 : 0);
    const long dy0 = uj < 0 ? -uj : (uj >= NY ? uj - NY + 1 : 0);
    const long k0 = std::max(dx0, dy0), kmax = k0 + std::max(NX, NY);
    double best = kInf;
    auto visit = [&](long i, long j) {
      if (i < 0 || j < 0 || i >= NX || j >= NY) return;
      for (auto e : cells_[static_cast<std::size_t>(j * NX + i)])
        best = std::min(best, point_segment_distance(p, pts_[e], pts_[(e + 1) % pts_.size()]));
    };
    // lower bound on the distance from p to cells strictly outside ring k
    auto gap = [this](double x, double lo, long u, long k, long N) {
      double g = kInf;
      if (u + k + 1 <= N - 1) g = std::min(g, std::max(0.0, lo + static_cast<double>(u + k + 1) * cell_ - x));
      if (u - k - 1 >= 0) g = std::min(g, std::max(0.0, x - (lo + static_cast<double>(u - k) * cell_)));
      return g;
    };
    auto span_gap = [this](double x, double lo, long N) {
      return std::max({0.0, lo - x, x - (lo + static_cast<double>(N) * cell_)});
    };
    const double xg = span_gap(p.real(), box_.xmin, NX), yg = span_gap(p.imag(), box_.ymin, NY);
    for (long k = k0; k <= kmax; ++k) {
      if (k == 0) {
        visit(ui, uj);
        continue;
      }
      for (long i = std::max(ui - k, 0L); i <= std::min(ui + k, NX - 1); ++i) {
        visit(i, uj - k);
        visit(i, uj + k);
      }
      for (long j = std::max(uj - k + 1, 0L); j <= std::min(uj + k - 1, NY - 1); ++j) {
        visit(ui - k, j);
        visit(ui + k, j);
      }
      const double lb = std::min(std::hypot(gap(p.real(), box_.xmin, ui, k, NX), yg),
                                 std::hypot(gap(p.imag(), box_.ymin, uj, k, NY), xg));
      if (best <= lb) break;
    }
    return best;
  }

  /// Crossing-number test; points exactly on an edge may land on either side.
  bool inside(Complex p) const {
    if (!box_.contains(p)) return false;
    const auto [ci, cj] = cell_of(p);
    (void)ci;
    bool in = false;
    const std::size_t n = pts_.size();
    for (auto e : bands_[cj]) {
      const Complex a = pts_[e], b = pts_[(e + 1) % n];
      if ((a.imag() > p.imag()) != (b.imag() > p.imag())) {
        const double x = a.real() + (p.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
        if (p.real() < x) in = !in;
      }
    }
    return in;
  }

  const Box& box() const { return box_; }

 private:
  std::pair<std::size_t, std::size_t> cell_of(Complex p) const {
    const double fx = (p.real() - box_.xmin) / cell_;
    const double fy = (p.imag() - box_.ymin) / cell_;
    const auto i = static_cast<std::size_t>(std::clamp(std::floor(fx), 0.0, static_cast<double>(nx_ - 1)));
    const auto j = static_cast<std::size_t>(std::clamp(std::floor(fy), 0.0, static_cast<double>(ny_ - 1)));
    return {i, j};
  }

  std::vector<Complex> pts_;
  Box box_;
  double cell_ = 1.0;
  std::size_t nx_ = 1, ny_ = 1;
  std::vector<std::vector<std::uint32_t>> cells_;
  std::vector<std::vector<std::uint32_t>> bands_;
};

// ---------------------------------------------------------------------------
// Regions

/// {z : <z, normal> > offset} for a unit normal.
struct HalfPlane {
  Complex normal{0.0, 1.0};
  double offset = 0.0;
};

struct Disk {
  Complex center{};
  double radius = 1.0;
};

/// {z : lo < <z, normal> < hi}; a Jordan region of the sphere through infinity.
struct Strip {
  Complex normal{0.0, 1.0};
  double lo = -1.0, hi = 1.0;
};

/// Simple closed polygon; the edge from the last vertex back to the first is implicit.
struct PolyJordan {
  std::vector<Complex> vertices;
  bool positively_oriented = true;
  std::shared_ptr<const SegmentIndex> index;
};

inline double signed_area(std::span<const Complex> v) {
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) a += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * a;
}

/// O(n^2) sweep over non-adjacent edge pairs.
inline bool polygon_is_simple(std::span<const Complex> v) {
  const std::size_t n = v.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Complex a = v[i], b = v[(i + 1) % n];
    if (a == b) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(a, b, v[j], v[(j + 1) % n])) return false;
    }
  }
  return true;
}

class Region {
 public:
  using Shape = std::variant<HalfPlane, Disk, Strip, PolyJordan>;

  Region() : Region(HalfPlane{}) {}

  static Region half_plane(Complex normal, double offset, bool complemented = false) {
    require(std::abs(normal) > 0, ErrorCode::InvalidRegion, "half-plane normal must be nonzero");
    const double len = std::abs(normal);
    if (complemented) return Region(HalfPlane{-normal / len, -offset / len}, false);
    return Region(HalfPlane{normal / len, offset / len}, false);
  }
  /// {Im z > y}
  static Region above(double y) { return half_plane({0, 1}, y); }
  /// {Im z < y}
  static Region below(double y) { return half_plane({0, -1}, -y); }

  static Region disk(Complex center, double radius, bool complemented = false) {
    require(radius > 0 && std::isfinite(radius), ErrorCode::InvalidRegion, "disk radius must be positive");
    return Region(Disk{center, radius}, complemented);
  }
  static Region disk_exterior(Complex center, double radius) { return disk(center, radius, true); }

  static Region strip(Complex normal, double lo, double hi) {
    require(std::abs(normal) > 0 && lo < hi, ErrorCode::InvalidRegion, "strip needs lo < hi");
    const double len = std::abs(normal);
    return Region(Strip{normal / len, lo / len, hi / len}, false);
  }

  static Region polygon(std::vector<Complex> vertices, bool complemented = false) {
    require(vertices.size() >= 3, ErrorCode::InvalidRegion, "polygon needs at least 3 vertices");
    require(polygon_is_simple(vertices), ErrorCode::InvalidRegion, "polygon must be simple");
    PolyJordan p;
    p.positively_oriented = signed_area(vertices) > 0;
    p.index = std::make_shared<SegmentIndex>(vertices);
    p.vertices = std::move(vertices);
    return Region(std::move(p), complemented);
  }

  /// Rebuilds a region from stored fields without renormalizing; normals must already be unit length.
  static Region from_shape(const Shape& s, bool complemented) {
    if (const auto* p = std::get_if<PolyJordan>(&s)) return polygon(p->vertices, complemented);
    if (const auto* d = std::get_if<Disk>(&s)) return disk(d->center, d->radius, complemented);
    const Complex n = std::visit([](const auto& v) -> Complex {
      if constexpr (requires { v.normal; }) return v.normal;
      else return {};
    }, s);
    require(std::abs(std::abs(n) - 1.0) <= 1e-12, ErrorCode::InvalidRegion, "normal must have unit length");
    if (const auto* st = std::get_if<Strip>(&s))
      require(st->lo < st->hi, ErrorCode::InvalidRegion, "strip needs lo < hi");
    require(!complemented || !std::holds_alternative<HalfPlane>(s), ErrorCode::InvalidRegion,
            "complemented half-planes are stored with a flipped normal");
    return Region(s, complemented);
  }

  const Shape& shape() const { return shape_; }
  bool complemented() const { return complemented_; }

  /// Complement of the closure; a half-plane stays a plain half-plane with flipped normal.
  Region complement() const {
    if (const auto* hp = std::get_if<HalfPlane>(&shape_))
      return Region(HalfPlane{-hp->normal, -hp->offset}, complemented_);
    Region r = *this;
    r.complemented_ = !complemented_;
    return r;
  }

  /// Characteristic length used for relative tolerances.
  double scale() const {
    return std::visit(
        [](const auto& s) -> double {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Disk>) return s.radius;
          else if constexpr (std::is_same_v<T, Strip>) return s.hi - s.lo;
          else if constexpr (std::is_same_v<T, PolyJordan>) return s.index->box().diameter();
          else return std::max(1.0, std::abs(s.offset));
        },
        shape_);
  }

  double boundary_eps() const { return 1e-12 * scale(); }

  /// Euclidean distance from z to the boundary; identical for the region and its complement.
  double boundary_distance(const ExtPoint& zp) const {
    require(zp.is_finite(), ErrorCode::InfinityNotSupported, "boundary distance of infinity");
    const Complex z = zp.value();
    return std::visit(
        [&](const auto& s) -> double {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, HalfPlane>) return std::abs(dot(z, s.normal) - s.offset);
          else if constexpr (std::is_same_v<T, Disk>) return std::abs(std::abs(z - s.center) - s.radius);
          else if constexpr (std::is_same_v<T, Strip>) {
            const double t = dot(z, s.normal);
            return std::min(std::abs(t - s.lo), std::abs(t - s.hi));
          } else return s.index->distance(z);
        },
        shape_);
  }

  /// Membership in the open region.
  bool contains(const ExtPoint& zp) const {
    if (zp.is_infinity()) return complemented_ ? !base_contains_infinity() : base_contains_infinity();
    const Complex z = zp.value();
    const bool on_boundary = boundary_distance(z) <= boundary_eps();
    if (on_boundary) return false;
    return base_contains(z) != complemented_;
  }

  /// Membership in the closure.
  bool contains_closed(const ExtPoint& zp) const {
    if (zp.is_infinity()) return contains(zp) || infinity_on_boundary();
    const Complex z = zp.value();
    if (boundary_distance(z) <= boundary_eps()) return true;
    return base_contains(z) != complemented_;
  }

  /// Whether the region, as a subset of the plane, is bounded.
  bool bounded() const {
    if (complemented_) return false;
    return std::holds_alternative<Disk>(shape_) || std::holds_alternative<PolyJordan>(shape_);
  }

  /// Bounding box of the boundary curve (empty for unbounded boundaries).
  Box boundary_box() const {
    Box b;
    if (const auto* d = std::get_if<Disk>(&shape_)) {
      b = {d->center.real() - d->radius, d->center.imag() - d->radius, d->center.real() + d->radius,
           d->center.imag() + d->radius};
    } else if (const auto* p = std::get_if<PolyJordan>(&shape_)) {
      b = p->index->box();
    }
    return b;
  }

  /// Points sampled along the boundary, n of them; for unbounded boundaries the
  /// samples cover the given window of the boundary-line parameter.
  std::vector<Complex> boundary_samples(std::size_t n, double lo = -8.0, double hi = 8.0) const {
    std::vector<Complex> out;
    out.reserve(n);
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Disk>) {
            for (std::size_t i = 0; i < n; ++i)
              out.push_back(s.center + s.radius * std::polar(1.0, 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n)));
          } else if constexpr (std::is_same_v<T, PolyJordan>) {
            const auto& v = s.vertices;
            double perim = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) perim += std::abs(v[(i + 1) % v.size()] - v[i]);
            std::size_t e = 0;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
              const double target = perim * static_cast<double>(i) / static_cast<double>(n);
              while (acc + std::abs(v[(e + 1) % v.size()] - v[e]) < target && e + 1 < v.size()) {
                acc += std::abs(v[(e + 1) % v.size()] - v[e]);
                ++e;
              }
              const Complex a = v[e], b = v[(e + 1) % v.size()];
              const double len = std::abs(b - a);
              out.push_back(a + (b - a) * ((target - acc) / len));
            }
          } else {
            const Complex nrm = s.normal;
            const Complex tangent = Complex(-nrm.imag(), nrm.real());
            double off = 0.0;
            if constexpr (std::is_same_v<T, HalfPlane>) off = s.offset;
            else off = s.lo;
            for (std::size_t i = 0; i < n; ++i) {
              const double t = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
              out.push_back(off * nrm + t * tangent);
            }
          }
        },
        shape_);
    return out;
  }

 private:
  Region(Shape s, bool complemented = false) : shape_(std::move(s)), complemented_(complemented) {}

  bool base_contains(Complex z) const {
    return std::visit(
        [&](const auto& s) -> bool {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, HalfPlane>) return dot(z, s.normal) > s.offset;
          else if constexpr (std::is_same_v<T, Disk>) return std::abs(z - s.center) < s.radius;
          else if constexpr (std::is_same_v<T, Strip>) {
            const double t = dot(z, s.normal);
            return t > s.lo && t < s.hi;
          } else return s.index->inside(z);
        },
        shape_);
  }
  bool base_contains_infinity() const { return false; }
  bool infinity_on_boundary() const {
    return std::holds_alternative<HalfPlane>(shape_) || std::holds_alternative<Strip>(shape_);
  }

  Shape shape_;
  bool complemented_ = false;
};

// ---------------------------------------------------------------------------
// Scenes

struct NamedRegion {
  std::string name;
  Region region;
};

struct SampleSet {
  std::string name;
  std::string region;
  std::vector<ExtPoint> points;
};

struct Scene {
  std::vector<NamedRegion> regions;
  std::vector<SampleSet> samples;
  std::map<std::string, std::string> metadata;

  const Region& region(const std::string& name) const {
    for (const auto& r : regions)
      if (r.name == name) return r.region;
    fail(ErrorCode::InvalidScene, "no region named '" + name + "'");
  }
  const SampleSet& sample_set(const std::string& name) const {
    for (const auto& s : samples)
      if (s.name == name) return s;
    fail(ErrorCode::InvalidScene, "no sample set named '" + name + "'");
  }

  /// Diameter of all finite sample points and bounded region boundaries.
  double diameter() const {
    Box b;
    for (const auto& r : regions) b.expand(r.region.boundary_box());
    for (const auto& s : samples)
      for (const auto& p : s.points)
        if (p.is_finite()) b.expand(p.value());
    return b.empty() ? 1.0 : std::max(b.diameter(), 1e-300);
  }

  /// Every sample must lie on the boundary of the region it names.
  void validate() const {
    const double tol = 1e-9 * std::max(1.0, diameter());
    for (const auto& s : samples) {
      const Region& r = region(s.region);
      for (const auto& p : s.points) {
        if (p.is_infinity()) continue;
        require(r.boundary_distance(p) <= tol, ErrorCode::InvalidScene,
                "sample set '" + s.name + "' has a point off the boundary of '" + s.region + "'");
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Relative distance of finite point clouds

inline double set_diameter(std::span<const ExtPoint> E, Metric m) {
  double d = 0.0;
  for (std::size_t i = 0; i < E.size(); ++i)
    for (std::size_t j = i + 1; j < E.size(); ++j) d = std::max(d, distance(E[i], E[j], m));
  return d;
}

inline double set_distance(std::span<const ExtPoint> E, std::span<const ExtPoint> F, Metric m) {
  double d = kInf;
  for (const auto& e : E)
    for (const auto& f : F) d = std::min(d, distance(e, f, m));
  return d;
}

/// dist(E,F) / min(diam E, diam F).
inline double relative_distance(std::span<const ExtPoint> E, std::span<const ExtPoint> F,
                                Metric m = Metric::euclidean) {
  const double dE = set_diameter(E, m), dF = set_diameter(F, m);
  require(dE > 0 && dF > 0, ErrorCode::DegenerateSet, "relative distance needs clouds with positive diameter");
  return set_distance(E, F, m) / std::min(dE, dF);
}

}  // namespace qcpair
