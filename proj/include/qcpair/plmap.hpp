/**
 * @file plmap.hpp
 * @brief Triangulated piecewise-linear maps: storage, affine pieces,
 *        orientation and overlap checks, point evaluation.
 */
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "qcpair/geom.hpp"
#include "qcpair/util.hpp"

namespace qcpair {

using Tri = std::array<std::uint32_t, 3>;

/// z -> a z + b conj(z) + c
struct Affine {
  Complex a, b, c;
  Complex operator()(Complex z) const { return a * z + b * std::conj(z) + c; }
};

/// Affine map sending triangle (p0,p1,p2) to (q0,q1,q2).
inline Affine affine_from_triangles(const std::array<Complex, 3>& p, const std::array<Complex, 3>& q) {
  const Complex e1 = p[1] - p[0], e2 = p[2] - p[0];
  const Complex f1 = q[1] - q[0], f2 = q[2] - q[0];
  // a e + b conj(e) = f for e in {e1, e2}
  const Complex det = e1 * std::conj(e2) - std::conj(e1) * e2;
  require(std::abs(det) > 0, ErrorCode::DegenerateTriangle, "degenerate source triangle");
  const Complex a = (f1 * std::conj(e2) - std::conj(e1) * f2) / det;
  const Complex b = (e1 * f2 - f1 * e2) / det;
  return {a, b, q[0] - a * p[0] - b * std::conj(p[0])};
}

/// (|a|+|b|)/(|a|-|b|); infinite when the piece is singular or reverses orientation.
inline double affine_dilatation(const Affine& f) {
  const double A = std::abs(f.a), B = std::abs(f.b);
  if (!(A > B)) return kInf;
  return (A + B) / (A - B);
}

inline double signed_area(Complex a, Complex b, Complex c) { return 0.5 * cross(b - a, c - a); }

/// Smallest interior angle of a triangle, radians.
inline double min_angle(Complex a, Complex b, Complex c) {
  auto ang = [](Complex p, Complex q, Complex r) { return std::abs(std::arg((q - p) / (r - p))); };
  return std::min({ang(a, b, c), ang(b, c, a), ang(c, a, b)});
}

struct PLMap {
  std::vector<Complex> vertices;
  std::vector<Tri> triangles;
  std::vector<Complex> image_vertices;
  int depth = 0;
  std::optional<int> period;

  std::array<Complex, 3> source(std::size_t t) const {
    return {vertices[triangles[t][0]], vertices[triangles[t][1]], vertices[triangles[t][2]]};
  }
  std::array<Complex, 3> image(std::size_t t) const {
    return {image_vertices[triangles[t][0]], image_vertices[triangles[t][1]], image_vertices[triangles[t][2]]};
  }
  Affine piece(std::size_t t) const { return affine_from_triangles(source(t), image(t)); }
};

/// Deduplicates points on a 1e-9 lattice.
class VertexPool {
 public:
  explicit VertexPool(double quantum = 1e-9) : q_(quantum) {}

  std::uint32_t add(Complex p, Complex image) {
    const Key k{std::llround(p.real() / q_), std::llround(p.imag() / q_)};
    auto [it, inserted] = index_.try_emplace(k, static_cast<std::uint32_t>(src_.size()));
    if (inserted) {
      src_.push_back(p);
      img_.push_back(image);
    }
    return it->second;
  }

  std::vector<Complex>& sources() { return src_; }
  std::vector<Complex>& images() { return img_; }

 private:
  struct Key {
    long long x, y;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return std::hash<long long>()(k.x) * 1000003u ^ std::hash<long long>()(k.y);
    }
  };
  double q_;
  std::unordered_map<Key, std::uint32_t, KeyHash> index_;
  std::vector<Complex> src_, img_;
};

struct MeshCheck {
  bool source_positive = true;
  bool image_positive = true;
  std::size_t first_bad = 0;
  double min_source_angle = kPi;
  double min_image_angle = kPi;
};

inline MeshCheck check_orientation(const PLMap& m) {
  MeshCheck c;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto s = m.source(t), i = m.image(t);
    const double as = signed_area(s[0], s[1], s[2]), ai = signed_area(i[0], i[1], i[2]);
    if (!(as > 0) && c.source_positive && c.image_positive) c.first_bad = t;
    if (!(ai > 0) && c.source_positive && c.image_positive) c.first_bad = t;
    c.source_positive &= as > 0;
    c.image_positive &= ai > 0;
    c.min_source_angle = std::min(c.min_source_angle, min_angle(s[0], s[1], s[2]));
    c.min_image_angle = std::min(c.min_image_angle, min_angle(i[0], i[1], i[2]));
  }
  return c;
}

namespace detail {

/// True when the open triangles intersect, via separating axes with a relative tolerance.
inline bool interiors_overlap(const std::array<Complex, 3>& A, const std::array<Complex, 3>& B, double eps) {
  auto separated_by_edges = [eps](const std::array<Complex, 3>& P, const std::array<Complex, 3>& Q) {
    for (int e = 0; e < 3; ++e) {
      const Complex d = P[(e + 1) % 3] - P[e];
      const Complex n(-d.imag(), d.real());
      double pmin = kInf, pmax = -kInf, qmin = kInf, qmax = -kInf;
      for (int k = 0; k < 3; ++k) {
        const double p = dot(P[k], n), q = dot(Q[k], n);
        pmin = std::min(pmin, p);
        pmax = std::max(pmax, p);
        qmin = std::min(qmin, q);
        qmax = std::max(qmax, q);
      }
      const double tol = eps * std::abs(n);
      if (pmax <= qmin + tol || qmax <= pmin + tol) return true;
    }
    return false;
  };
  return !separated_by_edges(A, B) && !separated_by_edges(B, A);
}

}  // namespace detail

/// Pairs of image triangles whose interiors intersect; empty for an embedding.
inline std::vector<std::pair<std::size_t, std::size_t>> find_image_overlaps(const PLMap& m, std::size_t limit = 16) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::size_t nt = m.triangles.size();
  if (nt < 2) return out;
  Box all;
  double mean_size = 0.0;
  std::vector<Box> boxes(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    for (const auto& p : m.image(t)) boxes[t].expand(p);
    all.expand(boxes[t]);
    mean_size += std::max(boxes[t].width(), boxes[t].height());
  }
  mean_size /= static_cast<double>(nt);
  const double eps = 1e-9 * std::max(mean_size, 1e-300);
  const double cell = std::max(mean_size * 2.0, all.diameter() / 2048.0);
  const auto nx = static_cast<long>(std::floor(all.width() / cell)) + 1;
  const auto ny = static_cast<long>(std::floor(all.height() / cell)) + 1;
  std::unordered_map<long long, std::vector<std::uint32_t>> grid;
  auto cell_range = [&](const Box& b) {
    const long i0 = static_cast<long>((b.xmin - all.xmin) / cell), i1 = static_cast<long>((b.xmax - all.xmin) / cell);
    const long j0 = static_cast<long>((b.ymin - all.ymin) / cell), j1 = static_cast<long>((b.ymax - all.ymin) / cell);
    return std::array<long, 4>{std::clamp(i0, 0L, nx - 1), std::clamp(i1, 0L, nx - 1), std::clamp(j0, 0L, ny - 1),
                               std::clamp(j1, 0L, ny - 1)};
  };
  for (std::size_t t = 0; t < nt; ++t) {
    const auto r = cell_range(boxes[t]);
    for (long j = r[2]; j <= r[3]; ++j)
      for (long i = r[0]; i <= r[1]; ++i) grid[j * nx + i].push_back(static_cast<std::uint32_t>(t));
  }
  for (const auto& [key, list] : grid) {
    for (std::size_t x = 0; x < list.size(); ++x)
      for (std::size_t y = x + 1; y < list.size(); ++y) {
        const std::size_t s = list[x], t = list[y];
        const Box &bs = boxes[s], &bt = boxes[t];
        if (bs.xmax <= bt.xmin || bt.xmax <= bs.xmin || bs.ymax <= bt.ymin || bt.ymax <= bs.ymin) continue;
        // report each pair once: only from the cell holding the overlap box's lower-left corner
        const Box ov{std::max(bs.xmin, bt.xmin), std::max(bs.ymin, bt.ymin), 0, 0};
        const auto r = cell_range(Box{ov.xmin, ov.ymin, ov.xmin, ov.ymin});
        if (r[2] * nx + r[0] != key) continue;
        if (detail::interiors_overlap(m.image(s), m.image(t), eps)) {
          out.emplace_back(std::min(s, t), std::max(s, t));
          if (out.size() >= limit) return out;
        }
      }
  }
  return out;
}

/// Point location over the source triangulation.
class PLEvaluator {
 public:
  explicit PLEvaluator(const PLMap& m) : m_(&m) {
    for (std::size_t t = 0; t < m.triangles.size(); ++t)
      for (const auto& p : m.source(t)) box_.expand(p);
    const double n = std::max<double>(1.0, static_cast<double>(m.triangles.size()));
    cell_ = std::max(box_.width(), box_.height()) / std::max(1.0, std::sqrt(n));
    if (!(cell_ > 0)) cell_ = 1.0;
    nx_ = static_cast<long>(box_.width() / cell_) + 1;
    ny_ = static_cast<long>(box_.height() / cell_) + 1;
    buckets_.resize(static_cast<std::size_t>(nx_ * ny_));
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
      Box b;
      for (const auto& p : m.source(t)) b.expand(p);
      for (long j = idx(b.ymin - box_.ymin, ny_); j <= idx(b.ymax - box_.ymin, ny_); ++j)
        for (long i = idx(b.xmin - box_.xmin, nx_); i <= idx(b.xmax - box_.xmin, nx_); ++i)
          buckets_[static_cast<std::size_t>(j * nx_ + i)].push_back(static_cast<std::uint32_t>(t));
    }
  }

  /// Image of z, or nullopt outside the mesh (tolerance 1e-9 relative to the cell size).
  std::optional<Complex> operator()(Complex z) const {
    if (box_.distance(z) > 1e-9 * cell_) return std::nullopt;
    const long i = idx(z.real() - box_.xmin, nx_), j = idx(z.imag() - box_.ymin, ny_);
    const double tol = -1e-9;
    std::optional<Complex> best;
    double best_slack = -kInf;
    for (auto t : buckets_[static_cast<std::size_t>(j * nx_ + i)]) {
      const auto s = m_->source(t);
      const double area = signed_area(s[0], s[1], s[2]);
      const double l0 = signed_area(z, s[1], s[2]) / area, l1 = signed_area(s[0], z, s[2]) / area;
      const double l2 = 1.0 - l0 - l1;
      const double slack = std::min({l0, l1, l2});
      if (slack >= tol && slack > best_slack) {
        const auto q = m_->image(t);
        best = l0 * q[0] + l1 * q[1] + l2 * q[2];
        best_slack = slack;
        if (slack > 0) break;
      }
    }
    return best;
  }

 private:
  long idx(double off, long n) const { return std::clamp(static_cast<long>(std::floor(off / cell_)), 0L, n - 1); }

  const PLMap* m_;
  Box box_;
  double cell_ = 1.0;
  long nx_ = 1, ny_ = 1;
  std::vector<std::vector<std::uint32_t>> buckets_;
};

}  // namespace qcpair
