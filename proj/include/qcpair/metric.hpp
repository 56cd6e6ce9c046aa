/**
 * @file metric.hpp
 * @brief Hyperbolic, quasihyperbolic and relative hyperbolic distances as
 *        density-weighted shortest paths on masked square lattices.
 */
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "qcpair/geom.hpp"
#include "qcpair/util.hpp"

namespace qcpair {

enum class DensityKind { HalfPlaneExact, DiskExact, DiskExteriorExact, SimplyConnectedProxy };

inline std::string_view to_string(DensityKind k) {
  switch (k) {
    case DensityKind::HalfPlaneExact: return "HalfPlaneExact";
    case DensityKind::DiskExact: return "DiskExact";
    case DensityKind::DiskExteriorExact: return "DiskExteriorExact";
    case DensityKind::SimplyConnectedProxy: return "SimplyConnectedProxy";
  }
  return "Unknown";
}

struct DensityModel {
  DensityKind kind = DensityKind::SimplyConnectedProxy;
  /// Guaranteed factors (lo, hi) with lo * rho_true <= rho_model <= hi * rho_true.
  std::pair<double, double> factor_bounds{0.5, 2.0};
  std::string note;

  static DensityModel of(DensityKind k) {
    if (k == DensityKind::SimplyConnectedProxy)
      return {k, {0.5, 2.0}, "1/dist proxy; exact only up to the stated factors for simply connected domains"};
    return {k, {1.0, 1.0}, "closed form"};
  }
};

/// Closed-form model when the domain admits one, else the 1/dist proxy.
inline DensityModel auto_density_model(const Region& omega) {
  if (std::holds_alternative<HalfPlane>(omega.shape())) return DensityModel::of(DensityKind::HalfPlaneExact);
  if (std::holds_alternative<Disk>(omega.shape()))
    return DensityModel::of(omega.complemented() ? DensityKind::DiskExteriorExact : DensityKind::DiskExact);
  return DensityModel::of(DensityKind::SimplyConnectedProxy);
}

inline void check_model(const Region& omega, const DensityModel& model) {
  const bool ok = [&] {
    switch (model.kind) {
      case DensityKind::HalfPlaneExact: return std::holds_alternative<HalfPlane>(omega.shape());
      case DensityKind::DiskExact: return std::holds_alternative<Disk>(omega.shape()) && !omega.complemented();
      case DensityKind::DiskExteriorExact: return std::holds_alternative<Disk>(omega.shape()) && omega.complemented();
      case DensityKind::SimplyConnectedProxy: return true;
    }
    return false;
  }();
  require(ok, ErrorCode::IncompatibleModel, std::string("density model ") + std::string(to_string(model.kind)) +
                                                " does not match the domain");
}

/// Density without the interior check; z must be interior.
inline double density_unchecked(const Region& omega, Complex z, DensityKind kind) {
  switch (kind) {
    case DensityKind::DiskExact: {
      const auto& d = std::get<Disk>(omega.shape());
      return 2.0 * d.radius / (d.radius * d.radius - std::norm(z - d.center));
    }
    case DensityKind::DiskExteriorExact: {
      const auto& d = std::get<Disk>(omega.shape());
      return 2.0 * d.radius / (std::norm(z - d.center) - d.radius * d.radius);
    }
    default: return 1.0 / omega.boundary_distance(z);
  }
}

inline double hyperbolic_density(const Region& omega, const ExtPoint& z, const DensityModel& model) {
  check_model(omega, model);
  require(z.is_finite() && omega.contains(z), ErrorCode::PointNotInterior, "density needs an interior point");
  return density_unchecked(omega, z.value(), model.kind);
}

struct GridSpec {
  double h = 0.01;
  int connectivity = 16;
  std::optional<Box> window;
  /// Upper limit on lattice nodes, to fail fast on accidental huge grids.
  std::size_t max_nodes = 40'000'000;
};

struct GeodesicResult {
  double distance = 0.0;
  std::vector<Complex> path;
  DensityModel density_model;
};

/**
 * Square lattice h·Z² clipped to a window, with admissibility and density
 * stored on the half-step lattice so that every 8- and 16-neighbor edge
 * midpoint is a stored sample.
 */
class MetricGrid {
 public:
  MetricGrid(const Box& window, double h, int connectivity, const std::function<bool(Complex)>& admissible,
             const std::function<double(Complex)>& density, DensityModel model, std::size_t max_nodes = 40'000'000)
      : h_(h), connectivity_(connectivity), model_(std::move(model)) {
    require(h > 0 && std::isfinite(h), ErrorCode::InvalidArgument, "grid step must be positive");
    require(connectivity == 8 || connectivity == 16, ErrorCode::InvalidArgument, "connectivity must be 8 or 16");
    require(!window.empty() && window.width() > 0 && window.height() > 0, ErrorCode::InvalidArgument,
            "grid window must have positive area");
    i0_ = static_cast<long>(std::floor(window.xmin / h));
    j0_ = static_cast<long>(std::floor(window.ymin / h));
    nx_ = static_cast<std::size_t>(std::ceil(window.xmax / h) - static_cast<double>(i0_)) + 1;
    ny_ = static_cast<std::size_t>(std::ceil(window.ymax / h) - static_cast<double>(j0_)) + 1;
    require(nx_ * ny_ <= max_nodes, ErrorCode::InvalidArgument,
            "grid of " + std::to_string(nx_ * ny_) + " nodes exceeds the node limit");
    hx_ = 2 * nx_ - 1;
    hy_ = 2 * ny_ - 1;
    mask_.assign(hx_ * hy_, 0);
    density_.assign(hx_ * hy_, 0.0f);
    parallel_for(hy_, [&](std::size_t j) {
      for (std::size_t i = 0; i < hx_; ++i) {
        const Complex p = half_point(i, j);
        const std::size_t k = j * hx_ + i;
        if (!admissible(p)) continue;
        const double rho = density(p);
        if (!(rho > 0) || !std::isfinite(rho)) continue;
        mask_[k] = 1;
        density_[k] = static_cast<float>(rho);
      }
    });
  }

  double h() const { return h_; }
  int connectivity() const { return connectivity_; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t size() const { return nx_ * ny_; }
  const DensityModel& density_model() const { return model_; }

  Complex node_point(std::size_t id) const {
    return {static_cast<double>(i0_ + static_cast<long>(id % nx_)) * h_,
            static_cast<double>(j0_ + static_cast<long>(id / nx_)) * h_};
  }
  bool admissible(std::size_t id) const { return mask_[half_index(2 * (id % nx_), 2 * (id / nx_))] != 0; }
  double node_density(std::size_t id) const { return density_[half_index(2 * (id % nx_), 2 * (id / nx_))]; }

  /// Nearest admissible node within 2h of z.
  std::optional<std::size_t> snap(Complex z) const {
    const double fx = z.real() / h_ - static_cast<double>(i0_);
    const double fy = z.imag() / h_ - static_cast<double>(j0_);
    std::optional<std::size_t> best;
    double best_d = 2.0 * h_ * (1.0 + 1e-9);
    const long ci = std::lround(fx), cj = std::lround(fy);
    for (long j = cj - 2; j <= cj + 2; ++j) {
      if (j < 0 || j >= static_cast<long>(ny_)) continue;
      for (long i = ci - 2; i <= ci + 2; ++i) {
        if (i < 0 || i >= static_cast<long>(nx_)) continue;
        const std::size_t id = static_cast<std::size_t>(j) * nx_ + static_cast<std::size_t>(i);
        if (!admissible(id)) continue;
        const double d = std::abs(node_point(id) - z);
        if (d < best_d) {
          best_d = d;
          best = id;
        }
      }
    }
    return best;
  }

  std::size_t snap_or_throw(Complex z) const {
    auto id = snap(z);
    require(id.has_value(), ErrorCode::SnapFailed,
            "no admissible grid node within 2h of (" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")");
    return *id;
  }

  /// Single-source shortest paths; stops once every target is settled.
  std::vector<double> dijkstra(std::size_t source, const std::vector<std::size_t>& targets,
                               std::vector<std::int64_t>* parent = nullptr) const {
    std::vector<double> dist(size(), kInf);
    std::vector<std::uint8_t> done(size(), 0);
    if (parent) parent->assign(size(), -1);
    std::vector<std::uint8_t> is_target(size(), 0);
    std::size_t remaining = 0;
    for (auto t : targets)
      if (!is_target[t]) {
        is_target[t] = 1;
        ++remaining;
      }
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[source] = 0.0;
    pq.emplace(0.0, source);
    const auto& moves = offsets();
    while (!pq.empty()) {
      const auto [d, u] = pq.top();
      pq.pop();
      if (done[u]) continue;
      done[u] = 1;
      if (is_target[u] && --remaining == 0 && !targets.empty()) break;
      const long ui = static_cast<long>(u % nx_), uj = static_cast<long>(u / nx_);
      for (const auto& m : moves) {
        const long vi = ui + m.di, vj = uj + m.dj;
        if (vi < 0 || vj < 0 || vi >= static_cast<long>(nx_) || vj >= static_cast<long>(ny_)) continue;
        const std::size_t v = static_cast<std::size_t>(vj) * nx_ + static_cast<std::size_t>(vi);
        if (done[v] || !admissible(v)) continue;
        const std::size_t mid = half_index(static_cast<std::size_t>(2 * ui + m.di), static_cast<std::size_t>(2 * uj + m.dj));
        if (!mask_[mid]) continue;
        const double nd = d + static_cast<double>(density_[mid]) * h_ * m.len;
        if (nd < dist[v]) {
          dist[v] = nd;
          if (parent) (*parent)[v] = static_cast<std::int64_t>(u);
          pq.emplace(nd, v);
        }
      }
    }
    return dist;
  }

  GeodesicResult geodesic(Complex z, Complex w) const {
    const std::size_t s = snap_or_throw(z), t = snap_or_throw(w);
    std::vector<std::int64_t> parent;
    const auto dist = dijkstra(s, {t}, &parent);
    require(std::isfinite(dist[t]), ErrorCode::Unreachable, "endpoints lie in different grid components");
    GeodesicResult r;
    r.distance = dist[t];
    r.density_model = model_;
    for (std::int64_t v = static_cast<std::int64_t>(t); v >= 0; v = parent[static_cast<std::size_t>(v)]) {
      r.path.push_back(node_point(static_cast<std::size_t>(v)));
      if (static_cast<std::size_t>(v) == s) break;
    }
    std::reverse(r.path.begin(), r.path.end());
    return r;
  }

  /// Weighted length of a node path, summed in path order (matches the Dijkstra value).
  double path_length(const std::vector<Complex>& path) const {
    double total = 0.0;
    for (std::size_t k = 1; k < path.size(); ++k) {
      const Complex mid = 0.5 * (path[k - 1] + path[k]);
      const auto hi = static_cast<std::size_t>(std::lround(2.0 * (mid.real() / h_ - static_cast<double>(i0_))));
      const auto hj = static_cast<std::size_t>(std::lround(2.0 * (mid.imag() / h_ - static_cast<double>(j0_))));
      total += static_cast<double>(density_[half_index(hi, hj)]) * h_ * (std::abs(path[k] - path[k - 1]) / h_);
    }
    return total;
  }

 private:
  struct Move {
    int di, dj;
    double len;
  };

  const std::vector<Move>& offsets() const {
    static const std::vector<Move> eight = make_moves(false);
    static const std::vector<Move> sixteen = make_moves(true);
    return connectivity_ == 16 ? sixteen : eight;
  }
  static std::vector<Move> make_moves(bool knight) {
    std::vector<Move> mv;
    for (int dj = -2; dj <= 2; ++dj)
      for (int di = -2; di <= 2; ++di) {
        const int a = std::abs(di), b = std::abs(dj);
        const bool king = std::max(a, b) == 1;
        const bool kn = (a == 1 && b == 2) || (a == 2 && b == 1);
        if (king || (knight && kn)) mv.push_back({di, dj, std::hypot(di, dj)});
      }
    return mv;
  }

  Complex half_point(std::size_t i, std::size_t j) const {
    return {(static_cast<double>(2 * i0_) + static_cast<double>(i)) * 0.5 * h_,
            (static_cast<double>(2 * j0_) + static_cast<double>(j)) * 0.5 * h_};
  }
  std::size_t half_index(std::size_t i, std::size_t j) const { return j * hx_ + i; }

  double h_;
  int connectivity_;
  DensityModel model_;
  long i0_ = 0, j0_ = 0;
  std::size_t nx_ = 0, ny_ = 0, hx_ = 0, hy_ = 0;
  std::vector<std::uint8_t> mask_;
  std::vector<float> density_;
};

/// Window used when the caller gives none: the bounded part of the picture plus a margin,
/// or [-8,8]^2 (extended to cover the points) when nothing is bounded.
inline Box default_window(std::initializer_list<const Region*> regions, std::span<const Complex> points,
                          const Region* bounded_domain = nullptr) {
  if (bounded_domain && bounded_domain->bounded()) return bounded_domain->boundary_box();
  Box b;
  for (const auto* r : regions) b.expand(r->boundary_box());
  for (const auto& p : points) b.expand(p);
  bool any_bounded = false;
  for (const auto* r : regions) any_bounded |= !r->boundary_box().empty();
  if (!any_bounded) {
    b.expand(Box{-8, -8, 8, 8});
    return b;
  }
  const double margin = std::max(1.0, 0.5 * std::max(b.width(), b.height()));
  return b.inflated(margin);
}

/// Quasihyperbolic distance k_Ω(z, w).
inline GeodesicResult quasihyperbolic_distance(const Region& omega, const ExtPoint& z, const ExtPoint& w,
                                               const GridSpec& spec = {}) {
  require(z.is_finite() && w.is_finite() && omega.contains(z) && omega.contains(w), ErrorCode::PointNotInterior,
          "quasihyperbolic endpoints must be interior points");
  const DensityModel model = DensityModel::of(DensityKind::SimplyConnectedProxy);
  if (z == w) return {0.0, {z.value()}, model};
  Box win;
  if (spec.window) {
    win = *spec.window;
  } else if (omega.bounded()) {
    win = omega.boundary_box();
  } else {
    win.expand(z.value());
    win.expand(w.value());
    win.expand(omega.boundary_box());
    win = win.inflated(std::max(2.0, 0.5 * std::max(win.width(), win.height())));
  }
  MetricGrid grid(
      win, spec.h, spec.connectivity, [&](Complex p) { return omega.contains(p); },
      [&](Complex p) { return 1.0 / omega.boundary_distance(p); }, model, spec.max_nodes);
  GeodesicResult r = grid.geodesic(z.value(), w.value());
  r.density_model.note = "quasihyperbolic density 1/dist";
  return r;
}

/// Grid for d_{V,U}: admissible set closure(U*) minus V with the hyperbolic density of U*.
inline MetricGrid relative_grid(const Region& U, const Region& V, const GridSpec& spec,
                                std::optional<DensityModel> model = std::nullopt,
                                std::span<const Complex> extra_points = {}) {
  const Region ustar = U.complement();
  const DensityModel dm = model ? *model : auto_density_model(ustar);
  check_model(ustar, dm);
  const Box win = spec.window ? *spec.window : default_window({&U, &V}, extra_points, &ustar);
  const DensityKind kind = dm.kind;
  return MetricGrid(
      win, spec.h, spec.connectivity, [&](Complex p) { return !V.contains(p) && !U.contains_closed(p); },
      [&](Complex p) { return density_unchecked(ustar, p, kind); }, dm, spec.max_nodes);
}

inline void check_relative_endpoint(const Region& U, const ExtPoint& z) {
  require(z.is_finite(), ErrorCode::InfinityNotSupported, "relative metric is planar; move infinity into U first");
  require(!U.contains_closed(z), ErrorCode::EndpointInsideU, "endpoint lies in the closure of U");
}

inline GeodesicResult relative_hyperbolic_distance(const Region& U, const Region& V, const ExtPoint& z,
                                                   const ExtPoint& w, const GridSpec& spec = {},
                                                   std::optional<DensityModel> model = std::nullopt) {
  check_relative_endpoint(U, z);
  check_relative_endpoint(U, w);
  const std::vector<Complex> pts{z.value(), w.value()};
  if (z == w) {
    const Region ustar = U.complement();
    return {0.0, {z.value()}, model ? *model : auto_density_model(ustar)};
  }
  const MetricGrid grid = relative_grid(U, V, spec, model, pts);
  return grid.geodesic(z.value(), w.value());
}

using Matrix = std::vector<std::vector<double>>;

/// Pairwise d_{V,U} over a sample set on one shared grid; exactly symmetric.
inline Matrix metric_table(const MetricGrid& grid, const std::vector<ExtPoint>& samples) {
  const std::size_t n = samples.size();
  std::vector<std::size_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = grid.snap_or_throw(samples[i].value());
  Matrix M(n, std::vector<double>(n, 0.0));
  parallel_for(n, [&](std::size_t i) {
    std::vector<std::size_t> targets(ids.begin() + static_cast<long>(i) + 1, ids.end());
    if (targets.empty()) return;
    const auto dist = grid.dijkstra(ids[i], targets);
    for (std::size_t j = i + 1; j < n; ++j) {
      require(std::isfinite(dist[ids[j]]), ErrorCode::Unreachable,
              "samples " + std::to_string(i) + " and " + std::to_string(j) + " lie in different grid components");
      M[i][j] = dist[ids[j]];
    }
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) M[i][j] = M[j][i];
  return M;
}

inline Matrix metric_table(const Region& U, const Region& V, const std::vector<ExtPoint>& samples,
                           const GridSpec& spec = {}, std::optional<DensityModel> model = std::nullopt) {
  std::vector<Complex> pts;
  for (const auto& s : samples) {
    check_relative_endpoint(U, s);
    pts.push_back(s.value());
  }
  if (samples.size() <= 1) return Matrix(samples.size(), std::vector<double>(samples.size(), 0.0));
  const MetricGrid grid = relative_grid(U, V, spec, model, pts);
  return metric_table(grid, samples);
}

}  // namespace qcpair
