/**
 * @file io.hpp
 * @brief JSON (de)serialization of scenes, bundles, meshes and reports; CSV tables;
 *        SVG rendering of curves, meshes and distortion profiles.
 */
#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qcpair/dilatation.hpp"
#include "qcpair/distortion.hpp"
#include "qcpair/extensions.hpp"
#include "qcpair/geom.hpp"
#include "qcpair/metric.hpp"
#include "qcpair/plmap.hpp"
#include "qcpair/scenarios.hpp"

namespace qcpair {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// numbers

/// 9 significant digits, shortest form, independent of the C locale.
inline std::string format_sig9(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 9);
  return {buf, r.ptr};
}

namespace io {

/// JSON has no infinities: non-finite values travel as strings.
inline Json num(double x) {
  if (std::isfinite(x)) return x;
  return format_sig9(x);
}

inline double get_num(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  fail(ErrorCode::InvalidArgument, "expected a number, got " + j.dump());
}

inline Json point(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Complex get_point(const Json& j) {
  require(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(), ErrorCode::InvalidArgument,
          "expected a point [x, y], got " + j.dump());
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Json ext_point(const ExtPoint& p) { return p.is_infinity() ? Json("inf") : point(p.value()); }

inline ExtPoint get_ext_point(const Json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") return ExtPoint::infinity();
  return get_point(j);
}

inline Json points(const std::vector<Complex>& v) {
  Json a = Json::array();
  for (const auto& z : v) a.push_back(point(z));
  return a;
}

inline std::vector<Complex> get_points(const Json& j) {
  require(j.is_array(), ErrorCode::InvalidArgument, "expected an array of points");
  std::vector<Complex> v;
  v.reserve(j.size());
  for (const auto& p : j) v.push_back(get_point(p));
  return v;
}

inline Json box(const Box& b) { return Json::array({b.xmin, b.ymin, b.xmax, b.ymax}); }

inline Box get_box(const Json& j) {
  require(j.is_array() && j.size() == 4, ErrorCode::InvalidArgument, "expected [xmin, ymin, xmax, ymax]");
  const Box b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
  require(b.xmin < b.xmax && b.ymin < b.ymax, ErrorCode::InvalidArgument, "window must have positive area");
  return b;
}

inline const Json& at(const Json& j, const char* key, ErrorCode code = ErrorCode::InvalidArgument) {
  require(j.is_object() && j.contains(key), code, std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace io

// ---------------------------------------------------------------------------
// files

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  out << text;
}

inline Json parse_json(const std::string& text, ErrorCode code = ErrorCode::InvalidArgument) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    fail(code, std::string("malformed JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// scenes

inline Json region_to_json(const Region& r) {
  Json j;
  std::visit(
      [&j](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HalfPlane>) {
          j = {{"kind", "half_plane"}, {"normal", io::point(s.normal)}, {"offset", s.offset}};
        } else if constexpr (std::is_same_v<T, Disk>) {
          j = {{"kind", "disk"}, {"center", io::point(s.center)}, {"radius", s.radius}};
        } else if constexpr (std::is_same_v<T, Strip>) {
          j = {{"kind", "strip"}, {"normal", io::point(s.normal)}, {"lo", s.lo}, {"hi", s.hi}};
        } else {
          j = {{"kind", "polygon"}, {"vertices", io::points(s.vertices)}};
        }
      },
      r.shape());
  j["complemented"] = r.complemented();
  return j;
}

inline Region region_from_json(const Json& j) {
  const std::string kind = io::at(j, "kind").get<std::string>();
  const bool comp = j.value("complemented", false);
  if (kind == "half_plane")
    return Region::from_shape(HalfPlane{io::get_point(io::at(j, "normal")), io::at(j, "offset").get<double>()}, comp);
  if (kind == "disk")
    return Region::from_shape(Disk{io::get_point(io::at(j, "center")), io::at(j, "radius").get<double>()}, comp);
  if (kind == "strip")
    return Region::from_shape(
        Strip{io::get_point(io::at(j, "normal")), io::at(j, "lo").get<double>(), io::at(j, "hi").get<double>()}, comp);
  if (kind == "polygon") return Region::polygon(io::get_points(io::at(j, "vertices")), comp);
  fail(ErrorCode::InvalidRegion, "unknown region kind '" + kind + "'");
}

inline Json scene_to_json(const Scene& s) {
  Json regions = Json::array(), samples = Json::array();
  for (const auto& r : s.regions) {
    Json e = region_to_json(r.region);
    e["name"] = r.name;
    regions.push_back(e);
  }
  for (const auto& ss : s.samples) {
    Json pts = Json::array();
    for (const auto& p : ss.points) pts.push_back(io::ext_point(p));
    samples.push_back({{"name", ss.name}, {"region", ss.region}, {"points", pts}});
  }
  return {{"regions", regions}, {"samples", samples}, {"metadata", s.metadata}};
}

/// Any structural problem surfaces as InvalidScene.
inline Scene scene_from_json(const Json& j, bool validate = true) {
  Scene s;
  try {
    for (const auto& r : io::at(j, "regions"))
      s.regions.push_back({io::at(r, "name").get<std::string>(), region_from_json(r)});
    if (j.contains("samples"))
      for (const auto& ss : j.at("samples")) {
        SampleSet set{io::at(ss, "name").get<std::string>(), io::at(ss, "region").get<std::string>(), {}};
        for (const auto& p : io::at(ss, "points")) set.points.push_back(io::get_ext_point(p));
        s.samples.push_back(std::move(set));
      }
    if (j.contains("metadata")) s.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
  } catch (const Json::exception& e) {
    fail(ErrorCode::InvalidScene, std::string("bad scene: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidScene) throw;
    fail(ErrorCode::InvalidScene, e.what());
  }
  std::set<std::string> names;
  for (const auto& r : s.regions)
    require(names.insert(r.name).second, ErrorCode::InvalidScene, "duplicate region name '" + r.name + "'");
  if (validate) s.validate();
  return s;
}

inline Scene load_scene(const std::string& path) {
  const Json j = parse_json(read_text(path), ErrorCode::InvalidScene);
  // a scenario bundle carries its scene one level down
  return scene_from_json(j.contains("scene") ? j.at("scene") : j);
}

// ---------------------------------------------------------------------------
// bundles and reports

inline Json grid_to_json(const GridSpec& g) {
  return {{"h", g.h},
          {"connectivity", g.connectivity},
          {"window", g.window ? io::box(*g.window) : Json()},
          {"max_nodes", g.max_nodes}};
}

inline GridSpec grid_from_json(const Json& j) {
  GridSpec g;
  g.h = j.value("h", g.h);
  g.connectivity = j.value("connectivity", g.connectivity);
  if (j.contains("window") && !j.at("window").is_null()) g.window = io::get_box(j.at("window"));
  g.max_nodes = j.value("max_nodes", g.max_nodes);
  return g;
}

inline Json expectation_to_json(const Expectation& e) {
  Json pts = Json::array(), args = Json::array();
  for (const auto& p : e.points) pts.push_back(io::ext_point(p));
  for (double a : e.args) args.push_back(io::num(a));
  return {{"quantity", e.quantity}, {"op", e.op},           {"u", e.u},
          {"v", e.v},               {"points", pts},        {"args", args},
          {"lo", io::num(e.lo)},    {"hi", io::num(e.hi)},  {"rel_tol", e.rel_tol},
          {"abs_tol", e.abs_tol},   {"anchor", e.anchor}};
}

inline Expectation expectation_from_json(const Json& j) {
  Expectation e;
  e.quantity = io::at(j, "quantity").get<std::string>();
  e.op = io::at(j, "op").get<std::string>();
  e.u = j.value("u", e.u);
  e.v = j.value("v", e.v);
  if (j.contains("points"))
    for (const auto& p : j.at("points")) e.points.push_back(io::get_ext_point(p));
  if (j.contains("args"))
    for (const auto& a : j.at("args")) e.args.push_back(io::get_num(a));
  e.lo = io::get_num(io::at(j, "lo"));
  e.hi = io::get_num(io::at(j, "hi"));
  e.rel_tol = j.value("rel_tol", 0.0);
  e.abs_tol = j.value("abs_tol", 0.0);
  e.anchor = j.value("anchor", "");
  return e;
}

inline Json bundle_to_json(const ScenarioBundle& b) {
  Json ex = Json::array();
  for (const auto& e : b.expected) ex.push_back(expectation_to_json(e));
  return {{"name", b.name},
          {"parameters", b.parameters},
          {"scene", scene_to_json(b.scene)},
          {"grid", grid_to_json(b.grid)},
          {"expected", ex}};
}

/// Hooks (functions, maps) are rebuilt from the name and parameters.
inline ScenarioBundle bundle_from_json(const Json& j) {
  ScenarioBundle b;
  b.name = io::at(j, "name").get<std::string>();
  if (j.contains("parameters")) b.parameters = j.at("parameters").get<std::map<std::string, std::string>>();
  b.scene = scene_from_json(io::at(j, "scene"));
  if (j.contains("grid")) b.grid = grid_from_json(j.at("grid"));
  for (const auto& e : io::at(j, "expected")) b.expected.push_back(expectation_from_json(e));
  restore_hooks(b);
  return b;
}

inline Json outcomes_to_json(const std::vector<Outcome>& out) {
  Json a = Json::array();
  for (const auto& o : out)
    a.push_back({{"scenario", o.scenario},
                 {"quantity", o.quantity},
                 {"op", o.op},
                 {"value", io::num(o.value)},
                 {"lo", io::num(o.lo)},
                 {"hi", io::num(o.hi)},
                 {"pass", o.pass},
                 {"seconds", o.seconds},
                 {"note", o.note}});
  return a;
}

inline Json dilatation_to_json(const DilatationReport& r) {
  Json K = Json::array();
  for (double k : r.K) K.push_back(io::num(k));
  return {{"max_K", io::num(r.max_K)}, {"worst", r.worst},       {"method", r.method},
          {"step", r.step},            {"reversed", r.reversed}, {"K", K}};
}

inline Json modulus_to_json(const ModulusResult& m) {
  return {{"modulus", m.modulus},
          {"connecting_modulus", 1.0 / m.modulus},
          {"method", m.method},
          {"unknowns", m.unknowns},
          {"iterations", m.iterations},
          {"h", m.h}};
}

inline Json profile_to_json(const DistortionProfile& p) {
  Json w = Json::array();
  for (const auto& q : p.witness) {
    Json t = Json::array({q[0], q[1], q[2]});
    if (p.arity == 4) t.push_back(q[3]);
    w.push_back(t);
  }
  return {{"arity", p.arity},
          {"bins", p.bins},
          {"eta_hat", p.eta_hat},
          {"source_max", p.source_max},
          {"counts", p.counts},
          {"witnesses", w},
          {"sample_count", p.sample_count},
          {"skipped", p.skipped},
          {"clamped_low", p.clamped_low},
          {"clamped_high", p.clamped_high}};
}

inline DistortionProfile profile_from_json(const Json& j) {
  DistortionProfile p;
  p.arity = j.value("arity", 3);
  p.bins = io::at(j, "bins").get<std::vector<double>>();
  p.eta_hat = io::at(j, "eta_hat").get<std::vector<double>>();
  require(p.bins.size() == p.eta_hat.size() && !p.bins.empty(), ErrorCode::InvalidArgument,
          "profile bins and eta_hat differ in length");
  if (j.contains("source_max")) p.source_max = j.at("source_max").get<std::vector<double>>();
  if (j.contains("counts")) p.counts = j.at("counts").get<std::vector<std::size_t>>();
  return p;
}

inline Json verdict_to_json(const PairVerdict& v) {
  Json j = profile_to_json(v.profile);
  j["bounded_at_scale"] = v.bounded_at_scale;
  j["threshold"] = v.threshold;
  j["grid"] = {{"h", v.h},
               {"connectivity", v.connectivity},
               {"density_model", std::string(to_string(v.density_model.kind))},
               {"density_factor_bounds", {v.density_model.factor_bounds.first, v.density_model.factor_bounds.second}}};
  j["samples"] = v.samples;
  return j;
}

// ---------------------------------------------------------------------------
// meshes

inline Json mesh_to_json(const PLMap& m) {
  Json tris = Json::array();
  for (const auto& t : m.triangles) tris.push_back({t[0], t[1], t[2]});
  return {{"vertices", io::points(m.vertices)},
          {"triangles", tris},
          {"image_vertices", io::points(m.image_vertices)},
          {"depth", m.depth},
          {"period", m.period ? Json(*m.period) : Json()}};
}

inline PLMap mesh_from_json(const Json& j) {
  PLMap m;
  m.vertices = io::get_points(io::at(j, "vertices"));
  m.image_vertices = io::get_points(io::at(j, "image_vertices"));
  require(m.vertices.size() == m.image_vertices.size(), ErrorCode::InvalidArgument,
          "vertices and image_vertices differ in length");
  for (const auto& t : io::at(j, "triangles")) {
    require(t.is_array() && t.size() == 3, ErrorCode::InvalidArgument, "triangle needs 3 indices");
    Tri tri{t[0].get<std::uint32_t>(), t[1].get<std::uint32_t>(), t[2].get<std::uint32_t>()};
    for (auto i : tri) require(i < m.vertices.size(), ErrorCode::InvalidArgument, "triangle index out of range");
    m.triangles.push_back(tri);
  }
  m.depth = j.value("depth", 0);
  if (j.contains("period") && !j.at("period").is_null()) m.period = j.at("period").get<int>();
  return m;
}

// ---------------------------------------------------------------------------
// boundary data

inline LineHomeo line_homeo_from_json(const Json& j) {
  LineHomeo h;
  h.xs = io::at(j, "xs").get<std::vector<double>>();
  h.ys = io::at(j, "ys").get<std::vector<double>>();
  if (j.contains("period") && !j.at("period").is_null()) h.period = j.at("period").get<int>();
  h.level = j.value("level", 0.0);
  h.image_level = j.value("image_level", 0.0);
  h.validate();
  return h;
}

inline Json line_homeo_to_json(const LineHomeo& h) {
  return {{"xs", h.xs},
          {"ys", h.ys},
          {"period", h.period ? Json(*h.period) : Json()},
          {"level", h.level},
          {"image_level", h.image_level}};
}

inline CircleHomeo circle_homeo_from_json(const Json& j) {
  CircleHomeo c;
  c.radius = j.value("radius", 1.0);
  c.image_radius = j.value("image_radius", c.radius);
  c.ts = io::at(j, "ts").get<std::vector<double>>();
  c.lifts = io::at(j, "lifts").get<std::vector<double>>();
  c.validate();
  return c;
}

inline Json circle_homeo_to_json(const CircleHomeo& c) {
  return {{"radius", c.radius}, {"image_radius", c.image_radius}, {"ts", c.ts}, {"lifts", c.lifts}};
}

// ---------------------------------------------------------------------------
// CSV

/// Header row of sample indices, then the matrix; 9 significant digits.
inline std::string matrix_csv(const Matrix& M) {
  std::string s = "index";
  for (std::size_t j = 0; j < M.size(); ++j) s += "," + std::to_string(j);
  s += "\n";
  for (std::size_t i = 0; i < M.size(); ++i) {
    s += std::to_string(i);
    for (double x : M[i]) s += "," + format_sig9(x);
    s += "\n";
  }
  return s;
}

inline Matrix matrix_from_csv(const std::string& text) {
  Matrix M;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = line.find(',');
    while (pos != std::string::npos) {
      const std::size_t next = line.find(',', pos + 1);
      const std::string cell = line.substr(pos + 1, next == std::string::npos ? std::string::npos : next - pos - 1);
      row.push_back(cell == "inf" ? kInf : parse_param(cell));
      pos = next;
    }
    M.push_back(std::move(row));
  }
  return M;
}

// ---------------------------------------------------------------------------
// SVG

struct LayerStyle {
  std::string stroke = "#000000";
  double width = 1.0;
  bool dashed = false;
  std::string fill = "none";
};

/// Polylines in world coordinates; `closed` applies to all of them.
struct Layer {
  std::string name;
  std::vector<std::vector<Complex>> paths;
  bool closed = false;
  int panel = 0;  // meshes draw source in panel 0 and image in panel 1
};

struct RenderSpec {
  Box window{-8, -8, 8, 8};
  std::map<std::string, LayerStyle> styles;
  int grid_lines = 0;  // overlay lines per axis; 0 = none
  int width = 800, height = 600;
  bool log_log = false;

  void validate() const {
    require(!window.empty() && window.width() > 0 && window.height() > 0, ErrorCode::InvalidArgument,
            "render window must have positive area");
    require(width > 0 && height > 0, ErrorCode::InvalidArgument, "output size must be positive");
  }
};

inline const std::map<std::string, LayerStyle>& default_styles() {
  static const std::map<std::string, LayerStyle> s{
      {"U", {"#1f5fa8", 1.5, false}},       {"V", {"#b03a2e", 1.5, false}},
      {"reference", {"#777777", 1.0, true}}, {"samples", {"#000000", 1.0, false, "#000000"}},
      {"source", {"#2e7d32", 0.4, false}},  {"image", {"#6a1b9a", 0.4, false}},
      {"eta_hat", {"#000000", 1.5, false}}};
  return s;
}

namespace detail {

inline std::string svg_num(double x) { return format_sig9(std::abs(x) < 1e-9 ? 0.0 : x); }

}  // namespace detail

/**
 * Deterministic SVG: layers in the given order, paths in stored order.
 * With two panels the window is drawn twice, side by side.
 */
inline std::string render_svg(const std::vector<Layer>& layers, const RenderSpec& spec) {
  require(!layers.empty(), ErrorCode::EmptyLayer, "nothing to render");
  for (const auto& l : layers) require(!l.paths.empty(), ErrorCode::EmptyLayer, "layer '" + l.name + "' is empty");
  spec.validate();
  int panels = 1;
  for (const auto& l : layers) panels = std::max(panels, l.panel + 1);
  const double pw = static_cast<double>(spec.width) / panels, ph = spec.height;
  const Box& w = spec.window;
  const double sx = pw / w.width(), sy = ph / w.height();
  auto map = [&](Complex z, int panel) {
    double x = z.real(), y = z.imag();
    if (spec.log_log) {
      x = std::log2(x);
      y = std::log2(y);
    }
    return std::pair{panel * pw + (x - w.xmin) * sx, (w.ymax - y) * sy};
  };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
    << "\" viewBox=\"0 0 " << spec.width << " " << spec.height << "\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << spec.width << "\" height=\"" << spec.height << "\" fill=\"#ffffff\"/>\n";
  if (spec.grid_lines > 0) {
    o << "<g id=\"grid\" stroke=\"#e0e0e0\" stroke-width=\"0.5\">\n";
    for (int p = 0; p < panels; ++p)
      for (int k = 0; k <= spec.grid_lines; ++k) {
        const double fx = p * pw + pw * k / spec.grid_lines, fy = ph * k / spec.grid_lines;
        o << "<line x1=\"" << detail::svg_num(fx) << "\" y1=\"0\" x2=\"" << detail::svg_num(fx) << "\" y2=\""
          << detail::svg_num(ph) << "\"/>\n";
        o << "<line x1=\"" << detail::svg_num(p * pw) << "\" y1=\"" << detail::svg_num(fy) << "\" x2=\""
          << detail::svg_num((p + 1) * pw) << "\" y2=\"" << detail::svg_num(fy) << "\"/>\n";
      }
    o << "</g>\n";
  }
  for (const auto& l : layers) {
    LayerStyle st;
    if (auto it = spec.styles.find(l.name); it != spec.styles.end()) st = it->second;
    else if (auto jt = default_styles().find(l.name); jt != default_styles().end()) st = jt->second;
    o << "<g id=\"" << l.name << "\" stroke=\"" << st.stroke << "\" stroke-width=\"" << detail::svg_num(st.width)
      << "\" fill=\"" << st.fill << "\"";
    if (st.dashed) o << " stroke-dasharray=\"6 4\"";
    o << ">\n";
    for (const auto& path : l.paths) {
      if (path.empty()) continue;
      o << "<path d=\"";
      for (std::size_t i = 0; i < path.size(); ++i) {
        const auto [x, y] = map(path[i], l.panel);
        o << (i ? " L" : "M") << detail::svg_num(x) << " " << detail::svg_num(y);
      }
      if (l.closed) o << " Z";
      o << "\"/>\n";
    }
    o << "</g>\n";
  }
  o << "</svg>\n";
  return o.str();
}

/// Region boundaries clipped to the window, in scene order, plus sample markers.
inline std::vector<Layer> scene_layers(const Scene& s, const Box& window, const std::vector<double>& reference_radii = {}) {
  std::vector<Layer> out;
  const double span = window.diameter();
  for (const auto& r : s.regions) {
    Layer l{r.name, {}, false, 0};
    std::visit(
        [&](const auto& sh) {
          using T = std::decay_t<decltype(sh)>;
          if constexpr (std::is_same_v<T, Disk>) {
            std::vector<Complex> c;
            for (int k = 0; k < 256; ++k) c.push_back(sh.center + std::polar(sh.radius, 2 * kPi * k / 256));
            l.paths.push_back(c);
            l.closed = true;
          } else if constexpr (std::is_same_v<T, PolyJordan>) {
            l.paths.push_back(sh.vertices);
            l.closed = true;
          } else {
            const Complex c((window.xmin + window.xmax) / 2, (window.ymin + window.ymax) / 2);
            const Complex t(-sh.normal.imag(), sh.normal.real());
            std::vector<double> offs;
            if constexpr (std::is_same_v<T, HalfPlane>) offs = {sh.offset};
            else offs = {sh.lo, sh.hi};
            for (double off : offs) {
              const Complex base = off * sh.normal + dot(c, t) * t;
              l.paths.push_back({base - span * t, base + span * t});
            }
          }
        },
        r.region.shape());
    out.push_back(std::move(l));
  }
  if (!reference_radii.empty()) {
    Layer ref{"reference", {}, true, 0};
    for (double rad : reference_radii) {
      std::vector<Complex> c;
      for (int k = 0; k < 256; ++k) c.push_back(std::polar(rad, 2 * kPi * k / 256));
      ref.paths.push_back(c);
    }
    out.push_back(std::move(ref));
  }
  Layer marks{"samples", {}, true, 0};
  const double m = 0.004 * span;
  for (const auto& ss : s.samples)
    for (const auto& p : ss.points)
      if (p.is_finite()) {
        const Complex z = p.value();
        marks.paths.push_back({z + Complex(-m, -m), z + Complex(m, -m), z + Complex(m, m), z + Complex(-m, m)});
      }
  if (!marks.paths.empty()) out.push_back(std::move(marks));
  return out;
}

/// One closed path per triangle: source grid in panel 0, image grid in panel 1.
inline std::vector<Layer> mesh_layers(const PLMap& m) {
  Layer src{"source", {}, true, 0}, img{"image", {}, true, 1};
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto s = m.source(t), i = m.image(t);
    src.paths.push_back({s[0], s[1], s[2]});
    img.paths.push_back({i[0], i[1], i[2]});
  }
  return {src, img};
}

inline Box mesh_window(const PLMap& m) {
  Box b;
  for (const auto& v : m.vertices) b.expand(v);
  for (const auto& v : m.image_vertices) b.expand(v);
  return b.inflated(0.05 * std::max(b.width(), b.height()));
}

/// eta_hat against bin scale on log-log axes; unrealized bins are skipped.
inline std::vector<Layer> profile_layers(const DistortionProfile& p) {
  Layer l{"eta_hat", {{}}, false, 0};
  for (std::size_t k = 0; k < p.bins.size(); ++k)
    if (p.eta_hat[k] > 0) l.paths[0].emplace_back(p.bins[k], p.eta_hat[k]);
  if (l.paths[0].empty()) l.paths.clear();
  return {l};
}

inline Box profile_window(const DistortionProfile& p) {
  Box b;
  for (std::size_t k = 0; k < p.bins.size(); ++k)
    if (p.eta_hat[k] > 0) b.expand(Complex(std::log2(p.bins[k]), std::log2(p.eta_hat[k])));
  if (b.empty()) return {-1, -1, 1, 1};
  return b.inflated(0.5);
}

}  // namespace qcpair
