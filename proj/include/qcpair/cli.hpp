/**
 * @file cli.hpp
 * @brief The qcpair command line: argument handling and subcommand dispatch.
 */
#pragma once

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qcpair/io.hpp"

namespace qcpair {

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitUnknownSubcommand = 64, kExitInvalidScene = 65 };

namespace cli {

inline std::pair<std::string, std::string> split_pair(const std::string& s, const char* what) {
  const auto c = s.find(',');
  require(c != std::string::npos && c > 0 && c + 1 < s.size(), ErrorCode::InvalidArgument,
          std::string(what) + " must look like A,B; got '" + s + "'");
  return {s.substr(0, c), s.substr(c + 1)};
}

/// Output to --out when given, else to the stream.
inline void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) out << text;
  else write_text(path, text);
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

/// Scene plus the grid stored alongside it when the file is a scenario bundle.
struct LoadedScene {
  Scene scene;
  std::optional<GridSpec> grid;
  std::vector<double> reference_radii;
};

inline LoadedScene load_scene_file(const std::string& path) {
  const Json j = parse_json(read_text(path), ErrorCode::InvalidScene);
  LoadedScene s;
  if (j.is_object() && j.contains("scene")) {
    s.scene = scene_from_json(j.at("scene"));
    if (j.contains("grid")) s.grid = grid_from_json(j.at("grid"));
    if (j.contains("parameters")) {
      const auto& p = j.at("parameters");
      for (const char* k : {"r", "R"})
        if (p.contains(k)) s.reference_radii.push_back(parse_param(p.at(k).get<std::string>()));
    }
  } else {
    s.scene = scene_from_json(j);
  }
  return s;
}

struct GridFlags {
  double h = 0;
  int connectivity = 0;
  std::vector<double> window;

  void add(CLI::App* sub) {
    sub->add_option("--h", h, "grid step (default: from the bundle, else 0.01)");
    sub->add_option("--connectivity", connectivity, "8 or 16")->check(CLI::IsMember({8, 16}));
    sub->add_option("--window", window, "xmin ymin xmax ymax")->expected(4);
  }

  GridSpec resolve(const std::optional<GridSpec>& base) const {
    GridSpec g = base.value_or(GridSpec{});
    if (h > 0) g.h = h;
    if (connectivity) g.connectivity = connectivity;
    if (!window.empty()) g.window = Box{window[0], window[1], window[2], window[3]};
    require(g.h > 0, ErrorCode::InvalidArgument, "--h must be positive");
    return g;
  }
};

// ---------------------------------------------------------------------------
// extend

inline void append_mesh(PLMap& dst, const PLMap& src) {
  const auto off = static_cast<std::uint32_t>(dst.vertices.size());
  dst.vertices.insert(dst.vertices.end(), src.vertices.begin(), src.vertices.end());
  dst.image_vertices.insert(dst.image_vertices.end(), src.image_vertices.begin(), src.image_vertices.end());
  for (auto t : src.triangles) dst.triangles.push_back({t[0] + off, t[1] + off, t[2] + off});
  dst.depth = std::max(dst.depth, src.depth);
}

/// Polar grid mesh of r0 <= |z| <= r1 carried by f.
inline PLMap polar_mesh(double r0, double r1, int nr, int nt, const std::function<Complex(Complex)>& f) {
  PLMap m;
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i <= nr; ++i) {
      const Complex z = std::polar(r0 * std::pow(r1 / r0, static_cast<double>(i) / nr), 2 * kPi * j / nt);
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

/// Regular subdivision of the triangle a, b, (a+b)/2 + i(b-a)/2, carried by the BA extension.
inline PLMap ba_mesh(const LineHomeo& h, double a, double b, int n) {
  PLMap m;
  const Complex e1((b - a) / n, 0), e2((b - a) / (2.0 * n), (b - a) / (2.0 * n));
  std::vector<std::vector<std::uint32_t>> id(n + 1);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i + j <= n; ++i) {
      id[j].push_back(static_cast<std::uint32_t>(m.vertices.size()));
      m.vertices.push_back(Complex(a, 0) + static_cast<double>(i) * e1 + static_cast<double>(j) * e2);
    }
  m.image_vertices = ba_extend(h, m.vertices);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i + j < n; ++i) {
      m.triangles.push_back({id[j][i], id[j][i + 1], id[j + 1][i]});
      if (i + j + 1 < n) m.triangles.push_back({id[j][i + 1], id[j + 1][i + 1], id[j + 1][i]});
    }
  return m;
}

inline int integral(double x, const char* what) {
  require(x == std::floor(x) && std::abs(x) < 1e9, ErrorCode::InvalidArgument, std::string(what) + " must be an integer");
  return static_cast<int>(x);
}

inline PLMap extend(const std::string& kind, const Json& bj, double lo, double hi, int depth, double M, double c0) {
  AnnulusOptions ao;
  ao.depth = depth;
  if (kind == "dyadic") return dyadic_pl_extend(line_homeo_from_json(bj), integral(lo, "window"), integral(hi, "window"), depth);
  if (kind == "strip") {
    TrapezoidOptions to;
    to.depth = depth;
    return trapezoid_strip_extend(line_homeo_from_json(io::at(bj, "h0")), line_homeo_from_json(io::at(bj, "h1")),
                                  integral(lo, "window"), integral(hi, "window"), to);
  }
  if (kind == "ba") {
    require(hi > lo, ErrorCode::InvalidArgument, "empty window");
    return ba_mesh(line_homeo_from_json(bj), lo, hi, 1 << std::min(depth, 8));
  }
  const AnnulusHomeo h{circle_homeo_from_json(io::at(bj, "inner")), circle_homeo_from_json(io::at(bj, "outer"))};
  if (kind == "annulus") {
    const double Mv = M > 0 ? M : std::max(2.0, 2.0 * h.L());
    return annulus_extend_general(h, Mv, ao).mesh;
  }
  if (kind == "annulus-large") {
    const AnnulusComposite ac = annulus_extend_large(h, c0, ao);
    PLMap out = ac.pieces[0].mesh;
    if (!ac.delegated()) {
      append_mesh(out, polar_mesh(ac.R, ac.L / ac.R, 32, 256, [&ac](Complex z) { return ac(z); }));
      append_mesh(out, ac.pieces[1].mesh);
    }
    return out;
  }
  fail(ErrorCode::InvalidArgument, "unknown extension kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// scenario

/// Leftover "--key value" / "--key=value" tokens as scenario parameters.
inline ScenarioParams scenario_params(const std::vector<std::string>& rest) {
  ScenarioParams p;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    const std::string& tok = rest[i];
    require(tok.rfind("--", 0) == 0 && tok.size() > 2, ErrorCode::InvalidArgument, "unexpected argument '" + tok + "'");
    std::string key = tok.substr(2), value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      require(i + 1 < rest.size(), ErrorCode::InvalidArgument, "parameter --" + key + " needs a value");
      value = rest[++i];
    }
    p[key] = parse_param(value);
  }
  return p;
}

inline std::vector<Outcome> run_named(const std::string& name, const ScenarioBundle& b) {
  auto out = run_scenario(b);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].scenario = name;
    out[i].quantity = b.expected[i].quantity;
    out[i].op = b.expected[i].op;
    out[i].lo = b.expected[i].lo;
    out[i].hi = b.expected[i].hi;
  }
  return out;
}

inline std::string suite_label(const std::string& name, const ScenarioParams& p) {
  std::string s = name;
  for (const auto& [k, v] : p) s += " " + k + "=" + format_param(v);
  return s;
}

inline Json suite_report(const std::vector<std::pair<std::string, ScenarioParams>>& suite, std::ostream& log) {
  std::vector<std::vector<Outcome>> results(suite.size());
  parallel_for(suite.size(), [&](std::size_t i) {
    const auto& [name, p] = suite[i];
    results[i] = run_named(suite_label(name, p), make_scenario(name, p));
  });
  std::vector<Outcome> all;
  for (auto& r : results) all.insert(all.end(), r.begin(), r.end());
  std::size_t failed = 0;
  for (const auto& o : all) {
    failed += !o.pass;
    log << (o.pass ? "ok   " : "FAIL ") << o.scenario << " " << o.quantity << " = " << format_sig9(o.value)
        << (o.note.empty() ? "" : " (" + o.note + ")") << "\n";
  }
  return {{"outcomes", outcomes_to_json(all)}, {"failed", failed}, {"all_pass", failed == 0}};
}

}  // namespace cli

/**
 * Entry point shared by the binary and the tests. Exit codes: 0 success,
 * 2 validation error, 64 unknown subcommand, 65 invalid scene.
 */
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  static const std::vector<std::string> kCommands{"metric", "verdict", "extend", "dilatation", "modulus", "scenario", "render"};
  {
    // first token that is not a global option is the subcommand
    std::string cmd;
    for (int i = 1; i < argc; ++i) {
      const std::string a = argv[i];
      if (a == "--seed") {
        ++i;
        continue;
      }
      if (a.rfind("--seed=", 0) == 0 || a == "--help") continue;
      cmd = a;
      break;
    }
    const bool help = argc > 1 && std::string(argv[1]) == "--help";
    if (!help && std::find(kCommands.begin(), kCommands.end(), cmd) == kCommands.end()) {
      err << "qcpair: unknown subcommand '" << cmd << "'; expected one of";
      for (const auto& c : kCommands) err << " " << c;
      err << "\n";
      return kExitUnknownSubcommand;
    }
  }

  CLI::App app{"qcpair: relative hyperbolic metrics, distortion profiles and quasiconformal extensions", "qcpair"};
  app.set_help_flag("--help", "print help");  // -h is taken by the grid step
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "random seed for sampled quantities")->capture_default_str();
  app.require_subcommand(1);

  std::string scene_path, pair, samples_name, out_path;
  cli::GridFlags grid;

  auto* metric = app.add_subcommand("metric", "pairwise d_{V,U} table of a sample set, as CSV");
  metric->add_option("--scene", scene_path, "scene or bundle JSON")->required();
  metric->add_option("--pair", pair, "U,V")->required();
  metric->add_option("--samples", samples_name, "sample set name")->required();
  metric->add_option("--out", out_path, "CSV path (default stdout)");
  grid.add(metric);

  std::size_t budget = 200000;
  double threshold = 1e3;
  auto* verdict = app.add_subcommand("verdict", "quasi-Moebius profile of (samples, d_{V,U}) vs chordal");
  verdict->add_option("--scene", scene_path)->required();
  verdict->add_option("--pair", pair, "U,V")->required();
  verdict->add_option("--samples", samples_name)->required();
  verdict->add_option("--budget", budget)->capture_default_str();
  verdict->add_option("--threshold", threshold)->capture_default_str();
  verdict->add_option("--out", out_path);
  grid.add(verdict);

  std::string kind, boundary_path;
  std::vector<double> ext_window{-4, 4};
  int depth = 8;
  double M = 0, c0 = 4;
  auto* ext = app.add_subcommand("extend", "PL extension of boundary data, as mesh JSON");
  ext->add_option("--kind", kind)
      ->required()
      ->check(CLI::IsMember({"dyadic", "strip", "annulus", "annulus-large", "ba"}));
  ext->add_option("--boundary", boundary_path, "boundary data JSON")->required();
  ext->add_option("--window", ext_window, "a b")->expected(2)->capture_default_str();
  ext->add_option("--depth", depth)->capture_default_str();
  ext->add_option("--M", M, "annulus: radius bound (default max(2, 2L))");
  ext->add_option("--c0", c0, "annulus-large: log-ratio bound")->capture_default_str();
  ext->add_option("--out", out_path);

  std::string mesh_path;
  auto* dil = app.add_subcommand("dilatation", "per-triangle dilatation of a mesh");
  dil->add_option("--mesh", mesh_path)->required();
  dil->add_option("--out", out_path);

  std::string ring;
  int resolution = 400;
  bool force_numeric = false;
  auto* mod = app.add_subcommand("modulus", "modulus of the ring between two regions");
  mod->add_option("--scene", scene_path)->required();
  mod->add_option("--ring", ring, "inner,outer")->required();
  mod->add_option("--resolution", resolution, "cells along the longer side or around")->capture_default_str();
  mod->add_option("--h", grid.h, "cell size; overrides --resolution");
  mod->add_flag("--numeric", force_numeric, "skip the round closed form");
  mod->add_option("--out", out_path);

  std::string name, report_path, bundle_path;
  bool run_all = false, run = false;
  auto* scen = app.add_subcommand("scenario", "build, run or list worked configurations");
  scen->add_option("--name", name, "scenario name; other --key value pairs are its parameters");
  scen->add_option("--bundle", bundle_path, "run a saved bundle");
  scen->add_flag("--run", run, "evaluate the scenario's expectations");
  scen->add_flag("--run-all", run_all, "evaluate the default suite");
  scen->add_option("--report", report_path, "report JSON path (with --run / --run-all)");
  scen->add_option("--out", out_path, "bundle JSON path");
  scen->allow_extras();

  std::string verdict_path;
  int width = 800, height = 600, grid_lines = 0;
  std::vector<double> view;
  auto* ren = app.add_subcommand("render", "SVG of a scene, mesh or verdict");
  auto* src = ren->add_option_group("source");
  src->add_option("--scene", scene_path, "scene or bundle JSON");
  src->add_option("--mesh", mesh_path);
  src->add_option("--verdict", verdict_path);
  src->require_option(1);
  ren->add_option("--window", view, "xmin ymin xmax ymax")->expected(4);
  ren->add_option("--width", width)->capture_default_str();
  ren->add_option("--height", height)->capture_default_str();
  ren->add_option("--grid", grid_lines, "overlay lines per axis");
  ren->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "qcpair: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (metric->parsed()) {
      const auto ls = cli::load_scene_file(scene_path);
      const auto [u, v] = cli::split_pair(pair, "--pair");
      const auto& S = ls.scene.sample_set(samples_name);
      const Matrix T = metric_table(ls.scene.region(u), ls.scene.region(v), S.points, grid.resolve(ls.grid));
      cli::emit(matrix_csv(T), out_path, out);
    } else if (verdict->parsed()) {
      const auto ls = cli::load_scene_file(scene_path);
      const auto [u, v] = cli::split_pair(pair, "--pair");
      ProfileOptions opt;
      opt.budget = budget;
      opt.seed = seed;
      const PairVerdict pv = pair_verdict(ls.scene.region(u), ls.scene.region(v),
                                          ls.scene.sample_set(samples_name).points, grid.resolve(ls.grid), opt, threshold);
      Json j = verdict_to_json(pv);
      j["seed"] = seed;
      j["budget"] = budget;
      cli::emit(cli::dump(j), out_path, out);
    } else if (ext->parsed()) {
      const Json bj = parse_json(read_text(boundary_path));
      const PLMap m = cli::extend(kind, bj, ext_window[0], ext_window[1], depth, M, c0);
      cli::emit(cli::dump(mesh_to_json(m)), out_path, out);
    } else if (dil->parsed()) {
      const PLMap m = mesh_from_json(parse_json(read_text(mesh_path)));
      const auto rep = pl_dilatation(m);
      Json j = dilatation_to_json(rep);
      j["triangles"] = m.triangles.size();
      cli::emit(cli::dump(j), out_path, out);
    } else if (mod->parsed()) {
      const auto ls = cli::load_scene_file(scene_path);
      const auto [a, b] = cli::split_pair(ring, "--ring");
      RingSpec rs{ls.scene.region(a), ls.scene.region(b), resolution, force_numeric};
      if (grid.h > 0) {
        const Box ob = rs.outer.boundary_box();
        require(!ob.empty(), ErrorCode::NotARing, "outer continuum must have a bounded boundary");
        rs.resolution = static_cast<int>(std::ceil(std::max(ob.width(), ob.height()) / grid.h));
      }
      cli::emit(cli::dump(modulus_to_json(ring_modulus(rs))), out_path, out);
    } else if (scen->parsed()) {
      const ScenarioParams params = cli::scenario_params(scen->remaining());
      if (run_all) {
        require(name.empty() && bundle_path.empty(), ErrorCode::InvalidArgument, "--run-all takes no --name/--bundle");
        cli::emit(cli::dump(cli::suite_report(default_suite(), err)), report_path, out);
      } else {
        require(name.empty() != bundle_path.empty(), ErrorCode::InvalidArgument, "give exactly one of --name, --bundle");
        const ScenarioBundle b = bundle_path.empty() ? make_scenario(name, params)
                                                     : bundle_from_json(parse_json(read_text(bundle_path)));
        if (!out_path.empty() || !run) cli::emit(cli::dump(bundle_to_json(b)), out_path, out);
        if (run) {
          const auto res = cli::run_named(b.name, b);
          std::size_t failed = 0;
          for (const auto& o : res) failed += !o.pass;
          const Json rep{{"outcomes", outcomes_to_json(res)}, {"failed", failed}, {"all_pass", failed == 0}};
          cli::emit(cli::dump(rep), report_path, out);
        }
      }
    } else if (ren->parsed()) {
      RenderSpec spec;
      spec.width = width;
      spec.height = height;
      spec.grid_lines = grid_lines;
      std::vector<Layer> layers;
      if (!scene_path.empty()) {
        const auto ls = cli::load_scene_file(scene_path);
        Box w = ls.grid && ls.grid->window ? *ls.grid->window : Box{-8, -8, 8, 8};
        if (!ls.grid || !ls.grid->window) {
          Box b;
          for (const auto& r : ls.scene.regions) b.expand(r.region.boundary_box());
          if (!b.empty()) w = b.inflated(0.1 * std::max(b.width(), b.height()));
        }
        spec.window = w;
        layers = scene_layers(ls.scene, w, ls.reference_radii);
      } else if (!mesh_path.empty()) {
        const PLMap m = mesh_from_json(parse_json(read_text(mesh_path)));
        spec.window = mesh_window(m);
        layers = mesh_layers(m);
      } else {
        const DistortionProfile p = profile_from_json(parse_json(read_text(verdict_path)));
        spec.window = profile_window(p);
        spec.log_log = true;
        layers = profile_layers(p);
      }
      if (!view.empty()) spec.window = Box{view[0], view[1], view[2], view[3]};
      cli::emit(render_svg(layers, spec), out_path, out);
    }
  } catch (const Error& e) {
    err << "qcpair: " << e.what() << "\n";
    return e.code() == ErrorCode::InvalidScene ? kExitInvalidScene : kExitValidation;
  } catch (const Json::exception& e) {
    err << "qcpair: bad JSON input: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace qcpair
