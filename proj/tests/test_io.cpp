#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <cstring>
#include <locale>
#include <unistd.h>

#include "qcpair/cli.hpp"

using namespace qcpair;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("qcpair_io_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string file(const std::string& name) { return (scratch() / name).string(); }

struct CliResult {
  int code;
  std::string out, err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "qcpair");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

int binary(const std::string& args) {
  const std::string cmd = std::string(QCPAIR_CLI_PATH) + " " + args + " >" + file("stdout.txt") + " 2>" + file("stderr.txt");
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

bool bits_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

struct Comma : std::numpunct<char> {
  char do_decimal_point() const override { return ','; }
};

}  // namespace

TEST(Numbers, NineDigitsLocaleIndependent) {
  const auto old = std::locale::global(std::locale(std::locale::classic(), new Comma));
  EXPECT_EQ(format_sig9(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(format_sig9(3.0), "3");
  EXPECT_EQ(format_sig9(-1234567890123.0), "-1.23456789e+12");
  EXPECT_EQ(format_sig9(kInf), "inf");
  std::locale::global(old);
}

TEST(Numbers, NonFiniteJson) {
  EXPECT_EQ(io::get_num(io::num(kInf)), kInf);
  EXPECT_EQ(io::get_num(io::num(-kInf)), -kInf);
  EXPECT_TRUE(std::isnan(io::get_num(io::num(std::nan("")))));
  EXPECT_EQ(io::get_num(io::num(0.1)), 0.1);
}

TEST(SceneJson, RoundTripIsBitIdentical) {
  for (const auto& [name, params] : default_suite()) {
    const ScenarioBundle b = make_scenario(name, params);
    const Json j = scene_to_json(b.scene);
    const Scene s = scene_from_json(parse_json(j.dump()));
    EXPECT_EQ(scene_to_json(s).dump(), j.dump()) << name;
    ASSERT_EQ(s.regions.size(), b.scene.regions.size());
    for (std::size_t i = 0; i < s.regions.size(); ++i) {
      const auto &x = s.regions[i].region, &y = b.scene.regions[i].region;
      EXPECT_EQ(x.shape().index(), y.shape().index());
      EXPECT_EQ(x.complemented(), y.complemented());
      if (const auto* p = std::get_if<PolyJordan>(&x.shape())) {
        const auto& q = std::get<PolyJordan>(y.shape());
        ASSERT_EQ(p->vertices.size(), q.vertices.size());
        for (std::size_t k = 0; k < p->vertices.size(); ++k) {
          EXPECT_TRUE(bits_equal(p->vertices[k].real(), q.vertices[k].real()));
          EXPECT_TRUE(bits_equal(p->vertices[k].imag(), q.vertices[k].imag()));
        }
      }
    }
    for (std::size_t i = 0; i < s.samples.size(); ++i) EXPECT_EQ(s.samples[i].points, b.scene.samples[i].points);
  }
}

TEST(SceneJson, OddNormalsSurvive) {
  Scene s;
  s.regions = {{"H", Region::half_plane({0.6, 0.8}, 0.3)}, {"S", Region::strip({1, 3}, -1, 2)},
               {"X", Region::disk_exterior({0.1, -0.2}, 0.7)}};
  s.samples = {{"inf", "H", {ExtPoint::infinity()}}};
  const Scene t = scene_from_json(parse_json(scene_to_json(s).dump()));
  const auto& a = std::get<HalfPlane>(s.regions[0].region.shape());
  const auto& b = std::get<HalfPlane>(t.regions[0].region.shape());
  EXPECT_TRUE(bits_equal(a.normal.real(), b.normal.real()));
  EXPECT_TRUE(bits_equal(a.offset, b.offset));
  EXPECT_TRUE(t.samples[0].points[0].is_infinity());
  EXPECT_TRUE(t.regions[2].region.complemented());
}

TEST(SceneJson, BadInputIsInvalidScene) {
  auto code = [](const std::string& text) {
    try {
      scene_from_json(parse_json(text, ErrorCode::InvalidScene));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code("{"), ErrorCode::InvalidScene);
  EXPECT_EQ(code(R"({"regions":[{"name":"A","kind":"blob"}]})"), ErrorCode::InvalidScene);
  EXPECT_EQ(code(R"({"regions":[{"name":"A","kind":"disk","center":[0,0],"radius":-1}]})"), ErrorCode::InvalidScene);
  EXPECT_EQ(code(R"({"regions":[{"name":"A","kind":"disk","center":[0,0],"radius":1},
                                 {"name":"A","kind":"disk","center":[0,0],"radius":2}]})"),
            ErrorCode::InvalidScene);
  // sample off its boundary
  EXPECT_EQ(code(R"({"regions":[{"name":"A","kind":"disk","center":[0,0],"radius":1}],
                     "samples":[{"name":"S","region":"A","points":[[0.5,0]]}]})"),
            ErrorCode::InvalidScene);
}

TEST(BundleJson, RoundTripKeepsExpectationsAndHooks) {
  for (const char* name : {"parallel", "cusp", "lipschitz_exp", "squares"}) {
    const ScenarioBundle b = make_scenario(name);
    const Json j = bundle_to_json(b);
    const ScenarioBundle c = bundle_from_json(parse_json(j.dump()));
    EXPECT_EQ(bundle_to_json(c).dump(), j.dump()) << name;
    EXPECT_EQ(c.functions.size(), b.functions.size()) << name;
    EXPECT_EQ(c.maps.size(), b.maps.size()) << name;
    for (std::size_t i = 0; i < b.expected.size(); ++i) EXPECT_EQ(c.expected[i].hi, b.expected[i].hi);
  }
}

TEST(MeshJson, RoundTripExact) {
  PLMap m = dyadic_pl_extend(LineHomeo::sample([](double x) { return x + 0.1 * std::sin(2 * kPi * x) / (2 * kPi); },
                                               0, 1, 1.0 / 64, 1),
                             0, 2, 5);
  const PLMap r = mesh_from_json(parse_json(mesh_to_json(m).dump()));
  ASSERT_EQ(r.vertices.size(), m.vertices.size());
  EXPECT_EQ(r.triangles, m.triangles);
  EXPECT_EQ(r.depth, 5);
  EXPECT_EQ(r.period, m.period);
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    EXPECT_EQ(r.vertices[i], m.vertices[i]);
    EXPECT_EQ(r.image_vertices[i], m.image_vertices[i]);
  }
  const Json j = mesh_to_json(m);
  for (const char* k : {"vertices", "triangles", "image_vertices", "depth", "period"}) EXPECT_TRUE(j.contains(k));
  EXPECT_TRUE(mesh_to_json(dyadic_pl_extend(LineHomeo::identity(-2, 3), -1, 1, 2)).at("period").is_null());
}

TEST(MeshJson, RejectsBadIndices) {
  const auto j = parse_json(R"({"vertices":[[0,0],[1,0],[0,1]],"image_vertices":[[0,0],[1,0],[0,1]],
                                "triangles":[[0,1,3]],"depth":0,"period":null})");
  EXPECT_THROW(mesh_from_json(j), Error);
}

TEST(Csv, MatrixRoundTrip) {
  const Matrix M{{0, 1.0 / 3}, {1.0 / 3, 0}};
  const std::string s = matrix_csv(M);
  EXPECT_EQ(s, "index,0,1\n0,0,0.333333333\n1,0.333333333,0\n");
  const Matrix R = matrix_from_csv(s);
  EXPECT_NEAR(R[0][1], 1.0 / 3, 1e-9);
}

TEST(Svg, EmptyLayer) {
  try {
    render_svg({}, RenderSpec{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyLayer);
  }
  EXPECT_THROW(render_svg({Layer{"U", {}, false, 0}}, RenderSpec{}), Error);
}

TEST(Svg, ConcentricLayout) {
  const auto b = concentric_annulus(1, 2);
  const auto layers = scene_layers(b.scene, Box{-3, -3, 3, 3}, {1, 2});
  const std::string svg = render_svg(layers, RenderSpec{Box{-3, -3, 3, 3}, {}, 4, 600, 600});
  EXPECT_EQ(svg, render_svg(layers, RenderSpec{Box{-3, -3, 3, 3}, {}, 4, 600, 600}));
  // two closed boundary curves, two dashed reference circles
  EXPECT_NE(svg.find("<g id=\"V\""), std::string::npos);
  EXPECT_NE(svg.find("<g id=\"U\""), std::string::npos);
  const auto ref = svg.find("<g id=\"reference\"");
  ASSERT_NE(ref, std::string::npos);
  EXPECT_NE(svg.find("stroke-dasharray", ref), std::string::npos);
  std::size_t closed = 0;
  for (std::size_t p = svg.find(" Z\""); p != std::string::npos; p = svg.find(" Z\"", p + 1)) ++closed;
  EXPECT_GE(closed, 4u);
}

TEST(Svg, MeshPathBudgetAtDepthSix) {
  const PLMap m = dyadic_pl_extend(LineHomeo::identity(-6, 6), -4, 4, 6);
  const std::string svg = render_svg(mesh_layers(m), RenderSpec{mesh_window(m), {}, 0, 1200, 400});
  std::size_t paths = 0;
  for (std::size_t p = svg.find("<path"); p != std::string::npos; p = svg.find("<path", p + 1)) ++paths;
  EXPECT_EQ(paths, 2 * m.triangles.size());
  EXPECT_LE(paths, 100000u);
}

TEST(Svg, VerdictPolyline) {
  DistortionProfile p;
  p.eta_hat[10] = 2;
  p.eta_hat[12] = 8;
  const auto layers = profile_layers(p);
  ASSERT_EQ(layers[0].paths[0].size(), 2u);
  RenderSpec spec{profile_window(p), {}, 0, 400, 300};
  spec.log_log = true;
  EXPECT_NE(render_svg(layers, spec).find("<g id=\"eta_hat\""), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"frobnicate"}).code, kExitUnknownSubcommand);
  EXPECT_EQ(run({}).code, kExitUnknownSubcommand);
  EXPECT_EQ(run({"metric", "--scene", "x.json"}).code, kExitValidation);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
  write_text(file("broken.json"), "{\"regions\": [");
  const auto r = run({"metric", "--scene", file("broken.json"), "--pair", "U,V", "--samples", "S"});
  EXPECT_EQ(r.code, kExitInvalidScene);
  EXPECT_NE(r.err.find("InvalidScene"), std::string::npos);
  const auto bad = run({"scenario", "--name", "concentric", "--r", "3", "--R", "2"});
  EXPECT_EQ(bad.code, kExitValidation);
  EXPECT_NE(bad.err.find("BadRadii"), std::string::npos);
}

TEST(Cli, ScenarioThenMetric) {
  ASSERT_EQ(run({"scenario", "--name", "parallel", "--gap", "1", "--out", file("b.json")}).code, 0);
  const auto r = run({"metric", "--scene", file("b.json"), "--pair", "U,V", "--samples", "SV"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Matrix M = matrix_from_csv(r.out);
  // samples are x = -2, 0, 1, 3, 5
  EXPECT_NEAR(M[1][3], 3.0, 0.09);
  EXPECT_NEAR(M[0][4], 7.0, 0.21);
}

TEST(Cli, ExtendIdentityThenDilatation) {
  write_text(file("id.json"), R"({"xs":[-6,6],"ys":[-6,6]})");
  ASSERT_EQ(run({"extend", "--kind", "dyadic", "--boundary", file("id.json"), "--out", file("mesh.json")}).code, 0);
  const auto r = run({"dilatation", "--mesh", file("mesh.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(parse_json(r.out).at("max_K").get<double>(), 1.0);
}

TEST(Cli, ModulusOfRoundAnnulus) {
  Scene s;
  s.regions = {{"A", Region::disk(0, 1)}, {"B", Region::disk_exterior(0, std::exp(2 * kPi))}};
  write_text(file("ann.json"), scene_to_json(s).dump());
  for (bool numeric : {false, true}) {
    std::vector<std::string> args{"modulus", "--scene", file("ann.json"), "--ring", "A,B"};
    if (numeric) args.push_back("--numeric");
    const auto r = run(args);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(parse_json(r.out).at("modulus").get<double>(), 1.0, 0.01);
  }
}

TEST(Cli, VerdictDeterministicGivenSeed) {
  ASSERT_EQ(run({"scenario", "--name", "parallel", "--out", file("p.json")}).code, 0);
  const std::vector<std::string> args{"--seed", "3", "verdict", "--scene", file("p.json"), "--pair", "U,V",
                                      "--samples", "SV", "--budget", "500", "--h", "0.05"};
  const auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const Json j = parse_json(a.out);
  EXPECT_EQ(j.at("seed").get<int>(), 3);
  for (const char* k : {"bins", "eta_hat", "witnesses", "grid"}) EXPECT_TRUE(j.contains(k));
}

TEST(Cli, ScenarioRunOnSavedBundle) {
  ASSERT_EQ(run({"scenario", "--name", "cusp", "--alpha", "2", "--out", file("cusp.json")}).code, 0);
  const auto r = run({"scenario", "--bundle", file("cusp.json"), "--run"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(parse_json(r.out).at("all_pass").get<bool>());
}

TEST(Cli, RenderScene) {
  ASSERT_EQ(run({"scenario", "--name", "concentric", "--out", file("c.json")}).code, 0);
  const auto r = run({"render", "--scene", file("c.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("<svg", 0), 0u);
  EXPECT_NE(r.out.find("stroke-dasharray"), std::string::npos);
}

TEST(Binary, EndToEnd) {
  EXPECT_EQ(binary("nope"), 64);
  EXPECT_EQ(binary("scenario --name parallel --gap 2 --out " + file("bin.json")), 0);
  EXPECT_EQ(binary("metric --scene " + file("bin.json") + " --pair U,V --samples SV --out " + file("bin.csv")), 0);
  const Matrix M = matrix_from_csv(read_text(file("bin.csv")));
  EXPECT_NEAR(M[1][3], 1.5, 0.045);
  write_text(file("junk.json"), "[1,2");
  EXPECT_EQ(binary("render --scene " + file("junk.json")), 65);
}
