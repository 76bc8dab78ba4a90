#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "commands.hpp"
#include "strokefit/corpus.hpp"
#include "strokefit/image_io.hpp"
#include "strokefit/rasterizer.hpp"
#include "strokefit/trace_io.hpp"

using namespace strokefit;
namespace fs = std::filesystem;

namespace {

fs::path dir() {
  const fs::path d = fs::temp_directory_path() / "strokefit_test_cli";
  fs::create_directories(d);
  return d;
}

std::string at(const std::string& name) { return (dir() / name).string(); }

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "strokefit");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

std::string target_png() {
  const std::string path = at("target.png");
  write_image(path, render(recovery_scene(), {32, 32, 1, Topology::planar}, {}));
  return path;
}

}  // namespace

TEST_CASE("render is reproducible and resizable") {
  write(at("scene.json"), serialize_strokes({{48, 40, 1, Topology::planar}, recovery_scene()}));
  REQUIRE(run_cli({"render", at("scene.json"), "--out", at("a.png"), "--svg", at("a.svg")}) == 0);
  REQUIRE(run_cli({"render", at("scene.json"), "--out", at("b.png")}) == 0);
  CHECK(slurp(at("a.png")) == slurp(at("b.png")));
  CHECK(slurp(at("a.svg")).find("<svg") != std::string::npos);
  const Image a = read_image(at("a.png"));
  CHECK(a.width() == 48);
  CHECK(a.height() == 40);
  REQUIRE(run_cli({"render", at("scene.json"), "--size", "256", "--out", at("big.pgm")}) == 0);
  const Image big = read_image(at("big.pgm"));
  CHECK(big.width() == 256);
  CHECK(big.height() == 256);
}

TEST_CASE("invalid input exits with 1") {
  nlohmann::json j = nlohmann::json::parse(serialize_strokes({{16, 16, 1, Topology::planar}, recovery_scene()}));
  j["strokes"][0]["color"][0] = 1.2;
  write(at("bad.json"), j.dump());
  CHECK(run_cli({"render", at("bad.json"), "--out", at("bad.png")}) == 1);
  CHECK(run_cli({"render", at("missing.json")}) == 1);
  CHECK(run_cli({"init", target_png(), "--beta", "0", "--out", at("s.json")}) == 1);
  write_image(at("small.png"), Image({16, 16, 1, Topology::planar}, 0.5));
  CHECK(run_cli({"init", target_png(), "--saliency", at("small.png"), "--out", at("s.json")}) == 1);
  CHECK(run_cli({"render", at("bad.json"), "--topology", "sphere"}) == 1);
  CHECK(run_cli({"frobnicate"}) == 1);
}

TEST_CASE("init places one stroke on the saliency peak") {
  Image sal({32, 32, 1, Topology::planar}, 0.0);
  sal(7, 9, 0) = 1.0;
  write_image(at("peak.png"), sal);
  REQUIRE(run_cli({"init", target_png(), "--saliency", at("peak.png"), "-n", "1", "--out", at("one.json")}) == 0);
  const StrokeDocument doc = parse_strokes(slurp(at("one.json")));
  REQUIRE(doc.strokes.size() == 1);
  CHECK(doc.strokes[0].points[0] == doc.canvas.pixel_center(7, 9));

  // Defaults sigma = beta = 5 match explicit flags.
  REQUIRE(run_cli({"init", target_png(), "-n", "6", "--out", at("d.json")}) == 0);
  REQUIRE(run_cli({"init", target_png(), "-n", "6", "--sigma", "5", "--beta", "5", "--out", at("e.json")}) == 0);
  CHECK(slurp(at("d.json")) == slurp(at("e.json")));
}

TEST_CASE("config file supplies flags") {
  write(at("init.toml"), "[init]\nstrokes = 3\nseed = 4\n");
  REQUIRE(run_cli({"init", target_png(), "--config", at("init.toml"), "--out", at("c.json")}) == 0);
  REQUIRE(run_cli({"init", target_png(), "-n", "3", "--seed", "4", "--out", at("f.json")}) == 0);
  CHECK(slurp(at("c.json")) == slurp(at("f.json")));
  CHECK(parse_strokes(slurp(at("c.json"))).strokes.size() == 3);
  write(at("typo.toml"), "[init]\nstrokse = 3\n");
  CHECK(run_cli({"init", target_png(), "--config", at("typo.toml"), "--out", at("t.json")}) == 1);
}

TEST_CASE("verify writes a seeded report") {
  REQUIRE(run_cli({"verify", "--filter", "hungarian,guidance", "--seed", "3", "--report", at("r1.json")}) == 0);
  REQUIRE(run_cli({"verify", "--filter", "hungarian,guidance", "--seed", "3", "--report", at("r2.json")}) == 0);
  CHECK(slurp(at("r1.json")) == slurp(at("r2.json")));
  const auto report = nlohmann::json::parse(slurp(at("r1.json")));
  CHECK(report["all_pass"] == true);
  CHECK(report["seed"] == 3);
  for (const auto& p : report["properties"]) {
    const std::string g = p["group"];
    CHECK((g == "hungarian" || g == "guidance"));
  }
  CHECK(run_cli({"verify", "--filter", "nonsense", "--report", at("r3.json")}) == 1);
}

TEST_CASE("sketch output is byte-identical across runs and thread counts") {
  const std::string target = target_png();
  const std::vector<std::string> base{"sketch", target, "-n", "4", "--iterations", "40", "--seed", "2"};
  auto run_in = [&](const std::string& out, const char* threads) {
    setenv("STROKEFIT_THREADS", threads, 1);
    auto args = base;
    args.insert(args.end(), {"--out", at(out)});
    const int code = run_cli(args);
    unsetenv("STROKEFIT_THREADS");
    return code;
  };
  REQUIRE(run_in("s1", "1") == 0);
  REQUIRE(run_in("s4", "4") == 0);
  REQUIRE(run_in("s4b", "4") == 0);
  for (const char* f : {"strokes.json", "trace.json", "sketch.svg", "sketch.png"}) {
    CHECK(slurp(at(std::string("s1/") + f)) == slurp(at(std::string("s4/") + f)));
    CHECK(slurp(at(std::string("s4/") + f)) == slurp(at(std::string("s4b/") + f)));
  }
  const GuidanceTrace trace = parse_trace(slurp(at("s1/trace.json")));
  CHECK(trace.checkpoints() == std::vector<int>{40});
  CHECK(trace.entries.size() == 2);
}
