#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "strokefit/errors.hpp"
#include "strokefit/image_io.hpp"
#include "strokefit/init.hpp"
#include "strokefit/optimizer.hpp"
#include "strokefit/rasterizer.hpp"
#include "strokefit/trace_io.hpp"
#include "strokefit/verify.hpp"

namespace strokefit::cli {

namespace {

namespace fs = std::filesystem;

const std::map<std::string, Topology> kTopologies{{"planar", Topology::planar},
                                                   {"toroidal", Topology::toroidal}};
const std::map<std::string, Composition> kCompositions{
    {"color_replace", Composition::color_replace}, {"over", Composition::over}};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw ValidationError("cannot write " + path.string());
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct InitFlags {
  std::string image;
  std::string saliency;
  Topology topology = Topology::planar;
  InitConfig init;
};

void add_init_flags(CLI::App& cmd, InitFlags& f) {
  cmd.add_option("image", f.image, "Target raster (PNG, PGM or PPM)")->required();
  cmd.add_option("--saliency", f.saliency, "Grayscale saliency raster (default: Sobel of the target)");
  cmd.add_option("--seed", f.init.seed, "Random seed")->capture_default_str();
  cmd.add_option("-n,--strokes", f.init.n_strokes, "Number of strokes")->capture_default_str();
  cmd.add_option("--sigma", f.init.sigma, "Saliency suppression radius in pixels")->capture_default_str();
  cmd.add_option("--beta", f.init.beta, "Color contrast")->capture_default_str();
  cmd.add_option("--perturb-std", f.init.perturb_std, "Control point perturbation, canvas units")
      ->capture_default_str();
  cmd.add_option("--stroke-width", f.init.stroke_width, "Stroke width, canvas units")
      ->capture_default_str();
  cmd.add_option("--topology", f.topology, "planar or toroidal")
      ->transform(CLI::CheckedTransformer(kTopologies, CLI::ignore_case))
      ->option_text("planar|toroidal");
}

Image read_target(const InitFlags& f) {
  Image target = read_image(f.image, f.topology);
  return target;
}

SaliencyMap load_saliency(const InitFlags& f, const Image& target) {
  if (f.saliency.empty()) return sobel_saliency(target);
  const Image s = read_image(f.saliency, f.topology);
  if (s.width() != target.width() || s.height() != target.height())
    throw ValidationError("saliency is " + std::to_string(s.width()) + "x" +
                          std::to_string(s.height()) + " but the image is " +
                          std::to_string(target.width()) + "x" + std::to_string(target.height()));
  CanvasSpec canvas = target.canvas;
  canvas.channels = 1;
  return {canvas, luminance(s)};
}

InitResult run_init(const InitFlags& f, const Image& target) {
  validate(f.init);
  InitResult res = greedy_init(load_saliency(f, target), target, f.init);
  if (res.uniform_fallback)
    std::cerr << "warning: saliency is all zero; strokes placed from the first pixel\n";
  return res;
}

struct SketchFlags {
  InitFlags in;
  OptimizeConfig opt;
  bool no_anneal = false;
  bool checkpoints_set = false;
  std::string out = ".";
};

int cmd_init(const InitFlags& f, const std::string& out) {
  const Image target = read_target(f);
  const InitResult res = run_init(f, target);
  write_text(out, serialize_strokes({target.canvas, res.strokes}));
  std::cout << "wrote " << res.strokes.size() << " strokes to " << out << "\n";
  return kSuccess;
}

int cmd_sketch(SketchFlags& f) {
  OptimizeConfig& cfg = f.opt;
  cfg.anneal = !f.no_anneal;
  cfg.seed = f.in.init.seed;
  if (!f.checkpoints_set) {
    std::erase_if(cfg.checkpoints, [&](int c) { return c > cfg.iterations; });
  }
  if (cfg.checkpoints.empty() || cfg.checkpoints.back() != cfg.iterations)
    cfg.checkpoints.push_back(cfg.iterations);
  validate(cfg);

  const Image target = read_target(f.in);
  validate_unit_range(target);
  const InitResult init = run_init(f.in, target);
  const GuidanceTrace trace = optimize(target, init.strokes, cfg);
  const StrokeSet& final_strokes = trace.final_entry().strokes;

  const fs::path dir(f.out);
  fs::create_directories(dir);
  write_text(dir / "strokes.json", serialize_strokes({target.canvas, final_strokes}));
  write_text(dir / "trace.json", serialize_trace(trace));
  write_text(dir / "sketch.svg", export_svg(final_strokes, target.canvas));
  RenderConfig rc = cfg.render;
  rc.anneal_tau = 1.0;
  write_image((dir / "sketch.png").string(), render(final_strokes, target.canvas, rc));

  for (const auto& e : trace.entries) std::printf("step %5d  loss %.6f\n", e.step, e.loss);
  std::cout << "wrote strokes.json, trace.json, sketch.svg, sketch.png to " << dir.string()
            << "\n";
  return kSuccess;
}

struct RenderFlags {
  std::string strokes;
  std::string out = "sketch.png";
  std::string svg;
  int size = 0;
  int width = 0;
  int height = 0;
  std::string topology;
  RenderConfig render;
};

int cmd_render(RenderFlags& f) {
  StrokeDocument doc = parse_strokes(read_text(f.strokes));
  CanvasSpec canvas = doc.canvas;
  if (f.size > 0) canvas.width = canvas.height = f.size;
  if (f.width > 0) canvas.width = f.width;
  if (f.height > 0) canvas.height = f.height;
  if (!f.topology.empty()) canvas.topology = kTopologies.at(f.topology);
  validate(canvas);
  write_image(f.out, render(doc.strokes, canvas, f.render));
  if (!f.svg.empty()) write_text(f.svg, export_svg(doc.strokes, canvas));
  std::cout << "rendered " << doc.strokes.size() << " strokes at " << canvas.width << "x"
            << canvas.height << " to " << f.out << "\n";
  return kSuccess;
}

struct VerifyFlags {
  VerifyOptions options;
  std::string filter;
  std::string report = "report.json";
};

int cmd_verify(VerifyFlags& f) {
  std::stringstream ss(f.filter);
  for (std::string g; std::getline(ss, g, ',');)
    if (!g.empty()) f.options.groups.push_back(g);
  const auto results = run_property_suite(f.options);
  int failed = 0;
  for (const auto& r : results) {
    std::printf("%-4s %-13s %-38s measured %-12.4g threshold %.4g\n", r.pass ? "ok" : "FAIL",
                r.group.c_str(), r.name.c_str(), r.measured, r.threshold);
    failed += !r.pass;
  }
  write_text(f.report, property_report_json(results, f.options));
  std::printf("%zu/%zu properties pass; report written to %s\n", results.size() - failed,
              results.size(), f.report.c_str());
  return failed == 0 ? kSuccess : kNumericalFailure;
}

void add_render_config(CLI::App& cmd, RenderConfig& rc) {
  cmd.add_option("--composition", rc.composition, "color_replace or over")
      ->transform(CLI::CheckedTransformer(kCompositions, CLI::ignore_case))
      ->option_text("color_replace|over");
  cmd.add_option("--background", rc.background, "Background gray level")->capture_default_str();
  cmd.add_option("--supersample", rc.supersample, "k x k samples per pixel")->capture_default_str();
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Fit, render and verify cubic Bezier stroke sketches"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "strokefit 0.1.0");
  app.set_config("--config", "", "TOML file; [sketch], [init], [render] and [verify] sections hold flag values");
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);

  SketchFlags sketch;
  sketch.opt.lr = 0.05;
  auto* sk = app.add_subcommand("sketch", "Initialize strokes and fit them to a target image");
  add_init_flags(*sk, sketch.in);
  sk->add_option("--lr", sketch.opt.lr, "Adam learning rate")->capture_default_str();
  sk->add_option("--iterations", sketch.opt.iterations, "Optimization steps")->capture_default_str();
  sk->add_option("--checkpoints", sketch.opt.checkpoints, "Recorded steps")
      ->delimiter(',')
      ->each([&](const std::string&) { sketch.checkpoints_set = true; });
  sk->add_option("--lambda-p", sketch.opt.lambda_p, "Boundary and align penalty weight")
      ->capture_default_str();
  sk->add_flag("--optimize-color", sketch.opt.optimize_color, "Also fit stroke colors");
  sk->add_flag("--optimize-width", sketch.opt.optimize_width, "Also fit stroke widths");
  sk->add_flag("--no-anneal", sketch.no_anneal, "Render at tau = 1 throughout");
  sk->add_option("--augment-samples", sketch.opt.metric.augment_samples,
                 "Random similarity maps per step (0: none)")
      ->capture_default_str();
  add_render_config(*sk, sketch.opt.render);
  sk->add_option("--out", sketch.out, "Output directory")->capture_default_str();

  InitFlags init;
  std::string init_out = "strokes.json";
  auto* in = app.add_subcommand("init", "Write the greedy initialization without optimizing");
  add_init_flags(*in, init);
  in->add_option("--out", init_out, "Output strokes file")->capture_default_str();

  RenderFlags rend;
  auto* re = app.add_subcommand("render", "Render a strokes.json file");
  re->add_option("strokes", rend.strokes, "strokes.json")->required();
  re->add_option("--out", rend.out, "Output PNG, PGM or PPM")->capture_default_str();
  re->add_option("--svg", rend.svg, "Also write an SVG document");
  re->add_option("--size", rend.size, "Square output size in pixels");
  re->add_option("--width", rend.width, "Output width in pixels");
  re->add_option("--height", rend.height, "Output height in pixels");
  re->add_option("--tau", rend.render.anneal_tau, "Anneal progress in [0,1]")->capture_default_str();
  re->add_option("--topology", rend.topology, "planar or toroidal")
      ->check(CLI::IsMember({"planar", "toroidal"}))
      ->option_text("planar|toroidal");
  add_render_config(*re, rend.render);

  VerifyFlags ver;
  auto* ve = app.add_subcommand("verify", "Run the seeded property suite");
  ve->add_option("--seed", ver.options.seed, "Corpus seed")->capture_default_str();
  ve->add_option("--filter", ver.filter, "Comma-separated groups to run");
  ve->add_option("--report", ver.report, "JSON report path")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kValidationError;
  }

  try {
    if (sk->parsed()) return cmd_sketch(sketch);
    if (in->parsed()) return cmd_init(init, init_out);
    if (re->parsed()) return cmd_render(rend);
    if (ve->parsed()) return cmd_verify(ver);
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationError;
  }
  return kSuccess;
}

}  // namespace strokefit::cli
