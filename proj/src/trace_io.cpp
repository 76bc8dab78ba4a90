#include "strokefit/trace_io.hpp"

#include <json.hpp>

#include <string>

namespace strokefit {

using nlohmann::json;

namespace {

constexpr const char* kStrokesFormat = "strokefit.strokes";
constexpr const char* kTraceFormat = "strokefit.trace";

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError(path + ": " + what);
}

const json& field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

bool boolean(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected a boolean");
  return v.get<bool>();
}

const json& array(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  return v;
}

std::string topology_name(Topology t) { return t == Topology::toroidal ? "toroidal" : "planar"; }

json canvas_json(const CanvasSpec& c) {
  return {{"w", c.width}, {"h", c.height}, {"c", c.channels}, {"topology", topology_name(c.topology)}};
}

CanvasSpec parse_canvas(const json& j, const std::string& path) {
  CanvasSpec c;
  c.width = integer(field(j, "w", path), path + ".w");
  c.height = integer(field(j, "h", path), path + ".h");
  c.channels = integer(field(j, "c", path), path + ".c");
  const json& topo = field(j, "topology", path);
  if (topo == "planar") {
    c.topology = Topology::planar;
  } else if (topo == "toroidal") {
    c.topology = Topology::toroidal;
  } else {
    fail(path + ".topology", "expected \"planar\" or \"toroidal\"");
  }
  try {
    validate(c);
  } catch (const ValidationError& e) {
    fail(path, e.what());
  }
  return c;
}

json strokes_json(const StrokeSet& strokes) {
  json arr = json::array();
  for (const auto& s : strokes) {
    json pts = json::array();
    for (const auto& p : s.points) pts.push_back({p.x(), p.y()});
    json color = json::array();
    for (Eigen::Index c = 0; c < s.color.size(); ++c) color.push_back(s.color[c]);
    arr.push_back({{"points", pts}, {"color", color}, {"width", s.width}});
  }
  return arr;
}

StrokeSet parse_stroke_array(const json& j, const std::string& path, int channels) {
  const json& arr = array(j, path);
  if (arr.empty()) fail(path, "stroke set is empty");
  StrokeSet strokes;
  for (size_t i = 0; i < arr.size(); ++i) {
    const std::string sp = path + "[" + std::to_string(i) + "]";
    Stroke s;
    const json& pts = array(field(arr[i], "points", sp), sp + ".points");
    if (pts.size() != 4) fail(sp + ".points", "expected 4 control points");
    for (size_t k = 0; k < 4; ++k) {
      const std::string pp = sp + ".points[" + std::to_string(k) + "]";
      const json& p = array(pts[k], pp);
      if (p.size() != 2) fail(pp, "expected [x, y]");
      s.points[k] = {number(p[0], pp + "[0]"), number(p[1], pp + "[1]")};
    }
    const json& color = array(field(arr[i], "color", sp), sp + ".color");
    if (static_cast<int>(color.size()) != channels)
      fail(sp + ".color", "expected " + std::to_string(channels) + " channels");
    s.color.resize(channels);
    for (int c = 0; c < channels; ++c) {
      const std::string cp = sp + ".color[" + std::to_string(c) + "]";
      s.color[c] = number(color[c], cp);
      if (!(s.color[c] >= 0.0 && s.color[c] <= 1.0)) fail(cp, "outside [0,1]");
    }
    s.width = number(field(arr[i], "width", sp), sp + ".width");
    if (!(s.width > 0.0 && s.width <= 1.0)) fail(sp + ".width", "outside (0,1]");
    strokes.push_back(std::move(s));
  }
  return strokes;
}

void check_header(const json& doc, const char* format) {
  const json& f = field(doc, "format", "$");
  if (f != format) fail("$.format", std::string("expected \"") + format + "\"");
  const int version = integer(field(doc, "version", "$"), "$.version");
  if (version != kDocumentVersion)
    fail("$.version", "unsupported version " + std::to_string(version));
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
}

std::string composition_name(Composition c) {
  return c == Composition::over ? "over" : "color_replace";
}

json config_json(const OptimizeConfig& cfg) {
  const auto& r = cfg.metric.ranges;
  return {
      {"iterations", cfg.iterations},
      {"lr", cfg.lr},
      {"metric_weight", cfg.metric_weight},
      {"lambda_p", cfg.lambda_p},
      {"optimize_color", cfg.optimize_color},
      {"optimize_width", cfg.optimize_width},
      {"anneal", cfg.anneal},
      {"seed", cfg.seed},
      {"metric",
       {{"kind", cfg.metric.kind == MetricKind::l1 ? "l1" : "external"},
        {"augment_samples", cfg.metric.augment_samples},
        {"max_rotation_deg", r.max_rotation_deg},
        {"max_translation", r.max_translation},
        {"min_scale", r.min_scale},
        {"max_scale", r.max_scale},
        {"snap_translation", r.snap_translation}}},
      {"render",
       {{"composition", composition_name(cfg.render.composition)},
        {"intensity_clamp", cfg.render.intensity_clamp},
        {"supersample", cfg.render.supersample},
        {"background", cfg.render.background}}},
  };
}

OptimizeConfig parse_config(const json& j, const std::string& path) {
  OptimizeConfig cfg;
  cfg.iterations = integer(field(j, "iterations", path), path + ".iterations");
  cfg.lr = number(field(j, "lr", path), path + ".lr");
  cfg.metric_weight = number(field(j, "metric_weight", path), path + ".metric_weight");
  cfg.lambda_p = number(field(j, "lambda_p", path), path + ".lambda_p");
  cfg.optimize_color = boolean(field(j, "optimize_color", path), path + ".optimize_color");
  cfg.optimize_width = boolean(field(j, "optimize_width", path), path + ".optimize_width");
  cfg.anneal = boolean(field(j, "anneal", path), path + ".anneal");
  const json& seed = field(j, "seed", path);
  if (!seed.is_number_unsigned()) fail(path + ".seed", "expected an unsigned integer");
  cfg.seed = seed.get<std::uint64_t>();

  const std::string mp = path + ".metric";
  const json& m = field(j, "metric", path);
  const json& kind = field(m, "kind", mp);
  if (kind == "l1") {
    cfg.metric.kind = MetricKind::l1;
  } else if (kind == "external") {
    cfg.metric.kind = MetricKind::external;
  } else {
    fail(mp + ".kind", "expected \"l1\" or \"external\"");
  }
  cfg.metric.augment_samples = integer(field(m, "augment_samples", mp), mp + ".augment_samples");
  auto& r = cfg.metric.ranges;
  r.max_rotation_deg = number(field(m, "max_rotation_deg", mp), mp + ".max_rotation_deg");
  r.max_translation = number(field(m, "max_translation", mp), mp + ".max_translation");
  r.min_scale = number(field(m, "min_scale", mp), mp + ".min_scale");
  r.max_scale = number(field(m, "max_scale", mp), mp + ".max_scale");
  r.snap_translation = boolean(field(m, "snap_translation", mp), mp + ".snap_translation");

  const std::string rp = path + ".render";
  const json& rj = field(j, "render", path);
  const json& comp = field(rj, "composition", rp);
  if (comp == "over") {
    cfg.render.composition = Composition::over;
  } else if (comp == "color_replace") {
    cfg.render.composition = Composition::color_replace;
  } else {
    fail(rp + ".composition", "expected \"over\" or \"color_replace\"");
  }
  cfg.render.intensity_clamp = number(field(rj, "intensity_clamp", rp), rp + ".intensity_clamp");
  cfg.render.supersample = integer(field(rj, "supersample", rp), rp + ".supersample");
  cfg.render.background = number(field(rj, "background", rp), rp + ".background");
  return cfg;
}

}  // namespace

std::string serialize_strokes(const StrokeDocument& doc) {
  validate(doc.canvas);
  validate(doc.strokes, doc.canvas.channels);
  const json j = {{"format", kStrokesFormat},
                  {"version", kDocumentVersion},
                  {"canvas", canvas_json(doc.canvas)},
                  {"strokes", strokes_json(doc.strokes)}};
  return j.dump(1) + "\n";
}

StrokeDocument parse_strokes(const std::string& text) {
  const json doc = parse_text(text);
  check_header(doc, kStrokesFormat);
  StrokeDocument out;
  out.canvas = parse_canvas(field(doc, "canvas", "$"), "$.canvas");
  out.strokes = parse_stroke_array(field(doc, "strokes", "$"), "$.strokes", out.canvas.channels);
  return out;
}

std::string serialize_trace(const GuidanceTrace& trace) {
  json steps = json::array();
  for (const auto& e : trace.entries)
    steps.push_back({{"step", e.step}, {"loss", e.loss}, {"strokes", strokes_json(e.strokes)}});
  const json j = {{"format", kTraceFormat},
                  {"version", kDocumentVersion},
                  {"canvas", canvas_json(trace.canvas)},
                  {"config", config_json(trace.config)},
                  {"checkpoints", trace.config.checkpoints},
                  {"steps", steps}};
  return j.dump(1) + "\n";
}

GuidanceTrace parse_trace(const std::string& text) {
  const json doc = parse_text(text);
  check_header(doc, kTraceFormat);
  GuidanceTrace trace;
  trace.canvas = parse_canvas(field(doc, "canvas", "$"), "$.canvas");
  trace.config = parse_config(field(doc, "config", "$"), "$.config");

  const json& cps = array(field(doc, "checkpoints", "$"), "$.checkpoints");
  if (cps.empty()) fail("$.checkpoints", "checkpoint list is empty");
  trace.config.checkpoints.clear();
  for (size_t i = 0; i < cps.size(); ++i)
    trace.config.checkpoints.push_back(integer(cps[i], "$.checkpoints[" + std::to_string(i) + "]"));
  try {
    validate(trace.config);
  } catch (const ValidationError& e) {
    fail("$.config", e.what());
  }

  const json& steps = array(field(doc, "steps", "$"), "$.steps");
  for (size_t i = 0; i < steps.size(); ++i) {
    const std::string sp = "$.steps[" + std::to_string(i) + "]";
    TraceEntry e;
    e.step = integer(field(steps[i], "step", sp), sp + ".step");
    e.loss = number(field(steps[i], "loss", sp), sp + ".loss");
    e.strokes = parse_stroke_array(field(steps[i], "strokes", sp), sp + ".strokes",
                                   trace.canvas.channels);
    if (!trace.entries.empty()) {
      if (e.step <= trace.entries.back().step) fail(sp + ".step", "steps must strictly increase");
      if (e.strokes.size() != trace.entries.back().strokes.size())
        fail(sp + ".strokes", "stroke count changes between steps");
    }
    trace.entries.push_back(std::move(e));
  }
  if (trace.entries.empty()) fail("$.steps", "trace has no steps");
  return trace;
}

}  // namespace strokefit
