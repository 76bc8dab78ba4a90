#pragma once

#include <string>

#include "strokefit/geometry.hpp"
#include "strokefit/optimizer.hpp"

namespace strokefit {

inline constexpr int kDocumentVersion = 1;

/// strokes.json:
///   {"format": "strokefit.strokes", "version": 1,
///    "canvas": {"w", "h", "c", "topology"},
///    "strokes": [{"points": [[x, y] x4], "color": [...], "width": w}]}
struct StrokeDocument {
  CanvasSpec canvas;
  StrokeSet strokes;
};

std::string serialize_strokes(const StrokeDocument& doc);

/// Throws ValidationError naming the offending field path.
StrokeDocument parse_strokes(const std::string& text);

/// trace.json:
///   {"format": "strokefit.trace", "version": 1, "canvas": {...},
///    "config": {...}, "checkpoints": [...],
///    "steps": [{"step", "loss", "strokes": [...]}]}
std::string serialize_trace(const GuidanceTrace& trace);
GuidanceTrace parse_trace(const std::string& text);

}  // namespace strokefit
