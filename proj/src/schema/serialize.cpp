#include "tracekit/schema/trace.hpp"

#include "tracekit/core/text.hpp"

#include <array>
#include <cstdio>

namespace tracekit::schema {

namespace {

// YAML double-quoted scalar. Printable bytes (including UTF-8 sequences) pass through.
std::string quote(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back('"');
  for (char c : s) {
    const auto uc = static_cast<unsigned char>(c);
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (uc < 0x20 || uc == 0x7f) {
          std::array<char, 8> buf{};
          std::snprintf(buf.data(), buf.size(), "\\x%02X", uc);
          out += buf.data();
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
  return out;
}

std::string seconds(double t) { return quote(text::format_shortest(t) + "s"); }

std::string vec(std::initializer_list<double> values) {
  std::string out = "[";
  bool first = true;
  for (double v : values) {
    if (!first) out += ", ";
    out += text::format_decimal(v);
    first = false;
  }
  return out + "]";
}

}  // namespace

std::string serialize_trace(const TraceDocument& doc) {
  std::string out;
  auto line = [&out](std::string_view indent, std::string_view key, const std::string& value) {
    out += indent;
    out += key;
    out += ": ";
    out += value;
    out += '\n';
  };

  out += "Meta_Context:\n";
  line("  ", "room_topology", quote(doc.meta.room_topology));
  line("  ", "grid_alignment", quote(doc.meta.grid_alignment));
  line("  ", "initial_camera_heading", quote(doc.meta.initial_camera_heading));

  if (doc.trajectory.empty()) {
    out += "Trajectory: []\n";
  } else {
    out += "Trajectory:\n";
    for (const auto& s : doc.trajectory) {
      line("  - ", "step", std::to_string(s.step));
      line("    ", "time", seconds(s.time));
      line("    ", "pos", vec({s.pos.x, s.pos.y}));
      line("    ", "facing", quote(s.facing.raw_label));
      line("    ", "action", quote(s.action));
    }
  }

  if (doc.entities.empty()) {
    out += "Entity_Registry: []\n";
  } else {
    out += "Entity_Registry:\n";
    for (const auto& e : doc.entities) {
      line("  - ", "id", quote(e.id));
      line("    ", "category", quote(e.category));
      line("    ", "first_seen_at", seconds(e.first_seen_at));
      if (e.state) line("    ", "state", quote(*e.state));
      line("    ", "estimated_pos", vec({e.estimated_pos.x, e.estimated_pos.y}));
      if (e.approx_size) {
        line("    ", "approx_size",
             vec({e.approx_size->width, e.approx_size->height, e.approx_size->depth}));
      }
      if (e.orientation) line("    ", "orientation", quote(*e.orientation));
      line("    ", "visual_signature", quote(e.visual_signature));
      line("    ", "spatial_relation", quote(e.spatial_relation));
    }
  }
  return out;
}

}  // namespace tracekit::schema
