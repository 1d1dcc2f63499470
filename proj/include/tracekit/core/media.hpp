#pragma once

#include <string>

namespace tracekit {

// One frame image or a whole video file handed to a model.
struct MediaRef {
  std::string path;
  bool is_video = false;
  bool operator==(const MediaRef&) const = default;
};

}  // namespace tracekit
