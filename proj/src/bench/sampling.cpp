#include "tracekit/bench/bench.hpp"

#include "tracekit/core/text.hpp"

#include <algorithm>
#include <random>
#include <unordered_set>

namespace tracekit::bench {

namespace fs = std::filesystem;

namespace {

// Uniform draw in [0, bound) without modulo bias.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const std::uint64_t x = rng();
    if (x >= threshold) return x % bound;
  }
}

bool is_image(const fs::path& p) {
  const std::string ext = text::to_lower(p.extension().string());
  return ext == ".jpg" || ext == ".jpeg" || ext == ".png" || ext == ".webp" || ext == ".bmp";
}

}  // namespace

std::vector<std::string> sample_scene_ids(std::vector<std::string> ids, std::uint64_t seed, std::size_t n) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.size() < n) {
    throw BenchError(BenchErrorKind::TooFewScenes, std::nullopt,
                     "need " + std::to_string(n) + " scenes, have " + std::to_string(ids.size()));
  }
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + static_cast<std::size_t>(bounded(rng, ids.size() - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(n);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<DialogueScene> sample_ost_subset(const std::vector<DialogueScene>& scenes, std::uint64_t seed,
                                             std::size_t n) {
  std::vector<std::string> ids;
  for (const auto& s : scenes) ids.push_back(s.scene_id);
  const auto chosen = sample_scene_ids(ids, seed, n);
  const std::unordered_set<std::string> keep(chosen.begin(), chosen.end());
  std::vector<DialogueScene> out;
  for (const auto& s : scenes) {
    if (keep.count(s.scene_id)) out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.scene_id < b.scene_id; });
  return out;
}

std::vector<std::size_t> frame_indices(std::size_t n, std::size_t k) {
  std::vector<std::size_t> out;
  if (n == 0 || k == 0) return out;
  if (k >= n) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(i);
    return out;
  }
  if (k == 1) return {n / 2};
  // round(i*(n-1)/(k-1)), halves rounded up, in exact integer arithmetic.
  const std::size_t den = k - 1;
  for (std::size_t i = 0; i < k; ++i) out.push_back((2 * i * (n - 1) + den) / (2 * den));
  return out;
}

std::vector<MediaRef> frame_manifest(const fs::path& media_root, std::string_view scene_id, std::size_t k) {
  const fs::path dir = media_root / std::string(scene_id);
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw BenchError(BenchErrorKind::MissingMedia, std::nullopt, "no frame directory " + dir.string());
  }
  std::vector<fs::path> frames;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_image(entry.path())) frames.push_back(entry.path());
  }
  if (frames.empty()) throw BenchError(BenchErrorKind::MissingMedia, std::nullopt, "no frames in " + dir.string());
  std::sort(frames.begin(), frames.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  std::vector<MediaRef> out;
  for (std::size_t i : frame_indices(frames.size(), k)) out.push_back(MediaRef{frames[i].string(), false});
  return out;
}

}  // namespace tracekit::bench
