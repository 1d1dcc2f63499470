#include "tracekit/harness/harness.hpp"

#include "tracekit/core/sha256.hpp"
#include "tracekit/core/text.hpp"

namespace tracekit::harness {

namespace fs = std::filesystem;

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) {
  if (!dir_.empty()) fs::create_directories(dir_);
}

std::string ResponseCache::key_for(const ModelEndpoint& e, const std::string& body) {
  std::string material = e.identity();
  material += '\n';
  material += body;
  return sha256_hex(material);
}

std::mutex& ResponseCache::flight_lock(const std::string& key) {
  std::lock_guard<std::mutex> g(table_mu_);
  auto& slot = key_mu_[key];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
  if (dir_.empty()) return std::nullopt;
  const fs::path p = dir_ / (key + ".json");
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) return std::nullopt;
  try {
    return text::read_file(p.string());
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void ResponseCache::put(const std::string& key, const std::string& response_body) {
  if (dir_.empty()) return;
  text::write_file_atomic((dir_ / (key + ".json")).string(), response_body);
}

}  // namespace tracekit::harness
