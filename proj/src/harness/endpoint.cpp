#include "tracekit/harness/harness.hpp"

#include "tracekit/core/text.hpp"

#include <openssl/evp.h>

namespace tracekit::harness {

using nlohmann::json;

std::string_view to_string(HarnessErrorKind k) {
  switch (k) {
    case HarnessErrorKind::AuthMissing: return "AuthMissing";
    case HarnessErrorKind::ExhaustedRetries: return "ExhaustedRetries";
    case HarnessErrorKind::HttpError: return "HttpError";
    case HarnessErrorKind::BadResponse: return "BadResponse";
    case HarnessErrorKind::EmptyOutput: return "EmptyOutput";
    case HarnessErrorKind::Config: return "ConfigError";
    case HarnessErrorKind::Io: return "IoError";
    case HarnessErrorKind::CorruptResultsLine: return "CorruptResultsLine";
  }
  return "HarnessError";
}

namespace {

std::string describe(HarnessErrorKind kind, const std::string& detail, const std::string& stage) {
  std::string out;
  if (!stage.empty()) out = "[" + stage + "] ";
  return out + std::string(to_string(kind)) + ": " + detail;
}

std::string base64(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string mime_type(const ModelEndpoint&, const std::string& path, bool video) {
  const std::string ext = text::to_lower(std::filesystem::path(path).extension().string());
  if (video) {
    if (ext == ".webm") return "video/webm";
    if (ext == ".mov") return "video/quicktime";
    return "video/mp4";
  }
  if (ext == ".png") return "image/png";
  if (ext == ".webp") return "image/webp";
  if (ext == ".bmp") return "image/bmp";
  return "image/jpeg";
}

std::string data_url(const ModelEndpoint& e, const std::string& path, bool video) {
  std::string bytes;
  try {
    bytes = text::read_file(path);
  } catch (const std::exception& ex) {
    throw HarnessError(HarnessErrorKind::Io, ex.what());
  }
  return "data:" + mime_type(e, path, video) + ";base64," + base64(bytes);
}

}  // namespace

HarnessError::HarnessError(HarnessErrorKind kind, const std::string& detail, std::string stage)
    : std::runtime_error(describe(kind, detail, stage)), kind_(kind), stage_(std::move(stage)) {}

std::string ModelEndpoint::identity() const {
  json j = {{"base_url", base_url}, {"model", model}, {"temperature", temperature}};
  if (max_tokens) j["max_tokens"] = *max_tokens;
  return j.dump();
}

ModelEndpoint endpoint_from_json(const json& j) {
  if (!j.is_object()) throw HarnessError(HarnessErrorKind::Config, "endpoint must be an object");
  ModelEndpoint e;
  try {
    e.base_url = j.at("base_url").get<std::string>();
    e.model = j.at("model").get<std::string>();
    e.name = j.value("name", e.model);
    e.auth_env = j.value("auth_env", "");
    e.temperature = j.value("temperature", 0.0);
    if (j.contains("max_tokens") && !j["max_tokens"].is_null()) e.max_tokens = j["max_tokens"].get<int>();
    e.supports_media = j.value("supports_media", true);
    e.timeout_seconds = j.value("timeout_seconds", 120.0);
  } catch (const json::exception& ex) {
    throw HarnessError(HarnessErrorKind::Config, std::string("endpoint: ") + ex.what());
  }
  while (!e.base_url.empty() && e.base_url.back() == '/') e.base_url.pop_back();
  return e;
}

json endpoint_to_json(const ModelEndpoint& e) {
  json j = {{"name", e.name},
            {"base_url", e.base_url},
            {"model", e.model},
            {"auth_env", e.auth_env},
            {"temperature", e.temperature},
            {"supports_media", e.supports_media},
            {"timeout_seconds", e.timeout_seconds}};
  if (e.max_tokens) j["max_tokens"] = *e.max_tokens;
  return j;
}

json request_body(const ModelEndpoint& e, const std::vector<prompt::Message>& messages) {
  json msgs = json::array();
  for (const auto& m : messages) {
    const bool text_only = m.content.size() == 1 && m.content[0].kind == prompt::ContentPart::Kind::Text;
    if (text_only) {
      msgs.push_back({{"role", m.role}, {"content", m.content[0].value}});
      continue;
    }
    json parts = json::array();
    for (const auto& p : m.content) {
      switch (p.kind) {
        case prompt::ContentPart::Kind::Text:
          parts.push_back({{"type", "text"}, {"text", p.value}});
          break;
        case prompt::ContentPart::Kind::Image:
          parts.push_back({{"type", "image_url"}, {"image_url", {{"url", data_url(e, p.value, false)}}}});
          break;
        case prompt::ContentPart::Kind::Video:
          parts.push_back({{"type", "video_url"}, {"video_url", {{"url", data_url(e, p.value, true)}}}});
          break;
      }
    }
    msgs.push_back({{"role", m.role}, {"content", std::move(parts)}});
  }
  json body = {{"model", e.model}, {"messages", std::move(msgs)}, {"temperature", e.temperature}};
  if (e.max_tokens) body["max_tokens"] = *e.max_tokens;
  return body;
}

}  // namespace tracekit::harness
