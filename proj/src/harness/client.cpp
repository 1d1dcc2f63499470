#include "tracekit/harness/harness.hpp"

#include "httplib.h"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace tracekit::harness {

using nlohmann::json;

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // without trailing slash
};

SplitUrl split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw HarnessError(HarnessErrorKind::Config, "base_url needs a scheme: " + url);
  const auto slash = url.find('/', scheme + 3);
  SplitUrl out;
  out.origin = slash == std::string::npos ? url : url.substr(0, slash);
  out.path = slash == std::string::npos ? "" : url.substr(slash);
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

std::int64_t approx_tokens(std::size_t chars) { return static_cast<std::int64_t>((chars + 3) / 4); }

std::size_t text_chars(const std::vector<prompt::Message>& messages) {
  std::size_t n = 0;
  for (const auto& m : messages) {
    for (const auto& p : m.content) {
      if (p.kind == prompt::ContentPart::Kind::Text) n += p.value.size();
    }
  }
  return n;
}

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

Completion parse_response_body(const std::string& body, std::size_t request_chars) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw HarnessError(HarnessErrorKind::BadResponse, std::string("response is not JSON: ") + e.what());
  }
  Completion c;
  try {
    const auto& msg = j.at("choices").at(0).at("message");
    const auto& content = msg.at("content");
    if (content.is_string()) {
      c.raw_text = content.get<std::string>();
    } else if (content.is_array()) {
      for (const auto& part : content) {
        if (part.value("type", "") == "text") c.raw_text += part.value("text", "");
      }
    } else if (!content.is_null()) {
      throw HarnessError(HarnessErrorKind::BadResponse, "message content has an unexpected type");
    }
  } catch (const json::exception& e) {
    throw HarnessError(HarnessErrorKind::BadResponse, std::string("no choices[0].message.content: ") + e.what());
  }
  const auto usage = j.find("usage");
  if (usage != j.end() && usage->is_object() && usage->contains("completion_tokens")) {
    c.prompt_tokens = usage->value("prompt_tokens", std::int64_t{0});
    c.completion_tokens = usage->value("completion_tokens", std::int64_t{0});
  } else {
    c.prompt_tokens = approx_tokens(request_chars);
    c.completion_tokens = approx_tokens(c.raw_text.size());
    c.approximate_tokens = true;
  }
  return c;
}

ChatClient::ChatClient(RetryPolicy retry, ResponseCache* cache, Sleeper sleeper)
    : retry_(retry), cache_(cache), sleeper_(std::move(sleeper)) {
  if (!sleeper_) {
    sleeper_ = [](double s) { std::this_thread::sleep_for(std::chrono::duration<double>(s)); };
  }
}

Completion ChatClient::complete(const ModelEndpoint& e, const std::vector<prompt::Message>& messages) {
  const std::string body = request_body(e, messages).dump();
  const std::size_t chars = text_chars(messages);
  const std::string key = ResponseCache::key_for(e, body);
  const auto started = std::chrono::steady_clock::now();
  auto elapsed = [&started] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  };

  std::unique_lock<std::mutex> flight;
  if (cache_ && !cache_->dir().empty()) flight = std::unique_lock<std::mutex>(cache_->flight_lock(key));
  if (cache_) {
    if (auto hit = cache_->get(key)) {
      try {
        Completion c = parse_response_body(*hit, chars);
        c.cache_hit = true;
        c.latency_seconds = elapsed();
        ++cache_hits_;
        return c;
      } catch (const HarnessError&) {
        // Unreadable cache entry: fall through and refetch.
      }
    }
  }

  std::string token;
  if (!e.auth_env.empty()) {
    const char* v = std::getenv(e.auth_env.c_str());
    if (!v || !*v) throw HarnessError(HarnessErrorKind::AuthMissing, "environment variable " + e.auth_env + " is not set");
    token = v;
  }

  const SplitUrl url = split_url(e.base_url);
  httplib::Client http(url.origin);
  const auto timeout = std::chrono::duration<double>(e.timeout_seconds);
  http.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  http.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  http.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  httplib::Headers headers;
  if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);

  std::vector<std::string> log;
  const int attempts = std::max(1, retry_.max_attempts);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    ++network_calls_;
    auto res = http.Post(url.path + "/chat/completions", headers, body, "application/json");
    if (!res) {
      log.push_back("attempt " + std::to_string(attempt) + ": transport error " + httplib::to_string(res.error()));
    } else if (res->status == 200) {
      log.push_back("attempt " + std::to_string(attempt) + ": 200");
      Completion c = parse_response_body(res->body, chars);
      if (cache_) cache_->put(key, res->body);
      c.attempts = attempt;
      c.attempt_log = std::move(log);
      c.latency_seconds = elapsed();
      return c;
    } else if (retryable(res->status)) {
      log.push_back("attempt " + std::to_string(attempt) + ": HTTP " + std::to_string(res->status));
    } else {
      throw HarnessError(HarnessErrorKind::HttpError,
                         "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
    }
    if (attempt < attempts) sleeper_(retry_.base_seconds * std::pow(retry_.factor, attempt - 1));
  }
  std::string detail = std::to_string(attempts) + " attempts failed";
  for (const auto& l : log) detail += "; " + l;
  throw HarnessError(HarnessErrorKind::ExhaustedRetries, detail);
}

}  // namespace tracekit::harness
