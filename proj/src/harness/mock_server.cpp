#include "tracekit/harness/harness.hpp"

#include "tracekit/core/sha256.hpp"
#include "tracekit/core/text.hpp"

#include "httplib.h"

#include <chrono>
#include <deque>
#include <thread>

namespace tracekit::harness {

using nlohmann::json;
namespace fs = std::filesystem;

struct MockChatServer::Impl {
  httplib::Server server;
  std::thread thread;
  int port = 0;

  std::mutex mu;
  fs::path fixture_dir;
  fs::path record_dir;
  Responder responder;
  std::deque<int> statuses;
  int delay_ms = 0;

  std::atomic<std::size_t> requests{0};
  std::atomic<std::size_t> in_flight{0};
  std::atomic<std::size_t> peak{0};

  void handle(const httplib::Request& req, httplib::Response& res);
};

void MockChatServer::Impl::handle(const httplib::Request& req, httplib::Response& res) {
  ++requests;
  const std::size_t now = ++in_flight;
  for (std::size_t p = peak.load(); now > p && !peak.compare_exchange_weak(p, now);) {
  }
  struct Leave {
    std::atomic<std::size_t>& n;
    ~Leave() { --n; }
  } leave{in_flight};

  std::optional<int> forced;
  fs::path fixtures, recordings;
  Responder respond;
  int delay = 0;
  {
    std::lock_guard<std::mutex> g(mu);
    if (!statuses.empty()) {
      forced = statuses.front();
      statuses.pop_front();
    }
    fixtures = fixture_dir;
    recordings = record_dir;
    respond = responder;
    delay = delay_ms;
  }
  if (delay > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay));
  if (forced) {
    res.status = *forced;
    res.set_content(json{{"error", {{"message", "scripted status"}, {"code", *forced}}}}.dump(), "application/json");
    return;
  }

  const std::string key = sha256_hex(req.body);
  if (!fixtures.empty()) {
    const fs::path file = fixtures / (key + ".json");
    std::error_code ec;
    if (fs::is_regular_file(file, ec)) {
      res.set_content(text::read_file(file.string()), "application/json");
      return;
    }
  }

  json body;
  try {
    body = json::parse(req.body);
  } catch (const json::parse_error& e) {
    res.status = 400;
    res.set_content(json{{"error", {{"message", e.what()}}}}.dump(), "application/json");
    return;
  }
  std::optional<MockReply> reply;
  if (respond) reply = respond(body);
  if (!reply) {
    res.status = 404;
    res.set_content(json{{"error", {{"message", "no fixture for request " + key}}}}.dump(), "application/json");
    return;
  }
  const std::string wrapped = wrap_reply(*reply, body.value("model", ""));
  if (!recordings.empty()) {
    fs::create_directories(recordings);
    text::write_file_atomic((recordings / (key + ".json")).string(), wrapped);
  }
  res.set_content(wrapped, "application/json");
}

MockChatServer::MockChatServer() : impl_(std::make_unique<Impl>()) {
  impl_->server.new_task_queue = [] { return new httplib::ThreadPool(64); };
  impl_->server.Post(R"(.*/chat/completions)",
                     [this](const httplib::Request& req, httplib::Response& res) { impl_->handle(req, res); });
}

MockChatServer::~MockChatServer() { stop(); }

void MockChatServer::set_fixture_dir(fs::path dir) {
  std::lock_guard<std::mutex> g(impl_->mu);
  impl_->fixture_dir = std::move(dir);
}

void MockChatServer::set_responder(Responder r) {
  std::lock_guard<std::mutex> g(impl_->mu);
  impl_->responder = std::move(r);
}

void MockChatServer::set_record_dir(fs::path dir) {
  std::lock_guard<std::mutex> g(impl_->mu);
  impl_->record_dir = std::move(dir);
}

void MockChatServer::push_status(int status) {
  std::lock_guard<std::mutex> g(impl_->mu);
  impl_->statuses.push_back(status);
}

void MockChatServer::set_delay_ms(int ms) {
  std::lock_guard<std::mutex> g(impl_->mu);
  impl_->delay_ms = ms;
}

int MockChatServer::start() {
  if (impl_->thread.joinable()) return impl_->port;
  impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
  if (impl_->port <= 0) throw HarnessError(HarnessErrorKind::Io, "mock server could not bind");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->port;
}

void MockChatServer::stop() {
  if (!impl_->thread.joinable()) return;
  impl_->server.stop();
  impl_->thread.join();
}

std::string MockChatServer::base_url() const { return "http://127.0.0.1:" + std::to_string(impl_->port) + "/v1"; }

std::size_t MockChatServer::request_count() const { return impl_->requests.load(); }
std::size_t MockChatServer::max_in_flight() const { return impl_->peak.load(); }

void MockChatServer::reset_counters() {
  impl_->requests = 0;
  impl_->peak = 0;
}

std::string MockChatServer::wrap_reply(const MockReply& reply, const std::string& model) {
  json j = {{"id", "chatcmpl-mock"},
            {"object", "chat.completion"},
            {"model", model},
            {"choices",
             json::array({{{"index", 0},
                           {"message", {{"role", "assistant"}, {"content", reply.content}}},
                           {"finish_reason", "stop"}}})}};
  if (reply.usage) {
    j["usage"] = {{"prompt_tokens", reply.usage->first},
                  {"completion_tokens", reply.usage->second},
                  {"total_tokens", reply.usage->first + reply.usage->second}};
  }
  return j.dump();
}

}  // namespace tracekit::harness
