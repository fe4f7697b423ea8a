#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "merit/error.hpp"
#include "merit/lm_scoring.hpp"

namespace merit {

namespace {

using nlohmann::json;

struct ParsedUrl {
  std::string scheme_host_port;
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::InvalidConfig, "scorer endpoint must be an http URL: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

json to_json(const ScoreRequest& r) {
  json j;
  j["instruction"] = r.instruction;
  j["source"] = r.source ? json(*r.source) : json(nullptr);
  j["target"] = r.target;
  return j;
}

ScoreRequest request_from_json(const json& j) {
  ScoreRequest r;
  r.instruction = j.value("instruction", std::string());
  if (auto it = j.find("source"); it != j.end() && !it->is_null()) {
    r.source = it->get<std::string>();
  }
  r.target = j.at("target").get<std::string>();
  return r;
}

LogprobResult result_from_json(const json& j) {
  return {j.at("logprob_sum").get<double>(), j.at("token_count").get<std::int64_t>()};
}

json to_json(const LogprobResult& r) {
  return json{{"logprob_sum", r.logprob_sum}, {"token_count", r.token_count}};
}

}  // namespace

RemoteScorer::RemoteScorer(std::string endpoint, ScorerConfig cfg)
    : endpoint_(std::move(endpoint)), cfg_(std::move(cfg)) {
  cfg_.validate();
  parse_url(endpoint_);
}

std::vector<LogprobResult> RemoteScorer::score(
    std::span<const ScoreRequest> requests) const {
  const auto url = parse_url(endpoint_);
  const std::size_t batch = cfg_.batch_size;
  const std::size_t n_batches = (requests.size() + batch - 1) / batch;
  std::vector<LogprobResult> results(requests.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    httplib::Client client(url.scheme_host_port);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
        cfg_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    for (;;) {
      {
        std::lock_guard lock(failure_mutex);
        if (failure) return;
      }
      const std::size_t b = next.fetch_add(1);
      if (b >= n_batches) return;
      const std::size_t lo = b * batch;
      const std::size_t hi = std::min(requests.size(), lo + batch);
      try {
        json body = json::array();
        for (std::size_t i = lo; i < hi; ++i) body.push_back(to_json(requests[i]));
        auto res = client.Post(url.path, body.dump(), "application/json");
        if (!res) {
          throw Error(ErrorCode::ScorerUnavailable,
                      endpoint_ + ": " + httplib::to_string(res.error()));
        }
        if (res->status != 200) {
          throw Error(ErrorCode::ScorerUnavailable,
                      endpoint_ + ": HTTP " + std::to_string(res->status));
        }
        const json reply = json::parse(res->body);
        if (!reply.is_array() || reply.size() != hi - lo) {
          throw Error(ErrorCode::ScorerUnavailable,
                      endpoint_ + ": malformed batch reply");
        }
        for (std::size_t i = lo; i < hi; ++i) results[i] = result_from_json(reply[i - lo]);
      } catch (const json::exception& e) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::make_exception_ptr(
              Error(ErrorCode::ScorerUnavailable, endpoint_ + ": " + e.what()));
        }
        return;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const std::size_t n_threads = std::min(cfg_.max_in_flight, n_batches);
  std::vector<std::thread> threads;
  threads.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::string handle_scoring_request(std::string_view body, const LogprobScorer& scorer) {
  const json j = json::parse(body);
  if (j.is_array()) {
    std::vector<ScoreRequest> requests;
    requests.reserve(j.size());
    for (const auto& item : j) requests.push_back(request_from_json(item));
    json reply = json::array();
    for (const auto& r : scorer.score(requests)) reply.push_back(to_json(r));
    return reply.dump();
  }
  const auto request = request_from_json(j);
  return to_json(scorer.score(std::span(&request, 1)).front()).dump();
}

}  // namespace merit
