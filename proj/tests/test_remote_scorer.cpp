#include <memory>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "merit/epds.hpp"
#include "merit/error.hpp"
#include "merit/lm_scoring.hpp"
#include "merit/synthetic.hpp"

using namespace merit;

namespace {

// In-process logprob service backed by a local scorer.
class TestServer {
 public:
  explicit TestServer(const LogprobScorer& backend) {
    server_.Post("/score", [&backend](const httplib::Request& req, httplib::Response& res) {
      res.set_content(handle_scoring_request(req.body, backend), "application/json");
    });
    server_.Post("/broken", [](const httplib::Request&, httplib::Response& res) {
      res.status = 500;
    });
    server_.Post("/garbage", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("[{\"nope\": 1}]", "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~TestServer() {
    server_.stop();
    thread_.join();
  }
  std::string url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

std::vector<SentencePair> sample_pairs(std::size_t n) {
  synthetic::Options opts;
  opts.pairs = n;
  opts.seed = 11;
  return synthetic::make_pairs(opts);
}

}  // namespace

TEST_CASE("remote scorer returns the backend's logprobs bit for bit") {
  const auto pairs = sample_pairs(120);
  std::vector<std::string> texts;
  for (const auto& p : pairs) texts.push_back(p.source_text + p.target_text);
  auto model = std::make_shared<const CharNgramModel>(train_char_ngram(texts));
  CharNgramScorer local(model);
  TestServer server(local);

  ScorerConfig cfg;
  cfg.batch_size = 7;
  cfg.max_in_flight = 3;
  RemoteScorer remote(server.url("/score"), cfg);

  std::vector<ScoreRequest> reqs;
  for (const auto& p : pairs) {
    reqs.push_back({"Translate vi language into Chinese: ", p.source_text, p.target_text});
    reqs.push_back({"", std::nullopt, p.target_text});
  }
  const auto a = local.score(reqs);
  const auto b = remote.score(reqs);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].logprob_sum == b[i].logprob_sum);
    CHECK(a[i].token_count == b[i].token_count);
  }

  SUBCASE("EPDS output is identical through either scorer") {
    Corpus corpus(LanguageTag::vi, pairs);
    EpdsConfig ecfg;
    const auto r1 = run_epds(corpus, ecfg, 40, local);
    const auto r2 = run_epds(corpus, ecfg, 40, remote);
    REQUIRE(r1.selected.size() == r2.selected.size());
    for (std::size_t i = 0; i < r1.selected.size(); ++i) {
      CHECK(r1.selected[i].pair.id == r2.selected[i].pair.id);
      CHECK(r1.selected[i].s_final == r2.selected[i].s_final);
    }
  }
}

TEST_CASE("handle_scoring_request accepts one object") {
  auto model = std::make_shared<const CharNgramModel>(
      train_char_ngram(std::vector<std::string>{"abab"}));
  CharNgramScorer local(model);
  const auto reply = handle_scoring_request(R"({"instruction":"","source":null,"target":"ab"})", local);
  CHECK(reply.find("\"token_count\":2") != std::string::npos);
}

TEST_CASE("remote scorer failures surface as ScorerUnavailable") {
  auto model = std::make_shared<const CharNgramModel>(
      train_char_ngram(std::vector<std::string>{"abab"}));
  CharNgramScorer local(model);
  TestServer server(local);
  const std::vector<ScoreRequest> reqs{{"", std::nullopt, "ab"}};

  auto code_for = [&](const std::string& url) {
    ScorerConfig cfg;
    cfg.timeout = std::chrono::milliseconds(2000);
    try {
      RemoteScorer(url, cfg).score(reqs);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  CHECK(code_for(server.url("/broken")) == ErrorCode::ScorerUnavailable);
  CHECK(code_for(server.url("/garbage")) == ErrorCode::ScorerUnavailable);
  CHECK(code_for("http://127.0.0.1:1/score") == ErrorCode::ScorerUnavailable);
  CHECK_THROWS_AS(RemoteScorer("not a url"), Error);
}
