#include <numeric>

#include "doctest.h"
#include "merit/error.hpp"
#include "merit/sar.hpp"
#include "oracles.hpp"

using namespace merit;
using doctest::Approx;

TEST_CASE("score extraction") {
  CHECK(extract_scores("Score: 85") == std::set<int>{85});
  CHECK(extract_scores("quality good, no number").empty());
  CHECK(extract_scores("Score: 85 ... on reflection the revised Score: 70") == std::set<int>{70, 85});
  CHECK(extract_scores("**Score**: 92/100") == std::set<int>{92});
  CHECK(extract_scores("final score = 40") == std::set<int>{40});
  CHECK(extract_scores("The score is 55.") == std::set<int>{55});
  CHECK(extract_scores("SCORE：66") == std::set<int>{66});
}

TEST_CASE("out-of-range and decimal values are excluded") {
  CHECK(extract_scores("Score: 150").empty());
  CHECK(extract_scores("Score: -5").empty());
  CHECK(extract_scores("Score: 85.5").empty());
  CHECK(extract_scores("Score: 150, Score: 90") == std::set<int>{90});
}

TEST_CASE("permissive mode") {
  SarConfig cfg;
  cfg.mode = ExtractionMode::Permissive;
  CHECK(extract_scores("I would give 77 overall, maybe 80", cfg) == std::set<int>{77, 80});
  CHECK(extract_scores("version 2.5 rated 101", cfg).empty());
  CHECK(extract_scores("quality good, no number").empty());
}

TEST_CASE("custom pattern") {
  SarConfig cfg;
  cfg.pattern = R"(rating\[(\d+)\])";
  CHECK(extract_scores("rating[12] Score: 99", cfg) == std::set<int>{12});
  cfg.pattern = "(unclosed";
  CHECK_THROWS_AS(ScoreExtractor{cfg}, Error);
}

TEST_CASE("conservative_extract") {
  CHECK(conservative_extract("Score: 85 then Score: 70") == 70);
  CHECK(conservative_extract("nothing here") == kNoScore);
  CHECK(conservative_extract("Score: 100") == 100);
  CHECK(conservative_extract("Score: 0") == 0);
}

TEST_CASE("sar_reward levels") {
  CHECK(sar_reward(85, 85) == 2.0);
  CHECK(sar_reward(80, 85) == 1.0);
  CHECK(sar_reward(95, 85) == 1.0);
  CHECK(sar_reward(74, 85) == 0.0);
  CHECK(sar_reward(60, 85) == 0.0);
  CHECK(sar_reward(-1, 85) == 0.0);
  CHECK_THROWS_AS(sar_reward(50, 101), Error);
  CHECK_THROWS_AS(sar_reward(50, -1), Error);

  SarConfig wide;
  wide.tolerance = 20;
  CHECK(sar_reward(65, 85, wide) == 1.0);
}

TEST_CASE("sar_reward agrees with the table oracle everywhere") {
  std::size_t mismatches = 0;
  for (int a = 0; a <= 100; ++a)
    for (int s = -1; s <= 100; ++s)
      if (sar_reward(s, a) != oracle::sar_table(s, a)) ++mismatches;
  CHECK(mismatches == 0);
}

TEST_CASE("group_normalize") {
  const std::vector<double> eq{1.0, 1.0, 1.0};
  for (double v : group_normalize(eq)) CHECK(v == 0.0);

  const std::vector<double> two{2.0, 0.0};
  const auto adv = group_normalize(two);
  CHECK(adv[0] == Approx(1.0).epsilon(1e-6));
  CHECK(adv[1] == Approx(-1.0).epsilon(1e-6));

  const std::vector<double> one{2.0};
  CHECK_THROWS_AS(group_normalize(one), Error);
}

TEST_CASE("SarConfig validation") {
  SarConfig cfg;
  cfg.score_min = 10;
  cfg.score_max = 5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.tolerance = -1;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
