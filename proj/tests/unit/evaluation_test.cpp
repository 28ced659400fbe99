#include <doctest.h>

#include <random>

#include "ctt/error.hpp"
#include "ctt/evaluation.hpp"
#include "fixtures.hpp"
#include "generator.hpp"
#include "oracles.hpp"

using namespace ctt;

TEST_CASE("weighted objective") {
  CHECK(objective({1, 5, 0, 1}, {4, 0, 350, 1}) == 5);
  CHECK(objective({1, 5, 2, 1}, {4, 0, 3, 1}) == 11);
}

TEST_CASE("gap rounding") {
  CHECK(gap(9, 5).to_string() == "44.4%");
  CHECK(gap(36, 35).to_string() == "2.8%");
  CHECK(gap(0, 0).to_string() == "0.0%");
  CHECK(gap(10, 10).tenths == 0);
  for (int u = 1; u < 60; ++u) {
    for (int l = 0; l <= u; ++l) CHECK(gap(u, l).to_string() == oracle::gap_string(u, l));
  }
}

TEST_CASE("toy solution penalties") {
  const auto in = parse_ctt(testing::kToyInstance);
  const auto sol = parse_solution(in, testing::kToySolution);
  CHECK(check_hard(in, sol).ok());
  CHECK(penalties(in, sol) == PenaltyVector{4, 0, 3, 1});
  const auto plain = parse_ctt(testing::kPlainInstance);
  CHECK(penalties(plain, parse_solution(plain, testing::kToySolution)) ==
        PenaltyVector{4, 0, 0, 1});
}

TEST_CASE("isolated lectures over all day patterns") {
  for (int n = 1; n <= 8; ++n) {
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::vector<std::uint8_t> day(n);
      std::string text;
      for (int i = 0; i < n; ++i) {
        day[i] = (mask >> i) & 1u;
        text += day[i] ? '1' : '0';
      }
      CHECK(isolated_lectures(day) == oracle::isolated(text));
    }
  }
}

TEST_CASE("random solutions agree with the oracle") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 300; ++i) {
    const auto in = i % 3 ? testing::random_tiny_instance(rng)
                          : testing::synthetic_instance(i);
    const auto sol = testing::random_solution(in, rng);
    CHECK(check_hard(in, sol).ok() == oracle::hard_feasible(in, sol));
    CHECK(penalties(in, sol) == oracle::penalties(in, sol));
  }
}

TEST_CASE("solution files round-trip") {
  std::mt19937_64 rng(2);
  const auto in = testing::synthetic_instance(9);
  const auto sol = testing::random_solution(in, rng);
  CHECK(parse_solution(in, write_solution(in, sol)) == sol);
}

TEST_CASE("bad solution lines") {
  const auto in = parse_ctt(testing::kToyInstance);
  CHECK_THROWS_AS(parse_solution(in, "c0 rA 0\n"), ParseError);
  CHECK_THROWS_AS(parse_solution(in, "c0 rA x 0\n"), ParseError);
  CHECK_THROWS(parse_solution(in, "zz rA 0 0\n"));
}

TEST_CASE("hard violations are reported by kind") {
  const auto in = parse_ctt(testing::kToyInstance);
  const auto sol = parse_solution(in, "c0 rA 0 0\nc0 rB 1 0\nc1 rA 0 0\n"
                                      "c1 rB 1 1\nc2 rA 0 1\n");
  const auto verdict = check_hard(in, sol);
  CHECK_FALSE(verdict.ok());
  bool room = false, unavailable = false, curriculum = false;
  for (const auto& v : verdict.violations) {
    room |= v.kind == ViolationKind::kRoomClash;
    unavailable |= v.kind == ViolationKind::kUnavailable;
    curriculum |= v.kind == ViolationKind::kCurriculumClash;
  }
  CHECK(room);
  CHECK(unavailable);
  CHECK(curriculum);
}
