#include <doctest.h>

#include <random>

#include "ctt/error.hpp"
#include "ctt/instance.hpp"
#include "fixtures.hpp"
#include "generator.hpp"
#include "oracles.hpp"

using namespace ctt;

TEST_CASE("toy instance parses") {
  const auto in = parse_ctt(testing::kToyInstance);
  CHECK(in.name() == "toy");
  CHECK(in.course_count() == 3);
  CHECK(in.room_count() == 2);
  CHECK(in.period_count() == 6);
  CHECK(in.total_events() == 5);
  CHECK(in.forbidden(1, 0));
  CHECK(in.forbidden(2, 5));
  CHECK_FALSE(in.forbidden(0, 0));
  CHECK(in.teacher_of(0) == in.teacher_of(2));
  CHECK(in.curricula_of(1).size() == 2);
  CHECK(in.weights() == WeightVector::itc2007());
}

TEST_CASE("write then parse is the identity") {
  const auto in = parse_ctt(testing::kToyInstance);
  CHECK(parse_ctt(write_ctt(in)) == in);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const auto random = testing::synthetic_instance(i);
    CHECK(parse_ctt(write_ctt(random)) == random);
  }
}

TEST_CASE("truncated file reports its last line") {
  const std::string text(testing::kToyInstance.substr(0, 120));
  try {
    parse_ctt(text);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() > 0);
  }
}

TEST_CASE("semantic problems raise validation errors") {
  std::string text(testing::kToyInstance);
  SUBCASE("unknown course in a curriculum") {
    text.replace(text.find("q1  2 c1 c2"), 11, "q1  2 c1 c9");
  }
  SUBCASE("duplicate course") {
    text.replace(text.find("c2 t0 1 1 8"), 11, "c1 t0 1 1 8");
  }
  CHECK_THROWS_AS(parse_ctt(text), ValidationError);
}

TEST_CASE("non-numeric count is a parse error") {
  std::string text(testing::kToyInstance);
  text.replace(text.find("Rooms: 2"), 8, "Rooms: x");
  CHECK_THROWS_AS(parse_ctt(text), ParseError);
}

TEST_CASE("conflict graph of the toy instance is a triangle") {
  const auto graph = build_conflict_graph(parse_ctt(testing::kToyInstance));
  CHECK(graph.edge_count() == 3);
  CHECK(graph.density() == doctest::Approx(1.0));
  const int all[] = {0, 1, 2};
  CHECK(graph.is_clique(all));
}

TEST_CASE("statistics agree with the oracle") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 40; ++i) {
    const auto in = i % 2 ? testing::random_tiny_instance(rng)
                          : testing::synthetic_instance(100 + i);
    const auto s = instance_stats(in);
    const auto o = oracle::stats(in);
    CHECK(s.frequency == doctest::Approx(o.frequency));
    CHECK(s.utilisation == doctest::Approx(o.utilisation));
    CHECK(static_cast<long>(s.conflict_edges) == o.edges);
    CHECK(s.density == doctest::Approx(o.density));
  }
}

TEST_CASE("multi-rooms partition the rooms") {
  const auto in = testing::synthetic_instance(3, {.rooms = 7});
  for (auto policy : {MultiRoomPolicy::kSingle, MultiRoomPolicy::kMedianSplit,
                      MultiRoomPolicy::kIdentity}) {
    const auto groups = build_multirooms(in, policy);
    int total = 0;
    for (const auto& g : groups) {
      CHECK(g.multiplicity == static_cast<int>(g.members.size()));
      total += g.multiplicity;
    }
    CHECK(total == in.room_count());
  }
  CHECK(build_multirooms(in, MultiRoomPolicy::kSingle).size() == 1);
  CHECK(build_multirooms(in, MultiRoomPolicy::kIdentity).size() == 7);
  CHECK(build_multirooms(in, MultiRoomPolicy::kMedianSplit).size() == 2);
}
