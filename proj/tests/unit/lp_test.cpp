#include <doctest.h>

#include <random>

#include "ctt/lp.hpp"
#include "generator.hpp"
#include "oracles.hpp"

using namespace ctt;

namespace {

void compare_with_oracle(const MilpModel& m, bool presolve) {
  LpOptions options;
  options.presolve = presolve;
  const auto ours = solve_lp(m, options);
  const auto ref = oracle::solve_lp(m);
  if (ref.status == oracle::LpAnswer::kInfeasible) {
    CHECK(ours.status == LpStatus::kInfeasible);
  } else {
    REQUIRE(ours.status == LpStatus::kOptimal);
    CHECK(ours.objective == doctest::Approx(ref.objective).epsilon(1e-6));
    CHECK_FALSE(first_violation(m, ours.x));
  }
}

}  // namespace

TEST_CASE("random 10x10 LPs match the tableau oracle") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 300; ++i) {
    const auto m = testing::random_model(
        rng, {.variables = 10, .rows = 10, .integer_fraction = 0.0, .max_upper = 5});
    compare_with_oracle(m, i % 2 == 0);
  }
}

TEST_CASE("degenerate LPs terminate") {
  // Many tied ratios: assignment polytope.
  MilpModel m("assignment");
  const int n = 6;
  std::vector<VarRef> x;
  for (int i = 0; i < n * n; ++i) {
    x.push_back(m.add_variable({"x" + std::to_string(i), VarKind::kContinuous, 0, 1, {}}));
  }
  std::vector<Term> objective;
  for (int i = 0; i < n; ++i) {
    std::vector<Term> row, col;
    for (int j = 0; j < n; ++j) {
      row.push_back({1, x[i * n + j]});
      col.push_back({1, x[j * n + i]});
      objective.push_back({static_cast<double>((i * 7 + j * 3) % 5), x[i * n + j]});
    }
    m.add_constraint({"row" + std::to_string(i), row, Sense::kEqual, 1, ""});
    m.add_constraint({"col" + std::to_string(i), col, Sense::kEqual, 1, ""});
  }
  m.set_objective(objective);
  for (bool presolve : {true, false}) {
    LpOptions options;
    options.presolve = presolve;
    options.degenerate_switch = 2;
    const auto r = solve_lp(m, options);
    REQUIRE(r.status == LpStatus::kOptimal);
    CHECK(r.objective == doctest::Approx(oracle::solve_lp(m).objective));
  }
}

TEST_CASE("unbounded and infeasible") {
  MilpModel m("u");
  auto x = m.add_variable({"x", VarKind::kContinuous, 0, kInfinity, {}});
  auto y = m.add_variable({"y", VarKind::kContinuous, 0, 1, {}});
  m.add_constraint({"r", {{1, x}, {-1, y}}, Sense::kGreaterEqual, 0, ""});
  m.set_objective(std::vector<Term>{{-1, x}});
  for (bool presolve : {true, false}) {
    LpOptions options;
    options.presolve = presolve;
    CHECK(solve_lp(m, options).status == LpStatus::kUnbounded);
  }
  MilpModel bad("i");
  auto a = bad.add_variable({"a", VarKind::kContinuous, 0, 1, {}});
  auto b = bad.add_variable({"b", VarKind::kContinuous, 0, 1, {}});
  bad.add_constraint({"r", {{1, a}, {1, b}}, Sense::kGreaterEqual, 3, ""});
  for (bool presolve : {true, false}) {
    LpOptions options;
    options.presolve = presolve;
    CHECK(solve_lp(bad, options).status == LpStatus::kInfeasible);
  }
}

TEST_CASE("presolve keeps the optimum") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    const auto m = testing::random_model(
        rng, {.variables = 7, .rows = 8, .integer_fraction = 0.0});
    LpOptions with, without;
    without.presolve = false;
    const auto a = solve_lp(m, with);
    const auto b = solve_lp(m, without);
    REQUIRE(a.status == b.status);
    if (a.status == LpStatus::kOptimal) {
      CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-6));
    }
  }
}

TEST_CASE("iteration limit") {
  std::mt19937_64 rng(3);
  const auto m = testing::random_model(rng, {.variables = 10, .rows = 10,
                                             .integer_fraction = 0.0});
  LpOptions options;
  options.presolve = false;
  options.iteration_limit = 0;
  const auto r = solve_lp(m, options);
  CHECK((r.status == LpStatus::kIterationLimit || r.status == LpStatus::kOptimal));
}
