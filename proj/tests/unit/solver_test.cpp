#include <doctest.h>

#include <filesystem>
#include <random>

#include "ctt/error.hpp"
#include "ctt/solver.hpp"
#include "generator.hpp"

using namespace ctt;
namespace fs = std::filesystem;

TEST_CASE("branch and bound matches enumeration on random models") {
  std::mt19937_64 rng(17);
  int feasible = 0;
  for (int i = 0; i < 150; ++i) {
    const auto m = testing::random_model(
        rng, {.variables = 6, .rows = 4, .integer_fraction = i % 3 == 0 ? 0.7 : 1.0});
    const auto exact = brute_force(m);
    SolveConfig config;
    config.heuristic_frequency = i % 2 == 0 ? 20 : 0;
    const auto r = branch_and_bound(m, config);
    if (!exact.feasible) {
      CHECK(r.status == SolveStatus::kInfeasible);
      continue;
    }
    ++feasible;
    REQUIRE(r.status == SolveStatus::kOptimal);
    REQUIRE(r.incumbent);
    CHECK(r.incumbent->objective_value == doctest::Approx(exact.objective).epsilon(1e-6));
    CHECK_FALSE(first_violation(m, r.incumbent->values));
    CHECK(r.lower_bound <= r.incumbent->objective_value + 1e-6);
    for (std::size_t k = 1; k < r.incumbent_history.size(); ++k) {
      CHECK(r.incumbent_history[k] < r.incumbent_history[k - 1]);
    }
  }
  CHECK(feasible > 30);
}

TEST_CASE("cutoff, node limit and callback stop") {
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int i = 0; i < 80 && checked < 20; ++i) {
    const auto m = testing::random_model(rng, {.variables = 7, .rows = 4});
    const auto exact = brute_force(m);
    if (!exact.feasible) continue;
    ++checked;
    SolveConfig cut;
    cut.cutoff = exact.objective;
    const auto r = branch_and_bound(m, cut);
    CHECK(r.status == SolveStatus::kCutoff);
    CHECK_FALSE(r.incumbent);

    SolveConfig loose;
    loose.cutoff = exact.objective + 0.5;
    const auto q = branch_and_bound(m, loose);
    REQUIRE(q.incumbent);
    CHECK(q.incumbent->objective_value == doctest::Approx(exact.objective));

    SolveConfig limited;
    limited.node_limit = 1;
    limited.heuristic_frequency = 0;
    const auto l = branch_and_bound(m, limited);
    CHECK(l.nodes <= 1);

    SolveConfig stop;
    int calls = 0;
    stop.on_incumbent = [&](const MilpSolution&) { return ++calls < 1; };
    const auto s = branch_and_bound(m, stop);
    CHECK(calls == 1);
    CHECK(s.incumbent);
  }
  CHECK(checked == 20);
}

TEST_CASE("integral objective detection") {
  MilpModel m;
  auto x = m.add_variable({"x", VarKind::kBinary, 0, 1, {}});
  auto y = m.add_variable({"y", VarKind::kContinuous, 0, 1, {}});
  m.set_objective(std::vector<Term>{{2, x}});
  CHECK(has_integral_objective(m));
  m.set_objective(std::vector<Term>{{2, x}, {1, y}});
  CHECK_FALSE(has_integral_objective(m));
  m.set_objective(std::vector<Term>{{0.5, x}});
  CHECK_FALSE(has_integral_objective(m));
}

TEST_CASE("brute force refuses large spaces") {
  MilpModel m;
  for (int j = 0; j < 30; ++j) {
    m.add_variable({"x" + std::to_string(j), VarKind::kBinary, 0, 1, {}});
  }
  CHECK_THROWS_AS(brute_force(m), SolverError);
}

TEST_CASE("template substitution") {
  CHECK(substitute_template("run {mps} {mps} -t {time}", "mps", "a.mps") ==
        "run a.mps a.mps -t {time}");
}

namespace {

MilpModel knapsack() {
  MilpModel m("knap");
  auto a = m.add_variable({"a", VarKind::kBinary, 0, 1, {}});
  auto b = m.add_variable({"b", VarKind::kBinary, 0, 1, {}});
  m.add_constraint({"cap", {{1, a}, {1, b}}, Sense::kLessEqual, 1, ""});
  m.set_objective(std::vector<Term>{{-3, a}, {-2, b}});
  return m;
}

ExternalSolverConfig fake(const std::string& script, const std::string& dir) {
  ExternalSolverConfig c;
  c.working_directory = dir;
  c.command_template = script;
  c.bound_file = "bound.txt";
  return c;
}

}  // namespace

TEST_CASE("external solver protocol") {
  const auto dir = (fs::temp_directory_path() / "ctt_external_test").string();
  const auto m = knapsack();

  auto r = external_solve(
      m, fake("test -s {mps} && printf 'a 1\\n' > {solution} && "
              "printf 'LOWER_BOUND -3\\n' > {bound}",
              dir));
  CHECK(r.status == SolveStatus::kOptimal);
  CHECK(r.incumbent->objective_value == -3);
  CHECK(r.lower_bound == -3);

  r = external_solve(m, fake("printf 'b 1\\n' > {solution}", dir));
  CHECK(r.status == SolveStatus::kFeasible);

  auto kind_of = [&](const std::string& script) {
    try {
      external_solve(m, fake(script, dir));
    } catch (const ExternalSolverError& e) {
      return static_cast<int>(e.kind());
    }
    return -1;
  };
  using Kind = ExternalSolverError::Kind;
  CHECK(kind_of("exit 3") == static_cast<int>(Kind::kProcessFailure));
  CHECK(kind_of("true") == static_cast<int>(Kind::kProcessFailure));
  CHECK(kind_of("printf 'a\\n' > {solution}") == static_cast<int>(Kind::kUnparsable));
  CHECK(kind_of("printf 'a 1\\nb 1\\n' > {solution}") ==
        static_cast<int>(Kind::kInconsistent));
  CHECK(kind_of("printf 'a 1\\n' > {solution}; printf 'LOWER_BOUND 0\\n' > {bound}") ==
        static_cast<int>(Kind::kInconsistent));
  CHECK(kind_of("printf 'a 1\\n' > {solution}; printf 'oops\\n' > {bound}") ==
        static_cast<int>(Kind::kUnparsable));
  fs::remove_all(dir);
}
