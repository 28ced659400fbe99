#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ctt/evaluation.hpp"
#include "ctt/instance.hpp"
#include "ctt/lp.hpp"
#include "ctt/milp.hpp"

namespace ctt {

// Returns rows violated by the LP point `x`; rows reference model indices.
using Separator =
    std::function<std::vector<LinearConstraint>(std::span<const double> x)>;

// Called with each new incumbent; returning false stops the search.
using IncumbentCallback = std::function<bool(const MilpSolution&)>;

struct SolveConfig {
  std::optional<double> time_limit;  // seconds
  std::optional<double> cutoff;      // prune nodes with bound >= cutoff
  std::optional<double> gap_target;  // relative, e.g. 0.02
  std::optional<long> node_limit;
  bool separation = false;
  Separator separator;
  int separation_rounds = 3;
  IncumbentCallback on_incumbent;
  // LP dive for primal solutions at the root and every N nodes; 0 disables.
  int heuristic_frequency = 20;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kInfeasible;
  std::optional<MilpSolution> incumbent;
  double lower_bound = -kInfinity;
  long nodes = 0;
  double wall_time = 0.0;
  int cuts_added = 0;
  std::vector<double> incumbent_history;  // objectives in discovery order
};

SolveResult branch_and_bound(const MilpModel& model,
                             const SolveConfig& config = {});

// True when every objective term is integral on an integer variable, so any
// lower bound may be rounded up.
bool has_integral_objective(const MilpModel& model);

inline constexpr double kBruteForceLimit = 1e7;

struct BruteForceResult {
  bool feasible = false;
  double objective = kInfinity;
  std::vector<double> values;  // model form
  std::optional<Solution> solution;  // instance form
  std::int64_t enumerated = 0;
};

// Enumerates every integer assignment in the variable bounds. Continuous
// columns are optimised by LP for each assignment. Throws SolverError when
// the space exceeds `limit`.
BruteForceResult brute_force(const MilpModel& model,
                             double limit = kBruteForceLimit);

// Per-course period sets for the instance-form enumeration.
using PeriodFilter =
    std::function<bool(int course, std::span<const int> periods)>;

// Size of the raw search space: product over courses of period choices times
// rooms per event.
double brute_force_space(const Instance& instance);

// Exhaustive search over event -> (period, room) assignments minimising the
// weighted objective. `filter` restricts the period set of each course.
BruteForceResult brute_force(const Instance& instance,
                             const PeriodFilter& filter = {},
                             double limit = kBruteForceLimit);

// Visits every hard-feasible combination of per-course period sets that also
// respects the per-period room count. Rooms are not assigned. The callback
// receives periods[course] sorted ascending and may return false to stop.
void for_each_period_assignment(
    const Instance& instance,
    const std::function<bool(const std::vector<std::vector<int>>&)>& visit,
    double limit = kBruteForceLimit);

struct ExternalSolverConfig {
  // Tokens {mps}, {time}, {solution} and {bound} are substituted.
  std::string command_template;
  std::string working_directory;
  std::string solution_file = "solution.txt";
  std::string bound_file;  // optional; holds `LOWER_BOUND <value>`
  double time_limit = 60.0;
};

SolveResult external_solve(const MilpModel& model,
                           const ExternalSolverConfig& config);

std::string substitute_template(std::string text, const std::string& key,
                                const std::string& value);

}  // namespace ctt
