#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ctt/milp.hpp"

namespace ctt {

using Clock = std::chrono::steady_clock;

// Minimise c.x subject to row_lower <= A x <= row_upper, lower <= x <= upper.
struct LpRow {
  std::vector<IndexTerm> terms;
  double lower = -kInfinity;
  double upper = kInfinity;
};

struct LpProblem {
  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<char> integer;  // used by presolve rounding only
  std::vector<LpRow> rows;
  double constant = 0.0;

  int column_count() const { return static_cast<int>(cost.size()); }
  int row_count() const { return static_cast<int>(rows.size()); }
};

LpProblem relaxation(const MilpModel& model);
LpRow to_lp_row(const LinearConstraint& row);

enum class LpStatus : std::uint8_t {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kIterationLimit,
  kTimeLimit,
};

std::string_view to_string(LpStatus status);

struct LpOptions {
  long iteration_limit = 1'000'000;
  std::optional<Clock::time_point> deadline;
  bool presolve = true;
  // Round bounds implied for integer columns. Only valid when the caller
  // wants the integer hull of the bounds, as in branch-and-bound.
  bool round_integer_bounds = false;
  int degenerate_switch = 50;  // degenerate pivots before Bland's rule
};

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> x;
  long iterations = 0;
};

LpResult solve_lp(const LpProblem& problem, const LpOptions& options = {});
LpResult solve_lp(const MilpModel& model, const LpOptions& options = {});

// Presolve as a standalone step. `columns` lists the surviving original
// columns in order; removed columns keep their values in `fixed`.
struct PresolveResult {
  enum class Outcome { kReduced, kInfeasible, kUnbounded } outcome =
      Outcome::kReduced;
  LpProblem reduced;
  std::vector<int> columns;
  std::vector<double> fixed;  // full-length values for removed columns
};

PresolveResult presolve(const LpProblem& problem, bool round_integer_bounds);

}  // namespace ctt
