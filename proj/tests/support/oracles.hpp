#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctt/evaluation.hpp"
#include "ctt/instance.hpp"
#include "ctt/milp.hpp"

// Reference implementations written without the library's data structures.
namespace ctt::oracle {

bool hard_feasible(const Instance& instance, const Solution& solution);
PenaltyVector penalties(const Instance& instance, const Solution& solution);
std::int64_t objective(const Instance& instance, const Solution& solution);

// Isolated lectures of a 0/1 day string such as "0110".
int isolated(const std::string& day);

std::string gap_string(std::int64_t upper, std::int64_t lower);

struct Stats {
  double frequency = 0.0;
  double utilisation = 0.0;
  long edges = 0;
  double density = 0.0;
};
Stats stats(const Instance& instance);

struct LpAnswer {
  enum Status { kOptimal, kInfeasible, kUnbounded } status = kInfeasible;
  double objective = 0.0;
};

// Dense tableau simplex with Bland's rule over the LP relaxation. Meant for a
// few dozen variables; every bound must be finite.
LpAnswer solve_lp(const MilpModel& model);

}  // namespace ctt::oracle
