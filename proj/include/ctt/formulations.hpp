#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ctt/evaluation.hpp"
#include "ctt/instance.hpp"
#include "ctt/milp.hpp"
#include "ctt/solver.hpp"

namespace ctt {

// Which periods each course is taught in.
struct PeriodAssignment {
  int courses = 0;
  int periods = 0;
  std::vector<std::uint8_t> set_times;  // [course * periods + period]

  static PeriodAssignment empty_for(const Instance& instance);
  static PeriodAssignment from_periods(
      const Instance& instance, const std::vector<std::vector<int>>& periods);
  static PeriodAssignment from_solution(const Instance& instance,
                                        const Solution& solution);

  bool at(int period, int course) const {
    return set_times[static_cast<std::size_t>(course) * periods + period] != 0;
  }
  void set(int period, int course, bool value) {
    set_times[static_cast<std::size_t>(course) * periods + period] = value;
  }
  std::vector<int> periods_of(int course) const;

  bool operator==(const PeriodAssignment&) const = default;
};

// Events of each course per day.
struct DayAssignment {
  int courses = 0;
  int days = 0;
  std::vector<int> set_days;  // [course * days + day]

  int at(int day, int course) const {
    return set_days[static_cast<std::size_t>(course) * days + day];
  }

  bool operator==(const DayAssignment&) const = default;
};

// First violated invariant, or nullopt when the basis is usable.
std::optional<std::string> check_period_assignment(
    const Instance& instance, const PeriodAssignment& basis);
std::optional<std::string> check_day_assignment(const Instance& instance,
                                                const DayAssignment& basis);

DayAssignment relax_to_days(const Instance& instance,
                            const PeriodAssignment& basis);

enum class NeighborhoodKind : std::uint8_t {
  kPeriodFixed,
  kDayFixed,
  kDayDecomp,
  kDayFixedZeroStability,
};

std::string_view to_string(NeighborhoodKind kind);
std::optional<NeighborhoodKind> parse_neighborhood_kind(std::string_view name);

struct Neighborhood {
  NeighborhoodKind kind = NeighborhoodKind::kPeriodFixed;
  std::variant<PeriodAssignment, DayAssignment> basis;
  double source_objective = 0.0;
  int discovery = 0;  // order in which the surface produced the basis
};

Neighborhood make_neighborhood(const Instance& instance, NeighborhoodKind kind,
                               const PeriodAssignment& basis,
                               double source_objective, int discovery);

struct SurfaceOptions {
  // Per-period bounds on courses too large for the smaller rooms. Tightens
  // the model but cuts off solutions that over-fill rooms, so the surface
  // bound is no longer a bound for the full problem.
  bool stratified_room_bounds = false;
};

MilpModel build_monolithic(const Instance& instance);
MilpModel build_surface(const Instance& instance,
                        const SurfaceOptions& options = {});
MilpModel build_surface2(const Instance& instance,
                         std::span<const MultiRoom> multirooms);

enum class DayVariant : std::uint8_t { kPlain, kDecomp, kZeroStability };

MilpModel restrict_period_fixed(const Instance& instance,
                                const MilpModel& monolithic,
                                const PeriodAssignment& basis);
MilpModel restrict_day_fixed(const Instance& instance,
                             const MilpModel& monolithic,
                             const DayAssignment& basis, DayVariant variant);
MilpModel build_dive(const Instance& instance, const MilpModel& monolithic,
                     const Neighborhood& neighborhood);

Solution decode_monolithic(const Instance& instance, const MilpModel& model,
                           const MilpSolution& solution);
// Works on models with SetTimes or MultiTaught variables.
PeriodAssignment decode_surface(const Instance& instance,
                                const MilpModel& model,
                                const MilpSolution& solution);

// Values of every tagged variable implied by a full solution. MultiTaught
// and MultiCourseRooms need the multi-rooms the model was built with.
std::vector<double> encode_solution(const Instance& instance,
                                    const MilpModel& model,
                                    const Solution& solution,
                                    std::span<const MultiRoom> multirooms = {});
// Same for period-only models; room-indexed variables are left at zero.
std::vector<double> encode_period_assignment(const Instance& instance,
                                             const MilpModel& model,
                                             const PeriodAssignment& basis);

// Terms summing to 1 when `course` is taught at `period`.
std::vector<IndexTerm> occupancy_terms(const Instance& instance,
                                       const MilpModel& model, int period,
                                       int course);

// Cliques of at least `min_size` courses found greedily, highest degree
// first. Each clique is sorted.
std::vector<std::vector<int>> greedy_clique_cover(const ConflictGraph& graph,
                                                  int min_size = 3);

// One <= 1 row per (clique, period); returns the number of rows added.
// Throws ValidationError for a set that is not a clique of `graph`.
int add_clique_cuts(const Instance& instance, MilpModel& model,
                    const ConflictGraph& graph,
                    const std::vector<std::vector<int>>& cliques);

struct CliqueViolation {
  int period = 0;
  std::vector<int> members;  // sorted
  double value = 0.0;

  bool operator==(const CliqueViolation&) const = default;
};

struct SeparationOptions {
  bool discard_ungrown = false;
  double tolerance = 1e-6;
};

// `occupancy` is indexed [period * courses + course].
std::vector<CliqueViolation> separate_cliques(
    const ConflictGraph& graph, int periods, std::span<const double> occupancy,
    const SeparationOptions& options = {});

Separator make_clique_separator(const Instance& instance,
                                const MilpModel& model,
                                const SeparationOptions& options = {});

// At least one day per course and, where the model has room variables, at
// least one room per course.
int add_implied_bound_cuts(const Instance& instance, MilpModel& model);

struct Pattern {
  std::vector<int> signs;  // +1 lecture, -1 free
  int penalty = 0;

  bool operator==(const Pattern&) const = default;
};

int pattern_penalty(std::span<const int> signs);
std::vector<Pattern> enumerate_patterns(int length, int min_penalty = 1);

// penalty * (sum a_i occ_i - (m - 1)), m the number of +1 entries. The cut
// states this is at most the day's singleton count.
double pattern_cut_lhs(const Pattern& pattern,
                       std::span<const std::uint8_t> day);

int add_pattern_cuts(const Instance& instance, MilpModel& model,
                     const std::vector<Pattern>& patterns);

}  // namespace ctt
