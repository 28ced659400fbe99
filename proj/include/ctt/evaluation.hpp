#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctt/instance.hpp"

namespace ctt {

struct Assignment {
  int period = 0;
  int room = 0;

  auto operator<=>(const Assignment&) const = default;
};

// Events of each course as (period, room) pairs. Events of one course are
// interchangeable, so assignments are kept sorted by period.
struct Solution {
  std::vector<std::vector<Assignment>> by_course;

  static Solution empty_for(const Instance& instance) {
    return Solution{std::vector<std::vector<Assignment>>(
        static_cast<std::size_t>(instance.course_count()))};
  }
  void normalise();

  bool operator==(const Solution&) const = default;
};

struct PenaltyVector {
  std::int64_t capacity = 0;
  std::int64_t spread = 0;  // minimum working days shortfall
  std::int64_t compactness = 0;
  std::int64_t stability = 0;

  PenaltyVector operator+(const PenaltyVector& o) const {
    return {capacity + o.capacity, spread + o.spread,
            compactness + o.compactness, stability + o.stability};
  }
  bool operator==(const PenaltyVector&) const = default;
};

enum class ViolationKind {
  kEventCount,
  kRoomClash,
  kCourseClash,
  kTeacherClash,
  kCurriculumClash,
  kUnavailable,
  kBadReference,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  int period = -1;  // -1 when not period-specific
  int room = -1;
  std::string detail;
};

struct HardVerdict {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

HardVerdict check_hard(const Instance& instance, const Solution& solution);

std::int64_t penalty_capacity(const Instance& instance,
                              const Solution& solution);
std::int64_t penalty_min_days(const Instance& instance,
                              const Solution& solution);
std::int64_t penalty_compactness(const Instance& instance,
                                 const Solution& solution);
std::int64_t penalty_stability(const Instance& instance,
                               const Solution& solution);
PenaltyVector penalties(const Instance& instance, const Solution& solution);

// Isolated lectures in one day's occupancy pattern of a curriculum.
int isolated_lectures(std::span<const std::uint8_t> day_pattern);

std::int64_t objective(const WeightVector& weights,
                       const PenaltyVector& penalties);

// 100 * (1 - lb / ub) rounded half-up to one decimal, held in tenths of a
// percent. An upper bound of zero gives a gap of zero.
struct GapPercent {
  std::int64_t tenths = 0;

  double value() const { return static_cast<double>(tenths) / 10.0; }
  std::string to_string() const;  // e.g. "44.4%"
  bool operator==(const GapPercent&) const = default;
};

GapPercent gap(std::int64_t upper_bound, std::int64_t lower_bound);

// Solution files: one `courseId roomId day periodOfDay` line per event.
Solution parse_solution(const Instance& instance, std::istream& in);
Solution parse_solution(const Instance& instance, std::string_view text);
Solution load_solution(const Instance& instance, const std::string& path);
std::string write_solution(const Instance& instance, const Solution& solution);

}  // namespace ctt
