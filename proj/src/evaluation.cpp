#include "ctt/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "ctt/error.hpp"

namespace ctt {

void Solution::normalise() {
  for (auto& events : by_course) std::sort(events.begin(), events.end());
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kEventCount:
      return "event-count";
    case ViolationKind::kRoomClash:
      return "room-clash";
    case ViolationKind::kCourseClash:
      return "course-clash";
    case ViolationKind::kTeacherClash:
      return "teacher-clash";
    case ViolationKind::kCurriculumClash:
      return "curriculum-clash";
    case ViolationKind::kUnavailable:
      return "unavailable";
    case ViolationKind::kBadReference:
      return "bad-reference";
  }
  return "?";
}

HardVerdict check_hard(const Instance& instance, const Solution& solution) {
  HardVerdict verdict;
  auto report = [&](ViolationKind kind, int period, int room,
                    std::string detail) {
    verdict.violations.push_back({kind, period, room, std::move(detail)});
  };

  const int periods = instance.period_count();
  const int rooms = instance.room_count();
  const int courses = instance.course_count();
  if (static_cast<int>(solution.by_course.size()) != courses) {
    report(ViolationKind::kBadReference, -1, -1,
           "solution covers " + std::to_string(solution.by_course.size()) +
               " courses, instance has " + std::to_string(courses));
    return verdict;
  }

  std::vector<int> room_use(static_cast<std::size_t>(periods) * rooms, 0);
  std::vector<int> teacher_use(
      static_cast<std::size_t>(periods) * instance.teachers().size(), 0);
  std::vector<int> curriculum_use(
      static_cast<std::size_t>(periods) * instance.curriculum_count(), 0);

  for (int c = 0; c < courses; ++c) {
    const auto& course = instance.courses()[c];
    const auto& events = solution.by_course[c];
    if (static_cast<int>(events.size()) != course.events) {
      report(ViolationKind::kEventCount, -1, -1,
             "course " + course.id + " has " + std::to_string(events.size()) +
                 " events, expected " + std::to_string(course.events));
    }
    std::vector<int> course_use(periods, 0);
    for (const auto& a : events) {
      if (a.period < 0 || a.period >= periods || a.room < 0 ||
          a.room >= rooms) {
        report(ViolationKind::kBadReference, a.period, a.room,
               "course " + course.id + " uses an undeclared period or room");
        continue;
      }
      if (++course_use[a.period] == 2) {
        report(ViolationKind::kCourseClash, a.period, -1,
               "course " + course.id + " meets twice");
      }
      if (++room_use[static_cast<std::size_t>(a.period) * rooms + a.room] ==
          2) {
        report(ViolationKind::kRoomClash, a.period, a.room,
               "room " + instance.rooms()[a.room].id + " hosts two events");
      }
      if (instance.forbidden(c, a.period)) {
        report(ViolationKind::kUnavailable, a.period, a.room,
               "course " + course.id + " placed at a forbidden period");
      }
    }
    // A course clash is reported once above; teacher and curriculum clashes
    // count distinct courses only.
    for (int p = 0; p < periods; ++p) {
      if (course_use[p] == 0) continue;
      const int t = instance.teacher_of(c);
      if (++teacher_use[static_cast<std::size_t>(p) *
                            instance.teachers().size() +
                        t] == 2) {
        report(ViolationKind::kTeacherClash, p, -1,
               "teacher " + instance.teachers()[t] + " teaches twice");
      }
      for (int u : instance.curricula_of(c)) {
        if (++curriculum_use[static_cast<std::size_t>(p) *
                                 instance.curriculum_count() +
                             u] == 2) {
          report(ViolationKind::kCurriculumClash, p, -1,
                 "curriculum " + instance.curricula()[u].id +
                     " has overlapping events");
        }
      }
    }
  }
  return verdict;
}

std::int64_t penalty_capacity(const Instance& instance,
                              const Solution& solution) {
  std::int64_t total = 0;
  for (int c = 0; c < instance.course_count(); ++c) {
    const int students = instance.courses()[c].students;
    for (const auto& a : solution.by_course[c]) {
      total += std::max(0, students - instance.rooms()[a.room].capacity);
    }
  }
  return total;
}

std::int64_t penalty_min_days(const Instance& instance,
                              const Solution& solution) {
  std::int64_t total = 0;
  std::vector<char> used(instance.days());
  for (int c = 0; c < instance.course_count(); ++c) {
    std::fill(used.begin(), used.end(), 0);
    int distinct = 0;
    for (const auto& a : solution.by_course[c]) {
      char& flag = used[instance.day_of(a.period)];
      if (!flag) {
        flag = 1;
        ++distinct;
      }
    }
    total += std::max(0, instance.courses()[c].min_days - distinct);
  }
  return total;
}

int isolated_lectures(std::span<const std::uint8_t> day) {
  int isolated = 0;
  const int n = static_cast<int>(day.size());
  for (int i = 0; i < n; ++i) {
    if (!day[i]) continue;
    const bool before = i > 0 && day[i - 1];
    const bool after = i + 1 < n && day[i + 1];
    if (!before && !after) ++isolated;
  }
  return isolated;
}

std::int64_t penalty_compactness(const Instance& instance,
                                 const Solution& solution) {
  const int periods = instance.period_count();
  const std::size_t ppd = instance.periods_per_day();
  std::int64_t total = 0;
  std::vector<std::uint8_t> occupied(periods);
  for (const auto& curriculum : instance.curricula()) {
    std::fill(occupied.begin(), occupied.end(), 0);
    for (int c : curriculum.courses) {
      for (const auto& a : solution.by_course[c]) occupied[a.period] = 1;
    }
    for (int d = 0; d < instance.days(); ++d) {
      total += isolated_lectures(
          std::span<const std::uint8_t>(occupied).subspan(d * ppd, ppd));
    }
  }
  return total;
}

std::int64_t penalty_stability(const Instance& instance,
                               const Solution& solution) {
  std::int64_t total = 0;
  std::vector<int> rooms;
  for (int c = 0; c < instance.course_count(); ++c) {
    rooms.clear();
    for (const auto& a : solution.by_course[c]) rooms.push_back(a.room);
    std::sort(rooms.begin(), rooms.end());
    const auto distinct =
        std::unique(rooms.begin(), rooms.end()) - rooms.begin();
    if (distinct > 0) total += distinct - 1;
  }
  return total;
}

PenaltyVector penalties(const Instance& instance, const Solution& solution) {
  return {penalty_capacity(instance, solution),
          penalty_min_days(instance, solution),
          penalty_compactness(instance, solution),
          penalty_stability(instance, solution)};
}

std::int64_t objective(const WeightVector& w, const PenaltyVector& p) {
  return w.capacity * p.capacity + w.spread * p.spread +
         w.compactness * p.compactness + w.stability * p.stability;
}

std::string GapPercent::to_string() const {
  std::string out = std::to_string(tenths / 10) + "." +
                    std::to_string(tenths % 10) + "%";
  return out;
}

GapPercent gap(std::int64_t upper_bound, std::int64_t lower_bound) {
  if (upper_bound == 0) {
    if (lower_bound != 0) {
      throw std::invalid_argument("gap: lower bound exceeds upper bound");
    }
    return {0};
  }
  if (upper_bound < 0 || lower_bound < 0 || lower_bound > upper_bound) {
    throw std::invalid_argument("gap: need 0 <= lower bound <= upper bound");
  }
  // round(1000 * (ub - lb) / ub) with ties going up, in exact integers.
  const std::int64_t numerator = 2000 * (upper_bound - lower_bound) + upper_bound;
  return {numerator / (2 * upper_bound)};
}

// ---------------------------------------------------------------------------
// Solution files

Solution parse_solution(const Instance& instance, std::istream& in) {
  Solution solution = Solution::empty_for(instance);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::vector<std::string> tokens;
    std::string token;
    while (ss >> token) tokens.push_back(token);
    if (tokens.empty()) continue;
    if (tokens.size() != 4) {
      throw ParseError(line_no, "expected 'course room day period'");
    }
    const auto course = instance.find_course(tokens[0]);
    if (!course) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": unknown course id '" + tokens[0] + "'");
    }
    const auto room = instance.find_room(tokens[1]);
    if (!room) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": unknown room id '" + tokens[1] + "'");
    }
    int day = 0, slot = 0;
    auto parse = [&](const std::string& s, int& out) {
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError(line_no, "expected integer, got '" + s + "'");
      }
    };
    parse(tokens[2], day);
    parse(tokens[3], slot);
    if (day < 0 || day >= instance.days() || slot < 0 ||
        slot >= instance.periods_per_day()) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": period out of range");
    }
    solution.by_course[*course].push_back(
        {instance.period_at(day, slot), *room});
  }
  solution.normalise();
  return solution;
}

Solution parse_solution(const Instance& instance, std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_solution(instance, in);
}

Solution load_solution(const Instance& instance, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open solution file '" + path + "'");
  return parse_solution(instance, in);
}

std::string write_solution(const Instance& instance,
                           const Solution& solution) {
  std::ostringstream out;
  for (int c = 0; c < instance.course_count(); ++c) {
    for (const auto& a : solution.by_course[c]) {
      out << instance.courses()[c].id << ' ' << instance.rooms()[a.room].id
          << ' ' << instance.day_of(a.period) << ' '
          << instance.slot_of(a.period) << '\n';
    }
  }
  return out.str();
}

}  // namespace ctt
