#include "ctt/formulations.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "ctt/error.hpp"

namespace ctt {

// ---------------------------------------------------------------------------
// Bases

PeriodAssignment PeriodAssignment::empty_for(const Instance& instance) {
  PeriodAssignment a;
  a.courses = instance.course_count();
  a.periods = instance.period_count();
  a.set_times.assign(static_cast<std::size_t>(a.courses) * a.periods, 0);
  return a;
}

PeriodAssignment PeriodAssignment::from_periods(
    const Instance& instance, const std::vector<std::vector<int>>& periods) {
  auto a = empty_for(instance);
  for (int c = 0; c < a.courses && c < static_cast<int>(periods.size()); ++c) {
    for (int p : periods[c]) a.set(p, c, true);
  }
  return a;
}

PeriodAssignment PeriodAssignment::from_solution(const Instance& instance,
                                                 const Solution& solution) {
  auto a = empty_for(instance);
  for (int c = 0; c < a.courses; ++c) {
    for (const auto& e : solution.by_course[c]) a.set(e.period, c, true);
  }
  return a;
}

std::vector<int> PeriodAssignment::periods_of(int course) const {
  std::vector<int> out;
  for (int p = 0; p < periods; ++p) {
    if (at(p, course)) out.push_back(p);
  }
  return out;
}

std::optional<std::string> check_period_assignment(
    const Instance& instance, const PeriodAssignment& basis) {
  if (basis.courses != instance.course_count() ||
      basis.periods != instance.period_count()) {
    return "basis dimensions do not match the instance";
  }
  const int periods = instance.period_count();
  for (int c = 0; c < instance.course_count(); ++c) {
    int count = 0;
    for (int p = 0; p < periods; ++p) {
      if (!basis.at(p, c)) continue;
      ++count;
      if (instance.forbidden(c, p)) {
        return "course " + instance.courses()[c].id +
               " placed at a forbidden period";
      }
    }
    if (count != instance.courses()[c].events) {
      return "course " + instance.courses()[c].id + " has " +
             std::to_string(count) + " periods, expected " +
             std::to_string(instance.courses()[c].events);
    }
  }
  for (int p = 0; p < periods; ++p) {
    int load = 0;
    for (int c = 0; c < instance.course_count(); ++c) load += basis.at(p, c);
    if (load > instance.room_count()) {
      return "period " + std::to_string(p) + " holds more courses than rooms";
    }
    for (const auto& courses : instance.teacher_courses()) {
      int n = 0;
      for (int c : courses) n += basis.at(p, c);
      if (n > 1) return "teacher clash at period " + std::to_string(p);
    }
    for (const auto& u : instance.curricula()) {
      int n = 0;
      for (int c : u.courses) n += basis.at(p, c);
      if (n > 1) {
        return "curriculum " + u.id + " clash at period " + std::to_string(p);
      }
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_day_assignment(const Instance& instance,
                                                const DayAssignment& basis) {
  if (basis.courses != instance.course_count() ||
      basis.days != instance.days()) {
    return "basis dimensions do not match the instance";
  }
  for (int c = 0; c < basis.courses; ++c) {
    int total = 0;
    for (int d = 0; d < basis.days; ++d) {
      const int v = basis.at(d, c);
      if (v < 0 || v > instance.periods_per_day()) {
        return "course " + instance.courses()[c].id +
               " has an impossible event count on day " + std::to_string(d);
      }
      total += v;
    }
    if (total != instance.courses()[c].events) {
      return "course " + instance.courses()[c].id +
             " day counts do not sum to its events";
    }
  }
  return std::nullopt;
}

DayAssignment relax_to_days(const Instance& instance,
                            const PeriodAssignment& basis) {
  DayAssignment days;
  days.courses = basis.courses;
  days.days = instance.days();
  days.set_days.assign(static_cast<std::size_t>(days.courses) * days.days, 0);
  for (int c = 0; c < basis.courses; ++c) {
    for (int p = 0; p < basis.periods; ++p) {
      if (basis.at(p, c)) {
        ++days.set_days[static_cast<std::size_t>(c) * days.days +
                        instance.day_of(p)];
      }
    }
  }
  return days;
}

std::string_view to_string(NeighborhoodKind kind) {
  switch (kind) {
    case NeighborhoodKind::kPeriodFixed:
      return "period-fixed";
    case NeighborhoodKind::kDayFixed:
      return "day-fixed";
    case NeighborhoodKind::kDayDecomp:
      return "day-decomp";
    case NeighborhoodKind::kDayFixedZeroStability:
      return "day-fixed-zero-stability";
  }
  return "?";
}

std::optional<NeighborhoodKind> parse_neighborhood_kind(std::string_view name) {
  for (auto kind : {NeighborhoodKind::kPeriodFixed, NeighborhoodKind::kDayFixed,
                    NeighborhoodKind::kDayDecomp,
                    NeighborhoodKind::kDayFixedZeroStability}) {
    if (name == to_string(kind)) return kind;
  }
  return std::nullopt;
}

Neighborhood make_neighborhood(const Instance& instance, NeighborhoodKind kind,
                               const PeriodAssignment& basis,
                               double source_objective, int discovery) {
  Neighborhood n;
  n.kind = kind;
  n.source_objective = source_objective;
  n.discovery = discovery;
  if (kind == NeighborhoodKind::kPeriodFixed) {
    n.basis = basis;
  } else {
    n.basis = relax_to_days(instance, basis);
  }
  return n;
}

// ---------------------------------------------------------------------------
// Builders

namespace {

std::string label(std::string_view base, std::initializer_list<int> index) {
  std::string out(base);
  out += '(';
  bool first = true;
  for (int i : index) {
    if (!first) out += ',';
    out += std::to_string(i);
    first = false;
  }
  out += ')';
  return out;
}

// Occupancy expression of each (period, course) plus the model objective
// under construction.
class Builder {
 public:
  Builder(const Instance& instance, MilpModel& model)
      : in_(instance),
        model_(model),
        occ_(static_cast<std::size_t>(instance.period_count()) *
             instance.course_count()) {}

  std::vector<Term>& occ(int p, int c) {
    return occ_[static_cast<std::size_t>(p) * in_.course_count() + c];
  }

  VarRef binary(std::string name, VarTag tag) {
    return model_.add_variable({std::move(name), VarKind::kBinary, 0.0, 1.0, tag});
  }

  void row(std::string origin, std::string name, std::vector<Term> terms,
           Sense sense, double rhs) {
    model_.declare_origin(origin);
    model_.add_constraint(
        {std::move(name), std::move(terms), sense, rhs, std::move(origin)});
  }

  std::vector<Term> curriculum_occ(int u, int p) {
    std::vector<Term> terms;
    for (int c : in_.curricula()[u].courses) {
      const auto& o = occ(p, c);
      terms.insert(terms.end(), o.begin(), o.end());
    }
    return terms;
  }

  static void append(std::vector<Term>& to, const std::vector<Term>& from,
                     double scale = 1.0) {
    for (const auto& t : from) to.push_back({t.coef * scale, t.var});
  }

  void events_rows() {
    for (int c = 0; c < in_.course_count(); ++c) {
      std::vector<Term> terms;
      for (int p = 0; p < in_.period_count(); ++p) append(terms, occ(p, c));
      row("events", label("events", {c}), std::move(terms), Sense::kEqual,
          in_.courses()[c].events);
    }
  }

  void clash_rows() {
    for (int p = 0; p < in_.period_count(); ++p) {
      for (std::size_t t = 0; t < in_.teacher_courses().size(); ++t) {
        std::vector<Term> terms;
        for (int c : in_.teacher_courses()[t]) append(terms, occ(p, c));
        row("teacher_clash", label("teacher_clash", {p, static_cast<int>(t)}),
            std::move(terms), Sense::kLessEqual, 1.0);
      }
      for (int u = 0; u < in_.curriculum_count(); ++u) {
        row("curriculum_clash", label("curriculum_clash", {p, u}),
            curriculum_occ(u, p), Sense::kLessEqual, 1.0);
      }
    }
  }

  void forbidden_rows() {
    for (const auto& f : in_.data().unavailability) {
      row("forbidden", label("forbidden", {f.period, f.course}),
          occ(f.period, f.course), Sense::kEqual, 0.0);
    }
  }

  void course_clash_rows() {
    for (int p = 0; p < in_.period_count(); ++p) {
      for (int c = 0; c < in_.course_count(); ++c) {
        row("course_clash", label("course_clash", {p, c}), occ(p, c),
            Sense::kLessEqual, 1.0);
      }
    }
  }

  // CourseSchedule, minimum working days and their objective terms.
  void day_machinery() {
    const int days = in_.days();
    const int ppd = in_.periods_per_day();
    for (int c = 0; c < in_.course_count(); ++c) {
      std::vector<Term> schedule_sum;
      for (int d = 0; d < days; ++d) {
        const auto cs = binary(label("CourseSchedule", {d, c}),
                               {TagKind::kCourseSchedule, d, c, -1});
        schedule_sum.push_back({1.0, cs});
        std::vector<Term> day_sum;
        for (int s = 0; s < ppd; ++s) {
          const int p = in_.period_at(d, s);
          std::vector<Term> terms = occ(p, c);
          terms.push_back({-1.0, cs});
          row("day_upper", label("day_upper", {p, c}), std::move(terms),
              Sense::kLessEqual, 0.0);
          append(day_sum, occ(p, c));
        }
        day_sum.push_back({-1.0, cs});
        row("day_lower", label("day_lower", {d, c}), std::move(day_sum),
            Sense::kGreaterEqual, 0.0);
      }
      const auto md = model_.add_variable(
          {label("CourseMinDaysViolations", {c}), VarKind::kInteger, 0.0,
           static_cast<double>(days), {TagKind::kMinDaysViolation, c, -1, -1}});
      schedule_sum.push_back({1.0, md});
      row("min_days", label("min_days", {c}), std::move(schedule_sum),
          Sense::kGreaterEqual, in_.courses()[c].min_days);
      objective_.push_back({static_cast<double>(in_.weights().spread), md});
    }
  }

  // Isolated-lecture indicators per curriculum, day and slot.
  void singleton_machinery() {
    const int ppd = in_.periods_per_day();
    for (int u = 0; u < in_.curriculum_count(); ++u) {
      for (int d = 0; d < in_.days(); ++d) {
        for (int s = 0; s < ppd; ++s) {
          const auto single = binary(label("Singletons", {u, d, s}),
                                     {TagKind::kSingleton, u, d, s});
          objective_.push_back(
              {static_cast<double>(in_.weights().compactness), single});
          std::vector<Term> terms = curriculum_occ(u, in_.period_at(d, s));
          std::string origin;
          if (ppd == 1) {
            origin = "singleton_only";
          } else if (s == 0) {
            origin = "singleton_first";
            append(terms, curriculum_occ(u, in_.period_at(d, 1)), -1.0);
          } else if (s == ppd - 1) {
            origin = "singleton_last";
            append(terms, curriculum_occ(u, in_.period_at(d, s - 1)), -1.0);
          } else {
            origin = "singleton_inner";
            append(terms, curriculum_occ(u, in_.period_at(d, s - 1)), -1.0);
            append(terms, curriculum_occ(u, in_.period_at(d, s + 1)), -1.0);
          }
          terms.push_back({-1.0, single});
          row(origin, label(origin, {u, d, s}), std::move(terms),
              Sense::kLessEqual, 0.0);
        }
      }
    }
  }

  // Room-usage indicators per (room group, course) linked to `taught`.
  void room_machinery(int groups, TagKind taught_kind, TagKind rooms_kind,
                      std::string_view var_name) {
    int courses_with_events = 0;
    for (int c = 0; c < in_.course_count(); ++c) {
      courses_with_events += in_.courses()[c].events > 0;
      for (int g = 0; g < groups; ++g) {
        const auto cr = binary(label(var_name, {g, c}), {rooms_kind, g, c, -1});
        objective_.push_back({static_cast<double>(in_.weights().stability), cr});
        std::vector<Term> sum;
        for (int p = 0; p < in_.period_count(); ++p) {
          const auto t = model_.find({taught_kind, p, g, c});
          row("room_upper", label("room_upper", {p, g, c}),
              {{1.0, *t}, {-1.0, cr}}, Sense::kLessEqual, 0.0);
          sum.push_back({1.0, *t});
        }
        sum.push_back({-1.0, cr});
        row("room_lower", label("room_lower", {g, c}), std::move(sum),
            Sense::kGreaterEqual, 0.0);
      }
    }
    constant_ -= static_cast<double>(in_.weights().stability) * courses_with_events;
  }

  void finish() { model_.set_objective(objective_, constant_); }

  std::vector<Term>& objective() { return objective_; }

 private:
  const Instance& in_;
  MilpModel& model_;
  std::vector<std::vector<Term>> occ_;
  std::vector<Term> objective_;
  double constant_ = 0.0;
};

}  // namespace

MilpModel build_monolithic(const Instance& instance) {
  MilpModel model("monolithic", instance.name());
  Builder b(instance, model);
  const int rooms = instance.room_count();
  const auto& w = instance.weights();
  for (int p = 0; p < instance.period_count(); ++p) {
    for (int r = 0; r < rooms; ++r) {
      for (int c = 0; c < instance.course_count(); ++c) {
        const auto t = b.binary(label("Taught", {p, r, c}),
                                {TagKind::kTaught, p, r, c});
        b.occ(p, c).push_back({1.0, t});
        const int excess = std::max(
            0, instance.courses()[c].students - instance.rooms()[r].capacity);
        if (excess > 0) {
          b.objective().push_back({static_cast<double>(w.capacity) * excess, t});
        }
      }
    }
  }
  b.events_rows();
  for (int p = 0; p < instance.period_count(); ++p) {
    for (int r = 0; r < rooms; ++r) {
      std::vector<Term> terms;
      for (int c = 0; c < instance.course_count(); ++c) {
        terms.push_back({1.0, *model.find({TagKind::kTaught, p, r, c})});
      }
      b.row("room_clash", label("room_clash", {p, r}), std::move(terms),
            Sense::kLessEqual, 1.0);
    }
  }
  b.course_clash_rows();
  b.clash_rows();
  b.forbidden_rows();
  b.day_machinery();
  b.singleton_machinery();
  b.room_machinery(rooms, TagKind::kTaught, TagKind::kCourseRooms,
                   "CourseRooms");
  b.finish();
  return model;
}

MilpModel build_surface(const Instance& instance, const SurfaceOptions& options) {
  MilpModel model("surface", instance.name());
  Builder b(instance, model);
  for (int p = 0; p < instance.period_count(); ++p) {
    for (int c = 0; c < instance.course_count(); ++c) {
      const auto st = b.binary(label("SetTimes", {p, c}),
                               {TagKind::kSetTimes, p, c, -1});
      b.occ(p, c).push_back({1.0, st});
    }
  }
  b.events_rows();
  b.clash_rows();
  for (int p = 0; p < instance.period_count(); ++p) {
    std::vector<Term> terms;
    for (int c = 0; c < instance.course_count(); ++c) {
      Builder::append(terms, b.occ(p, c));
    }
    b.row("period_capacity", label("period_capacity", {p}), std::move(terms),
          Sense::kLessEqual, instance.room_count());
  }
  b.forbidden_rows();
  if (options.stratified_room_bounds) {
    std::set<int> capacities;
    for (const auto& r : instance.rooms()) capacities.insert(r.capacity);
    int level = 0;
    for (int cap : capacities) {
      std::vector<int> big;
      for (int c = 0; c < instance.course_count(); ++c) {
        if (instance.courses()[c].students > cap) big.push_back(c);
      }
      int larger = 0;
      for (const auto& r : instance.rooms()) larger += r.capacity > cap;
      if (static_cast<int>(big.size()) > larger) {
        for (int p = 0; p < instance.period_count(); ++p) {
          std::vector<Term> terms;
          for (int c : big) Builder::append(terms, b.occ(p, c));
          b.row("stratified_capacity",
                label("stratified_capacity", {p, level}), std::move(terms),
                Sense::kLessEqual, larger);
        }
      }
      ++level;
    }
  }
  b.day_machinery();
  b.singleton_machinery();
  b.finish();
  return model;
}

MilpModel build_surface2(const Instance& instance,
                         std::span<const MultiRoom> multirooms) {
  std::vector<int> seen(instance.room_count(), 0);
  for (const auto& m : multirooms) {
    for (int r : m.members) {
      if (r < 0 || r >= instance.room_count() || seen[r]++) {
        throw ValidationError("multi-rooms do not partition the rooms");
      }
    }
  }
  if (std::count(seen.begin(), seen.end(), 1) != instance.room_count()) {
    throw ValidationError("multi-rooms do not partition the rooms");
  }

  MilpModel model("surface2", instance.name());
  Builder b(instance, model);
  const int groups = static_cast<int>(multirooms.size());
  const auto& w = instance.weights();
  for (int p = 0; p < instance.period_count(); ++p) {
    for (int m = 0; m < groups; ++m) {
      for (int c = 0; c < instance.course_count(); ++c) {
        const auto t = b.binary(label("MultiTaught", {p, m, c}),
                                {TagKind::kMultiTaught, p, m, c});
        b.occ(p, c).push_back({1.0, t});
        const int excess = std::max(
            0, instance.courses()[c].students - multirooms[m].capacity);
        if (excess > 0) {
          b.objective().push_back({static_cast<double>(w.capacity) * excess, t});
        }
      }
    }
  }
  b.events_rows();
  for (int p = 0; p < instance.period_count(); ++p) {
    for (int m = 0; m < groups; ++m) {
      std::vector<Term> terms;
      for (int c = 0; c < instance.course_count(); ++c) {
        terms.push_back({1.0, *model.find({TagKind::kMultiTaught, p, m, c})});
      }
      b.row("multiroom_capacity", label("multiroom_capacity", {p, m}),
            std::move(terms), Sense::kLessEqual, multirooms[m].multiplicity);
    }
  }
  b.course_clash_rows();
  b.clash_rows();
  b.forbidden_rows();
  b.day_machinery();
  b.singleton_machinery();
  b.room_machinery(groups, TagKind::kMultiTaught, TagKind::kMultiCourseRooms,
                   "MultiCourseRooms");
  b.finish();
  return model;
}

// ---------------------------------------------------------------------------
// Dives

namespace {

std::vector<Term> taught_at(const Instance& instance, const MilpModel& model,
                            int period, int course) {
  std::vector<Term> terms;
  for (int r = 0; r < instance.room_count(); ++r) {
    auto ref = model.find({TagKind::kTaught, period, r, course});
    if (!ref) throw ModelError("dive restriction needs a monolithic model");
    terms.push_back({1.0, *ref});
  }
  return terms;
}

}  // namespace

MilpModel restrict_period_fixed(const Instance& instance,
                                const MilpModel& monolithic,
                                const PeriodAssignment& basis) {
  if (auto problem = check_period_assignment(instance, basis)) {
    throw ValidationError("invalid period basis: " + *problem);
  }
  MilpModel model = monolithic;
  model.set_formulation("period-fixed");
  model.declare_origin("period_fix");
  for (int c = 0; c < instance.course_count(); ++c) {
    for (int p = 0; p < instance.period_count(); ++p) {
      model.add_constraint({label("period_fix", {p, c}),
                            taught_at(instance, model, p, c), Sense::kEqual,
                            basis.at(p, c) ? 1.0 : 0.0, "period_fix"});
    }
  }
  return model;
}

MilpModel restrict_day_fixed(const Instance& instance,
                             const MilpModel& monolithic,
                             const DayAssignment& basis, DayVariant variant) {
  if (auto problem = check_day_assignment(instance, basis)) {
    throw ValidationError("invalid day basis: " + *problem);
  }
  MilpModel model = monolithic;
  model.declare_origin("day_fix");
  for (int c = 0; c < instance.course_count(); ++c) {
    for (int d = 0; d < instance.days(); ++d) {
      std::vector<Term> terms;
      for (int s = 0; s < instance.periods_per_day(); ++s) {
        auto t = taught_at(instance, model, instance.period_at(d, s), c);
        terms.insert(terms.end(), t.begin(), t.end());
      }
      model.add_constraint({label("day_fix", {d, c}), std::move(terms),
                            Sense::kEqual, static_cast<double>(basis.at(d, c)),
                            "day_fix"});
    }
  }
  switch (variant) {
    case DayVariant::kPlain:
      model.set_formulation("day-fixed");
      return model;
    case DayVariant::kDecomp: {
      MilpModel reduced = model.filtered([](const Variable& v) {
        return v.tag.kind != TagKind::kCourseRooms;
      });
      std::vector<Term> objective;
      for (const auto& t : reduced.objective().terms) {
        objective.push_back({t.coef, reduced.ref(t.var)});
      }
      reduced.set_objective(objective, 0.0);
      reduced.set_formulation("day-decomp");
      return reduced;
    }
    case DayVariant::kZeroStability:
      model.set_formulation("day-fixed-zero-stability");
      model.declare_origin("single_room");
      for (int c = 0; c < instance.course_count(); ++c) {
        if (instance.courses()[c].events < 1) continue;
        std::vector<Term> terms;
        for (int r = 0; r < instance.room_count(); ++r) {
          terms.push_back({1.0, *model.find({TagKind::kCourseRooms, r, c})});
        }
        model.add_constraint({label("single_room", {c}), std::move(terms),
                              Sense::kEqual, 1.0, "single_room"});
      }
      return model;
  }
  return model;
}

MilpModel build_dive(const Instance& instance, const MilpModel& monolithic,
                     const Neighborhood& neighborhood) {
  if (neighborhood.kind == NeighborhoodKind::kPeriodFixed) {
    const auto* basis = std::get_if<PeriodAssignment>(&neighborhood.basis);
    if (!basis) throw ValidationError("period-fixed dive needs a period basis");
    return restrict_period_fixed(instance, monolithic, *basis);
  }
  const auto* basis = std::get_if<DayAssignment>(&neighborhood.basis);
  if (!basis) throw ValidationError("day dives need a day basis");
  const DayVariant variant =
      neighborhood.kind == NeighborhoodKind::kDayFixed ? DayVariant::kPlain
      : neighborhood.kind == NeighborhoodKind::kDayDecomp
          ? DayVariant::kDecomp
          : DayVariant::kZeroStability;
  return restrict_day_fixed(instance, monolithic, *basis, variant);
}

// ---------------------------------------------------------------------------
// Decoding and encoding

namespace {

void require_solution(const MilpModel& model, const MilpSolution& solution) {
  if (solution.status != SolveStatus::kOptimal &&
      solution.status != SolveStatus::kFeasible) {
    throw SolverError("cannot decode a solution with status " +
                      std::string(to_string(solution.status)));
  }
  if (static_cast<int>(solution.values.size()) != model.variable_count()) {
    throw SolverError("solution does not match the model");
  }
}

bool integral_one(const Variable& v, double value) {
  if (std::abs(value - std::round(value)) > 1e-6) {
    throw SolverError("variable " + v.name + " is not integral");
  }
  return std::round(value) >= 1.0;
}

}  // namespace

Solution decode_monolithic(const Instance& instance, const MilpModel& model,
                           const MilpSolution& solution) {
  require_solution(model, solution);
  Solution out = Solution::empty_for(instance);
  for (int j = 0; j < model.variable_count(); ++j) {
    const auto& v = model.variable(j);
    if (v.tag.kind != TagKind::kTaught) continue;
    if (integral_one(v, solution.values[j])) {
      out.by_course[v.tag.c].push_back({v.tag.a, v.tag.b});
    }
  }
  out.normalise();
  return out;
}

PeriodAssignment decode_surface(const Instance& instance,
                                const MilpModel& model,
                                const MilpSolution& solution) {
  require_solution(model, solution);
  auto out = PeriodAssignment::empty_for(instance);
  bool tagged = false;
  for (int j = 0; j < model.variable_count(); ++j) {
    const auto& v = model.variable(j);
    int period, course;
    if (v.tag.kind == TagKind::kSetTimes) {
      period = v.tag.a;
      course = v.tag.b;
    } else if (v.tag.kind == TagKind::kMultiTaught ||
               v.tag.kind == TagKind::kTaught) {
      period = v.tag.a;
      course = v.tag.c;
    } else {
      continue;
    }
    tagged = true;
    if (integral_one(v, solution.values[j])) out.set(period, course, true);
  }
  if (!tagged) throw ModelError("model has no period variables");
  return out;
}

namespace {

struct Usage {
  std::vector<int> room_at;          // [course * P + period], -1 if idle
  std::vector<std::uint8_t> day_used;  // [course * D + day]
};

Usage usage_of(const Instance& instance, const Solution& solution) {
  const int P = instance.period_count();
  Usage u;
  u.room_at.assign(static_cast<std::size_t>(instance.course_count()) * P, -1);
  u.day_used.assign(
      static_cast<std::size_t>(instance.course_count()) * instance.days(), 0);
  for (int c = 0; c < instance.course_count(); ++c) {
    for (const auto& e : solution.by_course[c]) {
      u.room_at[static_cast<std::size_t>(c) * P + e.period] = e.room;
      u.day_used[static_cast<std::size_t>(c) * instance.days() +
                 instance.day_of(e.period)] = 1;
    }
  }
  return u;
}

std::vector<double> encode(const Instance& instance, const MilpModel& model,
                           const Solution& solution,
                           std::span<const MultiRoom> multirooms,
                           bool rooms_known) {
  const int P = instance.period_count();
  const int D = instance.days();
  const auto usage = usage_of(instance, solution);
  std::vector<int> group_of(instance.room_count(), -1);
  for (std::size_t m = 0; m < multirooms.size(); ++m) {
    for (int r : multirooms[m].members) group_of[r] = static_cast<int>(m);
  }
  auto busy = [&](int c, int p) {
    return usage.room_at[static_cast<std::size_t>(c) * P + p] >= 0;
  };
  auto curriculum_busy = [&](int u, int p) {
    for (int c : instance.curricula()[u].courses) {
      if (busy(c, p)) return true;
    }
    return false;
  };
  auto uses_room = [&](int c, auto&& pred) {
    for (const auto& e : solution.by_course[c]) {
      if (pred(e.room)) return true;
    }
    return false;
  };

  std::vector<double> values(model.variable_count(), 0.0);
  for (int j = 0; j < model.variable_count(); ++j) {
    const auto& tag = model.variable(j).tag;
    double v = 0.0;
    switch (tag.kind) {
      case TagKind::kNone:
        break;
      case TagKind::kTaught:
        if (rooms_known) {
          v = usage.room_at[static_cast<std::size_t>(tag.c) * P + tag.a] ==
              tag.b;
        }
        break;
      case TagKind::kSetTimes:
        v = busy(tag.b, tag.a);
        break;
      case TagKind::kCourseSchedule:
        v = usage.day_used[static_cast<std::size_t>(tag.b) * D + tag.a];
        break;
      case TagKind::kMinDaysViolation: {
        int used = 0;
        for (int d = 0; d < D; ++d) {
          used += usage.day_used[static_cast<std::size_t>(tag.a) * D + d];
        }
        v = std::max(0, instance.courses()[tag.a].min_days - used);
        break;
      }
      case TagKind::kSingleton: {
        const int ppd = instance.periods_per_day();
        const int s = tag.c;
        const bool here = curriculum_busy(tag.a, instance.period_at(tag.b, s));
        const bool before =
            s > 0 && curriculum_busy(tag.a, instance.period_at(tag.b, s - 1));
        const bool after = s + 1 < ppd &&
                           curriculum_busy(tag.a, instance.period_at(tag.b, s + 1));
        v = here && !before && !after;
        break;
      }
      case TagKind::kCourseRooms:
        if (rooms_known) {
          v = uses_room(tag.b, [&](int r) { return r == tag.a; });
        }
        break;
      case TagKind::kMultiTaught: {
        if (multirooms.empty()) {
          throw ModelError("encoding multi-room variables needs multi-rooms");
        }
        const int r = usage.room_at[static_cast<std::size_t>(tag.c) * P + tag.a];
        v = r >= 0 && group_of[r] == tag.b;
        break;
      }
      case TagKind::kMultiCourseRooms:
        if (multirooms.empty()) {
          throw ModelError("encoding multi-room variables needs multi-rooms");
        }
        v = uses_room(tag.b, [&](int r) { return group_of[r] == tag.a; });
        break;
    }
    values[j] = v;
  }
  return values;
}

}  // namespace

std::vector<double> encode_solution(const Instance& instance,
                                    const MilpModel& model,
                                    const Solution& solution,
                                    std::span<const MultiRoom> multirooms) {
  return encode(instance, model, solution, multirooms, true);
}

std::vector<double> encode_period_assignment(const Instance& instance,
                                             const MilpModel& model,
                                             const PeriodAssignment& basis) {
  Solution solution = Solution::empty_for(instance);
  for (int c = 0; c < instance.course_count(); ++c) {
    for (int p : basis.periods_of(c)) solution.by_course[c].push_back({p, 0});
  }
  return encode(instance, model, solution, {}, false);
}

// ---------------------------------------------------------------------------
// Cuts

std::vector<IndexTerm> occupancy_terms(const Instance& instance,
                                       const MilpModel& model, int period,
                                       int course) {
  std::vector<IndexTerm> terms;
  if (auto st = model.find({TagKind::kSetTimes, period, course, -1})) {
    terms.push_back({1.0, st->index});
    return terms;
  }
  for (int r = 0; r < instance.room_count(); ++r) {
    if (auto t = model.find({TagKind::kTaught, period, r, course})) {
      terms.push_back({1.0, t->index});
    }
    if (auto t = model.find({TagKind::kMultiTaught, period, r, course})) {
      terms.push_back({1.0, t->index});
    }
  }
  return terms;
}

namespace {

std::vector<Term> as_terms(const MilpModel& model,
                           const std::vector<IndexTerm>& terms) {
  std::vector<Term> out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back({t.coef, model.ref(t.var)});
  return out;
}

std::string clique_label(std::string_view base, int period,
                         const std::vector<int>& members) {
  std::string out(base);
  out += "(" + std::to_string(period);
  for (int c : members) out += "," + std::to_string(c);
  return out + ")";
}

}  // namespace

std::vector<std::vector<int>> greedy_clique_cover(const ConflictGraph& graph,
                                                  int min_size) {
  const int n = graph.vertex_count();
  std::vector<int> order(n);
  for (int v = 0; v < n; ++v) order[v] = v;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return graph.degree(a) > graph.degree(b);
  });
  std::vector<int> rank(n);
  for (int i = 0; i < n; ++i) rank[order[i]] = i;

  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> cliques;
  for (int v : order) {
    std::vector<int> candidates = graph.neighbours(v);
    std::sort(candidates.begin(), candidates.end(),
              [&](int a, int b) { return rank[a] < rank[b]; });
    std::vector<int> clique{v};
    for (int w : candidates) {
      bool all = true;
      for (int x : clique) all = all && graph.adjacent(w, x);
      if (all) clique.push_back(w);
    }
    if (static_cast<int>(clique.size()) < min_size) continue;
    std::sort(clique.begin(), clique.end());
    if (seen.insert(clique).second) cliques.push_back(clique);
  }
  return cliques;
}

int add_clique_cuts(const Instance& instance, MilpModel& model,
                    const ConflictGraph& graph,
                    const std::vector<std::vector<int>>& cliques) {
  int added = 0;
  model.declare_origin("clique");
  for (auto clique : cliques) {
    std::sort(clique.begin(), clique.end());
    if (!graph.is_clique(clique)) {
      throw ValidationError("course set is not a clique of the conflict graph");
    }
    for (int p = 0; p < instance.period_count(); ++p) {
      std::vector<IndexTerm> terms;
      for (int c : clique) {
        auto t = occupancy_terms(instance, model, p, c);
        terms.insert(terms.end(), t.begin(), t.end());
      }
      const int index = model.add_constraint_if_new(
          {clique_label("clique", p, clique), as_terms(model, terms),
           Sense::kLessEqual, 1.0, "clique"});
      added += index >= 0;
    }
  }
  return added;
}

std::vector<CliqueViolation> separate_cliques(const ConflictGraph& graph,
                                              int periods,
                                              std::span<const double> occupancy,
                                              const SeparationOptions& options) {
  const int n = graph.vertex_count();
  std::vector<CliqueViolation> out;
  std::set<std::pair<int, std::vector<int>>> seen;
  for (int p = 0; p < periods; ++p) {
    const double* x = occupancy.data() + static_cast<std::size_t>(p) * n;
    for (const auto& e : graph.edges()) {
      const int a = e.first, b = e.second;
      for (int c : graph.neighbours(a)) {
        if (c <= b || !graph.adjacent(b, c)) continue;
        double sum = x[a] + x[b] + x[c];
        if (sum <= 1.0 + options.tolerance) continue;
        std::vector<int> members{a, b, c};
        while (true) {
          int best = -1;
          for (int v = 0; v < n; ++v) {
            if (x[v] <= options.tolerance) continue;
            if (std::find(members.begin(), members.end(), v) != members.end()) {
              continue;
            }
            bool all = true;
            for (int m : members) all = all && graph.adjacent(v, m);
            if (all && (best < 0 || x[v] > x[best])) best = v;
          }
          if (best < 0) break;
          members.push_back(best);
          sum += x[best];
        }
        if (members.size() == 3 && options.discard_ungrown) continue;
        std::sort(members.begin(), members.end());
        if (!seen.insert({p, members}).second) continue;
        out.push_back({p, std::move(members), sum});
      }
    }
  }
  return out;
}

Separator make_clique_separator(const Instance& instance,
                                const MilpModel& model,
                                const SeparationOptions& options) {
  const int P = instance.period_count();
  const int C = instance.course_count();
  std::vector<std::vector<IndexTerm>> occ(static_cast<std::size_t>(P) * C);
  for (int p = 0; p < P; ++p) {
    for (int c = 0; c < C; ++c) {
      occ[static_cast<std::size_t>(p) * C + c] =
          occupancy_terms(instance, model, p, c);
    }
  }
  auto graph = build_conflict_graph(instance);
  return [graph = std::move(graph), occ = std::move(occ), P, C,
          options](std::span<const double> x) {
    std::vector<double> values(occ.size(), 0.0);
    for (std::size_t k = 0; k < occ.size(); ++k) {
      for (const auto& t : occ[k]) values[k] += t.coef * x[t.var];
    }
    std::vector<LinearConstraint> rows;
    for (const auto& v : separate_cliques(graph, P, values, options)) {
      LinearConstraint row;
      row.name = clique_label("clique_sep", v.period, v.members);
      for (int c : v.members) {
        const auto& t = occ[static_cast<std::size_t>(v.period) * C + c];
        row.terms.insert(row.terms.end(), t.begin(), t.end());
      }
      std::sort(row.terms.begin(), row.terms.end(),
                [](const IndexTerm& a, const IndexTerm& b) { return a.var < b.var; });
      row.sense = Sense::kLessEqual;
      row.rhs = 1.0;
      row.origin = "clique";
      rows.push_back(std::move(row));
    }
    return rows;
  };
}

int add_implied_bound_cuts(const Instance& instance, MilpModel& model) {
  int added = 0;
  auto family = [&](TagKind kind, int count, const std::string& origin) {
    if (!model.has_tag_kind(kind)) return;
    model.declare_origin(origin);
    for (int c = 0; c < instance.course_count(); ++c) {
      if (instance.courses()[c].events < 1) continue;
      std::vector<Term> terms;
      for (int i = 0; i < count; ++i) {
        if (auto ref = model.find({kind, i, c, -1})) terms.push_back({1.0, *ref});
      }
      if (terms.empty()) continue;
      added += model.add_constraint_if_new({label(origin, {c}), std::move(terms),
                                            Sense::kGreaterEqual, 1.0,
                                            origin}) >= 0;
    }
  };
  family(TagKind::kCourseSchedule, instance.days(), "implied_days");
  family(TagKind::kCourseRooms, instance.room_count(), "implied_rooms");
  family(TagKind::kMultiCourseRooms, instance.room_count(),
         "implied_multirooms");
  return added;
}

int pattern_penalty(std::span<const int> signs) {
  std::vector<std::uint8_t> day(signs.size());
  for (std::size_t i = 0; i < signs.size(); ++i) day[i] = signs[i] > 0;
  return isolated_lectures(day);
}

std::vector<Pattern> enumerate_patterns(int length, int min_penalty) {
  std::vector<Pattern> out;
  for (std::uint32_t mask = 0; mask < (1u << length); ++mask) {
    Pattern pattern;
    for (int i = 0; i < length; ++i) {
      pattern.signs.push_back((mask >> i) & 1u ? 1 : -1);
    }
    pattern.penalty = pattern_penalty(pattern.signs);
    if (pattern.penalty >= min_penalty) out.push_back(std::move(pattern));
  }
  return out;
}

double pattern_cut_lhs(const Pattern& pattern,
                       std::span<const std::uint8_t> day) {
  int m = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < pattern.signs.size(); ++i) {
    m += pattern.signs[i] > 0;
    sum += pattern.signs[i] * static_cast<double>(day[i]);
  }
  return pattern.penalty * (sum - (m - 1));
}

int add_pattern_cuts(const Instance& instance, MilpModel& model,
                     const std::vector<Pattern>& patterns) {
  const int ppd = instance.periods_per_day();
  for (const auto& pattern : patterns) {
    if (static_cast<int>(pattern.signs.size()) != ppd) {
      throw ModelError("pattern length differs from periods per day");
    }
    for (int a : pattern.signs) {
      if (a != 1 && a != -1) throw ModelError("pattern entries must be +1 or -1");
    }
    if (pattern.penalty != pattern_penalty(pattern.signs)) {
      throw ModelError("pattern penalty differs from its isolated lectures");
    }
  }
  if (instance.curriculum_count() > 0 &&
      !model.has_tag_kind(TagKind::kSingleton)) {
    throw ModelError("pattern cuts need singleton variables");
  }
  model.declare_origin("pattern");
  int added = 0;
  for (int u = 0; u < instance.curriculum_count(); ++u) {
    for (int d = 0; d < instance.days(); ++d) {
      for (const auto& pattern : patterns) {
        std::vector<Term> terms;
        int m = 0;
        std::string code;
        for (int s = 0; s < ppd; ++s) {
          const int a = pattern.signs[s];
          m += a > 0;
          code += a > 0 ? '+' : '-';
          for (int c : instance.curricula()[u].courses) {
            for (const auto& t :
                 occupancy_terms(instance, model, instance.period_at(d, s), c)) {
              terms.push_back(
                  {pattern.penalty * a * t.coef, model.ref(t.var)});
            }
          }
          terms.push_back(
              {-1.0, *model.find({TagKind::kSingleton, u, d, s})});
        }
        const std::string name = "pattern(" + std::to_string(u) + "," +
                                 std::to_string(d) + "," + code + ")";
        added += model.add_constraint_if_new(
                     {name, std::move(terms), Sense::kLessEqual,
                      static_cast<double>(pattern.penalty) * (m - 1),
                      "pattern"}) >= 0;
      }
    }
  }
  return added;
}

}  // namespace ctt
