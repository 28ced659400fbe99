#include "ctt/instance.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "ctt/error.hpp"

namespace ctt {

Instance::Instance(InstanceData data) : data_(std::move(data)) {
  std::sort(data_.unavailability.begin(), data_.unavailability.end());
  data_.unavailability.erase(
      std::unique(data_.unavailability.begin(), data_.unavailability.end()),
      data_.unavailability.end());
  for (auto& curriculum : data_.curricula) {
    std::sort(curriculum.courses.begin(), curriculum.courses.end());
    curriculum.courses.erase(
        std::unique(curriculum.courses.begin(), curriculum.courses.end()),
        curriculum.courses.end());
  }

  const int periods = std::max(0, period_count());
  forbidden_.assign(static_cast<std::size_t>(course_count()) * periods, 0);
  for (const auto& u : data_.unavailability) {
    if (u.course >= 0 && u.course < course_count() && u.period >= 0 &&
        u.period < periods) {
      forbidden_[static_cast<std::size_t>(u.course) * periods + u.period] = 1;
    }
  }

  std::map<std::string, int> teacher_index;
  course_teacher_.resize(data_.courses.size());
  for (int c = 0; c < course_count(); ++c) {
    const auto& name = data_.courses[c].teacher;
    auto [it, inserted] =
        teacher_index.emplace(name, static_cast<int>(teachers_.size()));
    if (inserted) {
      teachers_.push_back(name);
      teacher_courses_.emplace_back();
    }
    course_teacher_[c] = it->second;
    teacher_courses_[it->second].push_back(c);
  }

  course_curricula_.resize(data_.courses.size());
  for (int u = 0; u < curriculum_count(); ++u) {
    for (int c : data_.curricula[u].courses) {
      if (c >= 0 && c < course_count()) course_curricula_[c].push_back(u);
    }
  }
}

Instance Instance::unchecked(InstanceData data) {
  return Instance(std::move(data));
}

Instance Instance::make(InstanceData data) {
  if (data.days < 1) throw ValidationError("days must be positive");
  if (data.periods_per_day < 1) {
    throw ValidationError("periods per day must be positive");
  }
  const auto& w = data.weights;
  if (w.capacity < 0 || w.spread < 0 || w.compactness < 0 ||
      w.stability < 0) {
    throw ValidationError("weights must be non-negative");
  }
  const int periods = data.days * data.periods_per_day;
  const int courses = static_cast<int>(data.courses.size());

  std::set<std::string_view> seen;
  for (const auto& course : data.courses) {
    if (!seen.insert(course.id).second) {
      throw ValidationError("duplicate course id '" + course.id + "'");
    }
    if (course.events < 1) {
      throw ValidationError("course '" + course.id +
                            "' must have at least one event");
    }
    if (course.events > periods) {
      throw ValidationError("course '" + course.id +
                            "' has more events than periods");
    }
    if (course.min_days < 1 || course.min_days > data.days) {
      throw ValidationError("course '" + course.id +
                            "' has minimum working days outside [1, days]");
    }
    if (course.students < 0) {
      throw ValidationError("course '" + course.id +
                            "' has a negative number of students");
    }
  }
  seen.clear();
  for (const auto& room : data.rooms) {
    if (!seen.insert(room.id).second) {
      throw ValidationError("duplicate room id '" + room.id + "'");
    }
    if (room.capacity < 0) {
      throw ValidationError("room '" + room.id + "' has negative capacity");
    }
  }
  seen.clear();
  for (const auto& curriculum : data.curricula) {
    if (!seen.insert(curriculum.id).second) {
      throw ValidationError("duplicate curriculum id '" + curriculum.id + "'");
    }
    if (curriculum.courses.empty()) {
      throw ValidationError("curriculum '" + curriculum.id + "' is empty");
    }
    for (int c : curriculum.courses) {
      if (c < 0 || c >= courses) {
        throw ValidationError("curriculum '" + curriculum.id +
                              "' references an unknown course");
      }
    }
  }
  for (const auto& u : data.unavailability) {
    if (u.course < 0 || u.course >= courses) {
      throw ValidationError("unavailability references an unknown course");
    }
    if (u.period < 0 || u.period >= periods) {
      throw ValidationError("unavailability period out of range for course '" +
                            data.courses[u.course].id + "'");
    }
  }

  Instance instance(std::move(data));
  for (int c = 0; c < instance.course_count(); ++c) {
    int open = 0;
    for (int p = 0; p < periods; ++p) open += instance.forbidden(c, p) ? 0 : 1;
    if (instance.courses()[c].events > open) {
      throw ValidationError("course '" + instance.courses()[c].id +
                            "' has more events than available periods");
    }
  }
  return instance;
}

std::optional<int> Instance::find_course(std::string_view id) const {
  for (int c = 0; c < course_count(); ++c) {
    if (data_.courses[c].id == id) return c;
  }
  return std::nullopt;
}

std::optional<int> Instance::find_room(std::string_view id) const {
  for (int r = 0; r < room_count(); ++r) {
    if (data_.rooms[r].id == id) return r;
  }
  return std::nullopt;
}

int Instance::total_events() const {
  int total = 0;
  for (const auto& course : data_.courses) total += course.events;
  return total;
}

int Instance::max_room_capacity() const {
  int best = 0;
  for (const auto& room : data_.rooms) best = std::max(best, room.capacity);
  return best;
}

Instance Instance::with_weights(const WeightVector& weights) const {
  InstanceData copy = data_;
  copy.weights = weights;
  return Instance(std::move(copy));
}

// ---------------------------------------------------------------------------
// .ctt reader

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-blank line, split into tokens. Returns false at end of input.
  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      tokens.clear();
      std::istringstream ss(line);
      std::string token;
      while (ss >> token) tokens.push_back(token);
      if (!tokens.empty()) return true;
    }
    ++line_;
    at_end_ = true;
    return false;
  }

  std::vector<std::string> require(const char* what) {
    std::vector<std::string> tokens;
    if (!next(tokens)) {
      throw ParseError(line_, std::string("unexpected end of input, expected ") +
                                  what);
    }
    return tokens;
  }

  int line() const { return line_; }

 private:
  std::istream& in_;
  int line_ = 0;
  bool at_end_ = false;
};

int to_int(const std::string& token, int line, const char* what) {
  int value = 0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(line, std::string("expected integer ") + what +
                               ", got '" + token + "'");
  }
  return value;
}

int header_value(LineReader& reader, const char* key) {
  auto tokens = reader.require(key);
  if (tokens.size() != 2 || tokens[0] != key) {
    throw ParseError(reader.line(), std::string("expected '") + key + " <n>'");
  }
  return to_int(tokens[1], reader.line(), key);
}

void expect_section(LineReader& reader, const char* name) {
  auto tokens = reader.require(name);
  if (tokens.size() != 1 || tokens[0] != name) {
    throw ParseError(reader.line(), std::string("expected section ") + name);
  }
}

}  // namespace

Instance parse_ctt(std::istream& in, const WeightVector& weights) {
  LineReader reader(in);
  InstanceData data;
  data.weights = weights;

  {
    auto tokens = reader.require("Name:");
    if (tokens.size() != 2 || tokens[0] != "Name:") {
      throw ParseError(reader.line(), "expected 'Name: <name>'");
    }
    data.name = tokens[1];
  }
  const int course_count = header_value(reader, "Courses:");
  const int room_count = header_value(reader, "Rooms:");
  data.days = header_value(reader, "Days:");
  data.periods_per_day = header_value(reader, "Periods_per_day:");
  const int curriculum_count = header_value(reader, "Curricula:");
  const int constraint_count = header_value(reader, "Constraints:");
  if (course_count < 0 || room_count < 0 || curriculum_count < 0 ||
      constraint_count < 0) {
    throw ParseError(reader.line(), "negative section size in header");
  }
  if (data.days < 1 || data.periods_per_day < 1) {
    throw ValidationError("days and periods per day must be positive");
  }

  expect_section(reader, "COURSES:");
  for (int i = 0; i < course_count; ++i) {
    auto tokens = reader.require("course line");
    if (tokens.size() != 5) {
      throw ParseError(reader.line(),
                       "course line needs 'id teacher lectures min_days "
                       "students'");
    }
    Course course;
    course.id = tokens[0];
    course.teacher = tokens[1];
    course.events = to_int(tokens[2], reader.line(), "lectures");
    course.min_days = to_int(tokens[3], reader.line(), "min_days");
    course.students = to_int(tokens[4], reader.line(), "students");
    data.courses.push_back(std::move(course));
  }

  std::map<std::string, int, std::less<>> course_index;
  for (int c = 0; c < course_count; ++c) {
    if (!course_index.emplace(data.courses[c].id, c).second) {
      throw ValidationError("duplicate course id '" + data.courses[c].id + "'");
    }
  }
  auto resolve_course = [&](const std::string& id) {
    auto it = course_index.find(id);
    if (it == course_index.end()) {
      throw ValidationError("line " + std::to_string(reader.line()) +
                            ": unknown course id '" + id + "'");
    }
    return it->second;
  };

  expect_section(reader, "ROOMS:");
  for (int i = 0; i < room_count; ++i) {
    auto tokens = reader.require("room line");
    if (tokens.size() != 2) {
      throw ParseError(reader.line(), "room line needs 'id capacity'");
    }
    data.rooms.push_back({tokens[0], to_int(tokens[1], reader.line(),
                                            "capacity")});
  }

  expect_section(reader, "CURRICULA:");
  for (int i = 0; i < curriculum_count; ++i) {
    auto tokens = reader.require("curriculum line");
    if (tokens.size() < 2) {
      throw ParseError(reader.line(), "curriculum line needs 'id n course...'");
    }
    const int n = to_int(tokens[1], reader.line(), "curriculum size");
    if (n < 0 || static_cast<std::size_t>(n) + 2 != tokens.size()) {
      throw ParseError(reader.line(),
                       "curriculum member count does not match its size");
    }
    Curriculum curriculum;
    curriculum.id = tokens[0];
    for (int k = 0; k < n; ++k) {
      curriculum.courses.push_back(resolve_course(tokens[2 + k]));
    }
    data.curricula.push_back(std::move(curriculum));
  }

  expect_section(reader, "UNAVAILABILITY_CONSTRAINTS:");
  for (int i = 0; i < constraint_count; ++i) {
    auto tokens = reader.require("unavailability line");
    if (tokens.size() != 3) {
      throw ParseError(reader.line(),
                       "unavailability line needs 'course day period'");
    }
    const int course = resolve_course(tokens[0]);
    const int day = to_int(tokens[1], reader.line(), "day");
    const int slot = to_int(tokens[2], reader.line(), "period");
    if (day < 0 || day >= data.days || slot < 0 ||
        slot >= data.periods_per_day) {
      throw ValidationError("line " + std::to_string(reader.line()) +
                            ": unavailability period out of range");
    }
    data.unavailability.push_back({course, day * data.periods_per_day + slot});
  }

  {
    auto tokens = reader.require("END.");
    if (tokens.size() != 1 || tokens[0] != "END.") {
      throw ParseError(reader.line(), "expected END.");
    }
  }
  return Instance::make(std::move(data));
}

Instance parse_ctt(std::string_view text, const WeightVector& weights) {
  std::istringstream in{std::string(text)};
  return parse_ctt(in, weights);
}

Instance load_ctt(const std::string& path, const WeightVector& weights) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open instance file '" + path + "'");
  return parse_ctt(in, weights);
}

std::string write_ctt(const Instance& instance) {
  const auto& d = instance.data();
  std::ostringstream out;
  out << "Name: " << d.name << '\n'
      << "Courses: " << d.courses.size() << '\n'
      << "Rooms: " << d.rooms.size() << '\n'
      << "Days: " << d.days << '\n'
      << "Periods_per_day: " << d.periods_per_day << '\n'
      << "Curricula: " << d.curricula.size() << '\n'
      << "Constraints: " << d.unavailability.size() << "\n\n";
  out << "COURSES:\n";
  for (const auto& c : d.courses) {
    out << c.id << ' ' << c.teacher << ' ' << c.events << ' ' << c.min_days
        << ' ' << c.students << '\n';
  }
  out << "\nROOMS:\n";
  for (const auto& r : d.rooms) out << r.id << '\t' << r.capacity << '\n';
  out << "\nCURRICULA:\n";
  for (const auto& u : d.curricula) {
    out << u.id << "  " << u.courses.size();
    for (int c : u.courses) out << ' ' << d.courses[c].id;
    out << '\n';
  }
  out << "\nUNAVAILABILITY_CONSTRAINTS:\n";
  for (const auto& u : d.unavailability) {
    out << d.courses[u.course].id << ' ' << instance.day_of(u.period) << ' '
        << instance.slot_of(u.period) << '\n';
  }
  out << "\nEND.\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Conflict graph

ConflictGraph::ConflictGraph(int vertices, std::vector<Edge> edges)
    : vertices_(vertices), edges_(std::move(edges)) {
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.first, a.second) < std::pair(b.first, b.second);
  });
  adjacency_.resize(vertices_);
  matrix_.assign(static_cast<std::size_t>(vertices_) * vertices_, 0);
  for (const auto& e : edges_) {
    adjacency_[e.first].push_back(e.second);
    adjacency_[e.second].push_back(e.first);
    matrix_[static_cast<std::size_t>(e.first) * vertices_ + e.second] = 1;
    matrix_[static_cast<std::size_t>(e.second) * vertices_ + e.first] = 1;
  }
  for (auto& list : adjacency_) std::sort(list.begin(), list.end());
}

bool ConflictGraph::adjacent(int a, int b) const {
  return matrix_[static_cast<std::size_t>(a) * vertices_ + b] != 0;
}

bool ConflictGraph::is_clique(std::span<const int> vertices) const {
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices.size(); ++j) {
      if (vertices[i] == vertices[j] || !adjacent(vertices[i], vertices[j])) {
        return false;
      }
    }
  }
  return true;
}

double ConflictGraph::density() const {
  if (vertices_ < 2) return 0.0;
  const double pairs = 0.5 * vertices_ * (vertices_ - 1.0);
  return static_cast<double>(edges_.size()) / pairs;
}

ConflictGraph build_conflict_graph(const Instance& instance) {
  const int n = instance.course_count();
  std::vector<std::uint8_t> reasons(static_cast<std::size_t>(n) * n, 0);
  auto mark = [&](int a, int b, ConflictReason why) {
    if (a == b) return;
    if (a > b) std::swap(a, b);
    reasons[static_cast<std::size_t>(a) * n + b] |=
        static_cast<std::uint8_t>(why);
  };
  for (const auto& curriculum : instance.curricula()) {
    for (int a : curriculum.courses) {
      for (int b : curriculum.courses) mark(a, b, ConflictReason::kCurriculum);
    }
  }
  for (const auto& group : instance.teacher_courses()) {
    for (int a : group) {
      for (int b : group) mark(a, b, ConflictReason::kTeacher);
    }
  }
  std::vector<ConflictGraph::Edge> edges;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const auto r = reasons[static_cast<std::size_t>(a) * n + b];
      if (r != 0) edges.push_back({a, b, r});
    }
  }
  return ConflictGraph(n, std::move(edges));
}

// ---------------------------------------------------------------------------
// Multi-rooms

std::vector<MultiRoom> build_multirooms(const Instance& instance,
                                        MultiRoomPolicy policy) {
  const auto rooms = instance.rooms();
  auto make = [&](std::vector<int> members) {
    MultiRoom m;
    std::sort(members.begin(), members.end());
    m.multiplicity = static_cast<int>(members.size());
    for (int r : members) m.capacity = std::max(m.capacity, rooms[r].capacity);
    m.members = std::move(members);
    return m;
  };

  std::vector<MultiRoom> result;
  if (rooms.empty()) return result;
  switch (policy) {
    case MultiRoomPolicy::kSingle: {
      std::vector<int> all(rooms.size());
      std::iota(all.begin(), all.end(), 0);
      result.push_back(make(std::move(all)));
      break;
    }
    case MultiRoomPolicy::kIdentity:
      for (int r = 0; r < static_cast<int>(rooms.size()); ++r) {
        result.push_back(make({r}));
      }
      break;
    case MultiRoomPolicy::kMedianSplit: {
      std::vector<int> capacities;
      for (const auto& room : rooms) capacities.push_back(room.capacity);
      std::sort(capacities.begin(), capacities.end());
      const int median = capacities[(capacities.size() - 1) / 2];
      std::vector<int> small, large;
      for (int r = 0; r < static_cast<int>(rooms.size()); ++r) {
        (rooms[r].capacity <= median ? small : large).push_back(r);
      }
      if (!small.empty()) result.push_back(make(std::move(small)));
      if (!large.empty()) result.push_back(make(std::move(large)));
      break;
    }
  }
  return result;
}

std::optional<MultiRoomPolicy> parse_multiroom_policy(std::string_view name) {
  if (name == "single") return MultiRoomPolicy::kSingle;
  if (name == "median-split" || name == "median") {
    return MultiRoomPolicy::kMedianSplit;
  }
  if (name == "identity") return MultiRoomPolicy::kIdentity;
  return std::nullopt;
}

std::string_view to_string(MultiRoomPolicy policy) {
  switch (policy) {
    case MultiRoomPolicy::kSingle:
      return "single";
    case MultiRoomPolicy::kMedianSplit:
      return "median-split";
    case MultiRoomPolicy::kIdentity:
      return "identity";
  }
  return "?";
}

InstanceStats instance_stats(const Instance& instance) {
  InstanceStats s;
  s.rooms = instance.room_count();
  s.periods = instance.period_count();
  s.courses = instance.course_count();
  s.curricula = instance.curriculum_count();
  s.events = instance.total_events();
  double seat_events = 0.0;
  for (const auto& c : instance.courses()) {
    seat_events += static_cast<double>(c.events) * c.students;
  }
  double seats = 0.0;
  for (const auto& r : instance.rooms()) seats += r.capacity;
  const double slots = static_cast<double>(s.periods) * s.rooms;
  s.frequency = slots > 0 ? s.events / slots : 0.0;
  s.utilisation = seats > 0 ? seat_events / (s.periods * seats) : 0.0;
  const auto graph = build_conflict_graph(instance);
  s.conflict_edges = graph.edge_count();
  s.density = graph.density();
  return s;
}

}  // namespace ctt
