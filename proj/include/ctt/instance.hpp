#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ctt {

struct Course {
  std::string id;
  std::string teacher;
  int events = 1;
  int min_days = 1;
  int students = 0;

  bool operator==(const Course&) const = default;
};

struct Room {
  std::string id;
  int capacity = 0;

  bool operator==(const Room&) const = default;
};

struct Curriculum {
  std::string id;
  std::vector<int> courses;  // indices into Instance::courses(), sorted

  bool operator==(const Curriculum&) const = default;
};

// Weights of the four soft constraints: room capacity, minimum working days
// (spread), curriculum compactness and room stability.
struct WeightVector {
  int capacity = 1;
  int spread = 5;
  int compactness = 2;
  int stability = 1;

  static constexpr WeightVector itc2007() { return {1, 5, 2, 1}; }
  static constexpr WeightVector udine2003() { return {1, 5, 2, 0}; }

  bool operator==(const WeightVector&) const = default;
};

struct Unavailability {
  int course = 0;
  int period = 0;  // global period index

  auto operator<=>(const Unavailability&) const = default;
};

// Raw instance content. Periods are numbered 0..days*periods_per_day-1 and
// period p belongs to day p / periods_per_day.
struct InstanceData {
  std::string name;
  std::vector<Course> courses;
  std::vector<Room> rooms;
  std::vector<Curriculum> curricula;
  int days = 1;
  int periods_per_day = 1;
  std::vector<Unavailability> unavailability;
  WeightVector weights;

  bool operator==(const InstanceData&) const = default;
};

// Immutable, validated problem instance with derived lookup tables.
class Instance {
 public:
  // Validates every invariant; throws ValidationError naming the violation.
  static Instance make(InstanceData data);
  // Builds the lookup tables without validation. Intended for tests that
  // need deliberately degenerate instances.
  static Instance unchecked(InstanceData data);

  const InstanceData& data() const { return data_; }
  const std::string& name() const { return data_.name; }
  std::span<const Course> courses() const { return data_.courses; }
  std::span<const Room> rooms() const { return data_.rooms; }
  std::span<const Curriculum> curricula() const { return data_.curricula; }
  const WeightVector& weights() const { return data_.weights; }

  int course_count() const { return static_cast<int>(data_.courses.size()); }
  int room_count() const { return static_cast<int>(data_.rooms.size()); }
  int curriculum_count() const {
    return static_cast<int>(data_.curricula.size());
  }
  int days() const { return data_.days; }
  int periods_per_day() const { return data_.periods_per_day; }
  int period_count() const { return data_.days * data_.periods_per_day; }
  int day_of(int period) const { return period / data_.periods_per_day; }
  int slot_of(int period) const { return period % data_.periods_per_day; }
  int period_at(int day, int slot) const {
    return day * data_.periods_per_day + slot;
  }

  bool forbidden(int course, int period) const {
    return forbidden_[static_cast<std::size_t>(course) * period_count() +
                      period] != 0;
  }

  // Teachers in order of first appearance among the courses.
  const std::vector<std::string>& teachers() const { return teachers_; }
  int teacher_of(int course) const { return course_teacher_[course]; }
  const std::vector<std::vector<int>>& teacher_courses() const {
    return teacher_courses_;
  }
  // Curricula containing a course.
  const std::vector<int>& curricula_of(int course) const {
    return course_curricula_[course];
  }

  std::optional<int> find_course(std::string_view id) const;
  std::optional<int> find_room(std::string_view id) const;

  int total_events() const;
  int max_room_capacity() const;

  Instance with_weights(const WeightVector& weights) const;

  bool operator==(const Instance& other) const { return data_ == other.data_; }

 private:
  explicit Instance(InstanceData data);

  InstanceData data_;
  std::vector<char> forbidden_;
  std::vector<std::string> teachers_;
  std::vector<int> course_teacher_;
  std::vector<std::vector<int>> teacher_courses_;
  std::vector<std::vector<int>> course_curricula_;
};

// ITC-2007 track 3 (.ctt) reader. Syntax problems raise ParseError with the
// offending line; semantic problems raise ValidationError.
Instance parse_ctt(std::istream& in,
                   const WeightVector& weights = WeightVector::itc2007());
Instance parse_ctt(std::string_view text,
                   const WeightVector& weights = WeightVector::itc2007());
Instance load_ctt(const std::string& path,
                  const WeightVector& weights = WeightVector::itc2007());

// Canonical .ctt serialisation; parse_ctt(write_ctt(i)) == i for default
// weights.
std::string write_ctt(const Instance& instance);

enum class ConflictReason : std::uint8_t { kCurriculum = 1, kTeacher = 2 };

// Course-based conflict graph. Edges are stored with first < second and in
// lexicographic order.
class ConflictGraph {
 public:
  struct Edge {
    int first;
    int second;
    std::uint8_t reasons;  // bitmask of ConflictReason

    bool operator==(const Edge&) const = default;
  };

  ConflictGraph() = default;
  ConflictGraph(int vertices, std::vector<Edge> edges);

  int vertex_count() const { return vertices_; }
  std::span<const Edge> edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  bool adjacent(int a, int b) const;
  const std::vector<int>& neighbours(int v) const { return adjacency_[v]; }
  int degree(int v) const { return static_cast<int>(adjacency_[v].size()); }
  bool is_clique(std::span<const int> vertices) const;
  // edges / C(n, 2); 0 for fewer than two vertices.
  double density() const;

 private:
  int vertices_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;  // sorted
  std::vector<char> matrix_;
};

ConflictGraph build_conflict_graph(const Instance& instance);

struct MultiRoom {
  int multiplicity = 0;
  int capacity = 0;
  std::vector<int> members;  // room indices, sorted

  bool operator==(const MultiRoom&) const = default;
};

enum class MultiRoomPolicy { kSingle, kMedianSplit, kIdentity };

// Partitions the rooms. Median split puts rooms with capacity <= lower median
// into the first multi-room and the rest into the second; empty groups are
// dropped.
std::vector<MultiRoom> build_multirooms(const Instance& instance,
                                        MultiRoomPolicy policy);

std::optional<MultiRoomPolicy> parse_multiroom_policy(std::string_view name);
std::string_view to_string(MultiRoomPolicy policy);

struct InstanceStats {
  int rooms = 0;
  int periods = 0;
  int courses = 0;
  int events = 0;
  int curricula = 0;
  double frequency = 0.0;    // fraction in [0, 1]
  double utilisation = 0.0;  // fraction in [0, 1]
  std::size_t conflict_edges = 0;
  double density = 0.0;  // fraction in [0, 1]
};

InstanceStats instance_stats(const Instance& instance);

}  // namespace ctt
