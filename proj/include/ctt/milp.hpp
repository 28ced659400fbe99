#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ctt {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kFeasibilityTolerance = 1e-6;

enum class VarKind : std::uint8_t { kBinary, kInteger, kContinuous };
enum class Sense : std::uint8_t { kLessEqual, kGreaterEqual, kEqual };

// Which timetabling quantity a variable realises, with its indices.
enum class TagKind : std::uint8_t {
  kNone,
  kTaught,            // (period, room, course)
  kSetTimes,          // (period, course)
  kCourseSchedule,    // (day, course)
  kMinDaysViolation,  // (course)
  kSingleton,         // (curriculum, day, slot)
  kCourseRooms,       // (room, course)
  kMultiTaught,       // (period, multi-room, course)
  kMultiCourseRooms,  // (multi-room, course)
};

std::string_view to_string(TagKind kind);

struct VarTag {
  TagKind kind = TagKind::kNone;
  int a = -1;
  int b = -1;
  int c = -1;

  auto operator<=>(const VarTag&) const = default;
};

struct VarRef {
  std::uint64_t model = 0;
  int index = -1;

  bool operator==(const VarRef&) const = default;
};

struct Term {
  double coef = 0.0;
  VarRef var;
};

struct Variable {
  std::string name;
  VarKind kind = VarKind::kContinuous;
  double lower = 0.0;
  double upper = kInfinity;
  VarTag tag;

  bool is_integer() const { return kind != VarKind::kContinuous; }
};

// Terms of a stored constraint reference variables by index.
struct IndexTerm {
  double coef = 0.0;
  int var = -1;

  bool operator==(const IndexTerm&) const = default;
};

struct LinearConstraint {
  std::string name;
  std::vector<IndexTerm> terms;  // merged, no zero coefficients, sorted by var
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
  std::string origin;  // which family of the formulation produced the row
};

struct ConstraintSpec {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
  std::string origin;
};

struct Objective {
  std::vector<IndexTerm> terms;
  double constant = 0.0;
};

// A minimisation MILP under construction or frozen after building. Copies
// share the identity of the original, so references stay valid in derived
// models.
class MilpModel {
 public:
  MilpModel();
  explicit MilpModel(std::string formulation, std::string instance_name = "");

  std::uint64_t id() const { return id_; }

  VarRef add_variable(Variable spec);
  int add_constraint(ConstraintSpec spec);
  // Returns -1 and adds nothing when a constraint of that name exists.
  int add_constraint_if_new(ConstraintSpec spec);
  void set_objective(std::span<const Term> terms, double constant = 0.0);

  int variable_count() const { return static_cast<int>(variables_.size()); }
  int constraint_count() const {
    return static_cast<int>(constraints_.size());
  }
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<LinearConstraint>& constraints() const {
    return constraints_;
  }
  const Variable& variable(int index) const { return variables_[index]; }
  const LinearConstraint& constraint(int index) const {
    return constraints_[index];
  }
  const Objective& objective() const { return objective_; }
  VarRef ref(int index) const { return {id_, index}; }

  std::optional<int> find_variable(std::string_view name) const;
  std::optional<VarRef> find(const VarTag& tag) const;
  bool has_constraint(std::string_view name) const;
  bool has_tag_kind(TagKind kind) const;

  // Tightens the bounds of an existing variable.
  void set_bounds(int index, double lower, double upper);

  const std::string& formulation() const { return formulation_; }
  const std::string& instance_name() const { return instance_name_; }
  void set_formulation(std::string name) { formulation_ = std::move(name); }

  // Origin tags the formulation promises to emit; used by coverage checks.
  const std::vector<std::string>& declared_origins() const {
    return declared_origins_;
  }
  void declare_origin(const std::string& origin);
  std::vector<std::string> used_origins() const;

  // Copy keeping only the variables accepted by `keep`. Constraints touching
  // a removed variable are dropped, as are its objective terms. The result
  // has a fresh identity.
  template <typename Pred>
  MilpModel filtered(Pred keep) const;

 private:
  int checked_index(const VarRef& ref) const;
  std::vector<IndexTerm> merge(std::span<const Term> terms) const;

  std::uint64_t id_;
  std::string formulation_;
  std::string instance_name_;
  std::vector<Variable> variables_;
  std::vector<LinearConstraint> constraints_;
  Objective objective_;
  std::unordered_map<std::string, int> variable_names_;
  std::unordered_map<std::string, int> constraint_names_;
  std::map<VarTag, int> tags_;
  std::vector<std::string> declared_origins_;
};

enum class SolveStatus : std::uint8_t {
  kOptimal,
  kFeasible,
  kInfeasible,
  kUnbounded,
  kLimitReached,
  kCutoff,  // search exhausted without beating the injected cutoff
};

std::string_view to_string(SolveStatus status);

struct MilpSolution {
  std::vector<double> values;  // aligned with MilpModel::variables()
  double objective_value = 0.0;
  SolveStatus status = SolveStatus::kFeasible;
  std::string violation;  // first violated constraint when infeasible

  double value(const MilpModel& model, std::string_view name) const;
};

double evaluate_objective(const MilpModel& model,
                          std::span<const double> values);
double row_activity(const LinearConstraint& row,
                    std::span<const double> values);

// First bound, integrality or constraint violation of a point, if any.
std::optional<std::string> first_violation(
    const MilpModel& model, std::span<const double> values,
    double tolerance = kFeasibilityTolerance);

// Fixed-format MPS with INTORG/INTEND markers around integer columns.
std::string export_mps(const MilpModel& model);
MilpModel parse_mps(std::string_view text);

// Reads whitespace-separated `name value` lines; unlisted variables are 0.
MilpSolution import_solution(const MilpModel& model, std::string_view text);
std::string write_solution_values(const MilpModel& model,
                                  std::span<const double> values);

// ---------------------------------------------------------------------------

template <typename Pred>
MilpModel MilpModel::filtered(Pred keep) const {
  MilpModel out(formulation_, instance_name_);
  out.declared_origins_ = declared_origins_;
  std::vector<int> remap(variables_.size(), -1);
  for (int j = 0; j < variable_count(); ++j) {
    if (!keep(variables_[j])) continue;
    remap[j] = out.add_variable(variables_[j]).index;
  }
  for (const auto& row : constraints_) {
    bool touches_removed = false;
    for (const auto& t : row.terms) touches_removed |= remap[t.var] < 0;
    if (touches_removed) continue;
    LinearConstraint copy = row;
    for (auto& t : copy.terms) t.var = remap[t.var];
    out.constraint_names_.emplace(copy.name,
                                  static_cast<int>(out.constraints_.size()));
    out.constraints_.push_back(std::move(copy));
  }
  out.objective_.constant = objective_.constant;
  for (const auto& t : objective_.terms) {
    if (remap[t.var] >= 0) out.objective_.terms.push_back({t.coef, remap[t.var]});
  }
  return out;
}

}  // namespace ctt
