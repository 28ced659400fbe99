#include "ctt/milp.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "ctt/error.hpp"

namespace ctt {

namespace {

std::atomic<std::uint64_t> next_model_id{1};

}  // namespace

std::string_view to_string(TagKind kind) {
  switch (kind) {
    case TagKind::kNone:
      return "none";
    case TagKind::kTaught:
      return "Taught";
    case TagKind::kSetTimes:
      return "SetTimes";
    case TagKind::kCourseSchedule:
      return "CourseSchedule";
    case TagKind::kMinDaysViolation:
      return "CourseMinDaysViolations";
    case TagKind::kSingleton:
      return "Singletons";
    case TagKind::kCourseRooms:
      return "CourseRooms";
    case TagKind::kMultiTaught:
      return "MultiTaught";
    case TagKind::kMultiCourseRooms:
      return "MultiCourseRooms";
  }
  return "?";
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kFeasible:
      return "feasible";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kUnbounded:
      return "unbounded";
    case SolveStatus::kLimitReached:
      return "limit-reached";
    case SolveStatus::kCutoff:
      return "cutoff";
  }
  return "?";
}

MilpModel::MilpModel() : MilpModel("model") {}

MilpModel::MilpModel(std::string formulation, std::string instance_name)
    : id_(next_model_id++),
      formulation_(std::move(formulation)),
      instance_name_(std::move(instance_name)) {}

int MilpModel::checked_index(const VarRef& ref) const {
  if (ref.model != id_) {
    throw ModelError("variable reference belongs to another model");
  }
  if (ref.index < 0 || ref.index >= variable_count()) {
    throw ModelError("variable reference out of range");
  }
  return ref.index;
}

VarRef MilpModel::add_variable(Variable spec) {
  if (spec.name.empty()) throw ModelError("variable needs a name");
  if (spec.kind == VarKind::kBinary) {
    spec.lower = std::max(spec.lower, 0.0);
    spec.upper = std::min(spec.upper, 1.0);
  }
  if (spec.lower > spec.upper) {
    throw ModelError("variable '" + spec.name + "' has lower > upper");
  }
  const int index = variable_count();
  if (!variable_names_.emplace(spec.name, index).second) {
    throw ModelError("duplicate variable name '" + spec.name + "'");
  }
  if (spec.tag.kind != TagKind::kNone) {
    if (!tags_.emplace(spec.tag, index).second) {
      throw ModelError("duplicate tag on variable '" + spec.name + "'");
    }
  }
  variables_.push_back(std::move(spec));
  return {id_, index};
}

std::vector<IndexTerm> MilpModel::merge(std::span<const Term> terms) const {
  std::vector<IndexTerm> merged;
  merged.reserve(terms.size());
  for (const auto& t : terms) merged.push_back({t.coef, checked_index(t.var)});
  std::sort(merged.begin(), merged.end(),
            [](const IndexTerm& a, const IndexTerm& b) { return a.var < b.var; });
  std::vector<IndexTerm> out;
  for (const auto& t : merged) {
    if (!out.empty() && out.back().var == t.var) {
      out.back().coef += t.coef;
    } else {
      out.push_back(t);
    }
  }
  std::erase_if(out, [](const IndexTerm& t) { return t.coef == 0.0; });
  return out;
}

int MilpModel::add_constraint(ConstraintSpec spec) {
  if (spec.name.empty()) throw ModelError("constraint needs a name");
  LinearConstraint row;
  row.terms = merge(spec.terms);
  const int index = constraint_count();
  if (!constraint_names_.emplace(spec.name, index).second) {
    throw ModelError("duplicate constraint name '" + spec.name + "'");
  }
  row.name = std::move(spec.name);
  row.sense = spec.sense;
  row.rhs = spec.rhs;
  row.origin = std::move(spec.origin);
  constraints_.push_back(std::move(row));
  return index;
}

int MilpModel::add_constraint_if_new(ConstraintSpec spec) {
  if (has_constraint(spec.name)) return -1;
  return add_constraint(std::move(spec));
}

void MilpModel::set_objective(std::span<const Term> terms, double constant) {
  objective_.terms = merge(terms);
  objective_.constant = constant;
}

std::optional<int> MilpModel::find_variable(std::string_view name) const {
  auto it = variable_names_.find(std::string(name));
  if (it == variable_names_.end()) return std::nullopt;
  return it->second;
}

std::optional<VarRef> MilpModel::find(const VarTag& tag) const {
  auto it = tags_.find(tag);
  if (it == tags_.end()) return std::nullopt;
  return VarRef{id_, it->second};
}

bool MilpModel::has_constraint(std::string_view name) const {
  return constraint_names_.count(std::string(name)) != 0;
}

bool MilpModel::has_tag_kind(TagKind kind) const {
  auto it = tags_.lower_bound(VarTag{kind, std::numeric_limits<int>::min(),
                                     std::numeric_limits<int>::min(),
                                     std::numeric_limits<int>::min()});
  return it != tags_.end() && it->first.kind == kind;
}

void MilpModel::set_bounds(int index, double lower, double upper) {
  checked_index({id_, index});
  if (lower > upper) throw ModelError("set_bounds: lower > upper");
  variables_[index].lower = lower;
  variables_[index].upper = upper;
}

void MilpModel::declare_origin(const std::string& origin) {
  if (std::find(declared_origins_.begin(), declared_origins_.end(), origin) ==
      declared_origins_.end()) {
    declared_origins_.push_back(origin);
  }
}

std::vector<std::string> MilpModel::used_origins() const {
  std::set<std::string> seen;
  std::vector<std::string> out;
  for (const auto& row : constraints_) {
    if (seen.insert(row.origin).second) out.push_back(row.origin);
  }
  return out;
}

double MilpSolution::value(const MilpModel& model,
                           std::string_view name) const {
  auto index = model.find_variable(name);
  if (!index) throw ModelError("unknown variable '" + std::string(name) + "'");
  return values.at(*index);
}

double evaluate_objective(const MilpModel& model,
                          std::span<const double> values) {
  double total = model.objective().constant;
  for (const auto& t : model.objective().terms) total += t.coef * values[t.var];
  return total;
}

double row_activity(const LinearConstraint& row,
                    std::span<const double> values) {
  double total = 0.0;
  for (const auto& t : row.terms) total += t.coef * values[t.var];
  return total;
}

std::optional<std::string> first_violation(const MilpModel& model,
                                           std::span<const double> values,
                                           double tol) {
  if (static_cast<int>(values.size()) != model.variable_count()) {
    return "value vector has the wrong length";
  }
  for (int j = 0; j < model.variable_count(); ++j) {
    const auto& v = model.variable(j);
    if (values[j] < v.lower - tol || values[j] > v.upper + tol) {
      return "bound of " + v.name;
    }
    if (v.is_integer() && std::abs(values[j] - std::round(values[j])) > tol) {
      return "integrality of " + v.name;
    }
  }
  for (const auto& row : model.constraints()) {
    const double a = row_activity(row, values);
    const bool ok = row.sense == Sense::kLessEqual    ? a <= row.rhs + tol
                    : row.sense == Sense::kGreaterEqual ? a >= row.rhs - tol
                                                       : std::abs(a - row.rhs) <= tol;
    if (!ok) return row.name;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// MPS

namespace {

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

void field(std::ostringstream& out, std::string_view text, std::size_t width) {
  out << text;
  for (std::size_t i = text.size(); i < width; ++i) out << ' ';
  if (text.size() >= width) out << ' ';
}

const char* kObjectiveRow = "OBJ";

}  // namespace

std::string export_mps(const MilpModel& model) {
  std::ostringstream out;
  out << "NAME          " << model.formulation();
  if (!model.instance_name().empty()) out << '_' << model.instance_name();
  out << "\nROWS\n N  " << kObjectiveRow << '\n';
  for (const auto& row : model.constraints()) {
    const char* type = row.sense == Sense::kLessEqual      ? "L"
                       : row.sense == Sense::kGreaterEqual ? "G"
                                                           : "E";
    out << ' ' << type << "  " << row.name << '\n';
  }

  // Column-wise view of the matrix.
  const int n = model.variable_count();
  std::vector<std::vector<std::pair<int, double>>> columns(n);
  for (int i = 0; i < model.constraint_count(); ++i) {
    for (const auto& t : model.constraint(i).terms) {
      columns[t.var].emplace_back(i, t.coef);
    }
  }
  std::vector<double> cost(n, 0.0);
  for (const auto& t : model.objective().terms) cost[t.var] = t.coef;

  out << "COLUMNS\n";
  bool in_integer_block = false;
  int marker = 0;
  for (int j = 0; j < n; ++j) {
    const auto& v = model.variable(j);
    if (v.is_integer() != in_integer_block) {
      out << "    ";
      field(out, "MARKER" + std::to_string(marker++), 10);
      out << "'MARKER'                 "
          << (v.is_integer() ? "'INTORG'" : "'INTEND'") << '\n';
      in_integer_block = v.is_integer();
    }
    auto entry = [&](std::string_view row, double value) {
      out << "    ";
      field(out, v.name, 10);
      field(out, row, 10);
      out << format_number(value) << '\n';
    };
    if (cost[j] != 0.0) entry(kObjectiveRow, cost[j]);
    for (const auto& [i, coef] : columns[j]) {
      entry(model.constraint(i).name, coef);
    }
    if (cost[j] == 0.0 && columns[j].empty()) entry(kObjectiveRow, 0.0);
  }
  if (in_integer_block) {
    out << "    ";
    field(out, "MARKER" + std::to_string(marker++), 10);
    out << "'MARKER'                 'INTEND'\n";
  }

  out << "RHS\n";
  if (model.objective().constant != 0.0) {
    out << "    ";
    field(out, "RHS", 10);
    field(out, kObjectiveRow, 10);
    out << format_number(-model.objective().constant) << '\n';
  }
  for (const auto& row : model.constraints()) {
    if (row.rhs == 0.0) continue;
    out << "    ";
    field(out, "RHS", 10);
    field(out, row.name, 10);
    out << format_number(row.rhs) << '\n';
  }

  out << "BOUNDS\n";
  for (const auto& v : model.variables()) {
    auto bound = [&](const char* type, std::optional<double> value) {
      out << ' ' << type << " BND       ";
      field(out, v.name, 10);
      if (value) out << format_number(*value);
      out << '\n';
    };
    if (v.lower == v.upper) {
      bound("FX", v.lower);
      continue;
    }
    if (std::isinf(v.lower) && std::isinf(v.upper)) {
      bound("FR", std::nullopt);
      continue;
    }
    if (std::isinf(v.lower)) {
      bound("MI", std::nullopt);
    } else if (v.lower != 0.0 || v.is_integer()) {
      bound("LO", v.lower);
    }
    if (!std::isinf(v.upper)) {
      bound("UP", v.upper);
    } else if (v.is_integer()) {
      bound("PL", std::nullopt);
    }
  }
  out << "ENDATA\n";
  return out.str();
}

namespace {

double parse_number(const std::string& token, int line) {
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(line, "expected number, got '" + token + "'");
  }
  return value;
}

}  // namespace

MilpModel parse_mps(std::string_view text) {
  enum class Section { kNone, kRows, kColumns, kRhs, kRanges, kBounds, kEnd };
  Section section = Section::kNone;
  std::string name = "mps";
  std::string objective_row;
  struct RowInfo {
    std::string name;
    Sense sense;
    double rhs = 0.0;
    std::vector<std::pair<int, double>> terms;
  };
  std::vector<RowInfo> rows;
  std::unordered_map<std::string, int> row_index;
  struct ColInfo {
    std::string name;
    bool integer = false;
    double lower = 0.0;
    double upper = kInfinity;
    bool upper_set = false;
    double cost = 0.0;
  };
  std::vector<ColInfo> cols;
  std::unordered_map<std::string, int> col_index;
  double objective_constant = 0.0;
  bool integer_block = false;

  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '*') continue;
    std::istringstream ss(line);
    std::vector<std::string> tok;
    std::string t;
    while (ss >> t) tok.push_back(t);
    if (tok.empty()) continue;
    if (line[0] != ' ' && line[0] != '\t') {
      if (tok[0] == "NAME") {
        if (tok.size() > 1) name = tok[1];
      } else if (tok[0] == "ROWS") {
        section = Section::kRows;
      } else if (tok[0] == "COLUMNS") {
        section = Section::kColumns;
      } else if (tok[0] == "RHS") {
        section = Section::kRhs;
      } else if (tok[0] == "RANGES") {
        section = Section::kRanges;
      } else if (tok[0] == "BOUNDS") {
        section = Section::kBounds;
      } else if (tok[0] == "ENDATA") {
        section = Section::kEnd;
      } else {
        throw ParseError(line_no, "unknown MPS section '" + tok[0] + "'");
      }
      continue;
    }
    switch (section) {
      case Section::kRows: {
        if (tok.size() != 2) throw ParseError(line_no, "bad ROWS entry");
        if (tok[0] == "N") {
          if (objective_row.empty()) objective_row = tok[1];
          continue;
        }
        Sense sense;
        if (tok[0] == "L") {
          sense = Sense::kLessEqual;
        } else if (tok[0] == "G") {
          sense = Sense::kGreaterEqual;
        } else if (tok[0] == "E") {
          sense = Sense::kEqual;
        } else {
          throw ParseError(line_no, "unknown row type '" + tok[0] + "'");
        }
        row_index.emplace(tok[1], static_cast<int>(rows.size()));
        rows.push_back({tok[1], sense, 0.0, {}});
        break;
      }
      case Section::kColumns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") {
          if (tok[2] == "'INTORG'") {
            integer_block = true;
          } else if (tok[2] == "'INTEND'") {
            integer_block = false;
          } else {
            throw ParseError(line_no, "unknown marker");
          }
          continue;
        }
        if (tok.size() != 3 && tok.size() != 5) {
          throw ParseError(line_no, "bad COLUMNS entry");
        }
        auto [it, inserted] =
            col_index.emplace(tok[0], static_cast<int>(cols.size()));
        if (inserted) {
          ColInfo col;
          col.name = tok[0];
          col.integer = integer_block;
          cols.push_back(col);
        }
        const int j = it->second;
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          const double value = parse_number(tok[k + 1], line_no);
          if (tok[k] == objective_row) {
            cols[j].cost += value;
          } else {
            auto r = row_index.find(tok[k]);
            if (r == row_index.end()) {
              throw ParseError(line_no, "unknown row '" + tok[k] + "'");
            }
            rows[r->second].terms.emplace_back(j, value);
          }
        }
        break;
      }
      case Section::kRhs: {
        if (tok.size() != 3 && tok.size() != 5) {
          throw ParseError(line_no, "bad RHS entry");
        }
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          const double value = parse_number(tok[k + 1], line_no);
          if (tok[k] == objective_row) {
            objective_constant = -value;
          } else {
            auto r = row_index.find(tok[k]);
            if (r == row_index.end()) {
              throw ParseError(line_no, "unknown row '" + tok[k] + "'");
            }
            rows[r->second].rhs = value;
          }
        }
        break;
      }
      case Section::kRanges:
        throw ParseError(line_no, "RANGES are not supported");
      case Section::kBounds: {
        if (tok.size() < 3) throw ParseError(line_no, "bad BOUNDS entry");
        auto c = col_index.find(tok[2]);
        if (c == col_index.end()) {
          throw ParseError(line_no, "unknown column '" + tok[2] + "'");
        }
        auto& col = cols[c->second];
        const std::string& type = tok[0];
        auto value = [&] {
          if (tok.size() < 4) throw ParseError(line_no, "bound needs a value");
          return parse_number(tok[3], line_no);
        };
        if (type == "UP") {
          col.upper = value();
          col.upper_set = true;
        } else if (type == "LO") {
          col.lower = value();
        } else if (type == "FX") {
          col.lower = col.upper = value();
          col.upper_set = true;
        } else if (type == "FR") {
          col.lower = -kInfinity;
          col.upper = kInfinity;
          col.upper_set = true;
        } else if (type == "MI") {
          col.lower = -kInfinity;
        } else if (type == "PL") {
          col.upper = kInfinity;
          col.upper_set = true;
        } else if (type == "BV") {
          col.integer = true;
          col.lower = 0.0;
          col.upper = 1.0;
          col.upper_set = true;
        } else if (type == "LI") {
          col.integer = true;
          col.lower = value();
        } else if (type == "UI") {
          col.integer = true;
          col.upper = value();
          col.upper_set = true;
        } else {
          throw ParseError(line_no, "unknown bound type '" + type + "'");
        }
        break;
      }
      case Section::kNone:
      case Section::kEnd:
        throw ParseError(line_no, "data outside of a section");
    }
  }
  if (section != Section::kEnd) throw ParseError(0, "missing ENDATA");

  MilpModel model(name);
  std::vector<VarRef> refs;
  for (const auto& col : cols) {
    Variable v;
    v.name = col.name;
    v.lower = col.lower;
    v.upper = col.upper;
    if (col.integer) {
      v.kind = (col.lower >= 0.0 && col.upper <= 1.0) ? VarKind::kBinary
                                                      : VarKind::kInteger;
    } else {
      v.kind = VarKind::kContinuous;
    }
    refs.push_back(model.add_variable(std::move(v)));
  }
  for (auto& row : rows) {
    ConstraintSpec spec;
    spec.name = row.name;
    spec.sense = row.sense;
    spec.rhs = row.rhs;
    spec.origin = "mps";
    for (const auto& [j, coef] : row.terms) spec.terms.push_back({coef, refs[j]});
    model.add_constraint(std::move(spec));
  }
  std::vector<Term> objective;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].cost != 0.0) objective.push_back({cols[j].cost, refs[j]});
  }
  model.set_objective(objective, objective_constant);
  return model;
}

MilpSolution import_solution(const MilpModel& model, std::string_view text) {
  MilpSolution solution;
  solution.values.assign(model.variable_count(), 0.0);
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string name, value, extra;
    if (!(ss >> name)) continue;
    if (name[0] == '#') continue;
    if (!(ss >> value) || (ss >> extra)) {
      throw ParseError(line_no, "expected 'name value'");
    }
    auto index = model.find_variable(name);
    if (!index) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": unknown variable '" + name + "'");
    }
    solution.values[*index] = parse_number(value, line_no);
  }
  solution.objective_value = evaluate_objective(model, solution.values);
  if (auto violated = first_violation(model, solution.values)) {
    solution.status = SolveStatus::kInfeasible;
    solution.violation = *violated;
  } else {
    solution.status = SolveStatus::kFeasible;
  }
  return solution;
}

std::string write_solution_values(const MilpModel& model,
                                  std::span<const double> values) {
  std::ostringstream out;
  for (int j = 0; j < model.variable_count(); ++j) {
    if (values[j] == 0.0) continue;
    out << model.variable(j).name << ' ' << format_number(values[j]) << '\n';
  }
  return out.str();
}

}  // namespace ctt
