#include <algorithm>
#include <cmath>
#include <queue>

#include "ctt/error.hpp"
#include "ctt/solver.hpp"

namespace ctt {

bool has_integral_objective(const MilpModel& model) {
  const auto& objective = model.objective();
  if (objective.constant != std::round(objective.constant)) return false;
  for (const auto& t : objective.terms) {
    if (!model.variable(t.var).is_integer()) return false;
    if (t.coef != std::round(t.coef)) return false;
  }
  return true;
}

namespace {

constexpr double kIntegralityTol = 1e-6;
constexpr double kPruneTol = 1e-6;

struct BoundChange {
  int var;
  double lower;
  double upper;
};

struct Node {
  double bound;
  long seq;
  std::vector<BoundChange> changes;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.seq > b.seq;
  }
};

double fractionality(double v) {
  return std::abs(v - std::round(v));
}

class BranchAndBound {
 public:
  BranchAndBound(const MilpModel& model, const SolveConfig& config)
      : model_(model),
        config_(config),
        work_(relaxation(model)),
        root_lower_(work_.lower),
        root_upper_(work_.upper),
        integral_(has_integral_objective(model)) {
    for (int j = 0; j < model.variable_count(); ++j) {
      if (model.variable(j).is_integer()) integer_vars_.push_back(j);
    }
    start_ = Clock::now();
    if (config.time_limit) {
      deadline_ = start_ + std::chrono::duration_cast<Clock::duration>(
                               std::chrono::duration<double>(*config.time_limit));
    }
  }

  SolveResult run() {
    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    open.push({-kInfinity, seq_++, {}});
    bool stopped = false;
    bool gap_stop = false;
    bool unbounded = false;

    while (!open.empty()) {
      if (time_up() || (config_.node_limit && result_.nodes >= *config_.node_limit) ||
          stop_requested_) {
        stopped = true;
        break;
      }
      if (config_.gap_target && incumbent_value_ < kInfinity) {
        const double lb = std::min({open.top().bound, pruned_min_, incumbent_value_});
        if (incumbent_value_ - lb <=
            *config_.gap_target * std::abs(incumbent_value_) + 1e-9) {
          gap_stop = true;
          break;
        }
      }
      Node node = open.top();
      open.pop();
      if (node.bound >= threshold() - kPruneTol) {
        pruned_min_ = std::min(pruned_min_, node.bound);
        continue;
      }
      LpResult lp = solve_node(node.changes);
      ++result_.nodes;
      if (lp.status == LpStatus::kTimeLimit ||
          lp.status == LpStatus::kIterationLimit) {
        open.push(std::move(node));
        stopped = true;
        break;
      }
      if (lp.status == LpStatus::kInfeasible) continue;
      if (lp.status == LpStatus::kUnbounded) {
        unbounded = true;
        break;
      }
      const bool root = node.seq == 0;
      if (root && config_.separation && config_.separator) {
        separate(lp);
        if (lp.status != LpStatus::kOptimal) {
          if (lp.status == LpStatus::kInfeasible) continue;
          open.push(std::move(node));
          stopped = true;
          break;
        }
      }
      double bound = std::max(node.bound, rounded(lp.objective));
      if (bound >= threshold() - kPruneTol) {
        pruned_min_ = std::min(pruned_min_, bound);
        continue;
      }
      int branch_var = most_fractional(lp.x);
      if (branch_var < 0) {
        offer(lp.x);
        continue;
      }
      if (config_.heuristic_frequency > 0 &&
          (root || result_.nodes % config_.heuristic_frequency == 0)) {
        dive(node.changes, lp);
        if (bound >= threshold() - kPruneTol) {
          pruned_min_ = std::min(pruned_min_, bound);
          continue;
        }
      }
      const double v = lp.x[branch_var];
      Node down{bound, seq_++, node.changes};
      down.changes.push_back({branch_var, -kInfinity, std::floor(v)});
      Node up{bound, seq_++, std::move(node.changes)};
      up.changes.push_back({branch_var, std::ceil(v), kInfinity});
      open.push(std::move(down));
      open.push(std::move(up));
    }

    result_.wall_time =
        std::chrono::duration<double>(Clock::now() - start_).count();
    if (unbounded) {
      result_.status = SolveStatus::kUnbounded;
      result_.lower_bound = -kInfinity;
      return std::move(result_);
    }
    double lb = std::min(pruned_min_, incumbent_value_);
    if (!open.empty()) lb = std::min(lb, open.top().bound);
    result_.lower_bound = lb;
    const bool proved = incumbent_value_ < kInfinity &&
                        lb >= incumbent_value_ - kPruneTol;
    if (stopped || gap_stop) {
      result_.status = proved     ? SolveStatus::kOptimal
                       : gap_stop ? SolveStatus::kFeasible
                                  : SolveStatus::kLimitReached;
    } else if (incumbent_value_ < kInfinity) {
      result_.status = SolveStatus::kOptimal;
      result_.lower_bound = incumbent_value_;
    } else if (pruned_min_ < kInfinity) {
      result_.status = SolveStatus::kCutoff;
    } else {
      result_.status = SolveStatus::kInfeasible;
    }
    if (result_.incumbent) {
      result_.incumbent->status = result_.status == SolveStatus::kOptimal
                                      ? SolveStatus::kOptimal
                                      : SolveStatus::kFeasible;
    }
    return std::move(result_);
  }

 private:
  bool time_up() const { return deadline_ && Clock::now() >= *deadline_; }

  double threshold() const {
    return std::min(config_.cutoff.value_or(kInfinity), incumbent_value_);
  }

  double rounded(double value) const {
    return integral_ ? std::ceil(value - 1e-6) : value;
  }

  LpResult solve_node(const std::vector<BoundChange>& changes) {
    work_.lower = root_lower_;
    work_.upper = root_upper_;
    for (const auto& c : changes) {
      work_.lower[c.var] = std::max(work_.lower[c.var], c.lower);
      work_.upper[c.var] = std::min(work_.upper[c.var], c.upper);
    }
    LpOptions options;
    options.deadline = deadline_;
    options.round_integer_bounds = true;
    return solve_lp(work_, options);
  }

  int most_fractional(const std::vector<double>& x) const {
    int best = -1;
    double best_frac = kIntegralityTol;
    for (int j : integer_vars_) {
      const double f = fractionality(x[j]);
      if (f > best_frac + 1e-12) {
        best = j;
        best_frac = f;
      }
    }
    return best;
  }

  void offer(const std::vector<double>& x) {
    std::vector<double> values = x;
    for (int j : integer_vars_) values[j] = std::round(values[j]);
    if (first_violation(model_, values)) return;
    const double value = evaluate_objective(model_, values);
    if (value >= incumbent_value_ - 1e-9) return;
    if (config_.cutoff && value >= *config_.cutoff - kPruneTol) return;
    incumbent_value_ = value;
    MilpSolution solution;
    solution.values = std::move(values);
    solution.objective_value = value;
    solution.status = SolveStatus::kFeasible;
    result_.incumbent = solution;
    result_.incumbent_history.push_back(value);
    if (config_.on_incumbent && !config_.on_incumbent(solution)) {
      stop_requested_ = true;
    }
  }

  void separate(LpResult& lp) {
    for (int round = 0; round < config_.separation_rounds; ++round) {
      auto rows = config_.separator(lp.x);
      int added = 0;
      for (auto& row : rows) {
        const double activity = row_activity(row, lp.x);
        const bool violated =
            (row.sense != Sense::kGreaterEqual && activity > row.rhs + 1e-6) ||
            (row.sense != Sense::kLessEqual && activity < row.rhs - 1e-6);
        if (!violated) continue;
        work_.rows.push_back(to_lp_row(row));
        ++added;
      }
      if (added == 0) return;
      result_.cuts_added += added;
      lp = solve_node({});
      if (lp.status != LpStatus::kOptimal) return;
    }
  }

  // Fixes near-integral variables in turn and re-solves until the point is
  // integral or the dive fails.
  void dive(std::vector<BoundChange> changes, LpResult lp) {
    const std::size_t max_steps = integer_vars_.size();
    for (std::size_t step = 0; step < max_steps; ++step) {
      if (time_up() || stop_requested_) return;
      std::vector<std::pair<double, int>> fractional;
      for (int j : integer_vars_) {
        const double f = fractionality(lp.x[j]);
        if (f > kIntegralityTol) fractional.emplace_back(f, j);
      }
      if (fractional.empty()) {
        offer(lp.x);
        return;
      }
      std::sort(fractional.begin(), fractional.end());
      const std::size_t batch =
          fractional.size() > 30 ? fractional.size() / 10 : 1;
      for (std::size_t k = 0; k < batch; ++k) {
        const int j = fractional[k].second;
        const double v = std::round(lp.x[j]);
        changes.push_back({j, v, v});
      }
      lp = solve_node(changes);
      if (lp.status != LpStatus::kOptimal) return;
      if (rounded(lp.objective) >= threshold() - kPruneTol) return;
    }
  }

  const MilpModel& model_;
  const SolveConfig& config_;
  LpProblem work_;
  std::vector<double> root_lower_;
  std::vector<double> root_upper_;
  bool integral_;
  std::vector<int> integer_vars_;
  Clock::time_point start_;
  std::optional<Clock::time_point> deadline_;
  SolveResult result_;
  double incumbent_value_ = kInfinity;
  double pruned_min_ = kInfinity;
  long seq_ = 0;
  bool stop_requested_ = false;
};

}  // namespace

SolveResult branch_and_bound(const MilpModel& model, const SolveConfig& config) {
  if (config.time_limit && *config.time_limit <= 0) {
    throw std::invalid_argument("time limit must be positive");
  }
  if (config.gap_target && (*config.gap_target < 0 || *config.gap_target >= 1)) {
    throw std::invalid_argument("gap target must lie in [0, 1)");
  }
  for (int j = 0; j < model.variable_count(); ++j) {
    const auto& v = model.variable(j);
    if (v.is_integer() && (std::isinf(v.lower) || std::isinf(v.upper))) {
      throw ModelError("integer variable '" + v.name + "' is unbounded");
    }
  }
  return BranchAndBound(model, config).run();
}

}  // namespace ctt
