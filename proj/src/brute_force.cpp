#include <algorithm>
#include <cmath>

#include "ctt/error.hpp"
#include "ctt/solver.hpp"

namespace ctt {

BruteForceResult brute_force(const MilpModel& model, double limit) {
  const int n = model.variable_count();
  std::vector<int> integer_vars;
  bool continuous = false;
  double space = 1.0;
  for (int j = 0; j < n; ++j) {
    const auto& v = model.variable(j);
    if (!v.is_integer()) {
      continuous = true;
      continue;
    }
    if (std::isinf(v.lower) || std::isinf(v.upper)) {
      throw SolverError("brute force needs bounded integer variables");
    }
    integer_vars.push_back(j);
    space *= std::floor(v.upper) - std::ceil(v.lower) + 1.0;
  }
  if (space > limit) {
    throw SolverError("search space of " + std::to_string(space) +
                      " assignments exceeds the brute-force limit");
  }

  BruteForceResult best;
  std::vector<double> values(n, 0.0);
  for (int j : integer_vars) values[j] = std::ceil(model.variable(j).lower);
  LpProblem fixed = relaxation(model);

  auto evaluate = [&]() {
    ++best.enumerated;
    if (!continuous) {
      if (first_violation(model, values)) return;
      const double value = evaluate_objective(model, values);
      if (value < best.objective - 1e-9) {
        best.feasible = true;
        best.objective = value;
        best.values = values;
      }
      return;
    }
    for (int j : integer_vars) fixed.lower[j] = fixed.upper[j] = values[j];
    const auto lp = solve_lp(fixed);
    if (lp.status == LpStatus::kUnbounded) {
      throw SolverError("brute force met an unbounded continuous part");
    }
    if (lp.status != LpStatus::kOptimal) return;
    if (lp.objective < best.objective - 1e-9) {
      best.feasible = true;
      best.objective = lp.objective;
      best.values = lp.x;
    }
  };

  if (space == 0) return best;
  while (true) {
    evaluate();
    std::size_t k = 0;
    for (; k < integer_vars.size(); ++k) {
      const int j = integer_vars[k];
      if (values[j] < std::floor(model.variable(j).upper)) {
        values[j] += 1.0;
        break;
      }
      values[j] = std::ceil(model.variable(j).lower);
    }
    if (k == integer_vars.size()) break;
  }
  return best;
}

namespace {

// All k-subsets of `items`, in lexicographic order.
void combinations(const std::vector<int>& items, int k,
                  std::vector<std::vector<int>>& out,
                  const std::function<bool(std::span<const int>)>& keep) {
  std::vector<int> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (static_cast<int>(pick.size()) == k) {
      if (!keep || keep(pick)) out.push_back(pick);
      return;
    }
    const std::size_t need = k - pick.size();
    for (std::size_t i = start; i + need <= items.size(); ++i) {
      pick.push_back(items[i]);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Depth-first search over per-course period sets with clash pruning.
class PeriodSearch {
 public:
  PeriodSearch(const Instance& instance, const PeriodFilter& filter)
      : instance_(instance),
        periods_(instance.period_count()),
        teacher_busy_(static_cast<std::size_t>(periods_) *
                      instance.teachers().size()),
        curriculum_busy_(static_cast<std::size_t>(periods_) *
                         instance.curriculum_count()),
        load_(periods_),
        chosen_(instance.course_count()) {
    options_.resize(instance.course_count());
    std::function<bool(std::span<const int>)> keep;
    for (int c = 0; c < instance.course_count(); ++c) {
      std::vector<int> open;
      for (int p = 0; p < periods_; ++p) {
        if (!instance.forbidden(c, p)) open.push_back(p);
      }
      if (filter) {
        keep = [&filter, c](std::span<const int> periods) {
          return filter(c, periods);
        };
      } else {
        keep = nullptr;
      }
      combinations(open, instance.courses()[c].events, options_[c], keep);
    }
  }

  template <typename Visit>
  void run(Visit&& visit) {
    stop_ = false;
    descend(0, visit);
  }

 private:
  bool fits(int c, const std::vector<int>& periods) const {
    const int t = instance_.teacher_of(c);
    const std::size_t teachers = instance_.teachers().size();
    const std::size_t curricula = instance_.curriculum_count();
    for (int p : periods) {
      if (load_[p] >= instance_.room_count()) return false;
      if (teacher_busy_[p * teachers + t]) return false;
      for (int u : instance_.curricula_of(c)) {
        if (curriculum_busy_[p * curricula + u]) return false;
      }
    }
    return true;
  }

  void mark(int c, const std::vector<int>& periods, int delta) {
    const int t = instance_.teacher_of(c);
    const std::size_t teachers = instance_.teachers().size();
    const std::size_t curricula = instance_.curriculum_count();
    for (int p : periods) {
      load_[p] += delta;
      teacher_busy_[p * teachers + t] += delta;
      for (int u : instance_.curricula_of(c)) {
        curriculum_busy_[p * curricula + u] += delta;
      }
    }
  }

  template <typename Visit>
  void descend(int c, Visit& visit) {
    if (stop_) return;
    if (c == instance_.course_count()) {
      if (!visit(chosen_)) stop_ = true;
      return;
    }
    for (const auto& option : options_[c]) {
      if (!fits(c, option)) continue;
      mark(c, option, 1);
      chosen_[c] = option;
      descend(c + 1, visit);
      mark(c, option, -1);
      if (stop_) return;
    }
  }

  const Instance& instance_;
  int periods_;
  std::vector<std::vector<std::vector<int>>> options_;
  std::vector<int> teacher_busy_;
  std::vector<int> curriculum_busy_;
  std::vector<int> load_;
  std::vector<std::vector<int>> chosen_;
  bool stop_ = false;
};

double period_space(const Instance& instance) {
  double space = 1.0;
  for (int c = 0; c < instance.course_count(); ++c) {
    int open = 0;
    for (int p = 0; p < instance.period_count(); ++p) {
      open += !instance.forbidden(c, p);
    }
    space *= binomial(open, instance.courses()[c].events);
  }
  return space;
}

}  // namespace

double brute_force_space(const Instance& instance) {
  return period_space(instance) *
         std::pow(static_cast<double>(instance.room_count()),
                  instance.total_events());
}

BruteForceResult brute_force(const Instance& instance,
                             const PeriodFilter& filter, double limit) {
  const double space = brute_force_space(instance);
  if (space > limit) {
    throw SolverError("search space of " + std::to_string(space) +
                      " assignments exceeds the brute-force limit");
  }
  const auto& w = instance.weights();
  BruteForceResult best;
  PeriodSearch search(instance, filter);
  const int rooms = instance.room_count();
  const int courses = instance.course_count();
  Solution solution = Solution::empty_for(instance);
  std::vector<char> room_busy(static_cast<std::size_t>(instance.period_count()) *
                              rooms);

  search.run([&](const std::vector<std::vector<int>>& periods) {
    for (int c = 0; c < courses; ++c) {
      solution.by_course[c].clear();
      for (int p : periods[c]) solution.by_course[c].push_back({p, 0});
    }
    const std::int64_t time_cost =
        w.spread * penalty_min_days(instance, solution) +
        w.compactness * penalty_compactness(instance, solution);
    if (time_cost >= best.objective) return true;

    // Rooms, event by event.
    std::vector<std::pair<int, int>> events;  // (course, index)
    for (int c = 0; c < courses; ++c) {
      for (int k = 0; k < static_cast<int>(periods[c].size()); ++k) {
        events.emplace_back(c, k);
      }
    }
    std::function<void(std::size_t)> assign = [&](std::size_t e) {
      if (e == events.size()) {
        ++best.enumerated;
        const auto value = static_cast<double>(
            time_cost + w.capacity * penalty_capacity(instance, solution) +
            w.stability * penalty_stability(instance, solution));
        if (value < best.objective) {
          best.feasible = true;
          best.objective = value;
          best.solution = solution;
        }
        return;
      }
      auto& a = solution.by_course[events[e].first][events[e].second];
      for (int r = 0; r < rooms; ++r) {
        char& busy = room_busy[static_cast<std::size_t>(a.period) * rooms + r];
        if (busy) continue;
        busy = 1;
        a.room = r;
        assign(e + 1);
        busy = 0;
      }
    };
    assign(0);
    return true;
  });
  if (best.solution) best.solution->normalise();
  return best;
}

void for_each_period_assignment(
    const Instance& instance,
    const std::function<bool(const std::vector<std::vector<int>>&)>& visit,
    double limit) {
  const double space = period_space(instance);
  if (space > limit) {
    throw SolverError("search space of " + std::to_string(space) +
                      " period sets exceeds the brute-force limit");
  }
  PeriodSearch search(instance, {});
  search.run(visit);
}

}  // namespace ctt
