#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

namespace ctt::oracle {

namespace {

// grid[period][course] = rooms used
std::vector<std::vector<std::vector<int>>> grid_of(const Instance& instance,
                                                   const Solution& solution) {
  std::vector<std::vector<std::vector<int>>> grid(
      instance.period_count(),
      std::vector<std::vector<int>>(instance.course_count()));
  for (int c = 0; c < instance.course_count(); ++c) {
    for (const auto& a : solution.by_course[c]) {
      grid[a.period][c].push_back(a.room);
    }
  }
  return grid;
}

}  // namespace

bool hard_feasible(const Instance& instance, const Solution& solution) {
  if (static_cast<int>(solution.by_course.size()) != instance.course_count()) {
    return false;
  }
  for (int c = 0; c < instance.course_count(); ++c) {
    if (static_cast<int>(solution.by_course[c].size()) !=
        instance.courses()[c].events) {
      return false;
    }
    for (const auto& a : solution.by_course[c]) {
      if (a.period < 0 || a.period >= instance.period_count() || a.room < 0 ||
          a.room >= instance.room_count()) {
        return false;
      }
    }
  }
  const auto grid = grid_of(instance, solution);
  for (int p = 0; p < instance.period_count(); ++p) {
    std::map<int, int> room_use;
    std::map<std::string, int> teacher_use;
    for (int c = 0; c < instance.course_count(); ++c) {
      if (grid[p][c].size() > 1) return false;
      if (grid[p][c].empty()) continue;
      if (++room_use[grid[p][c][0]] > 1) return false;
      if (++teacher_use[instance.courses()[c].teacher] > 1) return false;
      for (const auto& f : instance.data().unavailability) {
        if (f.course == c && f.period == p) return false;
      }
    }
    for (const auto& u : instance.curricula()) {
      int n = 0;
      for (int c : u.courses) n += !grid[p][c].empty();
      if (n > 1) return false;
    }
  }
  return true;
}

int isolated(const std::string& day) {
  int count = 0;
  for (std::size_t i = 0; i < day.size(); ++i) {
    if (day[i] != '1') continue;
    const bool left = i > 0 && day[i - 1] == '1';
    const bool right = i + 1 < day.size() && day[i + 1] == '1';
    count += !left && !right;
  }
  return count;
}

PenaltyVector penalties(const Instance& instance, const Solution& solution) {
  PenaltyVector out;
  for (int c = 0; c < instance.course_count(); ++c) {
    const auto& course = instance.courses()[c];
    std::set<int> days, rooms;
    for (const auto& a : solution.by_course[c]) {
      out.capacity += std::max(0, course.students -
                                      instance.rooms()[a.room].capacity);
      days.insert(a.period / instance.periods_per_day());
      rooms.insert(a.room);
    }
    out.spread += std::max(0, course.min_days - static_cast<int>(days.size()));
    if (!rooms.empty()) out.stability += static_cast<int>(rooms.size()) - 1;
  }
  const auto grid = grid_of(instance, solution);
  for (const auto& u : instance.curricula()) {
    for (int d = 0; d < instance.days(); ++d) {
      std::string day;
      for (int s = 0; s < instance.periods_per_day(); ++s) {
        bool busy = false;
        for (int c : u.courses) {
          busy = busy || !grid[d * instance.periods_per_day() + s][c].empty();
        }
        day += busy ? '1' : '0';
      }
      out.compactness += isolated(day);
    }
  }
  return out;
}

std::int64_t objective(const Instance& instance, const Solution& solution) {
  const auto p = oracle::penalties(instance, solution);
  const auto& w = instance.weights();
  return w.capacity * p.capacity + w.spread * p.spread +
         w.compactness * p.compactness + w.stability * p.stability;
}

std::string gap_string(std::int64_t upper, std::int64_t lower) {
  if (upper == 0) return "0.0%";
  // Exact half-up rounding in integers: tenths = floor((2000*(u-l) + u) / 2u).
  const std::int64_t num = 2000 * (upper - lower) + upper;
  const std::int64_t den = 2 * upper;
  std::int64_t tenths = num / den;
  if ((num % den != 0) && ((num < 0) != (den < 0))) --tenths;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%lld.%lld%%", tenths < 0 ? "-" : "",
                static_cast<long long>(std::llabs(tenths) / 10),
                static_cast<long long>(std::llabs(tenths) % 10));
  return buf;
}

Stats stats(const Instance& instance) {
  Stats s;
  long events = 0;
  double demand = 0.0, seats = 0.0;
  for (const auto& c : instance.courses()) {
    events += c.events;
    demand += static_cast<double>(c.students) * c.events;
  }
  for (const auto& r : instance.rooms()) seats += r.capacity;
  s.frequency = static_cast<double>(events) /
                (instance.room_count() * instance.period_count());
  s.utilisation = demand / (seats * instance.period_count());
  const int n = instance.course_count();
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      bool conflict =
          instance.courses()[a].teacher == instance.courses()[b].teacher;
      for (const auto& u : instance.curricula()) {
        const bool ha =
            std::find(u.courses.begin(), u.courses.end(), a) != u.courses.end();
        const bool hb =
            std::find(u.courses.begin(), u.courses.end(), b) != u.courses.end();
        conflict = conflict || (ha && hb);
      }
      s.edges += conflict;
    }
  }
  s.density = n < 2 ? 0.0 : s.edges / (n * (n - 1) / 2.0);
  return s;
}

LpAnswer solve_lp(const MilpModel& model) {
  // Shift x = lower + y with 0 <= y <= upper - lower, and write every row and
  // upper bound as an equality with slack or surplus plus an artificial.
  const int n = model.variable_count();
  struct Row {
    std::vector<double> a;
    double b;
    int sense;  // -1 <=, 0 =, 1 >=
  };
  std::vector<Row> rows;
  double shift = model.objective().constant;
  std::vector<double> cost(n, 0.0);
  for (const auto& t : model.objective().terms) cost[t.var] += t.coef;
  for (int j = 0; j < n; ++j) {
    const auto& v = model.variable(j);
    if (!std::isfinite(v.lower) || !std::isfinite(v.upper)) {
      throw std::invalid_argument("oracle needs finite bounds");
    }
    shift += cost[j] * v.lower;
    Row r{std::vector<double>(n, 0.0), v.upper - v.lower, -1};
    r.a[j] = 1.0;
    rows.push_back(r);
  }
  for (const auto& c : model.constraints()) {
    Row r{std::vector<double>(n, 0.0), c.rhs, 0};
    for (const auto& t : c.terms) {
      r.a[t.var] += t.coef;
      r.b -= t.coef * model.variable(t.var).lower;
    }
    r.sense = c.sense == Sense::kLessEqual ? -1 : c.sense == Sense::kEqual ? 0 : 1;
    rows.push_back(r);
  }
  for (auto& r : rows) {
    if (r.b < 0) {
      for (auto& x : r.a) x = -x;
      r.b = -r.b;
      r.sense = -r.sense;
    }
  }
  const int m = static_cast<int>(rows.size());
  // Columns: n structural, m slack, m artificial, then rhs.
  const int cols = n + 2 * m;
  std::vector<std::vector<double>> t(m, std::vector<double>(cols + 1, 0.0));
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) t[i][j] = rows[i].a[j];
    if (rows[i].sense != 0) t[i][n + i] = rows[i].sense < 0 ? 1.0 : -1.0;
    t[i][n + m + i] = 1.0;
    t[i][cols] = rows[i].b;
    basis[i] = n + m + i;
  }
  auto run = [&](const std::vector<double>& c, int allowed) -> bool {
    while (true) {
      int enter = -1;
      for (int j = 0; j < allowed && enter < 0; ++j) {
        double reduced = c[j];
        for (int i = 0; i < m; ++i) reduced -= c[basis[i]] * t[i][j];
        if (reduced < -1e-9) enter = j;
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = 0.0;
      for (int i = 0; i < m; ++i) {
        if (t[i][enter] <= 1e-9) continue;
        const double ratio = t[i][cols] / t[i][enter];
        if (leave < 0 || ratio < best - 1e-12 ||
            (std::abs(ratio - best) <= 1e-12 && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) return false;
      const double pivot = t[leave][enter];
      for (auto& x : t[leave]) x /= pivot;
      for (int i = 0; i < m; ++i) {
        if (i == leave || t[i][enter] == 0.0) continue;
        const double f = t[i][enter];
        for (int j = 0; j <= cols; ++j) t[i][j] -= f * t[leave][j];
      }
      basis[leave] = enter;
    }
  };
  std::vector<double> phase1(cols, 0.0);
  for (int i = 0; i < m; ++i) phase1[n + m + i] = 1.0;
  run(phase1, cols);
  double infeasibility = 0.0;
  for (int i = 0; i < m; ++i) {
    if (basis[i] >= n + m) infeasibility += t[i][cols];
  }
  LpAnswer answer;
  if (infeasibility > 1e-7) return answer;
  // Drive remaining zero-level artificials out where possible.
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n + m) continue;
    for (int j = 0; j < n + m; ++j) {
      if (std::abs(t[i][j]) > 1e-9) {
        const double pivot = t[i][j];
        for (auto& x : t[i]) x /= pivot;
        for (int k = 0; k < m; ++k) {
          if (k == i || t[k][j] == 0.0) continue;
          const double f = t[k][j];
          for (int q = 0; q <= cols; ++q) t[k][q] -= f * t[i][q];
        }
        basis[i] = j;
        break;
      }
    }
  }
  std::vector<double> phase2(cols, 0.0);
  for (int j = 0; j < n; ++j) phase2[j] = cost[j];
  if (!run(phase2, n + m)) {
    answer.status = LpAnswer::kUnbounded;
    return answer;
  }
  answer.status = LpAnswer::kOptimal;
  answer.objective = shift;
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n) answer.objective += cost[basis[i]] * t[i][cols];
  }
  return answer;
}

}  // namespace ctt::oracle
