#include "ctt/lp.hpp"

#include <algorithm>
#include <cmath>

#include "ctt/error.hpp"

namespace ctt {

std::string_view to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kIterationLimit:
      return "iteration-limit";
    case LpStatus::kTimeLimit:
      return "time-limit";
  }
  return "?";
}

LpRow to_lp_row(const LinearConstraint& row) {
  LpRow out;
  out.terms = row.terms;
  switch (row.sense) {
    case Sense::kLessEqual:
      out.upper = row.rhs;
      break;
    case Sense::kGreaterEqual:
      out.lower = row.rhs;
      break;
    case Sense::kEqual:
      out.lower = out.upper = row.rhs;
      break;
  }
  return out;
}

LpProblem relaxation(const MilpModel& model) {
  LpProblem lp;
  const int n = model.variable_count();
  lp.cost.assign(n, 0.0);
  lp.lower.resize(n);
  lp.upper.resize(n);
  lp.integer.resize(n);
  for (int j = 0; j < n; ++j) {
    const auto& v = model.variable(j);
    lp.lower[j] = v.lower;
    lp.upper[j] = v.upper;
    lp.integer[j] = v.is_integer();
  }
  for (const auto& t : model.objective().terms) lp.cost[t.var] += t.coef;
  lp.constant = model.objective().constant;
  lp.rows.reserve(model.constraint_count());
  for (const auto& row : model.constraints()) lp.rows.push_back(to_lp_row(row));
  return lp;
}

// ---------------------------------------------------------------------------
// Presolve

namespace {

constexpr double kPresolveTol = 1e-9;

}  // namespace

PresolveResult presolve(const LpProblem& problem, bool round_integer_bounds) {
  using Outcome = PresolveResult::Outcome;
  const int n = problem.column_count();
  const int m = problem.row_count();
  PresolveResult result;
  std::vector<double> lower = problem.lower;
  std::vector<double> upper = problem.upper;
  std::vector<char> removed(n, 0);
  std::vector<char> row_active(m, 1);
  result.fixed.assign(n, 0.0);

  auto tighten = [&](int j, double lo, double hi) -> bool {
    if (round_integer_bounds && problem.integer[j]) {
      if (!std::isinf(lo)) lo = std::ceil(lo - 1e-6);
      if (!std::isinf(hi)) hi = std::floor(hi + 1e-6);
    }
    bool changed = false;
    if (lo > lower[j] + kPresolveTol) {
      lower[j] = lo;
      changed = true;
    }
    if (hi < upper[j] - kPresolveTol) {
      upper[j] = hi;
      changed = true;
    }
    return changed;
  };
  auto fix = [&](int j, double value) {
    removed[j] = 1;
    result.fixed[j] = value;
  };

  if (round_integer_bounds) {
    for (int j = 0; j < n; ++j) {
      if (problem.integer[j]) tighten(j, lower[j], upper[j]);
    }
  }

  std::vector<int> uses(n);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int j = 0; j < n; ++j) {
      if (removed[j]) continue;
      if (lower[j] > upper[j] + 1e-7) {
        result.outcome = Outcome::kInfeasible;
        return result;
      }
      if (upper[j] - lower[j] <= kPresolveTol) {
        fix(j, lower[j]);
        changed = true;
      }
    }

    for (int i = 0; i < m; ++i) {
      if (!row_active[i]) continue;
      const auto& row = problem.rows[i];
      double shift = 0.0;
      int active = 0;
      int last = -1;
      double last_coef = 0.0;
      double min_act = 0.0, max_act = 0.0;
      int min_inf = 0, max_inf = 0;
      for (const auto& t : row.terms) {
        if (removed[t.var]) {
          shift += t.coef * result.fixed[t.var];
          continue;
        }
        ++active;
        last = t.var;
        last_coef = t.coef;
        const double lo = t.coef > 0 ? lower[t.var] : upper[t.var];
        const double hi = t.coef > 0 ? upper[t.var] : lower[t.var];
        if (std::isinf(lo)) {
          ++min_inf;
        } else {
          min_act += t.coef * lo;
        }
        if (std::isinf(hi)) {
          ++max_inf;
        } else {
          max_act += t.coef * hi;
        }
      }
      const double lo = row.lower - shift;
      const double hi = row.upper - shift;
      const double tol = 1e-7 * (1.0 + std::abs(shift));
      if (active == 0) {
        if (lo > tol || hi < -tol) {
          result.outcome = Outcome::kInfeasible;
          return result;
        }
        row_active[i] = 0;
        changed = true;
        continue;
      }
      if (active == 1) {
        double a = lo / last_coef, b = hi / last_coef;
        if (last_coef < 0) std::swap(a, b);
        tighten(last, a, b);
        if (lower[last] > upper[last] + 1e-7) {
          result.outcome = Outcome::kInfeasible;
          return result;
        }
        row_active[i] = 0;
        changed = true;
        continue;
      }
      if ((min_inf == 0 && min_act > hi + tol) ||
          (max_inf == 0 && max_act < lo - tol)) {
        result.outcome = Outcome::kInfeasible;
        return result;
      }
      const bool lower_ok = std::isinf(lo) || (min_inf == 0 && min_act >= lo - tol);
      const bool upper_ok = std::isinf(hi) || (max_inf == 0 && max_act <= hi + tol);
      if (lower_ok && upper_ok) {
        row_active[i] = 0;
        changed = true;
        continue;
      }
      const bool force_max = max_inf == 0 && !std::isinf(lo) &&
                             std::abs(max_act - lo) <= tol;
      const bool force_min = min_inf == 0 && !std::isinf(hi) &&
                             std::abs(min_act - hi) <= tol;
      if (force_max || force_min) {
        for (const auto& t : row.terms) {
          if (removed[t.var]) continue;
          const bool take_upper = (t.coef > 0) == force_max;
          fix(t.var, take_upper ? upper[t.var] : lower[t.var]);
        }
        row_active[i] = 0;
        changed = true;
      }
    }

    std::fill(uses.begin(), uses.end(), 0);
    for (int i = 0; i < m; ++i) {
      if (!row_active[i]) continue;
      for (const auto& t : problem.rows[i].terms) ++uses[t.var];
    }
    for (int j = 0; j < n; ++j) {
      if (removed[j] || uses[j] > 0) continue;
      const double c = problem.cost[j];
      double value;
      if (c > 0) {
        if (std::isinf(lower[j])) {
          result.outcome = Outcome::kUnbounded;
          return result;
        }
        value = lower[j];
      } else if (c < 0) {
        if (std::isinf(upper[j])) {
          result.outcome = Outcome::kUnbounded;
          return result;
        }
        value = upper[j];
      } else {
        value = !std::isinf(lower[j])   ? lower[j]
                : !std::isinf(upper[j]) ? upper[j]
                                        : 0.0;
      }
      fix(j, value);
      changed = true;
    }
  }

  std::vector<int> position(n, -1);
  LpProblem& reduced = result.reduced;
  reduced.constant = problem.constant;
  for (int j = 0; j < n; ++j) {
    if (removed[j]) {
      reduced.constant += problem.cost[j] * result.fixed[j];
      continue;
    }
    position[j] = static_cast<int>(result.columns.size());
    result.columns.push_back(j);
    reduced.cost.push_back(problem.cost[j]);
    reduced.lower.push_back(lower[j]);
    reduced.upper.push_back(upper[j]);
    reduced.integer.push_back(problem.integer[j]);
  }
  for (int i = 0; i < m; ++i) {
    if (!row_active[i]) continue;
    LpRow row;
    double shift = 0.0;
    for (const auto& t : problem.rows[i].terms) {
      if (removed[t.var]) {
        shift += t.coef * result.fixed[t.var];
      } else {
        row.terms.push_back({t.coef, position[t.var]});
      }
    }
    row.lower = problem.rows[i].lower - shift;
    row.upper = problem.rows[i].upper - shift;
    reduced.rows.push_back(std::move(row));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Bounded-variable revised primal simplex with an explicit basis inverse.

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPrimalTol = 1e-9;

class Simplex {
 public:
  Simplex(const LpProblem& lp, const LpOptions& options)
      : lp_(lp), options_(options), n_(lp.column_count()), m_(lp.row_count()) {
    columns_.resize(n_);
    for (int i = 0; i < m_; ++i) {
      for (const auto& t : lp.rows[i].terms) {
        columns_[t.var].push_back({t.coef, i});
      }
    }
  }

  LpResult run() {
    LpResult result;
    setup();
    // Phase 1 on the artificial columns.
    if (!artificial_row_.empty()) {
      cost_.assign(total(), 0.0);
      for (int k = 0; k < static_cast<int>(artificial_row_.size()); ++k) {
        cost_[n_ + m_ + k] = 1.0;
      }
      const auto status = iterate(result.iterations);
      if (status != LpStatus::kOptimal) {
        result.status = status;
        return result;
      }
      double infeasibility = 0.0;
      for (int k = 0; k < static_cast<int>(artificial_row_.size()); ++k) {
        infeasibility += x_[n_ + m_ + k];
      }
      if (infeasibility > 1e-7) {
        result.status = LpStatus::kInfeasible;
        return result;
      }
      for (int k = 0; k < static_cast<int>(artificial_row_.size()); ++k) {
        const int j = n_ + m_ + k;
        lower_[j] = upper_[j] = 0.0;
        if (position_[j] < 0) x_[j] = 0.0;
      }
    }
    cost_.assign(total(), 0.0);
    for (int j = 0; j < n_; ++j) cost_[j] = lp_.cost[j];
    const auto status = iterate(result.iterations);
    result.status = status;
    if (status != LpStatus::kOptimal) return result;
    result.x.assign(x_.begin(), x_.begin() + n_);
    for (int j = 0; j < n_; ++j) {
      result.x[j] = std::clamp(result.x[j], lp_.lower[j], lp_.upper[j]);
    }
    result.objective = lp_.constant;
    for (int j = 0; j < n_; ++j) result.objective += lp_.cost[j] * result.x[j];
    return result;
  }

 private:
  struct Entry {
    double coef;
    int row;
  };

  int total() const {
    return n_ + m_ + static_cast<int>(artificial_row_.size());
  }

  void setup() {
    lower_.assign(lp_.lower.begin(), lp_.lower.end());
    upper_.assign(lp_.upper.begin(), lp_.upper.end());
    x_.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
      x_[j] = !std::isinf(lower_[j])   ? lower_[j]
              : !std::isinf(upper_[j]) ? upper_[j]
                                       : 0.0;
    }
    std::vector<double> activity(m_, 0.0);
    for (int j = 0; j < n_; ++j) {
      if (x_[j] == 0.0) continue;
      for (const auto& e : columns_[j]) activity[e.row] += e.coef * x_[j];
    }
    head_.assign(m_, -1);
    std::vector<double> slack_value(m_);
    for (int i = 0; i < m_; ++i) {
      lower_.push_back(lp_.rows[i].lower);
      upper_.push_back(lp_.rows[i].upper);
      slack_value[i] = activity[i];
    }
    x_.insert(x_.end(), slack_value.begin(), slack_value.end());
    for (int i = 0; i < m_; ++i) {
      const int s = n_ + i;
      const double v = activity[i];
      if (v >= lower_[s] - kPrimalTol && v <= upper_[s] + kPrimalTol) {
        head_[i] = s;
        continue;
      }
      const double bound = v < lower_[s] ? lower_[s] : upper_[s];
      x_[s] = bound;
      const double sigma = bound > v ? 1.0 : -1.0;
      artificial_row_.push_back(i);
      artificial_sign_.push_back(sigma);
      lower_.push_back(0.0);
      upper_.push_back(kInfinity);
      x_.push_back(std::abs(bound - v));
      head_[i] = n_ + m_ + static_cast<int>(artificial_row_.size()) - 1;
    }
    position_.assign(total(), -1);
    for (int i = 0; i < m_; ++i) position_[head_[i]] = i;
    invert();
  }

  // Column j of [A | -I | diag(sigma)] as sparse entries.
  template <typename F>
  void for_column(int j, F&& f) const {
    if (j < n_) {
      for (const auto& e : columns_[j]) f(e.row, e.coef);
    } else if (j < n_ + m_) {
      f(j - n_, -1.0);
    } else {
      const int k = j - n_ - m_;
      f(artificial_row_[k], artificial_sign_[k]);
    }
  }

  // Unit columns (logicals and artificials) are peeled off so only the
  // structural kernel B[free rows, structural columns] is inverted densely.
  bool invert() {
    const int m = m_;
    std::vector<int> unit_row(m, -1);  // basis position of the unit column
    std::vector<double> unit_value(m, 0.0);
    std::vector<int> structural;
    for (int i = 0; i < m; ++i) {
      const int j = head_[i];
      if (j >= n_) {
        int row = -1;
        double v = 0.0;
        for_column(j, [&](int r, double c) { row = r, v = c; });
        if (unit_row[row] >= 0) return false;
        unit_row[row] = i;
        unit_value[row] = v;
      } else {
        structural.push_back(i);
      }
    }
    std::vector<int> free_rows;
    std::vector<int> free_index(m, -1);
    for (int r = 0; r < m; ++r) {
      if (unit_row[r] < 0) {
        free_index[r] = static_cast<int>(free_rows.size());
        free_rows.push_back(r);
      }
    }
    const int k = static_cast<int>(structural.size());
    if (static_cast<int>(free_rows.size()) != k) return false;

    // Kernel inverse by Gauss-Jordan.
    std::vector<double> a(static_cast<std::size_t>(k) * k, 0.0);
    std::vector<double> inv(static_cast<std::size_t>(k) * k, 0.0);
    for (int q = 0; q < k; ++q) {
      for_column(head_[structural[q]], [&](int r, double v) {
        if (free_index[r] >= 0) a[free_index[r] * k + q] = v;
      });
      inv[q * k + q] = 1.0;
    }
    for (int c = 0; c < k; ++c) {
      int pivot = c;
      for (int r = c + 1; r < k; ++r) {
        if (std::abs(a[r * k + c]) > std::abs(a[pivot * k + c])) pivot = r;
      }
      if (std::abs(a[pivot * k + c]) < 1e-12) return false;
      if (pivot != c) {
        for (int q = 0; q < k; ++q) {
          std::swap(a[c * k + q], a[pivot * k + q]);
          std::swap(inv[c * k + q], inv[pivot * k + q]);
        }
      }
      const double f0 = 1.0 / a[c * k + c];
      for (int q = 0; q < k; ++q) {
        a[c * k + q] *= f0;
        inv[c * k + q] *= f0;
      }
      for (int r = 0; r < k; ++r) {
        if (r == c) continue;
        const double f = a[r * k + c];
        if (f == 0.0) continue;
        for (int q = 0; q < k; ++q) {
          a[r * k + q] -= f * a[c * k + q];
          inv[r * k + q] -= f * inv[c * k + q];
        }
      }
    }

    // x_K = inv * b_free; x_unit(r) = (b_r - A_{r,K} x_K) / d_r.
    binv_.assign(static_cast<std::size_t>(m) * m, 0.0);
    for (int q = 0; q < k; ++q) {
      double* row = &binv_[static_cast<std::size_t>(structural[q]) * m];
      for (int f = 0; f < k; ++f) row[free_rows[f]] = inv[q * k + f];
    }
    for (int r = 0; r < m; ++r) {
      if (unit_row[r] >= 0) {
        binv_[static_cast<std::size_t>(unit_row[r]) * m + r] =
            1.0 / unit_value[r];
      }
    }
    for (int q = 0; q < k; ++q) {
      const double* kernel_row =
          &binv_[static_cast<std::size_t>(structural[q]) * m];
      for_column(head_[structural[q]], [&](int r, double v) {
        if (unit_row[r] < 0) return;
        double* row = &binv_[static_cast<std::size_t>(unit_row[r]) * m];
        const double f = v / unit_value[r];
        for (int fr : free_rows) row[fr] -= f * kernel_row[fr];
      });
    }
    return true;
  }

  // B x_B = -N x_N.
  void recompute_basics() {
    std::vector<double> rhs(m_, 0.0);
    for (int j = 0; j < total(); ++j) {
      if (position_[j] >= 0 || x_[j] == 0.0) continue;
      for_column(j, [&](int r, double v) { rhs[r] -= v * x_[j]; });
    }
    for (int i = 0; i < m_; ++i) {
      double s = 0.0;
      const double* row = &binv_[static_cast<std::size_t>(i) * m_];
      for (int k = 0; k < m_; ++k) s += row[k] * rhs[k];
      x_[head_[i]] = s;
    }
  }

  double residual() const {
    std::vector<double> r(m_, 0.0);
    for (int j = 0; j < total(); ++j) {
      if (x_[j] == 0.0) continue;
      for_column(j, [&](int row, double v) { r[row] += v * x_[j]; });
    }
    double worst = 0.0;
    for (double v : r) worst = std::max(worst, std::abs(v));
    return worst;
  }

  LpStatus iterate(long& iterations) {
    std::vector<double> y(m_), alpha(m_);
    int degenerate_run = 0;
    long local = 0;
    while (true) {
      if (iterations >= options_.iteration_limit) {
        return LpStatus::kIterationLimit;
      }
      if (options_.deadline && local % 32 == 0 &&
          Clock::now() >= *options_.deadline) {
        return LpStatus::kTimeLimit;
      }
      if (local > 0 && local % 100 == 0) {
        if (residual() > 1e-7) {
          if (!invert()) throw SolverError("singular basis");
        }
        recompute_basics();
      }
      const bool bland = degenerate_run >= options_.degenerate_switch;

      // Duals.
      std::fill(y.begin(), y.end(), 0.0);
      for (int i = 0; i < m_; ++i) {
        const double c = cost_[head_[i]];
        if (c == 0.0) continue;
        const double* row = &binv_[static_cast<std::size_t>(i) * m_];
        for (int k = 0; k < m_; ++k) y[k] += c * row[k];
      }

      // Pricing.
      int entering = -1;
      int direction = 0;
      double best = 0.0;
      for (int j = 0; j < total(); ++j) {
        if (position_[j] >= 0) continue;
        if (lower_[j] == upper_[j]) continue;
        double d = cost_[j];
        for_column(j, [&](int r, double v) { d -= y[r] * v; });
        int dir = 0;
        const bool at_lower = !std::isinf(lower_[j]) && x_[j] <= lower_[j];
        const bool at_upper = !std::isinf(upper_[j]) && x_[j] >= upper_[j];
        if (d < -kDualTol && !at_upper) {
          dir = 1;
        } else if (d > kDualTol && !at_lower) {
          dir = -1;
        }
        if (dir == 0) continue;
        if (bland) {
          entering = j;
          direction = dir;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          entering = j;
          direction = dir;
        }
      }
      if (entering < 0) return LpStatus::kOptimal;

      // Column in the current basis.
      std::fill(alpha.begin(), alpha.end(), 0.0);
      for_column(entering, [&](int r, double v) {
        for (int i = 0; i < m_; ++i) {
          alpha[i] += binv_[static_cast<std::size_t>(i) * m_ + r] * v;
        }
      });

      // Ratio test, x_B moves by -direction * alpha * t.
      double step = upper_[entering] - lower_[entering];
      int leaving = -1;
      double leaving_alpha = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double delta = -direction * alpha[i];
        if (std::abs(delta) < kPivotTol) continue;
        const int b = head_[i];
        double limit;
        if (delta < 0) {
          if (std::isinf(lower_[b])) continue;
          limit = std::max(0.0, x_[b] - lower_[b]) / -delta;
        } else {
          if (std::isinf(upper_[b])) continue;
          limit = std::max(0.0, upper_[b] - x_[b]) / delta;
        }
        if (limit < step - 1e-12) {
          step = limit;
          leaving = i;
          leaving_alpha = alpha[i];
        } else if (leaving >= 0 && limit <= step + 1e-12) {
          const bool better = bland
                                  ? b < head_[leaving]
                                  : std::abs(alpha[i]) > std::abs(leaving_alpha);
          if (better) {
            step = std::min(step, limit);
            leaving = i;
            leaving_alpha = alpha[i];
          }
        }
      }
      if (std::isinf(step)) return LpStatus::kUnbounded;

      ++iterations;
      ++local;
      degenerate_run = step < 1e-12 ? degenerate_run + 1 : 0;

      x_[entering] += direction * step;
      for (int i = 0; i < m_; ++i) {
        if (alpha[i] != 0.0) x_[head_[i]] -= direction * alpha[i] * step;
      }
      if (leaving < 0) {
        x_[entering] = direction > 0 ? upper_[entering] : lower_[entering];
        continue;
      }

      // Leaving variable sits at the bound it reached.
      const int out = head_[leaving];
      const double delta = -direction * alpha[leaving];
      x_[out] = delta < 0 ? lower_[out] : upper_[out];
      head_[leaving] = entering;
      position_[entering] = leaving;
      position_[out] = -1;

      const std::size_t m = m_;
      double* pivot_row = &binv_[leaving * m];
      const double inv = 1.0 / alpha[leaving];
      for (std::size_t k = 0; k < m; ++k) pivot_row[k] *= inv;
      for (int i = 0; i < m_; ++i) {
        if (i == leaving || alpha[i] == 0.0) continue;
        const double f = alpha[i];
        double* row = &binv_[i * m];
        for (std::size_t k = 0; k < m; ++k) row[k] -= f * pivot_row[k];
      }
    }
  }

  const LpProblem& lp_;
  const LpOptions& options_;
  int n_;
  int m_;
  std::vector<std::vector<Entry>> columns_;
  std::vector<int> artificial_row_;
  std::vector<double> artificial_sign_;
  std::vector<double> lower_, upper_, x_, cost_;
  std::vector<int> head_;
  std::vector<int> position_;
  std::vector<double> binv_;
};

}  // namespace

LpResult solve_lp(const LpProblem& problem, const LpOptions& options) {
  if (!options.presolve) {
    for (int j = 0; j < problem.column_count(); ++j) {
      if (problem.lower[j] > problem.upper[j]) return {};
    }
    return Simplex(problem, options).run();
  }
  const auto pre = presolve(problem, options.round_integer_bounds);
  LpResult result;
  if (pre.outcome == PresolveResult::Outcome::kInfeasible) {
    result.status = LpStatus::kInfeasible;
    return result;
  }
  if (pre.outcome == PresolveResult::Outcome::kUnbounded) {
    result.status = LpStatus::kUnbounded;
    return result;
  }
  LpResult inner;
  if (pre.reduced.column_count() == 0 && pre.reduced.row_count() == 0) {
    inner.status = LpStatus::kOptimal;
  } else {
    inner = Simplex(pre.reduced, options).run();
  }
  result.status = inner.status;
  result.iterations = inner.iterations;
  if (inner.status != LpStatus::kOptimal) return result;
  result.x = pre.fixed;
  for (std::size_t k = 0; k < pre.columns.size(); ++k) {
    result.x[pre.columns[k]] = inner.x[k];
  }
  result.objective = problem.constant;
  for (int j = 0; j < problem.column_count(); ++j) {
    result.objective += problem.cost[j] * result.x[j];
  }
  return result;
}

LpResult solve_lp(const MilpModel& model, const LpOptions& options) {
  return solve_lp(relaxation(model), options);
}

}  // namespace ctt
