#include "ctt/control.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "ctt/error.hpp"
#include "ctt/solver.hpp"

namespace ctt {

using nlohmann::json;

std::string_view to_string(Strategy strategy) {
  return strategy == Strategy::kContract ? "contract" : "anytime";
}

std::string_view to_string(SurfaceKind kind) {
  return kind == SurfaceKind::kSurface ? "surface" : "surface2";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
  if (name == "contract") return Strategy::kContract;
  if (name == "anytime") return Strategy::kAnytime;
  return std::nullopt;
}

std::optional<SurfaceKind> parse_surface_kind(std::string_view name) {
  if (name == "surface") return SurfaceKind::kSurface;
  if (name == "surface2") return SurfaceKind::kSurface2;
  return std::nullopt;
}

std::string_view to_string(BoundSource source) {
  return source == BoundSource::kSurface ? "surface" : "dive";
}

std::string_view to_string(DiveOutcome outcome) {
  switch (outcome) {
    case DiveOutcome::kImproved:
      return "improved";
    case DiveOutcome::kNoImprovement:
      return "no-improvement";
    case DiveOutcome::kCutOff:
      return "cut-off";
    case DiveOutcome::kInfeasible:
      return "infeasible";
    case DiveOutcome::kSkipped:
      return "skipped";
  }
  return "?";
}

// ---------------------------------------------------------------------------

StrategyConfig StrategyConfig::scaled(double total_time) {
  StrategyConfig config;
  config.total_time = total_time;
  config.surface_time = total_time * 600.0 / kCpuUnitSeconds;
  config.dive_time = {
      {NeighborhoodKind::kPeriodFixed, total_time * 180.0 / kCpuUnitSeconds}};
  config.dives_per_kind = 1;
  return config;
}

StrategyConfig StrategyConfig::ten_units() {
  StrategyConfig config;
  config.surface = SurfaceKind::kSurface2;
  config.total_time = 10 * kCpuUnitSeconds;
  config.surface_time = 3420.0;
  config.dive_sequence = {NeighborhoodKind::kPeriodFixed,
                          NeighborhoodKind::kDayFixed};
  config.dive_time = {{NeighborhoodKind::kPeriodFixed, 180.0},
                      {NeighborhoodKind::kDayFixed, 3600.0}};
  config.dives_per_kind = 1;
  return config;
}

double StrategyConfig::dive_budget(NeighborhoodKind kind) const {
  auto it = dive_time.find(kind);
  return it == dive_time.end() ? total_time : it->second;
}

void StrategyConfig::validate() const {
  if (dive_sequence.empty()) {
    throw ValidationError("dive sequence must not be empty");
  }
  std::vector<NeighborhoodKind> seen;
  for (auto kind : dive_sequence) {
    if (std::find(seen.begin(), seen.end(), kind) != seen.end()) {
      throw ValidationError("dive kind " + std::string(to_string(kind)) +
                            " listed twice");
    }
    seen.push_back(kind);
  }
  if (dive_gap_stop < 0.0 || dive_gap_stop >= 1.0) {
    throw ValidationError("dive gap stop must lie in [0, 1)");
  }
  if (dives_per_kind && *dives_per_kind < 1) {
    throw ValidationError("dives per kind must be positive");
  }
  if (deterministic) {
    if (!surface_node_limit || !dive_node_limit) {
      throw ValidationError("deterministic runs need surface and dive node limits");
    }
  } else {
    if (!(surface_time > 0.0) || !(total_time > 0.0)) {
      throw ValidationError("time budgets must be positive");
    }
    if (total_time < surface_time) {
      throw ValidationError("total time must be at least the surface time");
    }
    for (const auto& [kind, seconds] : dive_time) {
      if (!(seconds > 0.0)) {
        throw ValidationError("dive budgets must be positive");
      }
    }
  }
  for (auto limit : {surface_node_limit, dive_node_limit}) {
    if (limit && *limit < 1) throw ValidationError("node limits must be positive");
  }
}

// ---------------------------------------------------------------------------

BoundsLedger::BoundsLedger(const Instance& instance, bool record_time)
    : instance_(instance), record_time_(record_time), start_(Clock::now()) {}

double BoundsLedger::elapsed() const {
  return std::chrono::duration<double>(Clock::now() - start_).count();
}

void BoundsLedger::check() const {
  if (upper_ && lower_ && *lower_ > *upper_) {
    throw SolverError("lower bound " + std::to_string(*lower_) +
                      " exceeds upper bound " + std::to_string(*upper_));
  }
}

bool BoundsLedger::offer_upper(const Solution& solution,
                               const std::string& detail) {
  const auto verdict = check_hard(instance_, solution);
  if (!verdict.ok()) {
    throw SolverError("dive returned an infeasible timetable: " +
                      verdict.violations.front().detail);
  }
  const auto value =
      objective(instance_.weights(), penalties(instance_, solution));
  if (upper_ && value >= *upper_) return false;
  upper_ = value;
  incumbent_ = solution;
  note("upper_bound", static_cast<double>(value), detail);
  check();
  return true;
}

bool BoundsLedger::offer_lower(std::int64_t value, BoundSource source,
                               const std::string& detail) {
  if (lower_ && value <= *lower_) return false;
  lower_ = value;
  lower_source_ = source;
  note("lower_bound", static_cast<double>(value), detail);
  check();
  return true;
}

void BoundsLedger::note(const std::string& kind, double value,
                        const std::string& detail) {
  history_.push_back({record_time_ ? elapsed() : 0.0, kind, value, detail});
}

// ---------------------------------------------------------------------------

std::vector<Neighborhood> order_dives(std::vector<Neighborhood> pending,
                                      std::span<const NeighborhoodKind> order) {
  auto rank = [&](NeighborhoodKind kind) {
    auto it = std::find(order.begin(), order.end(), kind);
    if (it == order.end()) {
      throw ValidationError("dive kind " + std::string(to_string(kind)) +
                            " is not in the dive sequence");
    }
    return static_cast<int>(it - order.begin());
  };
  for (const auto& n : pending) rank(n.kind);
  std::stable_sort(pending.begin(), pending.end(),
                   [&](const Neighborhood& a, const Neighborhood& b) {
                     const int ra = rank(a.kind), rb = rank(b.kind);
                     if (ra != rb) return ra < rb;
                     if (a.source_objective != b.source_objective) {
                       return a.source_objective < b.source_objective;
                     }
                     return a.discovery > b.discovery;
                   });
  return pending;
}

// ---------------------------------------------------------------------------

namespace {

struct SurfaceFound {
  PeriodAssignment basis;
  double objective = 0.0;
  int discovery = 0;
};

std::string dive_label(const Neighborhood& n) {
  return std::string(to_string(n.kind)) + "#" + std::to_string(n.discovery);
}

class Run {
 public:
  Run(const Instance& instance, const StrategyConfig& config)
      : instance_(instance),
        config_(config),
        ledger_(instance, !config.deterministic) {
    config_.validate();
    if (config.surface == SurfaceKind::kSurface2) {
      multirooms_ = build_multirooms(instance, config.multiroom_policy);
      surface_ = build_surface2(instance, multirooms_);
    } else {
      surface_ = build_surface(instance, config.surface_options);
    }
    if (config.surface_cuts) {
      const auto graph = build_conflict_graph(instance);
      add_clique_cuts(instance, surface_, graph, greedy_clique_cover(graph));
      add_implied_bound_cuts(instance, surface_);
    }
    report_.instance = instance.name();
    report_.strategy = config.strategy;
    report_.surface = config.surface;
    report_.deterministic = config.deterministic;
  }

  RunReport contract() {
    std::vector<SurfaceFound> found;
    SolveConfig sc = surface_config(config_.surface_time);
    sc.on_incumbent = [&](const MilpSolution& s) {
      found.push_back({decode_surface(instance_, surface_, s), s.objective_value,
                       static_cast<int>(found.size())});
      ledger_.note("surface", s.objective_value,
                   "solution#" + std::to_string(found.size() - 1));
      return true;
    };
    const auto result = branch_and_bound(surface_, sc);
    if (!finish_surface(result)) return finish();
    report_.surface_solutions = static_cast<int>(found.size());

    std::vector<Neighborhood> pending;
    for (auto kind : config_.dive_sequence) {
      for (const auto& f : found) {
        pending.push_back(make_neighborhood(instance_, kind, f.basis,
                                            f.objective, f.discovery));
      }
    }
    pending = order_dives(std::move(pending), config_.dive_sequence);
    std::map<NeighborhoodKind, int> started;
    for (const auto& n : pending) {
      if (config_.dives_per_kind && started[n.kind] >= *config_.dives_per_kind) {
        continue;
      }
      ++started[n.kind];
      if (out_of_time()) {
        DiveRecord skipped;
        skipped.kind = n.kind;
        skipped.discovery = n.discovery;
        skipped.source_objective = n.source_objective;
        report_.dives.push_back(skipped);
        continue;
      }
      dive(n);
    }
    return finish();
  }

  RunReport anytime() {
    int discovery = 0;
    SolveConfig sc = surface_config(config_.total_time);
    sc.on_incumbent = [&](const MilpSolution& s) {
      const auto basis = decode_surface(instance_, surface_, s);
      const int index = discovery++;
      ledger_.note("surface", s.objective_value,
                   "solution#" + std::to_string(index));
      for (auto kind : config_.dive_sequence) {
        if (out_of_time()) return false;
        dive(make_neighborhood(instance_, kind, basis, s.objective_value, index));
      }
      return !out_of_time();
    };
    const auto result = branch_and_bound(surface_, sc);
    report_.surface_solutions = discovery;
    finish_surface(result);
    return finish();
  }

 private:
  SolveConfig surface_config(double seconds) const {
    SolveConfig sc;
    if (config_.deterministic) {
      sc.node_limit = config_.surface_node_limit;
    } else {
      sc.time_limit = seconds;
      sc.node_limit = config_.surface_node_limit;
    }
    return sc;
  }

  bool out_of_time() const {
    return !config_.deterministic && ledger_.elapsed() >= config_.total_time;
  }

  // Records the surface outcome; false when the instance is infeasible.
  bool finish_surface(const SolveResult& result) {
    report_.surface_status = result.status;
    report_.surface_nodes = result.nodes;
    if (result.status == SolveStatus::kInfeasible) {
      report_.infeasible = true;
      ledger_.note("surface", 0.0, "infeasible");
      return false;
    }
    if (config_.surface_options.stratified_room_bounds &&
        config_.surface == SurfaceKind::kSurface) {
      ledger_.note("surface", result.lower_bound,
                   "bound not valid under stratified room bounds");
    } else if (std::isfinite(result.lower_bound)) {
      // All objective coefficients are integers.
      const auto lb = static_cast<std::int64_t>(
          std::ceil(std::max(0.0, result.lower_bound) - 1e-6));
      ledger_.offer_lower(lb, BoundSource::kSurface, "surface");
    }
    return true;
  }

  void dive(const Neighborhood& n) {
    if (!monolithic_) monolithic_ = build_monolithic(instance_);
    DiveRecord record;
    record.kind = n.kind;
    record.discovery = n.discovery;
    record.source_objective = n.source_objective;
    SolveConfig sc;
    if (ledger_.best_upper()) {
      sc.cutoff = static_cast<double>(*ledger_.best_upper());
      record.cutoff = sc.cutoff;
    }
    sc.gap_target = config_.dive_gap_stop;
    if (config_.deterministic) {
      sc.node_limit = config_.dive_node_limit;
    } else {
      const double remaining = config_.total_time - ledger_.elapsed();
      sc.time_limit = std::max(1e-3, std::min(config_.dive_budget(n.kind),
                                              remaining));
      sc.node_limit = config_.dive_node_limit;
    }
    const auto model = build_dive(instance_, *monolithic_, n);
    const auto result = branch_and_bound(model, sc);
    record.nodes = result.nodes;
    record.time = config_.deterministic ? 0.0 : result.wall_time;
    if (result.incumbent) {
      const auto solution = decode_monolithic(instance_, model, *result.incumbent);
      const bool improved = ledger_.offer_upper(solution, dive_label(n));
      record.outcome =
          improved ? DiveOutcome::kImproved : DiveOutcome::kNoImprovement;
      record.objective =
          objective(instance_.weights(), penalties(instance_, solution));
    } else if (result.status == SolveStatus::kCutoff) {
      record.outcome = DiveOutcome::kCutOff;
    } else if (result.status == SolveStatus::kInfeasible) {
      record.outcome = DiveOutcome::kInfeasible;
    } else {
      record.outcome = DiveOutcome::kNoImprovement;
    }
    ledger_.note("dive", record.objective ? static_cast<double>(*record.objective)
                                          : 0.0,
                 dive_label(n) + " " + std::string(to_string(record.outcome)));
    report_.dives.push_back(record);
  }

  RunReport finish() {
    report_.best_upper = ledger_.best_upper();
    report_.best_lower = ledger_.best_lower();
    report_.lower_source = ledger_.lower_source();
    report_.solution = ledger_.incumbent();
    if (report_.solution) {
      report_.penalties = penalties(instance_, *report_.solution);
    }
    if (report_.best_upper && report_.best_lower) {
      report_.gap = gap(*report_.best_upper, *report_.best_lower);
    }
    report_.events = ledger_.history();
    report_.wall_time = config_.deterministic ? 0.0 : ledger_.elapsed();
    return report_;
  }

  const Instance& instance_;
  StrategyConfig config_;
  BoundsLedger ledger_;
  std::vector<MultiRoom> multirooms_;
  MilpModel surface_;
  std::optional<MilpModel> monolithic_;
  RunReport report_;
};

}  // namespace

RunReport run_contract(const Instance& instance, const StrategyConfig& config) {
  if (config.strategy != Strategy::kContract) {
    throw ValidationError("run_contract needs the contract strategy");
  }
  return Run(instance, config).contract();
}

RunReport run_anytime(const Instance& instance, const StrategyConfig& config) {
  if (config.strategy != Strategy::kAnytime) {
    throw ValidationError("run_anytime needs the anytime strategy");
  }
  return Run(instance, config).anytime();
}

RunReport run_strategy(const Instance& instance, const StrategyConfig& config) {
  return config.strategy == Strategy::kContract ? run_contract(instance, config)
                                                : run_anytime(instance, config);
}

// ---------------------------------------------------------------------------
// Reports

namespace {

std::string seconds(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", t);
  return buf;
}

std::string number(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

json event_json(const LedgerEvent& e, bool deterministic) {
  json j;
  if (!deterministic) j["time"] = e.time;
  j["kind"] = e.kind;
  j["value"] = e.value;
  j["detail"] = e.detail;
  return j;
}

}  // namespace

std::string report_text(const RunReport& r) {
  std::ostringstream out;
  out << "instance     " << r.instance << "\n";
  out << "strategy     " << to_string(r.strategy) << " on "
      << to_string(r.surface) << "\n";
  if (r.infeasible) {
    out << "result       infeasible (surface has no solution)\n";
  }
  if (r.best_upper) {
    out << "objective    " << *r.best_upper << "\n";
    out << "penalties    capacity " << r.penalties.capacity << ", spread "
        << r.penalties.spread << ", compactness " << r.penalties.compactness
        << ", stability " << r.penalties.stability << "\n";
  } else {
    out << "objective    none\n";
  }
  if (r.best_lower) {
    out << "lower bound  " << *r.best_lower << " ("
        << to_string(*r.lower_source) << ")\n";
  } else {
    out << "lower bound  none\n";
  }
  if (r.gap) out << "gap          " << r.gap->to_string() << "\n";
  out << "surface      " << to_string(r.surface_status) << ", "
      << r.surface_nodes << " nodes, " << r.surface_solutions
      << " solutions\n";
  for (std::size_t i = 0; i < r.dives.size(); ++i) {
    const auto& d = r.dives[i];
    out << "dive " << i + 1 << "       " << to_string(d.kind) << " on #"
        << d.discovery << " (surface " << number(d.source_objective) << "): "
        << to_string(d.outcome);
    if (d.objective) out << " " << *d.objective;
    out << ", " << d.nodes << " nodes";
    if (!r.deterministic) out << ", " << seconds(d.time) << " s";
    out << "\n";
  }
  if (!r.deterministic) out << "wall time    " << seconds(r.wall_time) << " s\n";
  out << "events\n";
  for (const auto& e : r.events) {
    out << "  ";
    if (!r.deterministic) out << seconds(e.time) << " ";
    out << e.kind << " " << number(e.value) << " " << e.detail << "\n";
  }
  return out.str();
}

std::string report_json(const RunReport& r) {
  json j;
  j["instance"] = r.instance;
  j["strategy"] = std::string(to_string(r.strategy));
  j["surface"] = std::string(to_string(r.surface));
  j["infeasible"] = r.infeasible;
  j["surface_status"] = std::string(to_string(r.surface_status));
  j["surface_nodes"] = r.surface_nodes;
  j["surface_solutions"] = r.surface_solutions;
  j["objective"] = r.best_upper ? json(*r.best_upper) : json(nullptr);
  j["penalties"] = {{"capacity", r.penalties.capacity},
                    {"spread", r.penalties.spread},
                    {"compactness", r.penalties.compactness},
                    {"stability", r.penalties.stability}};
  j["lower_bound"] = r.best_lower ? json(*r.best_lower) : json(nullptr);
  j["lower_bound_source"] = r.lower_source
                                ? json(std::string(to_string(*r.lower_source)))
                                : json(nullptr);
  if (r.gap) j["gap"] = r.gap->to_string();
  j["deterministic"] = r.deterministic;
  if (!r.deterministic) j["wall_time"] = r.wall_time;
  j["dives"] = json::array();
  for (const auto& d : r.dives) {
    json dj{{"kind", std::string(to_string(d.kind))},
            {"discovery", d.discovery},
            {"source_objective", d.source_objective},
            {"outcome", std::string(to_string(d.outcome))},
            {"nodes", d.nodes}};
    dj["cutoff"] = d.cutoff ? json(*d.cutoff) : json(nullptr);
    dj["objective"] = d.objective ? json(*d.objective) : json(nullptr);
    if (!r.deterministic) dj["time"] = d.time;
    j["dives"].push_back(dj);
  }
  j["events"] = json::array();
  for (const auto& e : r.events) j["events"].push_back(event_json(e, r.deterministic));
  return j.dump(2) + "\n";
}

std::string report_jsonl(const RunReport& r) {
  std::string out;
  for (const auto& e : r.events) out += event_json(e, r.deterministic).dump() + "\n";
  return out;
}

RunReport parse_report_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(0, std::string("report is not JSON: ") + e.what());
  }
  try {
    RunReport r;
    r.instance = j.at("instance").get<std::string>();
    auto strategy = parse_strategy(j.at("strategy").get<std::string>());
    auto surface = parse_surface_kind(j.at("surface").get<std::string>());
    if (!strategy || !surface) throw ParseError(0, "unknown strategy or surface");
    r.strategy = *strategy;
    r.surface = *surface;
    r.infeasible = j.at("infeasible").get<bool>();
    const auto status = j.at("surface_status").get<std::string>();
    bool known = false;
    for (auto s : {SolveStatus::kOptimal, SolveStatus::kFeasible,
                   SolveStatus::kInfeasible, SolveStatus::kUnbounded,
                   SolveStatus::kLimitReached, SolveStatus::kCutoff}) {
      if (status == to_string(s)) {
        r.surface_status = s;
        known = true;
      }
    }
    if (!known) throw ParseError(0, "unknown surface status " + status);
    r.surface_nodes = j.at("surface_nodes").get<long>();
    r.surface_solutions = j.at("surface_solutions").get<int>();
    if (!j.at("objective").is_null()) r.best_upper = j["objective"].get<std::int64_t>();
    const auto& p = j.at("penalties");
    r.penalties = {p.at("capacity").get<std::int64_t>(),
                   p.at("spread").get<std::int64_t>(),
                   p.at("compactness").get<std::int64_t>(),
                   p.at("stability").get<std::int64_t>()};
    if (!j.at("lower_bound").is_null()) {
      r.best_lower = j["lower_bound"].get<std::int64_t>();
    }
    if (!j.at("lower_bound_source").is_null()) {
      r.lower_source = j["lower_bound_source"].get<std::string>() == "surface"
                           ? BoundSource::kSurface
                           : BoundSource::kDive;
    }
    if (r.best_upper && r.best_lower) r.gap = gap(*r.best_upper, *r.best_lower);
    r.deterministic = j.at("deterministic").get<bool>();
    if (j.contains("wall_time")) r.wall_time = j["wall_time"].get<double>();
    for (const auto& dj : j.at("dives")) {
      DiveRecord d;
      auto kind = parse_neighborhood_kind(dj.at("kind").get<std::string>());
      if (!kind) throw ParseError(0, "unknown dive kind");
      d.kind = *kind;
      d.discovery = dj.at("discovery").get<int>();
      d.source_objective = dj.at("source_objective").get<double>();
      const auto outcome = dj.at("outcome").get<std::string>();
      known = false;
      for (auto o : {DiveOutcome::kImproved, DiveOutcome::kNoImprovement,
                     DiveOutcome::kCutOff, DiveOutcome::kInfeasible,
                     DiveOutcome::kSkipped}) {
        if (outcome == to_string(o)) {
          d.outcome = o;
          known = true;
        }
      }
      if (!known) throw ParseError(0, "unknown dive outcome " + outcome);
      d.nodes = dj.at("nodes").get<long>();
      if (!dj.at("cutoff").is_null()) d.cutoff = dj["cutoff"].get<double>();
      if (!dj.at("objective").is_null()) {
        d.objective = dj["objective"].get<std::int64_t>();
      }
      if (dj.contains("time")) d.time = dj["time"].get<double>();
      r.dives.push_back(d);
    }
    for (const auto& ej : j.at("events")) {
      LedgerEvent e;
      if (ej.contains("time")) e.time = ej["time"].get<double>();
      e.kind = ej.at("kind").get<std::string>();
      e.value = ej.at("value").get<double>();
      e.detail = ej.at("detail").get<std::string>();
      r.events.push_back(e);
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("malformed report: ") + e.what());
  }
}

}  // namespace ctt
