#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctt/evaluation.hpp"
#include "ctt/formulations.hpp"
#include "ctt/instance.hpp"
#include "ctt/lp.hpp"

namespace ctt {

enum class Strategy : std::uint8_t { kContract, kAnytime };
enum class SurfaceKind : std::uint8_t { kSurface, kSurface2 };

std::string_view to_string(Strategy strategy);
std::string_view to_string(SurfaceKind kind);
std::optional<Strategy> parse_strategy(std::string_view name);
std::optional<SurfaceKind> parse_surface_kind(std::string_view name);

inline constexpr double kCpuUnitSeconds = 780.0;

struct StrategyConfig {
  Strategy strategy = Strategy::kContract;
  SurfaceKind surface = SurfaceKind::kSurface;
  MultiRoomPolicy multiroom_policy = MultiRoomPolicy::kMedianSplit;
  SurfaceOptions surface_options;
  bool surface_cuts = false;  // clique cover and implied bounds on the surface
  std::vector<NeighborhoodKind> dive_sequence{NeighborhoodKind::kPeriodFixed};

  double surface_time = 600.0;
  std::map<NeighborhoodKind, double> dive_time{
      {NeighborhoodKind::kPeriodFixed, 180.0}};
  double total_time = 780.0;
  double dive_gap_stop = 0.02;
  std::optional<int> dives_per_kind;

  // Node limits instead of clocks: runs are reproducible and reports carry
  // no timings.
  bool deterministic = false;
  std::optional<long> surface_node_limit;
  std::optional<long> dive_node_limit;

  // Surface for 600/780 of the total and one 180/780 PeriodFixed dive.
  static StrategyConfig scaled(double total_time);
  // Surface2 for 3420 s, then PeriodFixed 180 s and DayFixed 3600 s.
  static StrategyConfig ten_units();

  double dive_budget(NeighborhoodKind kind) const;
  void validate() const;  // throws ValidationError
};

enum class BoundSource : std::uint8_t { kSurface, kDive };
std::string_view to_string(BoundSource source);

struct LedgerEvent {
  double time = 0.0;
  std::string kind;  // lower_bound, upper_bound, dive, surface
  double value = 0.0;
  std::string detail;

  bool operator==(const LedgerEvent&) const = default;
};

// Global bounds with an append-only history. Upper bounds come only from
// solutions re-evaluated here; monotonicity is checked on every event.
class BoundsLedger {
 public:
  BoundsLedger(const Instance& instance, bool record_time);

  // True when the solution improves the upper bound. Throws SolverError for
  // a hard-infeasible solution.
  bool offer_upper(const Solution& solution, const std::string& detail);
  bool offer_lower(std::int64_t value, BoundSource source,
                   const std::string& detail);
  void note(const std::string& kind, double value, const std::string& detail);

  std::optional<std::int64_t> best_upper() const { return upper_; }
  std::optional<std::int64_t> best_lower() const { return lower_; }
  const std::optional<Solution>& incumbent() const { return incumbent_; }
  std::optional<BoundSource> lower_source() const { return lower_source_; }
  const std::vector<LedgerEvent>& history() const { return history_; }
  double elapsed() const;

 private:
  void check() const;

  const Instance& instance_;
  bool record_time_;
  Clock::time_point start_;
  std::optional<std::int64_t> upper_;
  std::optional<std::int64_t> lower_;
  std::optional<BoundSource> lower_source_;
  std::optional<Solution> incumbent_;
  std::vector<LedgerEvent> history_;
};

// Stable order by kind rank, surface objective ascending, then most recent
// discovery first. Throws ValidationError for a kind missing from `order`.
std::vector<Neighborhood> order_dives(std::vector<Neighborhood> pending,
                                      std::span<const NeighborhoodKind> order);

enum class DiveOutcome : std::uint8_t {
  kImproved,
  kNoImprovement,
  kCutOff,
  kInfeasible,
  kSkipped,
};
std::string_view to_string(DiveOutcome outcome);

struct DiveRecord {
  NeighborhoodKind kind = NeighborhoodKind::kPeriodFixed;
  int discovery = 0;
  double source_objective = 0.0;
  std::optional<double> cutoff;
  DiveOutcome outcome = DiveOutcome::kSkipped;
  std::optional<std::int64_t> objective;
  long nodes = 0;
  double time = 0.0;

  bool operator==(const DiveRecord&) const = default;
};

struct RunReport {
  std::string instance;
  Strategy strategy = Strategy::kContract;
  SurfaceKind surface = SurfaceKind::kSurface;
  bool infeasible = false;  // surface proved no timetable exists
  SolveStatus surface_status = SolveStatus::kInfeasible;
  long surface_nodes = 0;
  int surface_solutions = 0;
  std::optional<std::int64_t> best_upper;
  std::optional<Solution> solution;
  PenaltyVector penalties;
  std::optional<std::int64_t> best_lower;
  std::optional<BoundSource> lower_source;
  std::optional<GapPercent> gap;
  std::vector<DiveRecord> dives;
  std::vector<LedgerEvent> events;
  bool deterministic = false;
  double wall_time = 0.0;
};

RunReport run_contract(const Instance& instance, const StrategyConfig& config);
RunReport run_anytime(const Instance& instance, const StrategyConfig& config);
// Dispatches on config.strategy.
RunReport run_strategy(const Instance& instance, const StrategyConfig& config);

std::string report_text(const RunReport& report);
std::string report_json(const RunReport& report);
// One JSON object per ledger event.
std::string report_jsonl(const RunReport& report);
// Reads back everything report_json writes except the solution itself.
RunReport parse_report_json(std::string_view text);

}  // namespace ctt
