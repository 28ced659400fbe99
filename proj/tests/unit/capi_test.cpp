#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "ctt/ctt.h"
#include "fixtures.hpp"

namespace {

std::string take(char* text) {
  std::string out = text ? text : "";
  ctt_string_free(text);
  return out;
}

ctt_instance* load(std::string_view text) {
  ctt_instance* instance = nullptr;
  REQUIRE(ctt_instance_parse(text.data(), text.size(), &instance) == CTT_OK);
  return instance;
}

ctt_solution* solution_of(const ctt_instance* instance, std::string_view text) {
  ctt_solution* s = nullptr;
  REQUIRE(ctt_solution_parse(instance, text.data(), text.size(), &s) == CTT_OK);
  return s;
}

}  // namespace

TEST_CASE("evaluate through the C interface") {
  auto* toy = load(ctt::testing::kToyInstance);
  auto* plain = load(ctt::testing::kPlainInstance);
  auto* s = solution_of(toy, ctt::testing::kToySolution);
  auto* p = solution_of(plain, ctt::testing::kToySolution);

  ctt_evaluation e{};
  char* violations = nullptr;
  REQUIRE(ctt_evaluate(toy, s, &e, &violations) == CTT_OK);
  CHECK(take(violations).empty());
  CHECK(e.feasible == 1);
  CHECK(e.capacity == 4);
  CHECK(e.spread == 0);
  CHECK(e.compactness == 3);
  CHECK(e.stability == 1);
  CHECK(e.objective == 11);
  REQUIRE(ctt_evaluate(plain, p, &e, nullptr) == CTT_OK);
  CHECK(e.objective == 5);

  ctt_weights w{1, 5, 0, 1};
  REQUIRE(ctt_instance_set_weights(toy, &w) == CTT_OK);
  REQUIRE(ctt_evaluate(toy, s, &e, nullptr) == CTT_OK);
  CHECK(e.objective == 5);

  char* written = nullptr;
  REQUIRE(ctt_solution_write(toy, s, &written) == CTT_OK);
  auto* again = solution_of(toy, take(written));
  REQUIRE(ctt_evaluate(toy, again, &e, nullptr) == CTT_OK);
  CHECK(e.objective == 5);

  ctt_stats st{};
  REQUIRE(ctt_instance_stats(toy, &st) == CTT_OK);
  CHECK(std::string(st.name) == "toy");
  CHECK(st.events == 5);
  CHECK(st.edges == 3);
  CHECK(st.density == doctest::Approx(100.0));

  ctt_solution_free(again);
  ctt_solution_free(p);
  ctt_solution_free(s);
  ctt_instance_free(plain);
  ctt_instance_free(toy);
}

TEST_CASE("errors carry codes and lines") {
  ctt_instance* instance = nullptr;
  const std::string truncated = "Name: x\nCourses: 1\nRooms: 1\n";
  CHECK(ctt_instance_parse(truncated.data(), truncated.size(), &instance) ==
        CTT_ERR_PARSE);
  CHECK(instance == nullptr);
  CHECK(ctt_last_error_line() > 0);
  CHECK(std::string(ctt_last_error()).size() > 0);

  CHECK(ctt_instance_load("/nonexistent/file.ctt", &instance) == CTT_ERR_IO);
  CHECK(ctt_instance_parse(nullptr, 0, &instance) == CTT_ERR_ARGUMENT);

  auto* toy = load(ctt::testing::kToyInstance);
  ctt_model* model = nullptr;
  CHECK(ctt_model_build(toy, "nope", nullptr, nullptr, &model) == CTT_ERR_ARGUMENT);
  CHECK(ctt_model_build(toy, "period-fixed", nullptr, nullptr, &model) ==
        CTT_ERR_ARGUMENT);
  ctt_solution* s = nullptr;
  const std::string bad = "zz rA 0 0\n";
  CHECK(ctt_solution_parse(toy, bad.data(), bad.size(), &s) != CTT_OK);
  char* gap = nullptr;
  REQUIRE(ctt_gap(9, 5, &gap) == CTT_OK);
  CHECK(take(gap) == "44.4%");
  REQUIRE(ctt_gap(36, 35, &gap) == CTT_OK);
  CHECK(take(gap) == "2.8%");
  ctt_instance_free(toy);
}

TEST_CASE("models round-trip through MPS and solve") {
  auto* plain = load(ctt::testing::kPlainInstance);
  auto* s = solution_of(plain, ctt::testing::kToySolution);
  ctt_build_options options;
  ctt_build_options_init(&options);
  options.implied_bound_cuts = 1;
  ctt_model* model = nullptr;
  REQUIRE(ctt_model_build(plain, "monolithic", nullptr, &options, &model) == CTT_OK);
  int vars = 0, rows = 0;
  REQUIRE(ctt_model_size(model, &vars, &rows) == CTT_OK);
  CHECK(vars > 0);
  CHECK(rows > 0);

  char* values = nullptr;
  REQUIRE(ctt_model_encode(plain, model, s, &values) == CTT_OK);
  const auto encoded = take(values);
  int feasible = 0;
  double objective = 0;
  REQUIRE(ctt_model_check_values(model, encoded.data(), encoded.size(), &feasible,
                                 &objective) == CTT_OK);
  CHECK(feasible == 1);
  CHECK(objective == doctest::Approx(5));

  char* mps = nullptr;
  REQUIRE(ctt_model_export_mps(model, &mps) == CTT_OK);
  const auto text = take(mps);
  ctt_model* back = nullptr;
  REQUIRE(ctt_model_parse_mps(text.data(), text.size(), &back) == CTT_OK);
  REQUIRE(ctt_model_check_values(back, encoded.data(), encoded.size(), &feasible,
                                 &objective) == CTT_OK);
  CHECK(feasible == 1);
  CHECK(objective == doctest::Approx(5));

  ctt_milp_result result{};
  ctt_solve_options so{0, 0, 0};
  REQUIRE(ctt_model_solve(model, &so, &result, &values) == CTT_OK);
  CHECK(std::string(result.status) == "optimal");
  CHECK(result.objective <= 5 + 1e-9);
  const auto best = take(values);
  ctt_solution* decoded = nullptr;
  REQUIRE(ctt_model_decode(plain, model, best.data(), best.size(), &decoded) == CTT_OK);
  ctt_evaluation e{};
  REQUIRE(ctt_evaluate(plain, decoded, &e, nullptr) == CTT_OK);
  CHECK(e.feasible == 1);
  CHECK(static_cast<double>(e.objective) == doctest::Approx(result.objective));

  ctt_model* dive = nullptr;
  REQUIRE(ctt_model_build(plain, "period-fixed", s, nullptr, &dive) == CTT_OK);
  REQUIRE(ctt_model_solve(dive, &so, &result, nullptr) == CTT_OK);
  CHECK(result.has_solution == 1);
  CHECK(result.objective <= 5 + 1e-9);

  ctt_solution_free(decoded);
  ctt_model_free(dive);
  ctt_model_free(back);
  ctt_model_free(model);
  ctt_solution_free(s);
  ctt_instance_free(plain);
}

TEST_CASE("strategy runs through the C interface") {
  auto* toy = load(ctt::testing::kToyInstance);
  ctt_strategy_config config;
  ctt_strategy_config_init(&config, 7.8);
  CHECK(config.surface_time == doctest::Approx(6.0));
  CHECK(config.dive_times[0] == doctest::Approx(1.8));
  config.deterministic = 1;
  config.surface_node_limit = 500;
  config.dive_node_limit = 500;
  ctt_report* a = nullptr;
  ctt_report* b = nullptr;
  REQUIRE(ctt_run(toy, &config, &a) == CTT_OK);
  REQUIRE(ctt_run(toy, &config, &b) == CTT_OK);
  char* ja = nullptr;
  char* jb = nullptr;
  REQUIRE(ctt_report_json(a, &ja) == CTT_OK);
  REQUIRE(ctt_report_json(b, &jb) == CTT_OK);
  CHECK(take(ja) == take(jb));

  ctt_bounds bounds{};
  REQUIRE(ctt_report_bounds(a, &bounds) == CTT_OK);
  CHECK(bounds.infeasible == 0);
  REQUIRE(bounds.has_upper == 1);
  REQUIRE(bounds.has_lower == 1);
  CHECK(bounds.lower <= bounds.upper);
  CHECK(bounds.upper <= 11);

  ctt_solution* best = nullptr;
  REQUIRE(ctt_report_solution(a, &best) == CTT_OK);
  REQUIRE(best != nullptr);
  ctt_evaluation e{};
  REQUIRE(ctt_evaluate(toy, best, &e, nullptr) == CTT_OK);
  CHECK(e.objective == bounds.upper);

  char* text = nullptr;
  REQUIRE(ctt_report_text(a, &text) == CTT_OK);
  CHECK(take(text).find("objective") != std::string::npos);

  config.dive_count = 0;
  ctt_report* c = nullptr;
  CHECK(ctt_run(toy, &config, &c) == CTT_ERR_ARGUMENT);

  ctt_solution_free(best);
  ctt_report_free(b);
  ctt_report_free(a);
  ctt_instance_free(toy);
}
