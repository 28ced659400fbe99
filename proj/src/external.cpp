#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ctt/error.hpp"
#include "ctt/solver.hpp"

namespace ctt {

namespace fs = std::filesystem;

std::string substitute_template(std::string text, const std::string& key,
                                const std::string& value) {
  const std::string token = "{" + key + "}";
  std::size_t pos = 0;
  while ((pos = text.find(token, pos)) != std::string::npos) {
    text.replace(pos, token.size(), value);
    pos += value.size();
  }
  return text;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string quoted(const fs::path& path) {
  std::string out = "'";
  for (char ch : path.string()) {
    if (ch == '\'') {
      out += "'\\''";
    } else {
      out += ch;
    }
  }
  return out + "'";
}

}  // namespace

SolveResult external_solve(const MilpModel& model,
                           const ExternalSolverConfig& config) {
  using Kind = ExternalSolverError::Kind;
  const fs::path dir = config.working_directory.empty()
                           ? fs::current_path()
                           : fs::path(config.working_directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  const fs::path mps = dir / "model.mps";
  const fs::path solution = dir / config.solution_file;
  const fs::path bound =
      config.bound_file.empty() ? fs::path() : dir / config.bound_file;
  {
    std::ofstream out(mps);
    if (!out) {
      throw ExternalSolverError(Kind::kProcessFailure,
                                "cannot write " + mps.string());
    }
    out << export_mps(model);
  }
  fs::remove(solution, ec);
  if (!bound.empty()) fs::remove(bound, ec);

  std::string command = config.command_template;
  command = substitute_template(command, "mps", quoted(mps));
  command = substitute_template(command, "solution", quoted(solution));
  command = substitute_template(command, "bound",
                                bound.empty() ? "''" : quoted(bound));
  std::ostringstream time;
  time << config.time_limit;
  command = substitute_template(command, "time", time.str());

  const auto start = Clock::now();
  const int rc = std::system(command.c_str());
  SolveResult result;
  result.wall_time =
      std::chrono::duration<double>(Clock::now() - start).count();
  if (rc != 0) {
    throw ExternalSolverError(Kind::kProcessFailure,
                              "external solver exited with status " +
                                  std::to_string(rc));
  }
  if (!fs::exists(solution)) {
    throw ExternalSolverError(Kind::kProcessFailure,
                              "external solver wrote no solution file " +
                                  solution.string());
  }

  MilpSolution imported;
  try {
    imported = import_solution(model, read_file(solution));
  } catch (const Error& e) {
    throw ExternalSolverError(Kind::kUnparsable, e.what());
  }
  if (imported.status != SolveStatus::kFeasible) {
    throw ExternalSolverError(Kind::kInconsistent,
                              "external solution violates " +
                                  imported.violation);
  }

  result.lower_bound = -kInfinity;
  if (!bound.empty() && fs::exists(bound)) {
    std::istringstream in(read_file(bound));
    std::string key;
    double value = 0.0;
    if (!(in >> key >> value) || key != "LOWER_BOUND") {
      throw ExternalSolverError(Kind::kUnparsable,
                                "bound file must hold 'LOWER_BOUND <value>'");
    }
    if (value > imported.objective_value + 1e-6) {
      throw ExternalSolverError(Kind::kInconsistent,
                                "lower bound exceeds the solution objective");
    }
    result.lower_bound = value;
  }
  result.status = result.lower_bound >= imported.objective_value - 1e-6
                      ? SolveStatus::kOptimal
                      : SolveStatus::kFeasible;
  imported.status = result.status;
  result.incumbent_history.push_back(imported.objective_value);
  result.incumbent = std::move(imported);
  return result;
}

}  // namespace ctt
