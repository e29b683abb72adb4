#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ces/distribution.hpp"
#include "ces/estimate.hpp"

namespace ces::harness {

/// One registered check with its parameters (see check_kinds()). Unset parameters fall back to
/// the plan-level fields and then to the check's own defaults.
struct CheckSpec {
  std::string kind;
  std::string label;
  nlohmann::json params = nlohmann::json::object();
};

struct ExperimentPlan {
  std::string name;
  std::string description;
  std::optional<DistributionSpec> spec;
  std::vector<EstimatorConfig> estimators;
  std::vector<int> n_grid;
  std::optional<int> replicates;
  std::uint64_t seed = 0;
  double budget_seconds = 600.0;
  std::vector<CheckSpec> checks;
};

struct CheckReport {
  std::string name;
  std::string kind;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  double runtime_seconds = 0.0;
  std::string detail;
};

struct RunOptions {
  /// Directory for <plan>.csv and per-check matrices; empty writes nothing.
  std::string out_dir;
  /// Human-readable summary; null for none.
  std::ostream* summary = nullptr;
};

/// Runs every check in order. A check that throws is reported as failed with the message.
std::vector<CheckReport> run_plan(const ExperimentPlan& plan, const RunOptions& opts = {});

bool all_passed(const std::vector<CheckReport>& reports);

std::vector<std::string> builtin_plan_names();
/// Built-in plans; the seed defaults to default_seed().
ExperimentPlan builtin_plan(const std::string& name, std::optional<std::uint64_t> seed = std::nullopt);

/// Plan file grammar:
///   {"name": str, "description": str, "seed": int, "replicates": int, "n_grid": [int],
///    "budget_seconds": num,
///    "spec": {"family": str, "m": int, "mu": [num], "sigma": [[num]]},
///    "estimators": [{"method": "scm"|"ml"|"m"|"tyler"}],
///    "checks": [{"kind": str, "label": str, "params": {...}}]}
ExperimentPlan plan_from_json(const nlohmann::json& j);
ExperimentPlan load_plan_file(const std::string& path);

}  // namespace ces::harness
