// Runs the built-in plans behind each acceptance criterion and prints one line per criterion.
// Optional arguments select criteria by number, e.g. `acceptance 1 4`.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "ces/harness/plan.hpp"

using namespace ces::harness;

namespace {

struct Criterion {
  int id;
  std::string title;
  std::vector<std::string> plans;
};

// every plan must pass and stay inside its own time budget
bool run_criterion(const Criterion& c, std::string& note) {
  bool ok = true;
  for (const auto& name : c.plans) {
    const ExperimentPlan plan = builtin_plan(name);
    const auto t0 = std::chrono::steady_clock::now();
    const auto reports = run_plan(plan, {"", &std::cerr});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    int passed = 0;
    for (const auto& r : reports) passed += r.pass;
    const bool in_budget = secs <= plan.budget_seconds;
    note += " " + name + "=" + std::to_string(passed) + "/" + std::to_string(reports.size());
    note += " (" + std::to_string(static_cast<int>(secs + 0.5)) + "s";
    if (!in_budget) note += " over " + std::to_string(static_cast<int>(plan.budget_seconds)) + "s budget";
    note += ")";
    ok = ok && all_passed(reports) && in_budget;
  }
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "Q-law identities", {"q-laws"}},
      {2, "kurtosis formulas", {"kurtosis"}},
      {3, "Tyler fixed point", {"tyler-fixed-point"}},
      {4, "Gaussian ML closed form", {"ml-gaussian"}},
      {5, "asymptotic covariances", {"scm-asymcov", "ml-asymcov", "tyler-asymcov"}},
      {6, "Slepian-Bangs", {"slepian-bangs"}},
      {7, "structural invariants", {"invariants"}},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  bool all = true;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    std::string note;
    bool ok = false;
    try {
      ok = run_criterion(c, note);
    } catch (const std::exception& e) {
      note = std::string(" error: ") + e.what();
    }
    std::cout << "criterion " << c.id << ": " << (ok ? "PASS" : "FAIL") << "  " << c.title << " -" << note << std::endl;
    all = all && ok;
  }
  return all ? 0 : 1;
}
