#include "ces/harness/plan.hpp"

#include <cctype>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ces/csv.hpp"
#include "ces/family_spec.hpp"
#include "ces/harness/checks.hpp"
#include "ces/rng.hpp"

namespace ces::harness {

using nlohmann::json;

namespace {

std::string check_name(const CheckSpec& c, std::size_t index) {
  return c.label.empty() ? c.kind + "#" + std::to_string(index + 1) : c.label;
}

std::string slug(const std::string& s) {
  std::string out;
  for (char ch : s) out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-') ? ch : '_';
  return out;
}

void write_reports(const ExperimentPlan& plan, const std::vector<CheckReport>& reports, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  // Runtime stays out of the CSV so that reruns are byte-identical.
  out << "# plan: " << plan.name << '\n' << "# seed: " << plan.seed << '\n';
  out << "check,kind,statistic,threshold,pass\n";
  for (const auto& r : reports) {
    out << r.name << ',' << r.kind << ',' << format_double(r.statistic) << ',' << format_double(r.threshold) << ','
        << (r.pass ? 1 : 0) << '\n';
  }
}

}  // namespace

std::vector<CheckReport> run_plan(const ExperimentPlan& plan, const RunOptions& opts) {
  const auto& reg = check_registry();
  for (const auto& c : plan.checks) {
    if (!reg.count(c.kind)) throw std::invalid_argument("plan '" + plan.name + "': unknown check kind '" + c.kind + "'");
  }
  if (plan.replicates && *plan.replicates < 1) throw std::invalid_argument("plan '" + plan.name + "': replicates < 1");
  if (!opts.out_dir.empty()) std::filesystem::create_directories(opts.out_dir);

  std::vector<CheckReport> reports;
  for (std::size_t i = 0; i < plan.checks.size(); ++i) {
    const CheckSpec& spec = plan.checks[i];
    CheckReport r;
    r.name = check_name(spec, i);
    r.kind = spec.kind;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      // Each check owns a disjoint block of 2^32 Philox streams.
      const CheckContext ctx{plan, spec, static_cast<std::uint64_t>(i + 1) << 32};
      CheckOutcome out = reg.at(spec.kind)(ctx);
      r.statistic = out.statistic;
      r.threshold = out.threshold;
      r.pass = out.statistic <= out.threshold;
      r.detail = out.detail;
      if (!opts.out_dir.empty()) {
        for (const auto& [name, m] : out.artifacts) {
          const auto path = std::filesystem::path(opts.out_dir) / (slug(plan.name) + "_" + slug(r.name) + "_" + name + ".csv");
          write_csv_file(path.string(), from_matrix(m, {"plan: " + plan.name, "check: " + r.name, name}));
        }
      }
    } catch (const std::exception& e) {
      r.statistic = std::numeric_limits<double>::quiet_NaN();
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (opts.summary) {
      std::ostream& os = *opts.summary;
      os << (r.pass ? "PASS  " : "FAIL  ") << std::left << std::setw(36) << r.name << std::right
         << " stat=" << std::setw(12) << std::setprecision(5) << r.statistic << "  thr=" << std::setw(10) << r.threshold
         << "  " << std::fixed << std::setprecision(2) << r.runtime_seconds << "s" << std::defaultfloat << "  "
         << r.detail << '\n';
      os.flush();
    }
    reports.push_back(std::move(r));
  }
  if (!opts.out_dir.empty()) write_reports(plan, reports, (std::filesystem::path(opts.out_dir) / (slug(plan.name) + ".csv")).string());
  return reports;
}

bool all_passed(const std::vector<CheckReport>& reports) {
  for (const auto& r : reports)
    if (!r.pass) return false;
  return true;
}

// ---------------------------------------------------------------------------------------
// Built-in plans

namespace {

CheckSpec chk(std::string kind, std::string label, json params = json::object()) {
  return {std::move(kind), std::move(label), std::move(params)};
}

ExperimentPlan make(const std::string& name, const std::string& desc, double budget, std::vector<CheckSpec> checks) {
  ExperimentPlan p;
  p.name = name;
  p.description = desc;
  p.budget_seconds = budget;
  p.checks = std::move(checks);
  return p;
}

std::vector<CheckSpec> q_law_checks(bool gaussian_only) {
  std::vector<CheckSpec> out;
  for (int m : {1, 2, 3, 5})
    out.push_back(chk("q-law-ks", "gaussian-chi2-m" + std::to_string(m), {{"family", "gaussian"}, {"m", m}}));
  if (gaussian_only) return out;
  out.push_back(chk("q-law-ks", "student-F-m2-nu3", {{"family", "student(nu=3)"}, {"m", 2}}));
  out.push_back(chk("q-law-ks", "student-F-m3-nu8", {{"family", "student(nu=8)"}, {"m", 3}}));
  out.push_back(chk("q-law-ks", "gg-gamma-m2-s0.5", {{"family", "gg(s=0.5,b=1)"}, {"m", 2}}));
  out.push_back(chk("q-law-ks", "gg-gamma-m3-s2", {{"family", "gg(s=2,b=1)"}, {"m", 3}}));
  return out;
}

std::vector<CheckSpec> xi_checks() {
  return {
      chk("crb-gaussian-location", "crb-gaussian-location", {{"family", "gaussian"}, {"m", 3}}),
      chk("xi-closed-form", "xi-student-real", {{"family", "student(nu=6)"}, {"m", 3}}),
      chk("xi-closed-form", "xi-student-complex", {{"family", "student(nu=6)"}, {"m", 2}, {"realness", "complex"}}),
      chk("xi-closed-form", "xi-cgg-s0.5", {{"family", "gg(s=0.5,b=cov)"}, {"m", 2}, {"realness", "complex"}}),
      chk("xi-closed-form", "xi-cgg-s2", {{"family", "gg(s=2,b=cov)"}, {"m", 3}, {"realness", "complex"}}),
      chk("xi-bridge", "xi-bridge-student", {{"family", "student(nu=6)"}, {"m", 2}}),
      chk("xi-bridge", "xi-bridge-gg", {{"family", "gg(s=0.5,b=cov)"}, {"m", 2}}),
      chk("xi-bridge", "xi-bridge-k", {{"family", "k(nu=2)"}, {"m", 2}}),
  };
}

std::vector<CheckSpec> invariant_checks() {
  return {
      chk("pdf-scale-ambiguity", "pdf-scale-ambiguity"),
      chk("sigma2-bound", "sigma2-bound"),
      chk("fourth-moment", "fourth-moment-student", {{"family", "student(nu=10)"}, {"m", 3}, {"n", 1000000}}),
      chk("marginal-generator", "marginal-generator"),
      chk("conditional-regression", "conditional-gaussian", {{"family", "gaussian"}}),
      chk("conditional-regression", "conditional-student", {{"family", "student(nu=8)"}}),
      chk("nc-pseudo-covariance", "nc-pseudo-covariance-m1", {{"family", "gaussian"}, {"m", 1}, {"kappa", 0.6}}),
      chk("nc-pseudo-covariance", "nc-pseudo-covariance-m2",
          {{"family", "student(nu=6)"}, {"m", 2}, {"kappa", 0.4}, {"n", 200000}, {"threshold", 0.03}}),
  };
}

json asym(const std::string& est, const std::string& family) {
  return {{"estimator", est}, {"family", family}, {"m", 2}, {"n", 10000}, {"replicates", 2000}};
}

}  // namespace

std::vector<std::string> builtin_plan_names() {
  return {"empty",        "gaussian-q-chisq", "q-laws",        "kurtosis",      "tyler-fixed-point",
          "ml-gaussian",  "scm-asymcov",      "ml-asymcov",    "tyler-asymcov", "m-asymcov",
          "slepian-bangs", "crb-efficiency",  "invariants",    "quick"};
}

ExperimentPlan builtin_plan(const std::string& name, std::optional<std::uint64_t> seed) {
  ExperimentPlan p;
  if (name == "empty") {
    p = make(name, "no checks", 1, {});
  } else if (name == "gaussian-q-chisq") {
    p = make(name, "Gaussian Q against chi2_m, KS at level 0.01", 30, q_law_checks(true));
  } else if (name == "q-laws") {
    p = make(name, "Q laws of the Gaussian, Student and GG families, KS at level 0.01", 30, q_law_checks(false));
  } else if (name == "kurtosis") {
    p = make(name, "kurtosis from 1e6 draws vs closed forms", 120,
             {chk("kurtosis", "student-nu10", {{"family", "student(nu=10)"}, {"m", 3}}),
              chk("kurtosis", "k-nu4", {{"family", "k(nu=4)"}, {"m", 3}}),
              chk("kurtosis", "gg-m1-s0.5", {{"family", "gg(s=0.5,b=1)"}, {"m", 1}}),
              chk("kurtosis", "gg-m1-s2", {{"family", "gg(s=2,b=1)"}, {"m", 1}})});
  } else if (name == "tyler-fixed-point") {
    p = make(name, "Tyler fixed point on Student nu=2 data and per-sample rescaling", 30,
             {chk("tyler-residual", "tyler-residual", {{"family", "student(nu=2)"}, {"m", 3}, {"n", 2000}}),
              chk("tyler-scale-invariance", "tyler-scale-invariance",
                  {{"family", "student(nu=2)"}, {"m", 3}, {"n", 2000}})});
  } else if (name == "ml-gaussian") {
    p = make(name, "Gaussian ML equals the sample mean and 1/n SCM", 10,
             {chk("ml-gaussian-closed-form", "ml-gaussian-closed-form", {{"family", "gaussian"}, {"m", 3}})});
  } else if (name == "scm-asymcov") {
    p = make(name, "SCM asymptotic covariance, Student nu=12", 600,
             {chk("asymptotic-cov", "scm-student-nu12", asym("scm", "student(nu=12)"))});
  } else if (name == "ml-asymcov") {
    p = make(name, "ML asymptotic covariance, Student nu=6", 600,
             {chk("asymptotic-cov", "ml-student-nu6", asym("ml", "student(nu=6)"))});
  } else if (name == "tyler-asymcov") {
    p = make(name, "Tyler asymptotic covariance on Student nu=3 and nu=30 data", 600,
             {chk("asymptotic-cov", "tyler-student-nu3", asym("tyler", "student(nu=3)")),
              chk("asymptotic-cov", "tyler-student-nu30", asym("tyler", "student(nu=30)"))});
  } else if (name == "m-asymcov") {
    json j = asym("m", "gaussian");
    j["m"] = 3;
    p = make(name, "Huber M-estimator asymptotic covariance, Gaussian m=3", 600, {chk("asymptotic-cov", "huber-gaussian-m3", j)});
  } else if (name == "slepian-bangs") {
    p = make(name, "Gaussian location CRB, xi closed forms and the complex/real bridge", 60, xi_checks());
  } else if (name == "crb-efficiency") {
    p = make(name, "ML of a scalar location attains the CRB, Student nu=6", 600,
             {chk("crb-efficiency", "crb-efficiency-student",
                  {{"family", "student(nu=6)"}, {"m", 2}, {"n", 10000}, {"replicates", 2000}})});
  } else if (name == "invariants") {
    p = make(name, "structural invariants", 300, invariant_checks());
  } else if (name == "quick") {
    p = make(name, "fast smoke plan", 30,
             {chk("q-law-ks", "gaussian-chi2-m2", {{"family", "gaussian"}, {"m", 2}, {"n", 2000}}),
              chk("ml-gaussian-closed-form", "ml-gaussian-closed-form", {{"family", "gaussian"}, {"m", 3}}),
              chk("crb-gaussian-location", "crb-gaussian-location", {{"family", "gaussian"}, {"m", 2}}),
              chk("sigma2-bound", "sigma2-bound", {{"m", 2}})});
  } else {
    throw std::invalid_argument("unknown plan '" + name + "'");
  }
  p.seed = seed ? *seed : default_seed();
  return p;
}

// ---------------------------------------------------------------------------------------
// JSON

ExperimentPlan plan_from_json(const json& j) {
  ExperimentPlan p;
  p.name = j.value("name", std::string("plan"));
  p.description = j.value("description", std::string());
  p.seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>() : default_seed();
  if (j.contains("replicates")) p.replicates = j.at("replicates").get<int>();
  if (j.contains("n_grid")) p.n_grid = j.at("n_grid").get<std::vector<int>>();
  p.budget_seconds = j.value("budget_seconds", 600.0);
  if (j.contains("spec")) {
    const json& s = j.at("spec");
    const int m = s.at("m").get<int>();
    const FamilyKernel k = parse_family(s.value("family", std::string("gaussian")), m);
    Vector mu = Vector::Zero(m);
    if (s.contains("mu")) {
      const auto v = s.at("mu").get<std::vector<double>>();
      mu = Eigen::Map<const Vector>(v.data(), v.size());
    }
    Matrix sigma = default_sigma(m);
    if (s.contains("sigma")) {
      const auto rows = s.at("sigma").get<std::vector<std::vector<double>>>();
      sigma.resize(rows.size(), rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size()) throw std::invalid_argument("plan spec: sigma must be square");
        for (std::size_t c = 0; c < rows.size(); ++c) sigma(i, c) = rows[i][c];
      }
    }
    p.spec.emplace(k, mu, SymMatrix(sigma));
  }
  if (j.contains("estimators")) {
    for (const auto& e : j.at("estimators")) {
      EstimatorConfig cfg;
      cfg.method = parse_method(e.at("method").get<std::string>());
      p.estimators.push_back(cfg);
    }
  }
  if (j.contains("checks")) {
    for (const auto& c : j.at("checks")) {
      CheckSpec cs;
      cs.kind = c.at("kind").get<std::string>();
      cs.label = c.value("label", std::string());
      if (c.contains("params")) cs.params = c.at("params");
      p.checks.push_back(std::move(cs));
    }
  }
  return p;
}

ExperimentPlan load_plan_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open plan file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("plan file '" + path + "': " + e.what());
  }
  return plan_from_json(j);
}

}  // namespace ces::harness
