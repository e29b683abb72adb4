// Command-line front end: sample, pdf, fit, crb, verify, list-plans.

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "ces/csv.hpp"
#include "ces/density.hpp"
#include "ces/distribution.hpp"
#include "ces/estimate.hpp"
#include "ces/family_spec.hpp"
#include "ces/harness/checks.hpp"
#include "ces/harness/plan.hpp"
#include "ces/matrix_kit.hpp"
#include "ces/sampler.hpp"
#include "ces/slepian_bangs.hpp"

using namespace ces;

namespace {

// "1,0.5;0.5,2" -> 2x2 matrix
Matrix parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::stringstream rs(text);
  std::string row;
  while (std::getline(rs, row, ';')) {
    std::vector<double> r;
    std::stringstream cs(row);
    std::string cell;
    while (std::getline(cs, cell, ',')) r.push_back(std::stod(cell));
    if (!rows.empty() && r.size() != rows[0].size()) throw std::invalid_argument("matrix rows differ in length");
    rows.push_back(r);
  }
  Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

Vector parse_vector(const std::string& text) {
  const Matrix m = parse_matrix(text);
  return Eigen::Map<const Vector>(m.data(), m.size());
}

struct SpecArgs {
  std::string family = "gaussian";
  int m = 2;
  std::string mu;
  std::string sigma;
  std::string omega;
  bool complex = false;
};

void add_spec_options(CLI::App* app, SpecArgs& a) {
  app->add_option("--family", a.family, "family, e.g. 'student(nu=3)' or 'gg(s=0.5,b=cov) scale=median'");
  app->add_option("--m,-m", a.m, "dimension")->check(CLI::PositiveNumber);
  app->add_option("--mu", a.mu, "center, comma separated (default 0)");
  app->add_option("--sigma", a.sigma, "scatter, rows separated by ';' (default identity)");
}

DistributionSpec real_spec(const SpecArgs& a) {
  const FamilyKernel k = parse_family(a.family, a.m);
  const Vector mu = a.mu.empty() ? Vector(Vector::Zero(a.m)) : parse_vector(a.mu);
  const Matrix s = a.sigma.empty() ? Matrix(Matrix::Identity(a.m, a.m)) : parse_matrix(a.sigma);
  return DistributionSpec(k, mu, SymMatrix(s));
}

ComplexSpec complex_spec(const SpecArgs& a) {
  const bool nc = !a.omega.empty();
  const FamilyKernel k = parse_family(a.family, a.m, nc ? Realness::ComplexNoncircular : Realness::ComplexCircular);
  const CVector mu = a.mu.empty() ? CVector(CVector::Zero(a.m)) : CVector(parse_vector(a.mu).cast<Complex>());
  const CMatrix s = a.sigma.empty() ? CMatrix(CMatrix::Identity(a.m, a.m)) : CMatrix(parse_matrix(a.sigma).cast<Complex>());
  std::optional<CMatrix> w;
  if (nc) w = parse_matrix(a.omega).cast<Complex>();
  return ComplexSpec(k, mu, s, w);
}

void emit(const CsvTable& t, const std::string& out) {
  if (out.empty() || out == "-")
    write_csv(std::cout, t);
  else
    write_csv_file(out, t);
}

std::string seed_meta(std::uint64_t seed, std::uint64_t stream) {
  return "seed: " + std::to_string(seed) + ", stream: " + std::to_string(stream);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elliptical distributions toolkit"};
  app.require_subcommand(1);
  int exit_code = 0;

  // sample
  SpecArgs sa;
  int n = 1000;
  std::uint64_t seed = default_seed();
  std::uint64_t stream = 0;
  std::string out;
  auto* sample = app.add_subcommand("sample", "draw from an elliptical law");
  add_spec_options(sample, sa);
  sample->add_flag("--complex", sa.complex, "circular complex law (re/im column pairs)");
  sample->add_option("--omega", sa.omega, "pseudo-scatter; implies a noncircular complex law");
  sample->add_option("--n,-n", n, "number of draws")->check(CLI::PositiveNumber);
  sample->add_option("--seed", seed, "seed (default from CES_SEED)");
  sample->add_option("--stream", stream, "stream id");
  sample->add_option("--out,-o", out, "output CSV (default stdout)");
  sample->callback([&] {
    if (sa.complex || !sa.omega.empty()) {
      const ComplexSpec spec = complex_spec(sa);
      const ComplexSampleBatch b = sample_nc_ces(spec, n, seed, stream);
      emit(from_complex_data(b.data, {spec.describe(), seed_meta(seed, stream)}), out);
    } else {
      const DistributionSpec spec = real_spec(sa);
      const SampleBatch b = sample_res(spec, n, seed, stream);
      emit(from_data(b.data, {spec.describe(), seed_meta(seed, stream)}), out);
    }
  });

  // pdf
  SpecArgs pa;
  std::string pdf_in, pdf_out;
  auto* pdf = app.add_subcommand("pdf", "log-density of points read from CSV");
  add_spec_options(pdf, pa);
  pdf->add_flag("--complex", pa.complex, "points are complex re/im column pairs");
  pdf->add_option("--omega", pa.omega, "pseudo-scatter for noncircular complex laws");
  pdf->add_option("--input,-i", pdf_in, "input CSV")->required();
  pdf->add_option("--out,-o", pdf_out, "output CSV (default stdout)");
  pdf->callback([&] {
    const CsvTable t = read_csv_file(pdf_in);
    CsvTable o;
    o.header = {"log_pdf"};
    if (pa.complex || !pa.omega.empty()) {
      const ComplexSpec spec = complex_spec(pa);
      const CDataMatrix d = to_complex_data(t);
      o.meta = {spec.describe()};
      for (Eigen::Index i = 0; i < d.rows(); ++i) o.rows.push_back({pdf_complex(spec, d.row(i).transpose()).log_pdf});
    } else {
      const DistributionSpec spec = real_spec(pa);
      const DataMatrix d = to_data(t);
      o.meta = {spec.describe()};
      for (Eigen::Index i = 0; i < d.rows(); ++i) o.rows.push_back({pdf_res(spec, d.row(i).transpose()).log_pdf});
    }
    emit(o, pdf_out);
  });

  // fit
  std::string method = "tyler", fit_family = "gaussian", fit_in, fit_out, known_mu, shape = "none";
  double tol = 1e-10;
  int max_iter = 500;
  auto* fitc = app.add_subcommand("fit", "estimate location and scatter from CSV data");
  fitc->add_option("--method", method, "scm | ml | maronna | tyler")
      ->check(CLI::IsMember({"scm", "ml", "maronna", "m", "huber", "tyler"}));
  fitc->add_option("--family", fit_family, "ML family");
  fitc->add_option("--input,-i", fit_in, "input CSV")->required();
  fitc->add_option("--out,-o", fit_out, "output CSV (default stdout)");
  fitc->add_option("--known-mu", known_mu, "known center (required for tyler, default 0)");
  fitc->add_option("--shape", shape, "none | trace | topleft | det");
  fitc->add_option("--tol", tol, "convergence tolerance");
  fitc->add_option("--max-iter", max_iter, "iteration cap");
  fitc->callback([&] {
    const DataMatrix d = to_data(read_csv_file(fit_in));
    const int m = static_cast<int>(d.cols());
    EstimatorConfig cfg;
    cfg.method = parse_method(method);
    cfg.fit.tol = tol;
    cfg.fit.max_iter = max_iter;
    cfg.fit.shape = parse_shape_scale(shape);
    if (!known_mu.empty() || cfg.method == Method::Tyler) {
      cfg.fit.location = LocationMode::KnownMu;
      cfg.fit.known_mu = known_mu.empty() ? Vector(Vector::Zero(m)) : parse_vector(known_mu);
    }
    if (cfg.method == Method::ML) cfg.kernel = parse_family(fit_family, m);
    const EstimateResult r = fit(d, cfg);
    CsvTable o;
    o.meta = {"method: " + to_string(cfg.method), std::string("converged: ") + (r.converged ? "yes" : "no")};
    if (!r.note.empty()) o.meta.push_back(r.note);
    for (int j = 0; j < m; ++j) o.header.push_back("mu" + std::to_string(j + 1));
    for (int c = 0; c < m; ++c)
      for (int k = c; k < m; ++k) o.header.push_back("s" + std::to_string(k + 1) + std::to_string(c + 1));
    o.header.push_back("iterations");
    o.header.push_back("residual");
    std::vector<double> row(r.mu_hat.data(), r.mu_hat.data() + m);
    const Vector vs = vecs(r.sigma_hat.matrix());
    row.insert(row.end(), vs.data(), vs.data() + vs.size());
    row.push_back(r.iterations);
    row.push_back(r.residual_trace.empty() ? 0.0 : r.residual_trace.back());
    o.rows.push_back(row);
    emit(o, fit_out);
    if (!r.converged) {
      std::cerr << "warning: did not converge in " << r.iterations << " iterations\n";
      exit_code = 3;
    }
  });

  // crb
  SpecArgs ca;
  std::string model_name = "location-vector", crb_out;
  int crb_n = 1;
  auto* crbc = app.add_subcommand("crb", "Fisher information and Cramer-Rao bound of a built-in model");
  add_spec_options(crbc, ca);
  crbc->add_option("--model", model_name, "model name")->check(CLI::IsMember(builtin_model_names()));
  crbc->add_flag("--complex", ca.complex, "circular complex data");
  crbc->add_option("--n,-n", crb_n, "sample size")->check(CLI::PositiveNumber);
  crbc->add_option("--out,-o", crb_out, "output CSV (default stdout)");
  crbc->callback([&] {
    const DistributionSpec spec = real_spec(ca);
    const Realness rl = ca.complex ? Realness::ComplexCircular : Realness::Real;
    const FamilyKernel k = rl == Realness::Real ? spec.kernel : parse_family(ca.family, ca.m, rl);
    const ParametricModel model = builtin_model(model_name, spec.mu, spec.sigma.matrix(), rl);
    const Vector alpha = builtin_alpha(model_name, spec.mu, spec.sigma.matrix());
    const Matrix f = slepian_bangs_fim(model, alpha, k);
    const Matrix c = crb(model, alpha, k, crb_n);
    CsvTable o;
    o.meta = {"model: " + model_name, k.describe(), "n: " + std::to_string(crb_n)};
    o.header.push_back("block");
    o.header.push_back("row");
    for (int j = 0; j < f.cols(); ++j) o.header.push_back("c" + std::to_string(j + 1));
    for (int b = 0; b < 2; ++b) {
      const Matrix& mat = b == 0 ? f : c;
      for (int i = 0; i < mat.rows(); ++i) {
        std::vector<double> row{static_cast<double>(b), static_cast<double>(i + 1)};
        for (int j = 0; j < mat.cols(); ++j) row.push_back(mat(i, j));
        o.rows.push_back(row);
      }
    }
    o.meta.push_back("block 0: per-sample FIM, block 1: CRB");
    emit(o, crb_out);
  });

  // verify
  std::string plan_arg, out_dir;
  std::optional<std::uint64_t> vseed;
  std::optional<int> vreps, vn;
  auto* verify = app.add_subcommand("verify", "run a built-in plan or a JSON plan file");
  verify->add_option("plan", plan_arg, "plan name or path to a .json plan")->required();
  verify->add_option("--seed", vseed, "override the plan seed");
  verify->add_option("--replicates", vreps, "override replicates");
  verify->add_option("--n", vn, "override the sample size grid with one value");
  verify->add_option("--out-dir", out_dir, "write <plan>.csv and check matrices here");
  verify->callback([&] {
    harness::ExperimentPlan plan;
    const auto names = harness::builtin_plan_names();
    if (std::find(names.begin(), names.end(), plan_arg) != names.end())
      plan = harness::builtin_plan(plan_arg, vseed);
    else
      plan = harness::load_plan_file(plan_arg);
    if (vseed) plan.seed = *vseed;
    if (vreps) {
      plan.replicates = *vreps;
      for (auto& c : plan.checks) c.params.erase("replicates");
    }
    if (vn) {
      plan.n_grid = {*vn};
      for (auto& c : plan.checks) c.params.erase("n");
    }
    std::cout << "plan " << plan.name << " (seed " << plan.seed << "): " << plan.description << '\n';
    harness::RunOptions opts;
    opts.out_dir = out_dir;
    opts.summary = &std::cout;
    const auto reports = harness::run_plan(plan, opts);
    int failed = 0;
    for (const auto& r : reports) failed += r.pass ? 0 : 1;
    std::cout << reports.size() - failed << "/" << reports.size() << " checks passed\n";
    exit_code = failed == 0 ? 0 : 1;
  });

  auto* list = app.add_subcommand("list-plans", "list built-in plans and check kinds");
  list->callback([&] {
    for (const auto& name : harness::builtin_plan_names()) {
      const auto p = harness::builtin_plan(name, 0);
      std::cout << name << "  (" << p.checks.size() << " checks, budget " << p.budget_seconds << " s)  "
                << p.description << '\n';
    }
    std::cout << "\ncheck kinds:";
    for (const auto& k : harness::check_kinds()) std::cout << ' ' << k;
    std::cout << '\n';
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return exit_code;
}
