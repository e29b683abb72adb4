#include "ces/slepian_bangs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "ces/matrix_kit.hpp"

namespace ces {

namespace {

template <class Get>
double fd_check(const Get& f, const Eigen::MatrixXcd& jac, const Vector& alpha) {
  double worst = 0.0;
  const double scale = std::max(1.0, jac.cwiseAbs().maxCoeff());
  for (int j = 0; j < alpha.size(); ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(alpha(j)));
    Vector ap = alpha, am = alpha;
    ap(j) += h;
    am(j) -= h;
    const Eigen::VectorXcd d = (f(ap) - f(am)) / (2.0 * h);
    if (d.size() != jac.rows()) throw std::invalid_argument("validate_model: Jacobian has the wrong number of rows");
    worst = std::max(worst, (d - jac.col(j)).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

Eigen::VectorXcd cvec(const CMatrix& m) { return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size()); }

CMatrix cunvec(const Eigen::VectorXcd& v, int m) { return Eigen::Map<const CMatrix>(v.data(), m, m); }

bool is_complex_model(const ParametricModel& model) { return model.realness != Realness::Real; }

void check_callbacks(const ParametricModel& model) {
  if (model.dim < 1 || model.p < 1) throw std::invalid_argument("ParametricModel: dim and p must be positive");
  if (!is_complex_model(model)) {
    if (!model.mu || !model.sigma || !model.dmu || !model.dsigma)
      throw std::invalid_argument("ParametricModel '" + model.name + "': real callbacks missing");
  } else {
    if (!model.cmu || !model.csigma || !model.dcmu || !model.dcsigma)
      throw std::invalid_argument("ParametricModel '" + model.name + "': complex callbacks missing");
    if (model.realness == Realness::ComplexNoncircular && (!model.comega || !model.dcomega))
      throw std::invalid_argument("ParametricModel '" + model.name + "': omega callbacks missing");
  }
}

// Per-sample FIM given the mean Jacobian, the scatter, its Jacobian (columns vec(dS/da_j))
// and the coefficients; Re() of the Hermitian form.
Matrix structured_fim(const CMatrix& jmu, const CMatrix& s, const CMatrix& jsig, const SbCoefficients& a) {
  const CMatrix si = s.inverse();
  const CMatrix sih = 0.5 * (si + si.adjoint());
  const Eigen::VectorXcd vsi = cvec(sih);
  // vec^H(A) (S^{-T} kron S^{-1}) vec(B) = tr(A^H S^{-1} B S^{-1}) for each column pair.
  const int p = static_cast<int>(jsig.cols());
  const int m = static_cast<int>(s.rows());
  // tr(dS_i^H S^{-1} dS_j S^{-1}) as tr(left[i] ds[j]) with ds[j] = dS_j S^{-1}
  std::vector<CMatrix> ds(p), left(p);
  for (int j = 0; j < p; ++j) {
    const CMatrix d = cunvec(jsig.col(j), m);
    ds[j] = d * sih;
    left[j] = d.adjoint() * sih;
  }
  Matrix f = Matrix::Zero(p, p);
  if (jmu.size() > 0 && jmu.cwiseAbs().maxCoeff() > 0.0) {
    if (!std::isfinite(a.a0)) throw NumericalError("slepian_bangs_fim: the location information is infinite for this kernel");
    f = (a.a0 * (jmu.adjoint() * sih * jmu)).real();
  }
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      const Complex kr = (left[i] * ds[j]).trace();
      const Complex tr = (vsi.adjoint() * jsig.col(i)).value();
      const Complex tc = (vsi.adjoint() * jsig.col(j)).value();
      f(i, j) += (a.a1 * kr + a.a2 * std::conj(tr) * tc).real();
    }
  }
  return 0.5 * (f + f.transpose());
}

}  // namespace

double jacobian_error(const ParametricModel& model, const Vector& alpha) {
  check_callbacks(model);
  if (alpha.size() != model.p) throw std::invalid_argument("jacobian_error: alpha has the wrong size");
  if (!is_complex_model(model)) {
    auto mu = [&](const Vector& a) { return Eigen::VectorXcd(model.mu(a).cast<Complex>()); };
    auto sg = [&](const Vector& a) { return Eigen::VectorXcd(vec(model.sigma(a)).cast<Complex>()); };
    return std::max(fd_check(mu, model.dmu(alpha).cast<Complex>(), alpha),
                    fd_check(sg, model.dsigma(alpha).cast<Complex>(), alpha));
  }
  auto mu = [&](const Vector& a) { return Eigen::VectorXcd(model.cmu(a)); };
  auto sg = [&](const Vector& a) { return cvec(model.csigma(a)); };
  double e = std::max(fd_check(mu, model.dcmu(alpha), alpha), fd_check(sg, model.dcsigma(alpha), alpha));
  if (model.realness == Realness::ComplexNoncircular) {
    auto om = [&](const Vector& a) { return cvec(model.comega(a)); };
    e = std::max(e, fd_check(om, model.dcomega(alpha), alpha));
  }
  return e;
}

void validate_model(const ParametricModel& model, const Vector& alpha, double tol) {
  const double e = jacobian_error(model, alpha);
  if (!(e <= tol)) {
    std::ostringstream os;
    os << "model '" << model.name << "': Jacobian differs from finite differences by " << e;
    throw std::invalid_argument(os.str());
  }
}

SbCoefficients sb_coefficients(const FamilyKernel& kernel) {
  const XiCoefficients xi = sb_xi(kernel);
  // xi1 = +inf is allowed: only the location block is affected
  if (!(xi.xi1 > 0.0) || !std::isfinite(xi.xi2)) throw NumericalError("sb_coefficients: xi is not finite");
  if (kernel.realness() == Realness::ComplexCircular) return {2.0 * xi.xi1, xi.xi2, xi.xi2 - 1.0};
  return {xi.xi1, 0.5 * xi.xi2, 0.25 * (xi.xi2 - 1.0)};
}

Matrix slepian_bangs_fim(const ParametricModel& model, const Vector& alpha, const FamilyKernel& kernel) {
  validate_model(model, alpha);
  if (kernel.dim() != model.dim) throw std::invalid_argument("slepian_bangs_fim: kernel dimension differs from the model");
  if (kernel.is_complex() != is_complex_model(model))
    throw std::invalid_argument("slepian_bangs_fim: kernel and model must both be real or both complex");
  const int m = model.dim;
  if (!is_complex_model(model)) {
    const SymMatrix s(model.sigma(alpha));
    require_positive_definite(s.matrix(), "slepian_bangs_fim: Sigma(alpha)");
    return structured_fim(model.dmu(alpha).cast<Complex>(), s.matrix().cast<Complex>(),
                          model.dsigma(alpha).cast<Complex>(), sb_coefficients(kernel.with_realness(Realness::Real)));
  }
  const CMatrix s = model.csigma(alpha);
  if (model.realness == Realness::ComplexCircular) {
    return structured_fim(model.dcmu(alpha), s, model.dcsigma(alpha),
                          sb_coefficients(kernel.with_realness(Realness::ComplexCircular)));
  }
  // Noncircular: augmented mean (mu, conj mu) and scatter [[S, W], [conj W, conj S]].
  const CMatrix w = model.comega(alpha);
  CMatrix st(2 * m, 2 * m);
  st << s, w, w.conjugate(), s.conjugate();
  const CMatrix jm = model.dcmu(alpha);
  CMatrix jmt(2 * m, model.p);
  jmt << jm, jm.conjugate();
  const CMatrix js = model.dcsigma(alpha);
  const CMatrix jw = model.dcomega(alpha);
  CMatrix jst(4 * m * m, model.p);
  for (int j = 0; j < model.p; ++j) {
    const CMatrix ds = cunvec(js.col(j), m);
    const CMatrix dw = cunvec(jw.col(j), m);
    CMatrix d(2 * m, 2 * m);
    d << ds, dw, dw.conjugate(), ds.conjugate();
    jst.col(j) = cvec(d);
  }
  return structured_fim(jmt, st, jst, sb_coefficients(kernel.with_realness(Realness::ComplexNoncircular)));
}

Matrix crb(const ParametricModel& model, const Vector& alpha, const FamilyKernel& kernel, int n) {
  if (n < 1) throw std::invalid_argument("crb: n must be positive");
  const Matrix f = slepian_bangs_fim(model, alpha, kernel);
  Eigen::SelfAdjointEigenSolver<Matrix> es(f);
  const double top = es.eigenvalues().maxCoeff();
  const double low = es.eigenvalues()(0);
  if (!(top > 0.0) || low <= 1e-12 * top) {
    std::ostringstream os;
    os << "crb: FIM is singular for model '" << model.name << "' (eigenvalue " << low << "); null direction ["
       << es.eigenvectors().col(0).transpose() << "]";
    throw NumericalError(os.str());
  }
  Eigen::LLT<Matrix> llt(f);
  Matrix inv = llt.solve(Matrix::Identity(f.rows(), f.cols()));
  inv = 0.5 * (inv + inv.transpose());
  return inv / static_cast<double>(n);
}

std::string DecouplingReport::describe() const {
  std::ostringstream os;
  os << "mu params " << mu_params.size() << ", scatter params " << sigma_params.size() << ", off-block norm "
     << offblock_norm << (decoupled ? " (decoupled)" : " (coupled)");
  return os.str();
}

DecouplingReport fim_block_decoupling_check(const ParametricModel& model, const Vector& alpha,
                                            const FamilyKernel& kernel, double tol) {
  const Matrix f = slepian_bangs_fim(model, alpha, kernel);
  const Eigen::MatrixXcd jm = is_complex_model(model) ? model.dcmu(alpha) : CMatrix(model.dmu(alpha).cast<Complex>());
  DecouplingReport r;
  for (int j = 0; j < model.p; ++j) {
    if (jm.col(j).cwiseAbs().maxCoeff() > 0.0)
      r.mu_params.push_back(j);
    else
      r.sigma_params.push_back(j);
  }
  double acc = 0.0;
  for (int i : r.mu_params)
    for (int j : r.sigma_params) acc += 2.0 * f(i, j) * f(i, j);
  r.offblock_norm = std::sqrt(acc);
  r.decoupled = r.offblock_norm <= tol * std::max(1.0, f.norm());
  return r;
}

std::vector<std::string> builtin_model_names() {
  return {"location-scalar", "location-vector", "scatter-full", "scatter-scaled-identity"};
}

Vector builtin_alpha(const std::string& name, const Vector& mu0, const Matrix& sigma0) {
  if (name == "location-scalar") return Vector::Constant(1, mu0.size() ? mu0(0) : 0.0);
  if (name == "location-vector") return mu0;
  if (name == "scatter-full") return vecs(sigma0);
  if (name == "scatter-scaled-identity") return Vector::Ones(1);
  throw std::invalid_argument("unknown model '" + name + "'");
}

ParametricModel builtin_model(const std::string& name, const Vector& mu0, const Matrix& sigma0, Realness realness,
                              const std::optional<CMatrix>& omega0) {
  const int m = static_cast<int>(sigma0.rows());
  if (sigma0.cols() != m || mu0.size() != m) throw std::invalid_argument("builtin_model: dimension mismatch");
  ParametricModel model;
  model.name = name;
  model.dim = m;
  model.realness = realness;

  // Real parameterization first; the complex variants embed it.
  std::function<Vector(const Vector&)> mu;
  std::function<Matrix(const Vector&)> dmu, sig, dsig;
  if (name == "location-scalar") {
    model.p = 1;
    mu = [m](const Vector& a) { return Vector(Vector::Constant(m, a(0))); };
    dmu = [m](const Vector&) { return Matrix(Matrix::Ones(m, 1)); };
  } else if (name == "location-vector") {
    model.p = m;
    mu = [](const Vector& a) { return a; };
    dmu = [m](const Vector&) { return Matrix(Matrix::Identity(m, m)); };
  } else if (name == "scatter-full") {
    model.p = m * (m + 1) / 2;
    sig = [m](const Vector& a) { return Matrix(unvecs(a, m).matrix()); };
    dsig = [m](const Vector&) { return duplication(m); };
  } else if (name == "scatter-scaled-identity") {
    model.p = 1;
    sig = [sigma0](const Vector& a) { return Matrix(a(0) * sigma0); };
    dsig = [sigma0](const Vector&) { return Matrix(vec(sigma0)); };
  } else {
    throw std::invalid_argument("unknown model '" + name + "'");
  }
  const int p = model.p;
  if (!mu) {
    mu = [mu0](const Vector&) { return mu0; };
    dmu = [m, p](const Vector&) { return Matrix(Matrix::Zero(m, p)); };
  } else {
    sig = [sigma0](const Vector&) { return sigma0; };
    dsig = [m, p](const Vector&) { return Matrix(Matrix::Zero(m * m, p)); };
  }

  if (realness == Realness::Real) {
    model.mu = mu;
    model.dmu = dmu;
    model.sigma = sig;
    model.dsigma = dsig;
    return model;
  }
  model.cmu = [mu](const Vector& a) { return CVector(mu(a).cast<Complex>()); };
  model.dcmu = [dmu](const Vector& a) { return CMatrix(dmu(a).cast<Complex>()); };
  model.csigma = [sig](const Vector& a) { return CMatrix(sig(a).cast<Complex>()); };
  model.dcsigma = [dsig](const Vector& a) { return CMatrix(dsig(a).cast<Complex>()); };
  if (realness == Realness::ComplexNoncircular) {
    const CMatrix w = omega0 ? *omega0 : CMatrix(CMatrix::Zero(m, m));
    model.comega = [w](const Vector&) { return w; };
    model.dcomega = [m, p](const Vector&) { return CMatrix(CMatrix::Zero(m * m, p)); };
  }
  return model;
}

}  // namespace ces
