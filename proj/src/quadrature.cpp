#include "ces/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "ces/types.hpp"

namespace ces {

namespace {

using Rule = boost::math::quadrature::exp_sinh<double>;

// The rule extends its abscissa tables lazily, so each thread owns its rules, one per
// nesting depth: an integrand may itself integrate.
thread_local std::vector<std::unique_ptr<Rule>> rules;
thread_local std::size_t depth = 0;

struct DepthGuard {
  Rule* rule;
  DepthGuard() {
    if (rules.size() <= depth) rules.push_back(std::make_unique<Rule>(12));
    rule = rules[depth++].get();
  }
  ~DepthGuard() { --depth; }
};

QuadResult run(const std::function<double(double)>& g, const QuadConfig& cfg, double lo, double hi) {
  double error = 0.0;
  double l1 = 0.0;
  auto fn = [&g](double v) { return g(v); };
  DepthGuard guard;
  const double value =
      guard.rule->integrate(fn, 0.0, std::numeric_limits<double>::infinity(), cfg.rel_tol, &error, &l1);
  if (!std::isfinite(value)) throw NumericalError("quadrature: non-finite integral");
  const double allowed = std::max(cfg.abs_tol, cfg.rel_tol * l1);
  if (error > allowed) {
    std::ostringstream os;
    os << "quadrature: error estimate " << error << " exceeds tolerance " << allowed << " on [" << lo << ", " << hi
       << "]";
    throw NumericalError(os.str());
  }
  return {value, error};
}

// [x0, x1] through x = x0 + (x1 - x0) v / (1 + v), v in [0, inf).
QuadResult finite_piece(const std::function<double(double)>& f, double x0, double x1, const QuadConfig& cfg) {
  const double w = x1 - x0;
  auto g = [&](double v) {
    const double s = 1.0 / (1.0 + v);
    if (s == 0.0) return 0.0;
    const double x = v < 1.0 ? x0 + w * v * s : x1 - w * s;
    return f(x) * w * s * s;
  };
  return run(g, cfg, x0, x1);
}

// [x0, inf) through x = x0 + c v.
QuadResult tail_piece(const std::function<double(double)>& f, double x0, double c, const QuadConfig& cfg) {
  auto g = [&](double v) {
    const double x = x0 + c * v;
    if (!std::isfinite(x)) return 0.0;
    return f(x) * c;
  };
  return run(g, cfg, x0, std::numeric_limits<double>::infinity());
}

std::vector<double> cut_points(double a, double b, const QuadConfig& cfg) {
  std::vector<double> cuts{a};
  for (double p : cfg.breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadConfig& cfg) {
  if (!(a < b)) {
    if (a == b) return {0.0, 0.0};
    throw std::invalid_argument("integrate: expected a < b");
  }
  std::vector<double> cuts = cut_points(a, b, cfg);
  cuts.push_back(b);
  QuadResult total{0.0, 0.0};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const QuadResult r = finite_piece(f, cuts[i], cuts[i + 1], cfg);
    total.value += r.value;
    total.error += r.error;
  }
  return total;
}

QuadResult integrate_tail(const std::function<double(double)>& f, double a, const QuadConfig& cfg) {
  if (!(cfg.scale > 0.0) || !std::isfinite(cfg.scale)) {
    throw std::invalid_argument("integrate_tail: scale must be positive");
  }
  QuadConfig inner = cfg;
  inner.breakpoints.push_back(a + cfg.scale);
  const std::vector<double> cuts = cut_points(a, std::numeric_limits<double>::infinity(), inner);
  QuadResult total{0.0, 0.0};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const QuadResult r = finite_piece(f, cuts[i], cuts[i + 1], cfg);
    total.value += r.value;
    total.error += r.error;
  }
  const QuadResult r = tail_piece(f, cuts.back(), cfg.scale, cfg);
  total.value += r.value;
  total.error += r.error;
  return total;
}

QuadResult integrate_half_line(const std::function<double(double)>& f, const QuadConfig& cfg) {
  return integrate_tail(f, 0.0, cfg);
}

}  // namespace ces
