#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pdq/expr.hpp"
#include "pdq/intensity.hpp"
#include "pdq/state.hpp"

namespace pdq {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

constexpr double kQuadRelTol = 1e-11;
constexpr unsigned kQuadMaxDepth = 14;

// 16-point Gauss-Legendre nodes/weights on [0, 1]; exact for polynomials up
// to degree 31 and effectively exact for the analytic integrands used along
// flow segments.
struct GaussLegendre16 {
  static constexpr std::array<double, 16> nodes = {
      0.005299532504175031, 0.0277124884633837,  0.06718439880608412,
      0.1222977958224985,   0.19106187779867811, 0.2709916111713863,
      0.35919822461037054,  0.4524937450811813,  0.5475062549188188,
      0.6408017753896295,   0.7290083888286137,  0.8089381222013219,
      0.8777022041775016,   0.9328156011939159,  0.9722875115366163,
      0.9947004674958249};
  static constexpr std::array<double, 16> weights = {
      0.013576229705877047, 0.03112676196932395, 0.04757925584124639,
      0.06231448562776694,  0.07479799440828837, 0.08457825969750127,
      0.09130170752246179,  0.0947253052275343,  0.0947253052275343,
      0.09130170752246179,  0.08457825969750127, 0.07479799440828837,
      0.06231448562776694,  0.04757925584124639, 0.03112676196932395,
      0.013576229705877047};
};

}  // namespace detail

/// Fixed 16-point Gauss-Legendre integral of g over [a, b]; no adaptivity,
/// meant for short smooth segments on hot paths. Pieces longer than 2 time
/// units are split into equal panels to keep the rule in its accurate range.
template <typename F>
inline double integrate_gl16(const F& g, double a, double b) {
  const double len = b - a;
  if (!(len > 0.0)) return 0.0;
  const int panels = len > 2.0 ? static_cast<int>(std::ceil(len / 2.0)) : 1;
  const double h = len / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + h * p;
    double s = 0.0;
    for (std::size_t i = 0; i < 16; ++i)
      s += detail::GaussLegendre16::weights[i] *
           g(lo + h * detail::GaussLegendre16::nodes[i]);
    total += s * h;
  }
  return total;
}

/// Adaptive Gauss-Kronrod integral of g over [a, b]. Throws QuadratureError
/// if the error estimate fails to converge. Windows shorter than 1e-3 use a
/// single Gauss-Legendre panel: any smooth integrand is resolved to machine
/// precision there, while the adaptive rule's roundoff-dominated error
/// estimate would recurse to full depth.
template <typename F>
inline double integrate(const F& g, double a, double b) {
  if (!(b > a)) return 0.0;
  if (b - a < 1e-3) return integrate_gl16(g, a, b);
  double err = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
          g, a, b, detail::kQuadMaxDepth, detail::kQuadRelTol, &err);
  const double scale = std::max(std::fabs(v), 1.0);
  if (!(err <= 1e-6 * scale))
    throw QuadratureError("quadrature failed to converge");
  return v;
}

namespace detail {

// Collects u in (0, len) where a comparison inside a guard node (if_gt, or
// the kink of min/max) changes side along u -> flow(s, u). The scan samples
// a fixed lattice and bisects each sign change; guard conditions are
// expected to be piecewise monotone at this resolution.
inline void collect_guard_crossings(const ExprNode& e, const StateX& s,
                                    double len, std::vector<double>& out) {
  const bool guarded = e.kind == ExprKind::call_if_gt ||
                       e.kind == ExprKind::call_min ||
                       e.kind == ExprKind::call_max;
  if (guarded) {
    const ExprNode& a = *e.args[0];
    const ExprNode& b = *e.args[1];
    const auto diff = [&](double u) {
      const StateX su = flow(s, u);
      return eval_node(a, su) - eval_node(b, su);
    };
    constexpr int kScan = 128;
    double prev_u = 0.0;
    double prev_d = diff(0.0);
    for (int i = 1; i <= kScan; ++i) {
      const double u = len * static_cast<double>(i) / kScan;
      const double d = diff(u);
      if ((prev_d > 0.0) != (d > 0.0)) {
        double lo = prev_u, hi = u, dlo = prev_d;
        for (int it = 0; it < 80; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double dm = diff(mid);
          if ((dlo > 0.0) != (dm > 0.0)) {
            hi = mid;
          } else {
            lo = mid;
            dlo = dm;
          }
        }
        out.push_back(0.5 * (lo + hi));
      }
      prev_u = u;
      prev_d = d;
    }
  }
  for (const auto& arg : e.args) collect_guard_crossings(*arg, s, len, out);
}

}  // namespace detail

/// Sorted interior breakpoints of the given expression along the flow from s
/// over [0, len]. Empty when the expression has no piecewise guards.
inline std::vector<double> flow_breakpoints(const IntensityExpr& e,
                                            const StateX& s, double len) {
  std::vector<double> pts;
  if (!e.has_guards() || !(len > 0.0)) return pts;
  detail::collect_guard_crossings(e.root(), s, len, pts);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](double a, double b) { return b - a < 1e-12; }),
            pts.end());
  std::erase_if(pts, [len](double u) { return u <= 0.0 || u >= len; });
  return pts;
}

/// Breakpoints of every intensity expression active along the flow from s.
inline std::vector<double> hazard_breakpoints(const IntensityField& f,
                                              const StateX& s, double len) {
  std::vector<double> pts;
  if (s.n == 0) {
    pts = flow_breakpoints(f.lambda0(), s, len);
  } else {
    pts = flow_breakpoints(f.lambda(), s, len);
    auto hp = flow_breakpoints(f.h(), s, len);
    pts.insert(pts.end(), hp.begin(), hp.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](double a, double b) { return b - a < 1e-12; }),
              pts.end());
  }
  return pts;
}

/// Integral of g(u) over [0, len] split at the hazard breakpoints along the
/// flow from s, adaptive on each smooth piece.
template <typename F>
inline double integrate_flow(const IntensityField& f, const StateX& s,
                             double len, const F& g) {
  if (!(len > 0.0)) return 0.0;
  const auto pts = hazard_breakpoints(f, s, len);
  double total = 0.0;
  double a = 0.0;
  for (double p : pts) {
    total += integrate(g, a, p);
    a = p;
  }
  total += integrate(g, a, len);
  return total;
}

/// Same splitting, but fixed GL-16 panels per smooth piece (hot paths).
template <typename F>
inline double integrate_flow_gl16(const IntensityField& f, const StateX& s,
                                  double len, const F& g) {
  if (!(len > 0.0)) return 0.0;
  const auto pts = hazard_breakpoints(f, s, len);
  double total = 0.0;
  double a = 0.0;
  for (double p : pts) {
    total += integrate_gl16(g, a, p);
    a = p;
  }
  total += integrate_gl16(g, a, len);
  return total;
}

}  // namespace pdq
