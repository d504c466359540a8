#include "qsa/stiefel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

namespace qsa {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kGradTol = 1e-10;
constexpr std::size_t kMaxBacktracks = 60;
constexpr std::size_t kStallIters = 5;
constexpr std::size_t kMemory = 10;
// Stop when the value drops by less than kWindowFactor * value_tol over
// kWindow iterations. Catches slow sublinear tails.
constexpr std::size_t kWindow = 50;
constexpr double kWindowFactor = 0.1;

double inner(const ComplexMatrix& a, const ComplexMatrix& b) { return (a.conjugate().cwiseProduct(b)).sum().real(); }

}  // namespace

ComplexMatrix stiefel_retract(const ComplexMatrix& m) {
  Eigen::HouseholderQR<ComplexMatrix> qr(m);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(m.rows(), m.cols());
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const cplx d = r(j, j);
    const double a = std::abs(d);
    if (a > 0.0) q.col(j) *= d / a;
  }
  return q;
}

ComplexMatrix stiefel_project(const ComplexMatrix& v, const ComplexMatrix& z) {
  const ComplexMatrix vz = v.adjoint() * z;
  return z - v * (0.5 * (vz + vz.adjoint()));
}

LocalSearchResult minimize_on_stiefel(const StiefelObjective& f, const ComplexMatrix& start,
                                      const LocalSearchOptions& options) {
  ComplexMatrix v = stiefel_retract(start);
  ComplexMatrix egrad;
  double fv = f(v, &egrad);
  ComplexMatrix grad = stiefel_project(v, 2.0 * egrad);
  double gnorm2 = inner(grad, grad);

  // Curvature pairs, transported to the current tangent space by projection.
  std::deque<ComplexMatrix> s_hist;
  std::deque<ComplexMatrix> y_hist;
  std::deque<double> rho_hist;

  std::size_t stall = 0;
  std::deque<double> window{fv};
  bool reset_on_failure = false;
  std::size_t it = 0;

  for (; it < options.max_iters; ++it) {
    if (std::sqrt(gnorm2) < kGradTol) break;

    // Two-loop recursion.
    ComplexMatrix dir = -grad;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t i = s_hist.size(); i-- > 0;) {
      alpha[i] = rho_hist[i] * inner(s_hist[i], dir);
      dir -= alpha[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      const double gamma = inner(s_hist.back(), y_hist.back()) / inner(y_hist.back(), y_hist.back());
      dir *= gamma;
    }
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * inner(y_hist[i], dir);
      dir += (alpha[i] - beta) * s_hist[i];
    }
    double slope = inner(grad, dir);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      dir = -grad;
      slope = -gnorm2;
    }
    double t = s_hist.empty() ? std::min(1.0, 1.0 / std::sqrt(gnorm2)) : 1.0;

    ComplexMatrix v_new;
    ComplexMatrix egrad_new;
    double f_new = 0.0;
    bool accepted = false;
    for (std::size_t bt = 0; bt < kMaxBacktracks; ++bt) {
      v_new = stiefel_retract(v + t * dir);
      f_new = f(v_new, &egrad_new);
      if (std::isfinite(f_new) && f_new <= fv + kArmijo * t * slope) {
        accepted = true;
        break;
      }
      // Safeguarded quadratic interpolation of the backtracking step.
      const double denom = 2.0 * (f_new - fv - slope * t);
      const double t_next = (std::isfinite(f_new) && denom > 0.0) ? -slope * t * t / denom : 0.5 * t;
      t = std::clamp(t_next, 0.1 * t, 0.5 * t);
    }

    if (!accepted) {
      if (reset_on_failure || s_hist.empty()) break;
      reset_on_failure = true;
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      continue;
    }
    reset_on_failure = false;

    const double step = t * dir.norm();
    const double decrease = fv - f_new;
    const ComplexMatrix grad_new = stiefel_project(v_new, 2.0 * egrad_new);

    ComplexMatrix s_vec = stiefel_project(v_new, t * dir);
    ComplexMatrix y_vec = grad_new - stiefel_project(v_new, grad);
    for (auto& h : s_hist) h = stiefel_project(v_new, h);
    for (auto& h : y_hist) h = stiefel_project(v_new, h);
    const double sy = inner(s_vec, y_vec);
    if (sy > 1e-12 * std::sqrt(inner(s_vec, s_vec) * inner(y_vec, y_vec))) {
      s_hist.push_back(std::move(s_vec));
      y_hist.push_back(std::move(y_vec));
      rho_hist.push_back(1.0 / sy);
      if (s_hist.size() > kMemory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    // Transport can spoil curvature of older pairs; refresh their weights.
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double syi = inner(s_hist[i], y_hist[i]);
      rho_hist[i] = syi > 0.0 ? 1.0 / syi : 0.0;
    }

    v = std::move(v_new);
    fv = f_new;
    grad = grad_new;
    gnorm2 = inner(grad, grad);

    if (step < options.step_tol) {
      ++it;
      break;
    }
    stall = (decrease < 1e-3 * options.value_tol) ? stall + 1 : 0;
    if (stall >= kStallIters) {
      ++it;
      break;
    }
    window.push_back(fv);
    if (window.size() > kWindow) {
      window.pop_front();
      if (window.front() - fv < kWindowFactor * options.value_tol) {
        ++it;
        break;
      }
    }
  }

  return LocalSearchResult{std::move(v), fv, it, std::sqrt(gnorm2)};
}

}  // namespace qsa
