#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "cso/conjugation.hpp"
#include "cso/errors.hpp"

// Distance-to-complex-symmetric upper bounds for small matrices. A conjugation
// C = S conj(.) is written through a symmetric unitary S = W W^T, W = exp(iH),
// H Hermitian; T = C T* C iff T S = S T^T.

namespace cso {

inline constexpr Eigen::Index kMaxFitDimension = 64;

/// Hermitian H <-> n^2 real coordinates: the diagonal, then (Re, Im) of each
/// strictly upper entry in row-major order.
inline Eigen::MatrixXcd hermitian_from_params(const Eigen::VectorXd& x, Eigen::Index n) {
  if (x.size() != n * n) throw DomainError("hermitian_from_params: expected n^2 parameters");
  Eigen::MatrixXcd h(n, n);
  Eigen::Index p = 0;
  for (Eigen::Index j = 0; j < n; ++j) h(j, j) = x(p++);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = j + 1; k < n; ++k) {
      h(j, k) = Complex(x(p), x(p + 1));
      h(k, j) = Complex(x(p), -x(p + 1));
      p += 2;
    }
  return h;
}

inline Eigen::VectorXd params_from_hermitian(const Eigen::MatrixXcd& h) {
  const Eigen::Index n = h.rows();
  Eigen::VectorXd x(n * n);
  Eigen::Index p = 0;
  for (Eigen::Index j = 0; j < n; ++j) x(p++) = h(j, j).real();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = j + 1; k < n; ++k) {
      x(p++) = h(j, k).real();
      x(p++) = h(j, k).imag();
    }
  return x;
}

/// H, with W = exp(iH) and S = W W^T computed from one eigendecomposition.
class SymmetricUnitaryParam {
 public:
  explicit SymmetricUnitaryParam(Eigen::MatrixXcd h) : h_(std::move(h)) {
    if (h_.rows() != h_.cols() || h_.rows() < 1) throw DomainError("SymmetricUnitaryParam: H must be square");
    if (operator_norm(h_ - h_.adjoint()) > 1e-12 * (1.0 + operator_norm(h_)))
      throw DomainError("SymmetricUnitaryParam: H is not Hermitian");
    h_ = (h_ + h_.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h_);
    v_ = es.eigenvectors();
    lambda_ = es.eigenvalues();
    const Eigen::VectorXcd phase = (Complex(0, 1) * lambda_.cast<Complex>()).array().exp();
    w_ = v_ * phase.asDiagonal() * v_.adjoint();
    s_ = w_ * w_.transpose();
  }

  static SymmetricUnitaryParam from_params(const Eigen::VectorXd& x, Eigen::Index n) {
    return SymmetricUnitaryParam(hermitian_from_params(x, n));
  }

  const Eigen::MatrixXcd& H() const { return h_; }
  const Eigen::MatrixXcd& W() const { return w_; }
  const Eigen::MatrixXcd& S() const { return s_; }
  const Eigen::MatrixXcd& eigenvectors() const { return v_; }
  const Eigen::VectorXd& eigenvalues() const { return lambda_; }

 private:
  Eigen::MatrixXcd h_, v_, w_, s_;
  Eigen::VectorXd lambda_;
};

inline Eigen::MatrixXcd commutator_defect(const Eigen::MatrixXcd& t, const Eigen::MatrixXcd& s) {
  return t * s - s * t.transpose();
}

/// ||T S - S T^T||; S must be symmetric and unitary to `tol`.
inline double defect(const Eigen::MatrixXcd& t, const Eigen::MatrixXcd& s, double tol = 1e-10) {
  if (t.rows() != t.cols() || s.rows() != s.cols() || t.rows() != s.rows())
    throw DomainError("defect: dimension mismatch");
  if (!is_symmetric_unitary(s, tol)) throw DomainError("defect: S is not a symmetric unitary");
  return operator_norm(commutator_defect(t, s));
}

/// Anti-diagonal identity, the matrix of coordinate reversal.
inline Eigen::MatrixXcd reversal_matrix(Eigen::Index n) {
  Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) j(i, n - 1 - i) = 1.0;
  return j;
}

/// An H with exp(iH) exp(iH)^T equal to the reversal: J = V diag(+-1) V^T with
/// V real orthogonal, so H = V diag(0 or pi/2) V^T works.
inline Eigen::MatrixXcd reversal_hermitian(Eigen::Index n) {
  const Eigen::MatrixXd j = reversal_matrix(n).real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  Eigen::VectorXd half(n);
  for (Eigen::Index i = 0; i < n; ++i) half(i) = es.eigenvalues()(i) < 0 ? M_PI / 2 : 0.0;
  const Eigen::MatrixXd h = es.eigenvectors() * half.asDiagonal() * es.eigenvectors().transpose();
  return h.cast<Complex>();
}

/// f(x) = ||T S(x) - S(x) T^T||_F^2 and its gradient in the real coordinates.
inline double objective_and_gradient(const Eigen::MatrixXcd& t, const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
  const Eigen::Index n = t.rows();
  const SymmetricUnitaryParam p = SymmetricUnitaryParam::from_params(x, n);
  const Eigen::MatrixXcd m = commutator_defect(t, p.S());
  const double f = m.squaredNorm();
  if (!grad) return f;

  // df = 2 Re <G_S, dS>, pulled back through S = W W^T and the
  // divided-difference form of the derivative of exp(iH).
  const Eigen::MatrixXcd gs = t.adjoint() * m - m * t.conjugate();
  const Eigen::MatrixXcd gw = (gs + gs.transpose()) * p.W().conjugate();
  const Eigen::MatrixXcd& v = p.eigenvectors();
  const Eigen::VectorXd& lam = p.eigenvalues();
  Eigen::MatrixXcd b = v.adjoint() * gw * v;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) {
      const double d = (lam(j) - lam(k)) / 2;
      const double sinc = std::abs(d) < 1e-8 ? 1.0 - d * d / 6 : std::sin(d) / d;
      const Complex phi = std::polar(sinc, (lam(j) + lam(k)) / 2);
      b(j, k) *= std::conj(phi);
    }
  const Eigen::MatrixXcd a = Complex(0, -1) * (v * b * v.adjoint());

  grad->resize(n * n);
  Eigen::Index q = 0;
  for (Eigen::Index j = 0; j < n; ++j) (*grad)(q++) = 2 * a(j, j).real();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = j + 1; k < n; ++k) {
      (*grad)(q++) = 2 * (a(j, k).real() + a(k, j).real());
      (*grad)(q++) = 2 * (a(j, k).imag() - a(k, j).imag());
    }
  return f;
}

struct FitOptions {
  unsigned restarts = 16;  // starts in total; start 0 is the reversal warm start
  unsigned max_iters = 1000;
  double tol = 1e-10;
  std::uint64_t seed = 0;
};

struct FitResult {
  Eigen::MatrixXcd best_S;
  double residual = 0;  // operator norm, recomputed from best_S
  double objective = 0;  // Frobenius^2 at the optimizer's end point
  unsigned restarts_used = 0;
  unsigned best_restart = 0;
  unsigned iterations = 0;  // of the best restart
  bool converged = false;
};

namespace detail {

struct LocalResult {
  Eigen::VectorXd x;
  double f = 0;
  unsigned iterations = 0;
  bool converged = false;
};

// L-BFGS with Armijo backtracking. Stops at the target objective, the
// iteration cap, or when the objective stops decreasing at double precision.
// Converged means the target was met or the end point is stationary
// (gradient below 1e-6 relative to ||T||_F^2).
inline LocalResult lbfgs(const Eigen::MatrixXcd& t, Eigen::VectorXd x, unsigned max_iters, double f_target) {
  constexpr std::size_t kMemory = 10;
  constexpr double kArmijo = 1e-4;
  constexpr unsigned kStallLimit = 5;
  const double gtol = 1e-6 * std::max(1.0, t.squaredNorm());
  std::deque<Eigen::VectorXd> ss, ys;
  Eigen::VectorXd g;
  double f = objective_and_gradient(t, x, &g);
  LocalResult r;
  unsigned stalled = 0;
  for (unsigned it = 0;; ++it) {
    r.iterations = it;
    if (f <= f_target || g.norm() <= 1e-15 * std::max(1.0, t.squaredNorm())) {
      r.converged = true;
      break;
    }
    if (it == max_iters || stalled >= kStallLimit) {
      r.converged = g.norm() <= gtol;
      break;
    }

    Eigen::VectorXd q = g;
    std::vector<double> alpha(ss.size());
    for (std::size_t i = ss.size(); i-- > 0;) {
      alpha[i] = ss[i].dot(q) / ys[i].dot(ss[i]);
      q -= alpha[i] * ys[i];
    }
    if (!ss.empty()) q *= ss.back().dot(ys.back()) / ys.back().squaredNorm();
    else q /= std::max(1.0, g.norm());
    for (std::size_t i = 0; i < ss.size(); ++i) {
      const double beta = ys[i].dot(q) / ys[i].dot(ss[i]);
      q += ss[i] * (alpha[i] - beta);
    }
    Eigen::VectorXd dir = -q;
    double slope = g.dot(dir);
    if (slope >= 0) {
      ss.clear();
      ys.clear();
      dir = -g / std::max(1.0, g.norm());
      slope = g.dot(dir);
    }

    double step = 1.0;
    Eigen::VectorXd xn, gn;
    double fn = f;
    bool accepted = false;
    for (int k = 0; k < 60; ++k, step /= 2) {
      xn = x + step * dir;
      fn = objective_and_gradient(t, xn, &gn);
      if (fn <= f + kArmijo * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      r.converged = g.norm() <= gtol;
      break;
    }
    stalled = f - fn <= 1e-15 * std::max(1.0, f) ? stalled + 1 : 0;

    const Eigen::VectorXd s = xn - x, y = gn - g;
    if (y.dot(s) > 1e-16 * s.norm() * y.norm()) {
      ss.push_back(s);
      ys.push_back(y);
      if (ss.size() > kMemory) {
        ss.pop_front();
        ys.pop_front();
      }
    }
    x = std::move(xn);
    g = std::move(gn);
    f = fn;
  }
  r.x = std::move(x);
  r.f = f;
  return r;
}

}  // namespace detail

/// Multi-start local minimization of ||T S - S T^T||_F^2 over symmetric
/// unitaries. The first start whose residual is within tol ends the search;
/// otherwise the lowest residual wins, ties to the lower start index.
inline FitResult fit(const Eigen::MatrixXcd& t, const FitOptions& opts = {}) {
  if (t.rows() != t.cols() || t.rows() < 1) throw DomainError("fit: T must be square and nonempty");
  if (t.rows() > kMaxFitDimension) throw DomainError("fit: dimension above " + std::to_string(kMaxFitDimension));
  if (opts.restarts < 1) throw DomainError("fit: need at least one start");
  if (!(opts.tol > 0)) throw DomainError("fit: tol must be positive");
  if (!t.allFinite()) throw DomainError("fit: T has non-finite entries");

  const Eigen::Index n = t.rows();
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(-M_PI, M_PI);

  FitResult best;
  best.residual = std::numeric_limits<double>::infinity();
  for (unsigned r = 0; r < opts.restarts; ++r) {
    Eigen::VectorXd x0;
    if (r == 0) {
      x0 = params_from_hermitian(reversal_hermitian(n));
    } else {
      x0.resize(n * n);
      for (Eigen::Index i = 0; i < x0.size(); ++i) x0(i) = unif(rng);
    }
    const detail::LocalResult lr = detail::lbfgs(t, x0, opts.max_iters, opts.tol * opts.tol);
    const Eigen::MatrixXcd s = SymmetricUnitaryParam::from_params(lr.x, n).S();
    const double res = operator_norm(commutator_defect(t, s));
    best.restarts_used = r + 1;
    if (res < best.residual) {
      best.best_S = s;
      best.residual = res;
      best.objective = lr.f;
      best.best_restart = r;
      best.iterations = lr.iterations;
      best.converged = lr.converged;
    }
    if (best.residual <= opts.tol) break;
  }
  return best;
}

}  // namespace cso
