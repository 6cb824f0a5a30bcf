#pragma once

// Dense-matrix primitives shared by every model update: a ridge-regularized
// multi-output least-squares solver and a least-squares dictionary solver with
// unit column-norm constraints (solved through its Lagrange dual).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "szsc/errors.hpp"

namespace szsc {

// Shared knobs for the closed-form solvers and the alternating fits.
struct SolverSettings {
  int max_iters = 200;    // sweep cap for the fits, iteration cap for the dual ascent
  double rel_tol = 1e-6;  // relative objective change that counts as converged
  double jitter = 1e-8;   // diagonal relief, applied only when normal equations are singular
};

namespace detail {

template <typename Scalar>
using DenseMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Derived>
typename Derived::Scalar max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? typename Derived::Scalar(0) : m.cwiseAbs().maxCoeff();
}

// A factorization whose smallest pivot is tiny relative to the largest means
// the normal matrix is numerically rank-deficient (the solve would silently
// fall back to a pseudo-inverse).
template <typename Scalar>
bool pivots_healthy(const Eigen::LDLT<DenseMat<Scalar>>& ldlt) {
  if (ldlt.info() != Eigen::Success) return false;
  const auto d = ldlt.vectorD().cwiseAbs().eval();
  const Scalar dmax = d.maxCoeff();
  if (!(dmax > Scalar(0))) return false;
  return d.minCoeff() > Scalar(1e-13) * dmax;
}

// Solve (G + shift I) S = R for symmetric PSD G, with one refinement pass.
// Returns false when the shifted matrix is numerically singular.
template <typename Scalar>
bool solve_spd(const DenseMat<Scalar>& G, const DenseMat<Scalar>& R, Scalar shift,
               DenseMat<Scalar>& out) {
  DenseMat<Scalar> A = G;
  A.diagonal().array() += shift;
  Eigen::LDLT<DenseMat<Scalar>> ldlt(A);
  if (!pivots_healthy<Scalar>(ldlt)) return false;
  out = ldlt.solve(R);
  out += ldlt.solve(R - A * out);
  return out.allFinite();
}

// Mean diagonal of G, used to scale the jitter to the problem.
template <typename Scalar>
Scalar jitter_scale(const DenseMat<Scalar>& G) {
  Scalar scale = G.trace() / Scalar(std::max<Eigen::Index>(G.rows(), 1));
  return scale > Scalar(0) ? scale : Scalar(1);
}

// Columns with squared norm above one are scaled back onto the constraint.
template <typename Scalar>
void project_columns(DenseMat<Scalar>& D) {
  for (Eigen::Index i = 0; i < D.cols(); ++i) {
    const Scalar sq = D.col(i).squaredNorm();
    if (sq > Scalar(1)) D.col(i) /= std::sqrt(sq);
  }
}

}  // namespace detail

// Minimizer of (gamma/2) |S|^2 + 1/2 |B - A S|_F^2, i.e. the solution of
// (gamma I + A^T A) S = A^T B. Jitter is applied only if the normal matrix is
// numerically singular; if it still cannot be solved, the error names k.
template <typename DA, typename DB>
detail::DenseMat<typename DA::Scalar> ridge_solve(const Eigen::MatrixBase<DA>& A,
                                                  const Eigen::MatrixBase<DB>& B,
                                                  typename DA::Scalar gamma,
                                                  const SolverSettings& settings = {}) {
  using Scalar = typename DA::Scalar;
  using Mat = detail::DenseMat<Scalar>;
  if (A.rows() != B.rows()) {
    throw InputError("ridge_solve: A has " + std::to_string(A.rows()) + " rows but B has " +
                     std::to_string(B.rows()));
  }
  if (!(gamma >= Scalar(0))) throw InputError("ridge_solve: gamma must be >= 0");

  const Eigen::Index k = A.cols();
  Mat G = A.derived().transpose() * A.derived();
  G.diagonal().array() += gamma;
  const Mat rhs = A.derived().transpose() * B.derived();
  const Scalar tol = Scalar(1e-8) * (Scalar(1) + detail::max_abs(B));

  Mat S;
  if (detail::solve_spd<Scalar>(G, rhs, Scalar(0), S) &&
      detail::max_abs(Mat(G * S - rhs)) <= tol) {
    return S;
  }

  const Scalar shift = Scalar(settings.jitter) * detail::jitter_scale(G);
  if (shift > Scalar(0) && detail::solve_spd<Scalar>(G, rhs, shift, S)) {
    Mat Gj = G;
    Gj.diagonal().array() += shift;
    if (detail::max_abs(Mat(Gj * S - rhs)) <= tol) return S;
  }
  throw NumericalError("ridge_solve: singular normal matrix (k=" + std::to_string(k) +
                       ", gamma=" + std::to_string(double(gamma)) + ")");
}

// min_D |Y - D C|_F^2 subject to |d_i|^2 <= 1 for every column d_i.
//
// The solution has the form D = Y C^T (C C^T + diag(lambda))^{-1} with
// lambda >= 0 the dual variables. They are found by projected Newton ascent on
// the concave dual, started at zero; coordinates pinned at zero with inward
// gradient are kept out of the Newton system.
template <typename DY, typename DC>
detail::DenseMat<typename DY::Scalar> constrained_dict_solve(const Eigen::MatrixBase<DY>& Y,
                                                             const Eigen::MatrixBase<DC>& C,
                                                             const SolverSettings& settings = {}) {
  using Scalar = typename DY::Scalar;
  using Mat = detail::DenseMat<Scalar>;
  using Vec = detail::DenseVec<Scalar>;
  if (Y.cols() != C.cols()) {
    throw InputError("constrained_dict_solve: Y has " + std::to_string(Y.cols()) +
                     " columns but C has " + std::to_string(C.cols()));
  }
  const Eigen::Index k = C.rows();
  if (k < 1) throw InputError("constrained_dict_solve: C must have at least one row");

  Mat G = C.derived() * C.derived().transpose();        // k x k
  const Mat P = Y.derived() * C.derived().transpose();  // m x k
  const Scalar solve_tol = Scalar(1e-8) * (Scalar(1) + detail::max_abs(P));

  // A rank-deficient normal matrix makes the dual degenerate, so the jitter is
  // folded in once, up front, and the whole ascent runs on the shifted problem.
  if (!detail::pivots_healthy<Scalar>(Eigen::LDLT<Mat>(G))) {
    const Scalar shift = Scalar(settings.jitter) * detail::jitter_scale(G);
    if (!(shift > Scalar(0))) {
      throw NumericalError("constrained_dict_solve: singular normal matrix (k=" +
                           std::to_string(k) + ")");
    }
    G.diagonal().array() += shift;
  }

  const Scalar active_lam = Scalar(1e-8);

  struct State {
    Mat dict;       // D(lambda) = P (G + diag(lambda))^{-1}
    Mat inv;        // (G + diag(lambda))^{-1}
    Vec col_sq;     // squared column norms of dict
    Scalar dual;    // dual value up to the constant |Y|_F^2
    Scalar kkt_res; // worst slackness/feasibility violation
  };

  auto eval = [&](const Vec& lam) -> State {
    Mat A = G;
    A.diagonal() += lam;
    Eigen::LDLT<Mat> ldlt(A);
    Mat Dt = ldlt.solve(P.transpose());
    Dt += ldlt.solve(P.transpose() - A * Dt);
    if (!detail::pivots_healthy<Scalar>(ldlt) || !Dt.allFinite() ||
        detail::max_abs(Mat(A * Dt - P.transpose())) > solve_tol) {
      throw NumericalError("constrained_dict_solve: singular normal matrix (k=" +
                           std::to_string(k) + ")");
    }
    State st;
    st.dict = Dt.transpose();
    st.inv = ldlt.solve(Mat::Identity(k, k));
    st.col_sq = st.dict.colwise().squaredNorm().transpose();
    st.dual = -(P.cwiseProduct(st.dict)).sum() - lam.sum();
    st.kkt_res = Scalar(0);
    for (Eigen::Index i = 0; i < k; ++i) {
      const Scalar excess = st.col_sq[i] - Scalar(1);
      st.kkt_res = std::max(st.kkt_res, lam[i] > active_lam ? std::abs(excess) : excess);
    }
    return st;
  };

  // Returned iterates are projected onto the constraint set, so convergence is
  // judged on the KKT pairing alone: active columns sit on the boundary,
  // inactive columns inside it.
  auto kkt_ok = [&](const Vec& lam, const Vec& col_sq, Scalar active_tol, Scalar inactive_tol) {
    for (Eigen::Index i = 0; i < k; ++i) {
      const Scalar excess = col_sq[i] - Scalar(1);
      if (lam[i] > active_lam) {
        if (std::abs(excess) > active_tol) return false;
      } else if (excess > inactive_tol) {
        return false;
      }
    }
    return true;
  };

  Vec lam = Vec::Zero(k);
  State st = eval(lam);

  // Unconstrained minimizer already feasible: the dual optimum is lambda = 0.
  if ((st.col_sq.array() <= Scalar(1) + Scalar(1e-12)).all()) {
    detail::project_columns(st.dict);
    return st.dict;
  }

  const int dual_iters = std::max(settings.max_iters, 1);
  for (int it = 0; it < dual_iters; ++it) {
    const Vec grad = st.col_sq.array() - Scalar(1);

    if (kkt_ok(lam, st.col_sq, Scalar(1e-7), Scalar(1e-8))) {
      detail::project_columns(st.dict);
      return st.dict;
    }

    // Newton system restricted to coordinates that are free to move.
    std::vector<Eigen::Index> free_idx;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (lam[i] > Scalar(0) || grad[i] > Scalar(0)) free_idx.push_back(i);
    }
    if (free_idx.empty()) break;

    const Mat gram = st.dict.transpose() * st.dict;
    const auto f = static_cast<Eigen::Index>(free_idx.size());
    Mat hess(f, f);
    Vec gf(f);
    for (Eigen::Index a = 0; a < f; ++a) {
      gf[a] = grad[free_idx[a]];
      for (Eigen::Index b = 0; b < f; ++b) {
        hess(a, b) = Scalar(2) * gram(free_idx[a], free_idx[b]) * st.inv(free_idx[a], free_idx[b]);
      }
    }
    hess.diagonal().array() += Scalar(1e-12) * (Scalar(1) + hess.diagonal().maxCoeff());
    const Vec step = hess.ldlt().solve(gf);

    bool accepted = false;
    Scalar t = Scalar(1);
    for (int ls = 0; ls < 60; ++ls, t /= Scalar(2)) {
      Vec trial = lam;
      for (Eigen::Index a = 0; a < f; ++a) {
        trial[free_idx[a]] = std::max(Scalar(0), lam[free_idx[a]] + t * step[a]);
      }
      if ((trial - lam).template lpNorm<Eigen::Infinity>() == Scalar(0)) break;
      State cand = eval(trial);
      // Near the optimum the dual value saturates double precision before the
      // slackness does; a shrinking KKT residual also counts as progress.
      if (cand.dual > st.dual || cand.kkt_res < st.kkt_res) {
        lam = trial;
        st = std::move(cand);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // stationary under clamping; final KKT check below
  }

  // Accept a stalled iterate only if it still satisfies the contract tolerances.
  if (kkt_ok(lam, st.col_sq, Scalar(1e-6), Scalar(1e-7))) {
    detail::project_columns(st.dict);
    return st.dict;
  }

  Mat D_feas = st.dict;
  detail::project_columns(D_feas);
  const Scalar primal = (Y.derived() - D_feas * C.derived()).squaredNorm();
  const Scalar dual_full = st.dual + Y.derived().squaredNorm();
  throw NumericalError("constrained_dict_solve: dual ascent did not converge (duality gap=" +
                       std::to_string(double(primal - dual_full)) + ")");
}

// Cosine similarity in [-1, 1]; vectors with norm below 1e-12 carry no
// direction and compare as 0.
template <typename DA, typename DB>
typename DA::Scalar cosine_sim(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  using Scalar = typename DA::Scalar;
  if (a.size() != b.size()) {
    throw InputError("cosine_sim: length mismatch (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
  const Scalar na = a.derived().norm();
  const Scalar nb = b.derived().norm();
  if (na < Scalar(1e-12) || nb < Scalar(1e-12)) return Scalar(0);
  const Scalar v = a.derived().dot(b.derived()) / (na * nb);
  return std::clamp(v, Scalar(-1), Scalar(1));
}

}  // namespace szsc
