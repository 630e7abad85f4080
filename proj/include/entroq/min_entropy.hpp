#pragma once

// Conditional min-entropy H(A|E) as a semidefinite program with a
// feasibility certificate, plus closed-form oracles for special state
// families and the weighted 2-norm bound used by the cipher proofs.
//
// The optimization solved is the primal
//
//     2^{-H(A|E)} = min { tr sigma : I^A (x) sigma >= rho^{AE} },
//
// by barrier path-following: Newton centering on
// f_t(sigma) = t tr(sigma) - log det(I (x) sigma - rho), with the barrier
// multiplier increased geometrically. Each stage produces a strictly
// feasible primal point (upper bound on tr sigma) and a corrected dual
// point Y with tr_A Y = I (lower bound tr(Y rho)), so the reported value
// carries a certified bracket. The solver stops once the bracket is below
// the requested tolerance in bits.

#include <cmath>
#include <optional>

#include "entroq/linalg.hpp"

namespace entroq {

struct MinEntropyResult {
  double value = 0;              // H(A|E) in bits, may be negative
  DensityOperator sigma_star;    // optimal conditioning witness on E
  double certificate_gap = 0;    // lambda_min(2^{-value} I (x) sigma* - rho)
  double bracket_bits = 0;       // certified distance to the true optimum
  int iterations = 0;            // Newton steps spent
};

// Non-convergence carries the best certified bound pair.
class MinEntropySolverError : public std::runtime_error {
 public:
  MinEntropySolverError(const std::string& what, double lower_bits, double upper_bits)
      : std::runtime_error(what), lower_bits(lower_bits), upper_bits(upper_bits) {}
  double lower_bits;
  double upper_bits;
};

namespace detail {

// Orthonormal Hermitian basis of d x d matrices under <A,B> = tr(AB):
// diagonal units first, then symmetric and antisymmetric pair combinations.
inline std::vector<Matrix> hermitian_basis(Index d) {
  std::vector<Matrix> basis;
  basis.reserve(size_t(d) * size_t(d));
  for (Index i = 0; i < d; ++i) {
    Matrix b = Matrix::Zero(d, d);
    b(i, i) = 1.0;
    basis.push_back(b);
  }
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Index i = 0; i < d; ++i)
    for (Index k = i + 1; k < d; ++k) {
      Matrix s = Matrix::Zero(d, d);
      s(i, k) = inv_sqrt2;
      s(k, i) = inv_sqrt2;
      basis.push_back(s);
      Matrix a = Matrix::Zero(d, d);
      a(i, k) = Cplx(0, inv_sqrt2);
      a(k, i) = Cplx(0, -inv_sqrt2);
      basis.push_back(a);
    }
  return basis;
}

inline Matrix sigma_from_coords(const Eigen::VectorXd& x, const std::vector<Matrix>& basis,
                                Index d) {
  Matrix sigma = Matrix::Zero(d, d);
  for (size_t j = 0; j < basis.size(); ++j) sigma += x[Index(j)] * basis[j];
  return sigma;
}

inline Eigen::VectorXcd vec_of(const Matrix& m) {
  return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

}  // namespace detail

inline MinEntropyResult cond_min_entropy(const DensityOperator& rho,
                                         double tol_bits = 1e-6,
                                         int iteration_cap = 10000) {
  if (rho.subsystem_count() != 2)
    throw std::invalid_argument("conditional min-entropy expects a bipartite profile");
  const Index da = rho.dims()[0];
  const Index de = rho.dims()[1];
  const Index dim = da * de;
  const Matrix& r = rho.matrix();

  const auto basis = detail::hermitian_basis(de);
  const size_t nb = basis.size();

  // Basis-vectorization matrix: column j = vec(B_j).
  Matrix bmat(de * de, Index(nb));
  for (size_t j = 0; j < nb; ++j) bmat.col(Index(j)) = detail::vec_of(basis[j]);

  // Strictly feasible start: sigma = (lambda_max(rho) + 1/2) I.
  const double lam_max = eig_hermitian(r).values.maxCoeff();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(Index(nb));
  for (Index i = 0; i < de; ++i) x[i] = lam_max + 0.5;

  const auto assemble_s = [&](const Eigen::VectorXd& coords) -> Matrix {
    return kron(Matrix::Identity(da, da), detail::sigma_from_coords(coords, basis, de)) - r;
  };

  // f_t(x) = t tr(sigma) - log det(S); returns nullopt when S is not PD.
  const auto objective = [&](const Eigen::VectorXd& coords,
                             double t) -> std::optional<double> {
    Matrix s = assemble_s(coords);
    Eigen::LLT<Matrix> llt(s);
    if (llt.info() != Eigen::Success) return std::nullopt;
    double logdet = 0;
    for (Index i = 0; i < dim; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i).real());
    double trace_sigma = 0;
    for (Index i = 0; i < de; ++i) trace_sigma += coords[i];
    return t * trace_sigma - logdet;
  };

  double best_hi = std::numeric_limits<double>::infinity();
  double best_lo = 0;
  Eigen::VectorXd best_x = x;
  int iterations = 0;

  const auto fail = [&](const std::string& reason) {
    const double lower = std::isfinite(best_hi)
                             ? -std::log2(best_hi)
                             : -std::log2(double(de) * (lam_max + 0.5));
    const double upper = best_lo > 0 ? -std::log2(best_lo) : std::log2(double(da));
    throw MinEntropySolverError("min-entropy solver did not converge: " + reason, lower,
                                upper);
  };

  double t = 1.0;
  const double mu = 10.0;
  const double t_max = 1e14;

  while (true) {
    // Newton centering at barrier multiplier t.
    for (int inner = 0; inner < 200; ++inner) {
      if (++iterations > iteration_cap) fail("iteration cap reached");
      Matrix s = assemble_s(x);
      Eigen::LLT<Matrix> llt(s);
      if (llt.info() != Eigen::Success) fail("interior point lost");
      Matrix s_inv = llt.solve(Matrix::Identity(dim, dim));
      s_inv = (s_inv + s_inv.adjoint()) / 2.0;

      // Gradient through P = tr_A S^{-1}.
      Matrix p = Matrix::Zero(de, de);
      for (Index a = 0; a < da; ++a) p += s_inv.block(a * de, a * de, de, de);
      Eigen::VectorXd grad = Eigen::VectorXd::Zero(Index(nb));
      for (size_t j = 0; j < nb; ++j)
        grad[Index(j)] = t * basis[j].trace().real() - (p * basis[j]).trace().real();

      // Hessian via the superoperator sum_{a,b} G_ba^T (x) G_ab.
      Matrix super = Matrix::Zero(de * de, de * de);
      for (Index a = 0; a < da; ++a)
        for (Index b = 0; b < da; ++b)
          super += kron(s_inv.block(b * de, a * de, de, de).transpose(),
                        s_inv.block(a * de, b * de, de, de));
      Matrix hc = bmat.adjoint() * super * bmat;
      Eigen::MatrixXd hess = hc.real();
      hess = (hess + hess.transpose()) / 2.0;

      Eigen::LDLT<Eigen::MatrixXd> hsolve(hess);
      Eigen::VectorXd step = hsolve.solve(-grad);
      double decrement_sq = -grad.dot(step);
      if (!(decrement_sq > 0)) {
        // Fall back to a regularized system if the factorization degraded.
        Eigen::MatrixXd ridge = hess;
        ridge.diagonal().array() += 1e-10 * (1.0 + hess.diagonal().maxCoeff());
        step = ridge.ldlt().solve(-grad);
        decrement_sq = -grad.dot(step);
        if (!(decrement_sq > 0)) break;
      }
      if (decrement_sq / 2.0 < 1e-11) break;

      const double f0 = *objective(x, t);
      double alpha = 1.0;
      bool moved = false;
      for (int halvings = 0; halvings < 60; ++halvings) {
        auto f1 = objective(x + alpha * step, t);
        if (f1 && *f1 <= f0 - 0.25 * alpha * decrement_sq) {
          x += alpha * step;
          moved = true;
          break;
        }
        alpha /= 2.0;
      }
      if (!moved) break;
    }

    // Primal bound from the strictly feasible center.
    double p_hi = 0;
    for (Index i = 0; i < de; ++i) p_hi += x[i];
    if (p_hi < best_hi) {
      best_hi = p_hi;
      best_x = x;
    }

    // Dual bound: normalize Y = S^{-1}/t so that tr_A Y = I exactly.
    {
      Matrix s = assemble_s(x);
      Eigen::LLT<Matrix> llt(s);
      if (llt.info() == Eigen::Success) {
        Matrix y = llt.solve(Matrix::Identity(dim, dim)) / t;
        y = (y + y.adjoint()) / 2.0;
        Matrix ta = Matrix::Zero(de, de);
        for (Index a = 0; a < da; ++a) ta += y.block(a * de, a * de, de, de);
        Matrix corr = kron(Matrix::Identity(da, da), matrix_inv_sqrt_psd(ta, 1e-300));
        const double p_lo = (corr * y * corr * r).trace().real();
        best_lo = std::max(best_lo, p_lo);
      }
    }

    if (best_lo > 0 && best_hi < std::numeric_limits<double>::infinity()) {
      const double bracket = std::log2(best_hi) - std::log2(best_lo);
      if (bracket >= 0 && bracket <= tol_bits) break;
    }
    if (t >= t_max) fail("barrier multiplier exhausted");
    t *= mu;
  }

  Matrix sigma = detail::sigma_from_coords(best_x, basis, de);
  sigma = (sigma + sigma.adjoint()) / 2.0;
  const double trace_sigma = sigma.trace().real();
  MinEntropyResult result{
      -std::log2(trace_sigma),
      DensityOperator(sigma / trace_sigma, {de}, {rho.labels()[1]}),
      min_eigenvalue(kron(Matrix::Identity(da, da), sigma) - r),
      std::max(0.0, std::log2(best_hi) - std::log2(best_lo)),
      iterations};
  return result;
}

// H(rho) = -log of the largest eigenvalue.
inline double min_entropy_unconditional(const DensityOperator& rho) {
  return -std::log2(eig_hermitian(rho.matrix()).values.maxCoeff());
}

// Optimal probability of guessing a binary classical value from its quantum
// side information (Helstrom): 1/2 (1 + || p0 rho0 - p1 rho1 ||_1).
inline double guess_prob_binary_cq(double p0, double p1, const DensityOperator& rho0,
                                   const DensityOperator& rho1) {
  if (std::abs(p0 + p1 - 1.0) > 1e-10 || p0 < 0 || p1 < 0)
    throw std::invalid_argument("probabilities must form a distribution");
  if (rho0.dims() != rho1.dims()) throw std::invalid_argument("dimension mismatch");
  return 0.5 * (1.0 + trace_norm_raw(p0 * rho0.matrix() - p1 * rho1.matrix()));
}

// CQ state sum_i p_i |i><i|^A (x) rho_i^E with the classical register first.
inline DensityOperator make_binary_cq_state(double p0, const DensityOperator& rho0,
                                            double p1, const DensityOperator& rho1) {
  if (rho0.dims() != rho1.dims()) throw std::invalid_argument("dimension mismatch");
  const Index de = rho0.dim();
  Matrix out = Matrix::Zero(2 * de, 2 * de);
  out.block(0, 0, de, de) = p0 * rho0.matrix();
  out.block(de, de, de, de) = p1 * rho1.matrix();
  return DensityOperator(out, {2, de}, {"A", "E"});
}

// Both sides of the weighted norm bound
// ||S||_1 <= sqrt( tr(sigma) tr(S sigma^{-1/2} S sigma^{-1/2}) ).
// sigma must dominate the support of S.
struct RennerBound {
  double lhs = 0;
  double rhs = 0;
};

inline RennerBound renner_norm_bound(const HermitianOperator& s,
                                     const HermitianOperator& sigma) {
  if (s.dim() != sigma.dim()) throw std::invalid_argument("dimension mismatch");
  EigSystem es = eig_hermitian(sigma.matrix());
  const double lam_max = es.values.maxCoeff();
  if (lam_max <= 0) throw std::invalid_argument("sigma must be positive on its support");
  const double support_tol = lam_max * 1e-13;

  // Support check: S must live inside the support of sigma.
  Matrix proj = Matrix::Zero(sigma.dim(), sigma.dim());
  bool full_rank = true;
  for (Index i = 0; i < es.values.size(); ++i) {
    if (es.values[i] > support_tol)
      proj += es.vectors.col(i) * es.vectors.col(i).adjoint();
    else
      full_rank = false;
  }
  if (!full_rank) {
    const double leak = (s.matrix() - proj * s.matrix() * proj).cwiseAbs().maxCoeff();
    if (leak > 1e-8)
      throw std::invalid_argument("operator leaks outside the support of sigma");
  }

  const Matrix inv_sqrt = matrix_inv_sqrt_psd(sigma.matrix(), support_tol);
  const Matrix twisted = inv_sqrt * s.matrix() * inv_sqrt;
  RennerBound out;
  out.lhs = trace_norm_raw(s.matrix());
  out.rhs = std::sqrt(std::max(
      0.0, sigma.matrix().trace().real() * (s.matrix() * twisted).trace().real()));
  return out;
}

// Conditioning on a classical register costs at most log |K| bits:
// H(E|AK) >= H(E|A) - log|K| for omega classical on K.
struct ClassicalKeyCheck {
  double h_e_given_ak = 0;
  double h_e_given_a = 0;
  double log2_keys = 0;
  double slack = 0;  // h_e_given_ak - h_e_given_a + log2_keys, >= 0 up to tol
};

inline ClassicalKeyCheck cond_min_entropy_classical_key(const DensityOperator& omega,
                                                        double tol_bits = 1e-6) {
  if (omega.subsystem_count() != 3)
    throw std::invalid_argument("expected a tripartite [E, A, K] profile");
  const Index de = omega.dims()[0];
  const Index da = omega.dims()[1];
  const Index dk = omega.dims()[2];

  // K must be classical: block-diagonal in the computational basis of K.
  const Matrix& m = omega.matrix();
  double off_block = 0;
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c)
      if (r % dk != c % dk) off_block = std::max(off_block, std::abs(m(r, c)));
  if (off_block > 1e-10)
    throw std::invalid_argument("K register is not classical (off-block mass)");

  // H(E|AK): the [A,K] pair conditions jointly; the layout is already
  // contiguous so merging is a profile change only.
  DensityOperator joint(m, {de, da * dk}, {omega.labels()[0], "cond"});
  MinEntropyResult h_eak = cond_min_entropy(joint, tol_bits);

  DensityOperator traced = partial_trace(omega, {omega.labels()[2]});
  MinEntropyResult h_ea = cond_min_entropy(traced, tol_bits);

  ClassicalKeyCheck out;
  out.h_e_given_ak = h_eak.value;
  out.h_e_given_a = h_ea.value;
  out.log2_keys = std::log2(double(dk));
  out.slack = out.h_e_given_ak - out.h_e_given_a + out.log2_keys;
  return out;
}

}  // namespace entroq
