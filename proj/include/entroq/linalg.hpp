#pragma once

// Exact dense complex-matrix algebra over multipartite systems:
// construction, composition, partial trace, norms, fidelity and
// operator-order checks. All operations are pure functions on immutable
// values; subsystem order is fixed by the labels list and never silently
// reordered.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "entroq/common.hpp"

namespace entroq {

namespace detail {

inline std::vector<std::string> default_labels(size_t count) {
  std::vector<std::string> labels(count);
  for (size_t i = 0; i < count; ++i) labels[i] = "S" + std::to_string(i);
  return labels;
}

inline Index product(const std::vector<Index>& dims) {
  Index p = 1;
  for (Index d : dims) p *= d;
  return p;
}

// Strides for row-major multi-indices: subsystem 0 is the most significant
// digit, i.e. the first (leftmost) tensor factor.
inline std::vector<Index> strides(const std::vector<Index>& dims) {
  std::vector<Index> s(dims.size());
  Index acc = 1;
  for (size_t k = dims.size(); k-- > 0;) {
    s[k] = acc;
    acc *= dims[k];
  }
  return s;
}

inline void check_profile(const Matrix& m, const std::vector<Index>& dims,
                          const std::vector<std::string>& labels) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix must be square");
  if (dims.empty()) throw std::invalid_argument("dims must be nonempty");
  for (Index d : dims)
    if (d < 1) throw std::invalid_argument("subsystem dimensions must be >= 1");
  if (product(dims) != m.rows())
    throw std::invalid_argument("product of dims must equal matrix side");
  if (m.rows() > kMaxJointDim)
    throw std::invalid_argument("joint dimension exceeds desk-scale limit 512");
  if (labels.size() != dims.size())
    throw std::invalid_argument("labels must match dims in length");
  std::set<std::string> seen(labels.begin(), labels.end());
  if (seen.size() != labels.size())
    throw std::invalid_argument("subsystem labels must be distinct");
}

}  // namespace detail

// Kronecker product, subsystem 0 most significant.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Partial trace of a raw matrix over the subsystem positions in `traced`.
// Remaining subsystems keep their original order. Works on arbitrary
// (not necessarily Hermitian) square matrices.
inline Matrix partial_trace_raw(const Matrix& m, const std::vector<Index>& dims,
                                const std::vector<size_t>& traced) {
  const auto str = detail::strides(dims);
  std::vector<size_t> kept;
  std::vector<bool> is_traced(dims.size(), false);
  for (size_t t : traced) {
    if (t >= dims.size()) throw std::invalid_argument("traced subsystem out of range");
    if (is_traced[t]) throw std::invalid_argument("subsystem traced twice");
    is_traced[t] = true;
  }
  for (size_t k = 0; k < dims.size(); ++k)
    if (!is_traced[k]) kept.push_back(k);

  Index kept_dim = 1, traced_dim = 1;
  for (size_t k : kept) kept_dim *= dims[k];
  for (size_t t : traced) traced_dim *= dims[t];

  // Enumerate kept and traced multi-indices through mixed-radix counters.
  std::vector<Index> kept_offsets(static_cast<size_t>(kept_dim));
  {
    std::vector<Index> digit(kept.size(), 0);
    for (Index r = 0; r < kept_dim; ++r) {
      Index off = 0;
      for (size_t q = 0; q < kept.size(); ++q) off += digit[q] * str[kept[q]];
      kept_offsets[static_cast<size_t>(r)] = off;
      for (size_t q = kept.size(); q-- > 0;) {
        if (++digit[q] < dims[kept[q]]) break;
        digit[q] = 0;
      }
    }
  }
  std::vector<Index> traced_offsets(static_cast<size_t>(traced_dim));
  {
    std::vector<Index> digit(traced.size(), 0);
    for (Index s = 0; s < traced_dim; ++s) {
      Index off = 0;
      for (size_t q = 0; q < traced.size(); ++q) off += digit[q] * str[traced[q]];
      traced_offsets[static_cast<size_t>(s)] = off;
      for (size_t q = traced.size(); q-- > 0;) {
        if (++digit[q] < dims[traced[q]]) break;
        digit[q] = 0;
      }
    }
  }

  Matrix out = Matrix::Zero(kept_dim, kept_dim);
  for (Index r = 0; r < kept_dim; ++r)
    for (Index c = 0; c < kept_dim; ++c) {
      Cplx sum(0, 0);
      for (Index s = 0; s < traced_dim; ++s) {
        const Index off = traced_offsets[static_cast<size_t>(s)];
        sum += m(kept_offsets[static_cast<size_t>(r)] + off,
                 kept_offsets[static_cast<size_t>(c)] + off);
      }
      out(r, c) = sum;
    }
  return out;
}

// Reorders subsystems: `order[i]` is the old position placed at new slot i.
inline Matrix permute_raw(const Matrix& m, const std::vector<Index>& dims,
                          const std::vector<size_t>& order) {
  if (order.size() != dims.size()) throw std::invalid_argument("bad permutation size");
  const auto str = detail::strides(dims);
  std::vector<Index> new_dims(order.size());
  for (size_t i = 0; i < order.size(); ++i) new_dims[i] = dims[order[i]];
  const auto new_str = detail::strides(new_dims);
  const Index dim = m.rows();

  // map[old_flat] = new_flat
  std::vector<Index> map(static_cast<size_t>(dim));
  std::vector<Index> digit(dims.size(), 0);
  for (Index a = 0; a < dim; ++a) {
    Index b = 0;
    for (size_t i = 0; i < order.size(); ++i) b += digit[order[i]] * new_str[i];
    map[static_cast<size_t>(a)] = b;
    for (size_t q = dims.size(); q-- > 0;) {
      if (++digit[q] < dims[q]) break;
      digit[q] = 0;
    }
  }
  Matrix out(dim, dim);
  for (Index r = 0; r < dim; ++r)
    for (Index c = 0; c < dim; ++c)
      out(map[static_cast<size_t>(r)], map[static_cast<size_t>(c)]) = m(r, c);
  return out;
}

// Hermitian eigendecomposition is the single primitive behind norms,
// positivity checks and matrix functions. Eigenvalues within kTolPsd below
// zero are clamped to 0 before applying functions with restricted domain.
struct EigSystem {
  Eigen::VectorXd values;
  Matrix vectors;
};

inline EigSystem eig_hermitian(const Matrix& m, double herm_tol = kTolHerm) {
  if (!is_hermitian(m, herm_tol))
    throw std::invalid_argument("matrix is not Hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<Matrix> solver((m + m.adjoint()) / 2.0);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecomposition failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline double min_eigenvalue(const Matrix& m, double herm_tol = kTolHerm) {
  return eig_hermitian(m, herm_tol).values.minCoeff();
}

// f applied to the clamped spectrum; negative eigenvalues within psd_tol
// are treated as exact zeros.
template <typename F>
Matrix hermitian_function(const Matrix& m, F f, double psd_tol = kTolPsd) {
  EigSystem es = eig_hermitian(m);
  Eigen::VectorXd vals = es.values;
  for (Index i = 0; i < vals.size(); ++i) {
    if (vals[i] < 0 && vals[i] > -psd_tol) vals[i] = 0;
    vals[i] = f(vals[i]);
  }
  return es.vectors * vals.cast<Cplx>().asDiagonal() * es.vectors.adjoint();
}

inline Matrix matrix_sqrt_psd(const Matrix& m) {
  return hermitian_function(m, [](double x) { return x > 0 ? std::sqrt(x) : 0.0; });
}

// Pseudo-inverse square root on the support: eigenvalues <= support_tol map to 0.
inline Matrix matrix_inv_sqrt_psd(const Matrix& m, double support_tol = 0.0) {
  return hermitian_function(
      m, [support_tol](double x) { return x > support_tol ? 1.0 / std::sqrt(x) : 0.0; });
}

class HermitianOperator;

// Positive semidefinite, unit-trace matrix tagged with a subsystem profile.
// The universal state carrier.
class DensityOperator {
 public:
  DensityOperator(Matrix m, std::vector<Index> dims, std::vector<std::string> labels)
      : matrix_(std::move(m)), dims_(std::move(dims)), labels_(std::move(labels)) {
    detail::check_profile(matrix_, dims_, labels_);
    if (!is_hermitian(matrix_, kTolHerm))
      throw std::invalid_argument("density operator must be Hermitian within 1e-10");
    const double tr = matrix_.trace().real();
    if (std::abs(tr - 1.0) > 1e-10 || std::abs(matrix_.trace().imag()) > 1e-10)
      throw std::invalid_argument("density operator must have unit trace");
    Eigen::SelfAdjointEigenSolver<Matrix> solver((matrix_ + matrix_.adjoint()) / 2.0,
                                                 Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -kTolPsd)
      throw std::invalid_argument("density operator must be positive semidefinite");
  }

  DensityOperator(Matrix m, std::vector<Index> dims)
      : DensityOperator(std::move(m), dims, detail::default_labels(dims.size())) {}

  const Matrix& matrix() const { return matrix_; }
  const std::vector<Index>& dims() const { return dims_; }
  const std::vector<std::string>& labels() const { return labels_; }
  Index dim() const { return matrix_.rows(); }
  size_t subsystem_count() const { return dims_.size(); }

  size_t label_index(const std::string& name) const {
    for (size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == name) return i;
    throw std::invalid_argument("unknown subsystem label: " + name);
  }

  Index dim_of(const std::string& name) const { return dims_[label_index(name)]; }

  DensityOperator relabeled(std::vector<std::string> labels) const {
    return DensityOperator(matrix_, dims_, std::move(labels));
  }

  // Collapses the subsystem profile to a single subsystem without touching
  // the matrix; memory layout already matches the contiguous grouping.
  DensityOperator merged(const std::string& label) const {
    return DensityOperator(matrix_, {dim()}, {label});
  }

 private:
  Matrix matrix_;
  std::vector<Index> dims_;
  std::vector<std::string> labels_;
};

// Square Hermitian matrix with a subsystem profile; no trace or positivity
// constraint. Houses differences of states and SDP certificate operands.
class HermitianOperator {
 public:
  HermitianOperator(Matrix m, std::vector<Index> dims, std::vector<std::string> labels)
      : matrix_(std::move(m)), dims_(std::move(dims)), labels_(std::move(labels)) {
    detail::check_profile(matrix_, dims_, labels_);
    if (!is_hermitian(matrix_, kTolHerm))
      throw std::invalid_argument("operator must be Hermitian within 1e-10");
  }

  HermitianOperator(Matrix m, std::vector<Index> dims)
      : HermitianOperator(std::move(m), dims, detail::default_labels(dims.size())) {}

  explicit HermitianOperator(const DensityOperator& rho)
      : matrix_(rho.matrix()), dims_(rho.dims()), labels_(rho.labels()) {}

  const Matrix& matrix() const { return matrix_; }
  const std::vector<Index>& dims() const { return dims_; }
  const std::vector<std::string>& labels() const { return labels_; }
  Index dim() const { return matrix_.rows(); }

 private:
  Matrix matrix_;
  std::vector<Index> dims_;
  std::vector<std::string> labels_;
};

namespace detail {

inline std::vector<std::string> concat_labels(const std::vector<std::string>& a,
                                              const std::vector<std::string>& b) {
  std::vector<std::string> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

inline std::vector<Index> concat_dims(const std::vector<Index>& a,
                                      const std::vector<Index>& b) {
  std::vector<Index> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace detail

inline DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b) {
  return DensityOperator(kron(a.matrix(), b.matrix()),
                         detail::concat_dims(a.dims(), b.dims()),
                         detail::concat_labels(a.labels(), b.labels()));
}

inline HermitianOperator tensor_product(const HermitianOperator& a,
                                        const HermitianOperator& b) {
  return HermitianOperator(kron(a.matrix(), b.matrix()),
                           detail::concat_dims(a.dims(), b.dims()),
                           detail::concat_labels(a.labels(), b.labels()));
}

inline DensityOperator partial_trace(const DensityOperator& rho,
                                     const std::vector<std::string>& traced_labels) {
  std::vector<size_t> traced;
  for (const auto& name : traced_labels) traced.push_back(rho.label_index(name));
  if (traced.size() == rho.subsystem_count())
    throw std::invalid_argument("cannot trace out every subsystem");
  std::vector<Index> kept_dims;
  std::vector<std::string> kept_labels;
  for (size_t k = 0; k < rho.subsystem_count(); ++k) {
    if (std::find(traced.begin(), traced.end(), k) == traced.end()) {
      kept_dims.push_back(rho.dims()[k]);
      kept_labels.push_back(rho.labels()[k]);
    }
  }
  return DensityOperator(partial_trace_raw(rho.matrix(), rho.dims(), traced), kept_dims,
                         kept_labels);
}

inline DensityOperator permute_subsystems(const DensityOperator& rho,
                                          const std::vector<std::string>& new_order) {
  std::vector<size_t> order;
  for (const auto& name : new_order) order.push_back(rho.label_index(name));
  if (order.size() != rho.subsystem_count())
    throw std::invalid_argument("permutation must mention every subsystem");
  std::vector<Index> new_dims;
  std::vector<std::string> new_labels;
  for (size_t o : order) {
    new_dims.push_back(rho.dims()[o]);
    new_labels.push_back(rho.labels()[o]);
  }
  return DensityOperator(permute_raw(rho.matrix(), rho.dims(), order), new_dims,
                         new_labels);
}

// Sum of absolute eigenvalues of a Hermitian matrix.
inline double trace_norm_raw(const Matrix& s) {
  EigSystem es = eig_hermitian(s);
  return es.values.cwiseAbs().sum();
}

inline double trace_norm(const HermitianOperator& s) { return trace_norm_raw(s.matrix()); }

inline double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dims() != sigma.dims()) throw std::invalid_argument("dimension mismatch");
  return trace_norm_raw(rho.matrix() - sigma.matrix());
}

// F(rho, sigma) = || sqrt(rho) sqrt(sigma) ||_1, computed as
// tr sqrt( sqrt(rho) sigma sqrt(rho) ).
inline double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dims() != sigma.dims()) throw std::invalid_argument("dimension mismatch");
  const Matrix sr = matrix_sqrt_psd(rho.matrix());
  Matrix inner = sr * sigma.matrix() * sr;
  inner = (inner + inner.adjoint()) / 2.0;
  EigSystem es = eig_hermitian(inner);
  double f = 0;
  for (Index i = 0; i < es.values.size(); ++i)
    if (es.values[i] > 0) f += std::sqrt(es.values[i]);
  return std::min(f, 1.0 + kTolEq);
}

// a >= b iff a - b is positive semidefinite, to tolerance.
inline bool operator_geq(const HermitianOperator& a, const HermitianOperator& b,
                         double tol = kTolPsd) {
  if (a.dims() != b.dims()) throw std::invalid_argument("dimension mismatch");
  return min_eigenvalue(a.matrix() - b.matrix()) >= -tol;
}

inline bool operator_geq_raw(const Matrix& a, const Matrix& b, double tol = kTolPsd) {
  if (a.rows() != b.rows()) throw std::invalid_argument("dimension mismatch");
  return min_eigenvalue(a - b) >= -tol;
}

// Maximally entangled state sum_i |i>|i> / sqrt(d) on labels [A, E].
inline DensityOperator max_entangled(int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("need at least one qubit");
  const Index d = Index(1) << n_qubits;
  Vector phi = Vector::Zero(d * d);
  for (Index i = 0; i < d; ++i) phi(i * d + i) = 1.0 / std::sqrt(double(d));
  return DensityOperator(phi * phi.adjoint(), {d, d}, {"A", "E"});
}

// Haar-style random state of the requested rank: partial trace of a random
// pure state on dims x rank. Deterministic for a fixed seed.
inline DensityOperator random_state(const std::vector<Index>& dims, Index rank,
                                    uint64_t seed,
                                    std::vector<std::string> labels = {}) {
  const Index d = detail::product(dims);
  if (rank < 1 || rank > d) throw std::invalid_argument("rank must be in [1, dim]");
  Rng rng(seed);
  Matrix g(d, rank);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < rank; ++j) g(i, j) = rand_complex_normal(rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = (rho + rho.adjoint()) / 2.0;
  if (labels.empty()) labels = detail::default_labels(dims.size());
  return DensityOperator(std::move(rho), dims, std::move(labels));
}

inline DensityOperator maximally_mixed(Index d, const std::string& label = "A") {
  return DensityOperator(Matrix::Identity(d, d) / double(d), {d}, {label});
}

inline double purity(const DensityOperator& rho) {
  return (rho.matrix() * rho.matrix()).trace().real();
}

}  // namespace entroq
