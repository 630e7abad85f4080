#pragma once

// Pauli strings X^a Z^b, conjugation channels, the symplectic bit product,
// and the Pauli-basis decomposition of bipartite operators into E-blocks.
//
// Conventions, fixed once: the global phase of X^a Z^b is the literal matrix
// product X^a * Z^b (no symplectic phase factor), and bit strings map to
// integers with the leftmost bit most significant, i.e. bit 0 of the string
// acts on the first tensor factor.

#include <bit>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "entroq/linalg.hpp"

namespace entroq {

// Bit string of fixed length backed by an integer; bit i is the i-th
// character from the left.
class BitString {
 public:
  BitString() : length_(0), bits_(0) {}
  BitString(int length, uint64_t bits) : length_(length), bits_(bits) {
    if (length < 0 || length > 32) throw std::invalid_argument("bit length out of range");
    if (length < 64 && (bits >> length) != 0)
      throw std::invalid_argument("bits exceed declared length");
  }

  static BitString parse(const std::string& s) {
    uint64_t bits = 0;
    for (char c : s) {
      if (c != '0' && c != '1') throw std::invalid_argument("bit string must be binary");
      bits = (bits << 1) | uint64_t(c - '0');
    }
    return BitString(int(s.size()), bits);
  }

  int length() const { return length_; }
  uint64_t value() const { return bits_; }

  // Bit at position i counted from the left (first tensor factor).
  int bit(int i) const {
    if (i < 0 || i >= length_) throw std::out_of_range("bit index");
    return int((bits_ >> (length_ - 1 - i)) & 1u);
  }

  BitString operator^(const BitString& other) const {
    if (length_ != other.length_) throw std::invalid_argument("length mismatch");
    return BitString(length_, bits_ ^ other.bits_);
  }

  BitString concat(const BitString& other) const {
    return BitString(length_ + other.length_, (bits_ << other.length_) | other.bits_);
  }

  std::pair<BitString, BitString> split(int left_length) const {
    if (left_length < 0 || left_length > length_)
      throw std::invalid_argument("split point out of range");
    const int right_length = length_ - left_length;
    return {BitString(left_length, bits_ >> right_length),
            BitString(right_length, bits_ & ((uint64_t(1) << right_length) - 1))};
  }

  std::string str() const {
    std::string s(size_t(length_), '0');
    for (int i = 0; i < length_; ++i) s[size_t(i)] = char('0' + bit(i));
    return s;
  }

  bool operator==(const BitString& other) const = default;

 private:
  int length_;
  uint64_t bits_;
};

// Inner product modulo 2.
inline int symplectic_dot(const BitString& x, const BitString& y) {
  if (x.length() != y.length()) throw std::invalid_argument("length mismatch");
  return std::popcount(x.value() & y.value()) & 1;
}

// Pair of bit strings (a, b) denoting X^a Z^b on n qubits.
struct PauliString {
  BitString a;  // X part
  BitString b;  // Z part

  PauliString(BitString a_in, BitString b_in) : a(a_in), b(b_in) {
    if (a.length() != b.length()) throw std::invalid_argument("|a| must equal |b|");
  }

  static PauliString from_concat(const BitString& ab) {
    if (ab.length() % 2 != 0) throw std::invalid_argument("a||b must have even length");
    auto [left, right] = ab.split(ab.length() / 2);
    return PauliString(left, right);
  }

  int qubits() const { return a.length(); }
  bool is_identity() const { return a.value() == 0 && b.value() == 0; }
  bool operator==(const PauliString& other) const = default;
};

namespace detail {

inline const Matrix& pauli_x() {
  static const Matrix x = [] {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
  }();
  return x;
}

inline const Matrix& pauli_z() {
  static const Matrix z = [] {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
  }();
  return z;
}

}  // namespace detail

// The 2^n x 2^n matrix X^a Z^b (literal product, X factors before Z).
inline Matrix pauli_matrix(const PauliString& p) {
  const int n = p.qubits();
  Matrix out = Matrix::Identity(1, 1);
  for (int q = 0; q < n; ++q) {
    Matrix factor = Matrix::Identity(2, 2);
    if (p.a.bit(q)) factor = detail::pauli_x() * factor;
    if (p.b.bit(q)) factor = factor * detail::pauli_z();
    out = kron(out, factor);
  }
  return out;
}

// Z^b X^a, the inverse of conjugation by X^a Z^b.
inline Matrix pauli_matrix_reversed(const PauliString& p) {
  const int n = p.qubits();
  Matrix out = Matrix::Identity(1, 1);
  for (int q = 0; q < n; ++q) {
    Matrix factor = Matrix::Identity(2, 2);
    if (p.b.bit(q)) factor = detail::pauli_z() * factor;
    if (p.a.bit(q)) factor = factor * detail::pauli_x();
    out = kron(out, factor);
  }
  return out;
}

// All 2^(2n) Pauli strings on n qubits, in (a, b) lexicographic order.
inline std::vector<PauliString> all_pauli_strings(int n) {
  if (n < 1 || n > 8) throw std::invalid_argument("pauli enumeration supports 1..8 qubits");
  std::vector<PauliString> out;
  out.reserve(size_t(1) << (2 * n));
  for (uint64_t a = 0; a < (uint64_t(1) << n); ++a)
    for (uint64_t b = 0; b < (uint64_t(1) << n); ++b)
      out.emplace_back(BitString(n, a), BitString(n, b));
  return out;
}

// Conjugates the first subsystem of rho by X^a Z^b; the E side is untouched.
inline DensityOperator pauli_conjugate(const PauliString& p, const DensityOperator& rho) {
  const Index da = rho.dims().front();
  if (da != (Index(1) << p.qubits()))
    throw std::invalid_argument("pauli string does not match the first subsystem");
  const Index rest = rho.dim() / da;
  Matrix u = kron(pauli_matrix(p), Matrix::Identity(rest, rest));
  Matrix u_inv = kron(pauli_matrix_reversed(p), Matrix::Identity(rest, rest));
  return DensityOperator(u * rho.matrix() * u_inv, rho.dims(), rho.labels());
}

// Blocks M_uv = tr_A[ (Z^v X^u / sqrt(d_A) (x) I) rho ], indexed by the
// concatenated integer u * 2^n + v.
struct PauliCoefficients {
  int n_qubits = 0;
  Index dim_e = 0;
  std::vector<Matrix> blocks;

  const Matrix& block(const BitString& u, const BitString& v) const {
    return blocks[size_t((u.value() << n_qubits) | v.value())];
  }
};

// Decomposition is defined for any operator on A (x) E with qubit A side;
// it accepts a raw matrix so unnormalized differences can be decomposed too.
inline PauliCoefficients pauli_decompose_raw(const Matrix& op, Index da, Index de) {
  int n = 0;
  while ((Index(1) << n) < da) ++n;
  if ((Index(1) << n) != da)
    throw std::invalid_argument("subsystem A must have power-of-two dimension");
  if (op.rows() != da * de) throw std::invalid_argument("operator shape mismatch");

  PauliCoefficients out;
  out.n_qubits = n;
  out.dim_e = de;
  const double scale = 1.0 / std::sqrt(double(da));
  out.blocks.reserve(size_t(da) * size_t(da));
  for (const PauliString& p : all_pauli_strings(n)) {
    Matrix weighted = kron(pauli_matrix_reversed(p) * scale, Matrix::Identity(de, de)) * op;
    out.blocks.push_back(partial_trace_raw(weighted, {da, de}, {0}));
  }
  return out;
}

inline PauliCoefficients pauli_decompose(const DensityOperator& rho) {
  if (rho.subsystem_count() != 2)
    throw std::invalid_argument("decomposition expects a bipartite profile");
  return pauli_decompose_raw(rho.matrix(), rho.dims()[0], rho.dims()[1]);
}

// Inverse of pauli_decompose: sum_uv (X^u Z^v / sqrt(d_A)) (x) M_uv.
inline Matrix pauli_reconstruct(const PauliCoefficients& c) {
  const Index da = Index(1) << c.n_qubits;
  Matrix out = Matrix::Zero(da * c.dim_e, da * c.dim_e);
  const double scale = 1.0 / std::sqrt(double(da));
  size_t idx = 0;
  for (const PauliString& p : all_pauli_strings(c.n_qubits)) {
    out += kron(pauli_matrix(p) * scale, c.blocks[idx]);
    ++idx;
  }
  return out;
}

// Uniform average of conjugation by all 2^(2n) strings: the perfect pad.
// Maps any rho^{AE} to (I/d_A) (x) rho^E.
inline DensityOperator pauli_twirl(const DensityOperator& rho) {
  const Index da = rho.dims().front();
  int n = 0;
  while ((Index(1) << n) < da) ++n;
  if ((Index(1) << n) != da)
    throw std::invalid_argument("twirl needs a qubit first subsystem");
  Matrix acc = Matrix::Zero(rho.dim(), rho.dim());
  for (const PauliString& p : all_pauli_strings(n))
    acc += pauli_conjugate(p, rho).matrix();
  acc /= double(size_t(1) << (2 * n));
  return DensityOperator(acc, rho.dims(), rho.labels());
}

}  // namespace entroq
