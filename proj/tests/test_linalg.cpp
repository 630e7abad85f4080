#include <catch2/catch_amalgamated.hpp>

#include "entroq/linalg.hpp"

using namespace entroq;

namespace {

// Independent oracle: Kronecker product through the direct index formula
// (a (x) b)[i*rb + k, j*cb + l] = a[i,j] * b[k,l].
Matrix kron_oracle(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      for (Index k = 0; k < b.rows(); ++k)
        for (Index l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

// Independent oracle: partial trace over the first subsystem as the
// explicit basis sum  sum_i (<i| (x) I) rho (|i> (x) I).
Matrix trace_out_first_oracle(const Matrix& rho, Index da, Index db) {
  Matrix out = Matrix::Zero(db, db);
  for (Index i = 0; i < da; ++i) {
    Matrix bra = Matrix::Zero(1, da);
    bra(0, i) = 1.0;
    Matrix proj_left = kron_oracle(bra, Matrix::Identity(db, db));
    Matrix proj_right = kron_oracle(bra.adjoint(), Matrix::Identity(db, db));
    out += proj_left * rho * proj_right;
  }
  return out;
}

Matrix random_hermitian(Index d, uint64_t seed) {
  Rng rng(seed);
  Matrix m(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = rand_complex_normal(rng);
  return (m + m.adjoint()) / 2.0;
}

Matrix basis_ket(Index d, Index i) {
  Matrix v = Matrix::Zero(d, 1);
  v(i, 0) = 1.0;
  return v * v.adjoint();
}

}  // namespace

TEST_CASE("tensor product basics") {
  DensityOperator zero(basis_ket(2, 0), {2}, {"A"});
  DensityOperator one(basis_ket(2, 1), {2}, {"B"});
  DensityOperator joint = tensor_product(zero, one);

  Matrix expected = basis_ket(4, 1);  // |01><01|
  REQUIRE(max_abs_diff(joint.matrix(), expected) < 1e-15);
  REQUIRE(joint.dims() == std::vector<Index>{2, 2});
  REQUIRE(joint.labels() == std::vector<std::string>{"A", "B"});

  DensityOperator mixed2 = maximally_mixed(2, "A");
  DensityOperator mixed2b = maximally_mixed(2, "B");
  DensityOperator i4 = tensor_product(mixed2, mixed2b);
  REQUIRE(max_abs_diff(i4.matrix(), Matrix::Identity(4, 4) / 4.0) < 1e-15);
}

TEST_CASE("tensor product matches index-formula oracle") {
  DensityOperator a = random_state({2}, 2, 11, {"A"});
  DensityOperator b = random_state({3}, 3, 12, {"B"});
  DensityOperator joint = tensor_product(a, b);
  REQUIRE(max_abs_diff(joint.matrix(), kron_oracle(a.matrix(), b.matrix())) < 1e-14);
  REQUIRE(std::abs(joint.matrix().trace().real() - 1.0) < 1e-12);
}

TEST_CASE("partial trace basics") {
  DensityOperator zz(basis_ket(4, 0), {2, 2}, {"A", "B"});
  DensityOperator reduced = partial_trace(zz, {"A"});
  REQUIRE(max_abs_diff(reduced.matrix(), basis_ket(2, 0)) < 1e-15);
  REQUIRE(reduced.labels() == std::vector<std::string>{"B"});

  DensityOperator bell = max_entangled(1);
  DensityOperator marginal = partial_trace(bell, {"A"});
  REQUIRE(max_abs_diff(marginal.matrix(), Matrix::Identity(2, 2) / 2.0) < 1e-12);
}

TEST_CASE("partial trace matches basis-sum oracle") {
  DensityOperator rho = random_state({2, 2}, 4, 21, {"A", "E"});
  DensityOperator reduced = partial_trace(rho, {"A"});
  Matrix expected = trace_out_first_oracle(rho.matrix(), 2, 2);
  REQUIRE(max_abs_diff(reduced.matrix(), expected) < 1e-12);

  // Trace over the second subsystem cross-checked by permuting it first.
  DensityOperator reduced_a = partial_trace(rho, {"E"});
  DensityOperator flipped = permute_subsystems(rho, {"E", "A"});
  Matrix expected_a = trace_out_first_oracle(flipped.matrix(), 2, 2);
  REQUIRE(max_abs_diff(reduced_a.matrix(), expected_a) < 1e-12);
}

TEST_CASE("partial trace rejects unknown labels") {
  DensityOperator rho = random_state({2, 2}, 2, 5, {"A", "E"});
  REQUIRE_THROWS_AS(partial_trace(rho, {"Q"}), std::invalid_argument);
}

TEST_CASE("partial trace of tensor product recovers the factor") {
  for (uint64_t seed : {1, 2, 3, 4, 5}) {
    DensityOperator a = random_state({3}, 2, seed, {"A"});
    DensityOperator b = random_state({4}, 4, seed + 100, {"B"});
    DensityOperator joint = tensor_product(a, b);
    DensityOperator back = partial_trace(joint, {"B"});
    REQUIRE(max_abs_diff(back.matrix(), a.matrix()) < 1e-12);
  }
}

TEST_CASE("trace norm basics and eigenvalue oracle") {
  DensityOperator rho = random_state({4}, 3, 31);
  HermitianOperator zero(rho.matrix() - rho.matrix(), {4});
  REQUIRE(trace_norm(zero) < 1e-15);

  HermitianOperator flip(basis_ket(2, 0) - basis_ket(2, 1), {2});
  REQUIRE(trace_norm(flip) == Catch::Approx(2.0).margin(1e-12));

  // Oracle: eigenvalues from the general (non-selfadjoint) solver.
  Matrix h = random_hermitian(8, 32);
  Eigen::ComplexEigenSolver<Matrix> general(h);
  double expected = 0;
  for (Index i = 0; i < 8; ++i) expected += std::abs(general.eigenvalues()(i).real());
  REQUIRE(trace_norm(HermitianOperator(h, {8})) == Catch::Approx(expected).margin(1e-9));
}

TEST_CASE("trace norm rejects non-Hermitian input") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  REQUIRE_THROWS_AS(trace_norm_raw(m), std::invalid_argument);
}

TEST_CASE("trace norm is a norm on random Hermitian triples") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Matrix a = random_hermitian(6, 100 + seed);
    Matrix b = random_hermitian(6, 200 + seed);
    double na = trace_norm_raw(a);
    double nb = trace_norm_raw(b);
    double nab = trace_norm_raw(a + b);
    REQUIRE(nab <= na + nb + 1e-9);
    REQUIRE(trace_norm_raw(-2.5 * a) == Catch::Approx(2.5 * na).margin(1e-9));
    REQUIRE(na >= 0);
  }
}

TEST_CASE("fidelity basics") {
  DensityOperator rho = random_state({4}, 2, 41);
  REQUIRE(fidelity(rho, rho) == Catch::Approx(1.0).margin(1e-9));

  DensityOperator pure0(basis_ket(2, 0), {2});
  REQUIRE(fidelity(pure0, maximally_mixed(2)) ==
          Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-10));

  // Pure-state formula: F(Phi+, I/4) = sqrt(<Phi| I/4 |Phi>) = 1/2.
  DensityOperator bell = max_entangled(1);
  DensityOperator i4(Matrix::Identity(4, 4) / 4.0, {2, 2}, {"A", "E"});
  REQUIRE(fidelity(bell, i4) == Catch::Approx(0.5).margin(1e-10));
}

TEST_CASE("fidelity is symmetric and rejects mismatched dims") {
  DensityOperator a = random_state({4}, 4, 51);
  DensityOperator b = random_state({4}, 2, 52);
  REQUIRE(fidelity(a, b) == Catch::Approx(fidelity(b, a)).margin(1e-10));
  DensityOperator c = random_state({2}, 2, 53);
  REQUIRE_THROWS_AS(fidelity(a, c), std::invalid_argument);
}

TEST_CASE("Fuchs-van de Graaf inequalities on random pairs") {
  for (uint64_t seed = 0; seed < 12; ++seed) {
    DensityOperator a = random_state({4}, 2 + seed % 3, 300 + seed);
    DensityOperator b = random_state({4}, 1 + seed % 4, 400 + seed);
    double f = fidelity(a, b);
    double half_dist = 0.5 * trace_distance(a, b);
    REQUIRE(1.0 - f <= half_dist + 1e-9);
    REQUIRE(half_dist <= std::sqrt(std::max(0.0, 1.0 - f * f)) + 1e-9);
  }
}

TEST_CASE("operator order checks") {
  HermitianOperator eye(Matrix::Identity(2, 2), {2});
  HermitianOperator proj(basis_ket(2, 0), {2});
  REQUIRE(operator_geq(eye, proj, 1e-9));
  REQUIRE_FALSE(operator_geq(proj, eye, 1e-9));

  // Mutual domination pins the operators together in trace norm.
  for (uint64_t seed = 0; seed < 5; ++seed) {
    Matrix a = random_hermitian(4, 500 + seed);
    const double tol = 1e-9;
    Matrix b = a + tol * 0.1 * random_hermitian(4, 600 + seed);
    HermitianOperator ha(a, {4}), hb(b, {4});
    if (operator_geq(ha, hb, tol) && operator_geq(hb, ha, tol)) {
      REQUIRE(trace_norm_raw(a - b) <= 4 * tol);
    }
  }
}

TEST_CASE("maximally entangled state") {
  for (int n : {1, 2, 3}) {
    DensityOperator phi = max_entangled(n);
    const Index d = Index(1) << n;
    REQUIRE(purity(phi) == Catch::Approx(1.0).margin(1e-10));
    DensityOperator marginal = partial_trace(phi, {"E"});
    REQUIRE(max_abs_diff(marginal.matrix(), Matrix::Identity(d, d) / double(d)) < 1e-12);
  }
  DensityOperator bell = max_entangled(1);
  Vector expected(4);
  expected << 1, 0, 0, 1;
  expected /= std::sqrt(2.0);
  REQUIRE(max_abs_diff(bell.matrix(), expected * expected.adjoint()) < 1e-14);
  REQUIRE_THROWS_AS(max_entangled(0), std::invalid_argument);
}

TEST_CASE("random states are deterministic and well formed") {
  DensityOperator a = random_state({2, 3}, 4, 77);
  DensityOperator b = random_state({2, 3}, 4, 77);
  REQUIRE(max_abs_diff(a.matrix(), b.matrix()) == 0.0);

  DensityOperator pure = random_state({4}, 1, 78);
  REQUIRE(purity(pure) == Catch::Approx(1.0).margin(1e-9));

  REQUIRE_THROWS_AS(random_state({4}, 5, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(random_state({4}, 0, 1), std::invalid_argument);
}

TEST_CASE("full-rank random states stay comfortably positive") {
  for (uint64_t seed = 0; seed < 100; ++seed) {
    DensityOperator rho = random_state({4}, 4, 1000 + seed);
    REQUIRE(min_eigenvalue(rho.matrix()) >= 1e-6);
  }
}

TEST_CASE("density operator invariants are enforced") {
  Matrix bad = Matrix::Identity(2, 2);
  REQUIRE_THROWS_AS(DensityOperator(bad, {2}), std::invalid_argument);  // trace 2

  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  REQUIRE_THROWS_AS(DensityOperator(neg, {2}), std::invalid_argument);

  REQUIRE_THROWS_AS(DensityOperator(Matrix::Identity(4, 4) / 4.0, {2}),
                    std::invalid_argument);  // dims mismatch

  REQUIRE_THROWS_AS(DensityOperator(Matrix::Identity(4, 4) / 4.0, {2, 2}, {"A", "A"}),
                    std::invalid_argument);  // duplicate labels
}

TEST_CASE("permute subsystems round-trips") {
  DensityOperator rho = random_state({2, 3, 2}, 5, 91, {"A", "B", "C"});
  DensityOperator p = permute_subsystems(rho, {"C", "A", "B"});
  REQUIRE(p.dims() == std::vector<Index>{2, 2, 3});
  DensityOperator back = permute_subsystems(p, {"A", "B", "C"});
  REQUIRE(max_abs_diff(back.matrix(), rho.matrix()) < 1e-14);

  // Permutation commutes with the marginal.
  DensityOperator m1 = partial_trace(rho, {"B"});
  DensityOperator m2 = permute_subsystems(partial_trace(p, {"B"}), {"A", "C"});
  REQUIRE(max_abs_diff(m1.matrix(), m2.matrix()) < 1e-13);
}
