#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "nisqchem/qsim.hpp"
#include "oracles.hpp"

using namespace nisqchem;

namespace {

QubitOperator random_hermitian(int n, int terms, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint64_t> bits(0, (std::uint64_t{1} << n) - 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  QubitOperator op(n);
  for (int k = 0; k < terms; ++k) op.add(PauliString{bits(rng), bits(rng)}, u(rng));
  op.add(PauliString{}, u(rng));
  return op;
}

CMatrix random_density(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const Eigen::Index dim = Eigen::Index{1} << n;
  CMatrix a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = Complex(g(rng), g(rng));
  CMatrix rho = a * a.adjoint();
  return rho / rho.trace();
}

double min_eigenvalue(const CMatrix& rho) {
  return Eigen::SelfAdjointEigenSolver<CMatrix>(rho).eigenvalues()(0);
}

}  // namespace

TEST_CASE("RX(pi) on |0> gives -i|1>") {
  Circuit c{1, 0, 1, {Gate::rx(0, 0)}};
  const std::vector<double> theta{M_PI};
  const auto psi = run_pure(c, theta);
  CHECK(std::abs(psi(0)) < 1e-15);
  CHECK(std::abs(psi(1) - Complex(0, -1)) < 1e-15);
}

TEST_CASE("empty circuit leaves |0...0>") {
  Circuit c{3, 0, 0, {}};
  const auto psi = run_pure(c, {});
  CHECK(psi(0) == Complex(1.0));
  CHECK(psi.norm() == 1.0);
}

TEST_CASE("statevector matches the dense matrix chain") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 4;
    const auto c = oracle::random_circuit(n, 25, rng);
    const auto theta = oracle::random_angles(c.n_params, rng);
    const CVector expected = oracle::circuit_unitary(c, theta).col(0);
    const auto psi = run_pure(c, theta);
    CHECK((psi - expected).norm() < 1e-12);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-10);
  }
}

TEST_CASE("bound angles and rotation matrices") {
  Circuit c{2, 0, 0, {Gate::rz(0, std::nullopt, 0.3), Gate::rx(1, std::nullopt, -1.1), Gate::cnot(1, 0)}};
  const CVector expected = oracle::circuit_unitary(c, {}).col(0);
  CHECK((run_pure(c, {}) - expected).norm() < 1e-14);
  CHECK((rotation_matrix(GateKind::RX, 0.7) - oracle::rx(0.7)).norm() < 1e-15);
  CHECK((rotation_matrix(GateKind::RZ, 0.7) - oracle::rz(0.7)).norm() < 1e-15);
}

TEST_CASE("malformed circuits are rejected") {
  CHECK_THROWS_AS(run_pure(Circuit{1, 0, 1, {Gate::rx(0, 0)}}, {}), Error);
  CHECK_THROWS_AS(Circuit({2, 0, 0, {Gate::cnot(1, 1)}}).validate(), Error);
  CHECK_THROWS_AS(Circuit({2, 0, 0, {Gate::rx(2, std::nullopt)}}).validate(), Error);
  CHECK_THROWS_AS(Circuit({2, 0, 1, {Gate::rx(0, 3)}}).validate(), Error);
  CHECK_THROWS_AS(Circuit({13, 0, 0, {}}).validate(), Error);
  CHECK_THROWS_AS(NoiseModel({1.5, 0.0}).validate(), Error);
  CHECK(to_string(GateKind::CNOT) == "CNOT");
  CHECK(gate_kind_from_string("RZ") == GateKind::RZ);
  CHECK_THROWS_AS(gate_kind_from_string("H"), Error);
}

TEST_CASE("noiseless density matrix equals the pure state projector") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + trial % 6;
    const auto c = oracle::random_circuit(n, 30, rng);
    const auto theta = oracle::random_angles(c.n_params, rng);
    const auto psi = run_pure(c, theta);
    const auto rho = run_noisy(c, theta, NoiseModel{0.0, 0.0});
    CHECK((rho - psi * psi.adjoint()).norm() < 1e-10);
  }
}

TEST_CASE("full single-qubit depolarization gives the maximally mixed state") {
  std::mt19937_64 rng(3);
  for (double angle : {0.3, 1.7, -2.2}) {
    Circuit c{1, 0, 1, {Gate::rx(0, 0)}};
    const std::vector<double> theta{angle};
    const auto rho = run_noisy(c, theta, NoiseModel{1.0, 0.0});
    CHECK((rho - CMatrix::Identity(2, 2) / 2.0).norm() < 1e-14);
  }
}

TEST_CASE("CNOT channel equals the hand-composed 4x4 map") {
  const double p = 0.1;
  Circuit c{2, 0, 2, {Gate::rx(0, 0), Gate::rz(1, 1), Gate::cnot(0, 1)}};
  const std::vector<double> theta{0.9, -0.4};
  const auto rho = run_noisy(c, theta, NoiseModel{0.0, p});
  Circuit prep{2, 0, 2, {Gate::rx(0, 0), Gate::rz(1, 1)}};
  const CVector psi = oracle::circuit_unitary(prep, theta).col(0);
  const CMatrix u = oracle::cnot_matrix(0, 1, 2);
  const CMatrix expected = (1 - p) * u * psi * psi.adjoint() * u.adjoint() + p * CMatrix::Identity(4, 4) / 4.0;
  CHECK((rho - expected).norm() < 1e-14);
}

TEST_CASE("depolarizing channel on a subsystem") {
  std::mt19937_64 rng(4);
  const CMatrix rho = random_density(3, rng);
  const double p = 0.3;
  const std::vector<int> on{1};
  CMatrix out = rho;
  apply_depolarizing(out, on, p);
  // (1-p) rho + p * (I/2 on qubit 1) (x) tr_1(rho), assembled by explicit indices.
  const CMatrix reduced = oracle::partial_trace(rho, 3, on);
  CMatrix expected = (1 - p) * rho;
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      if (((a >> 1) & 1) != ((b >> 1) & 1)) continue;
      const int ra = (a & 1) | ((a >> 2) << 1), rb = (b & 1) | ((b >> 2) << 1);
      expected(a, b) += p * 0.5 * reduced(ra, rb);
    }
  CHECK((out - expected).norm() < 1e-14);
}

TEST_CASE("noisy output stays Hermitian, unit-trace and positive") {
  std::mt19937_64 rng(5);
  for (double p : {0.0, 0.05, 1.0})
    for (int trial = 0; trial < 6; ++trial) {
      const int n = 2 + trial % 4;
      const auto c = oracle::random_circuit(n, 25, rng);
      const auto theta = oracle::random_angles(c.n_params, rng);
      const auto rho = run_noisy(c, theta, NoiseModel{p, p});
      CHECK((rho - rho.adjoint()).norm() < 1e-10);
      CHECK(std::abs(rho.trace() - Complex(1.0)) < 1e-10);
      CHECK(min_eigenvalue(rho) > -1e-9);
    }
}

TEST_CASE("partial trace") {
  std::mt19937_64 rng(6);
  const CMatrix a = random_density(1, rng), b = random_density(2, rng);
  // Qubit 0 is the rightmost factor, so b (x) a puts a on qubit 0.
  const CMatrix product = oracle::kron(b, a);
  const std::vector<int> trace_b{1, 2};
  CHECK((partial_trace(product, trace_b) - a).norm() < 1e-14);

  CVector bell = CVector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  const CMatrix rho_bell = bell * bell.adjoint();
  for (int q : {0, 1}) {
    const std::vector<int> t{q};
    CHECK((partial_trace(rho_bell, t) - CMatrix::Identity(2, 2) / 2.0).norm() < 1e-15);
  }

  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix rho = random_density(3, rng);
    for (const std::vector<int>& traced : {std::vector<int>{1}, {0}, {2}, {0, 2}, {2, 0}}) {
      std::vector<int> sorted = traced;
      std::sort(sorted.begin(), sorted.end());
      CHECK((partial_trace(rho, traced) - oracle::partial_trace(rho, 3, sorted)).norm() < 1e-14);
    }
  }

  const CMatrix rho = random_density(2, rng);
  const std::vector<int> all{0, 1};
  const auto scalar = partial_trace(rho, all);
  REQUIRE(scalar.rows() == 1);
  CHECK(std::abs(scalar(0, 0) - Complex(1.0)) < 1e-14);
  const std::vector<int> repeated{0, 0}, bad{2};
  CHECK_THROWS_AS(partial_trace(rho, repeated), Error);
  CHECK_THROWS_AS(partial_trace(rho, bad), Error);
}

TEST_CASE("expectation examples") {
  Circuit c{1, 0, 1, {Gate::rx(0, 0)}};
  const std::vector<double> theta{M_PI};
  const auto z0 = QubitOperator::term(PauliString::single(0, Pauli::Z), 1.0, 1);
  CHECK(expectation(z0, c, theta) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(expectation(z0, c, theta, NoiseModel{0.0, 0.0}) == doctest::Approx(-1.0).epsilon(1e-14));

  std::mt19937_64 rng(7);
  const auto rc = oracle::random_circuit(4, 30, rng, 1);
  const auto angles = oracle::random_angles(rc.n_params, rng);
  const auto constant = QubitOperator::identity(-2.5, 3);
  CHECK(expectation(constant, rc, angles) == doctest::Approx(-2.5).epsilon(1e-14));
  CHECK(expectation(constant, rc, angles, NoiseModel{0.2, 0.3}) == doctest::Approx(-2.5).epsilon(1e-14));

  const auto on_ancilla = QubitOperator::term(PauliString::single(3, Pauli::Z), 1.0, 4);
  CHECK_THROWS_AS(expectation(on_ancilla, rc, angles), Error);
}

TEST_CASE("expectation equals Tr(H tr_anc rho) for every path") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 12; ++trial) {
    const int n_sys = 1 + trial % 4, n_anc = trial % 3;
    const auto c = oracle::random_circuit(n_sys + n_anc, 30, rng, n_anc);
    const auto theta = oracle::random_angles(c.n_params, rng);
    const auto h = random_hermitian(n_sys, 8, rng);
    const CMatrix hm = to_dense(h, n_sys);

    const CVector psi = oracle::circuit_unitary(c, theta).col(0);
    std::vector<int> anc;
    for (int q = n_sys; q < n_sys + n_anc; ++q) anc.push_back(q);
    const CMatrix reduced = oracle::partial_trace(psi * psi.adjoint(), n_sys + n_anc, anc);
    const double exact = (hm * reduced).trace().real();

    CHECK(std::abs(expectation(h, c, theta) - exact) < 1e-10);
    CHECK(std::abs(expectation(h, c, theta, NoiseModel{0.0, 0.0}) - exact) < 1e-10);
    const CompiledObservable obs(h, n_sys);
    CHECK(std::abs(expectation(obs, c, theta) - exact) < 1e-10);

    const NoiseModel noise{0.01, 0.05};
    const CMatrix rho = run_noisy(c, theta, noise);
    const double noisy = (hm * oracle::partial_trace(rho, n_sys + n_anc, anc)).trace().real();
    CHECK(std::abs(expectation(h, c, theta, noise) - noisy) < 1e-10);
    CHECK(std::abs(expectation(obs, c, theta, noise) - noisy) < 1e-10);
  }
}

TEST_CASE("without ancillas expectation is the plain Pauli expectation") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const auto c = oracle::random_circuit(3, 20, rng);
    const auto theta = oracle::random_angles(c.n_params, rng);
    const auto h = random_hermitian(3, 10, rng);
    const auto psi = run_pure(c, theta);
    CHECK(std::abs(expectation(h, c, theta) - pauli_expectation(h, psi).real()) < 1e-12);
    const CMatrix rho = psi * psi.adjoint();
    CHECK(std::abs(pauli_expectation(h, rho) - pauli_expectation(h, psi)) < 1e-12);
  }
}
