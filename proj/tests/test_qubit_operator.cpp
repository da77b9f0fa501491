#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "nisqchem/qubit_operator.hpp"
#include "oracles.hpp"

using namespace nisqchem;

namespace {

PauliString parse_string(const std::string& s) {
  const auto op = parse_qubit_operator("1 " + s);
  return op.terms().begin()->first;
}

Eigen::Matrix2cd pauli_matrix(Pauli p) {
  Eigen::Matrix2cd m;
  switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

CMatrix kron_matrix(const PauliString& p, int n) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (int q = n - 1; q >= 0; --q) out = oracle::kron(out, CMatrix(pauli_matrix(p.at(q))));
  return out;
}

QubitOperator random_operator(int n, int terms, std::mt19937_64& rng, bool hermitian) {
  std::uniform_int_distribution<std::uint64_t> bits(0, (std::uint64_t{1} << n) - 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  QubitOperator op(n);
  for (int k = 0; k < terms; ++k)
    op.add(PauliString{bits(rng), bits(rng)}, hermitian ? Complex(u(rng), 0) : Complex(u(rng), u(rng)));
  return op;
}

}  // namespace

TEST_CASE("Pauli string accessors and text form") {
  const PauliString p = parse_string("X0 Z1 Y3");
  CHECK(p.at(0) == Pauli::X);
  CHECK(p.at(1) == Pauli::Z);
  CHECK(p.at(2) == Pauli::I);
  CHECK(p.at(3) == Pauli::Y);
  CHECK(p.max_qubit() == 3);
  CHECK(p.y_count() == 1);
  CHECK(p.to_string() == "X0 Z1 Y3");
  CHECK(PauliString{}.is_identity());
  CHECK(PauliString{}.max_qubit() == -1);
  CHECK(PauliString{}.to_string().empty());
}

TEST_CASE("single-qubit Pauli products") {
  const auto X = PauliString::single(0, Pauli::X), Y = PauliString::single(0, Pauli::Y),
             Z = PauliString::single(0, Pauli::Z);
  CHECK(multiply(X, Y) == std::pair{Complex(0, 1), Z});
  CHECK(multiply(Y, X) == std::pair{Complex(0, -1), Z});
  CHECK(multiply(Y, Z) == std::pair{Complex(0, 1), X});
  CHECK(multiply(Z, X) == std::pair{Complex(0, 1), Y});
  CHECK(multiply(X, X) == std::pair{Complex(1, 0), PauliString{}});
}

TEST_CASE("products agree with Kronecker matrices") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint64_t> bits(0, 15);
  for (int trial = 0; trial < 200; ++trial) {
    const PauliString a{bits(rng), bits(rng)}, b{bits(rng), bits(rng)};
    const auto [phase, c] = multiply(a, b);
    const CMatrix lhs = kron_matrix(a, 4) * kron_matrix(b, 4);
    CHECK((lhs - phase * kron_matrix(c, 4)).norm() < 1e-12);
  }
}

TEST_CASE("dense matrices agree with Kronecker products") {
  std::mt19937_64 rng(2);
  const auto op = random_operator(3, 12, rng, false);
  CMatrix expected = CMatrix::Zero(8, 8);
  for (const auto& [p, c] : op.terms()) expected += c * kron_matrix(p, 3);
  CHECK((to_dense(op, 3) - expected).norm() < 1e-12);
  CHECK_THROWS_AS(to_sparse(op, 2), Error);
}

TEST_CASE("operator algebra") {
  std::mt19937_64 rng(3);
  const auto a = random_operator(3, 6, rng, false), b = random_operator(3, 6, rng, false);
  CHECK((to_dense(a * b, 3) - to_dense(a, 3) * to_dense(b, 3)).norm() < 1e-12);
  CHECK((to_dense(a + b, 3) - to_dense(a, 3) - to_dense(b, 3)).norm() < 1e-12);
  CHECK((to_dense(Complex(2, -1) * a, 3) - Complex(2, -1) * to_dense(a, 3)).norm() < 1e-12);
}

TEST_CASE("simplify merges and drops terms") {
  const auto X0 = PauliString::single(0, Pauli::X);
  QubitOperator sum = QubitOperator::term(X0, 1.0) + QubitOperator::term(X0, 1.0);
  CHECK(simplify(sum).size() == 1);
  CHECK(simplify(sum).coefficient(X0) == Complex(2.0));

  QubitOperator cancel = QubitOperator::term(X0, 1.0) + QubitOperator::term(X0, -1.0);
  CHECK(simplify(cancel).empty());

  QubitOperator tiny = QubitOperator::term(X0, 1e-13);
  CHECK(simplify(tiny).empty());

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto op = random_operator(4, 30, rng, false) * random_operator(4, 3, rng, false);
    const auto once = simplify(op);
    const auto twice = simplify(once);
    CHECK(once.terms() == twice.terms());
    for (const auto& [p, c] : once.terms()) CHECK(std::abs(c) >= 1e-12);
  }
}

TEST_CASE("hermiticity and spectrum") {
  std::mt19937_64 rng(5);
  const auto h = random_operator(3, 10, rng, true);
  CHECK(h.is_hermitian());
  const CMatrix m = to_dense(h, 3);
  CHECK((m - m.adjoint()).norm() < 1e-12);
  const Vector ev = spectrum(h, 3);
  const Vector expected = Eigen::SelfAdjointEigenSolver<CMatrix>(m).eigenvalues();
  CHECK((ev - expected).norm() < 1e-12);
  CHECK_FALSE(QubitOperator::term(PauliString{}, Complex(0, 1)).is_hermitian());
}

TEST_CASE("serialization round trip") {
  std::mt19937_64 rng(6);
  const auto op = random_operator(5, 25, rng, false) + QubitOperator::identity(-1.0 / 3.0, 5);
  const auto back = parse_qubit_operator(serialize(op));
  CHECK(back.n_qubits() == 5);
  REQUIRE(back.size() == op.size());
  for (const auto& [p, c] : op.terms()) CHECK(back.coefficient(p) == c);
}

TEST_CASE("serialized text form") {
  QubitOperator op(4);
  op.add(PauliString{}, -0.5);
  op.add(parse_string("X0 Z1 Y3"), 0.25);
  op.add(parse_string("Z2"), Complex(0.0, 1.0));
  const std::string text = serialize(op);
  CHECK(text.find("# n_qubits 4\n") == 0);
  CHECK(text.find("\n-0.5\n") != std::string::npos);
  CHECK(text.find("0.25  X0 Z1 Y3") != std::string::npos);
  CHECK(text.find("(0,1)  Z2") != std::string::npos);
}

TEST_CASE("malformed operator text is rejected") {
  CHECK_THROWS_AS(parse_qubit_operator("abc X0\n"), Error);
  CHECK_THROWS_AS(parse_qubit_operator("1.0 W0\n"), Error);
  CHECK_THROWS_AS(parse_qubit_operator("1.0 X0 Z0\n"), Error);
  CHECK_THROWS_AS(parse_qubit_operator("1.0 Xq\n"), Error);
  CHECK(parse_qubit_operator("\n# comment\n1.5 Z7\n").n_qubits() == 8);
}
