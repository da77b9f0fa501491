#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "nisqchem/mbe_select.hpp"
#include "oracles.hpp"

using namespace nisqchem;

namespace {

const std::string kH2Path = std::string(NISQCHEM_TEST_DATA) + "/h2_sto3g.fcidump";
constexpr double kH2Fci = -1.137270174661;
constexpr double kH2Hf = -1.116684387085;

// Closed-shell reference determinant energy straight from the integrals.
double reference_energy(const OrbitalIntegrals& ints) {
  double e = ints.e_core();
  const int n_occ = ints.n_occupied();
  for (int i = 0; i < n_occ; ++i) {
    e += 2 * ints.h(i, i);
    for (int j = 0; j < n_occ; ++j) e += 2 * ints.eri(i, i, j, j) - ints.eri(i, j, j, i);
  }
  return e;
}

CorrelationTable table_from_scores(const std::vector<double>& scores) {
  CorrelationTable t;
  for (std::size_t p = 0; p < scores.size(); ++p) t.delta1[static_cast<int>(p)] = -scores[p];
  return t;
}

}  // namespace

TEST_CASE("reference and single-virtual subsets give the reference energy") {
  const auto ints = oracle::molecular_integrals(4, 4, 31);
  const double e_ref = reference_energy(ints);
  CHECK(increment_energy(ints, {}, {}) == doctest::Approx(e_ref).epsilon(1e-13));
  CHECK(increment_energy(ints, {3}, {}) == doctest::Approx(e_ref).epsilon(1e-13));
  CHECK(increment_energy(ints, {0}, {}) == doctest::Approx(e_ref).epsilon(1e-13));
}

TEST_CASE("H2 pair increment carries the whole correlation energy") {
  const auto ints = read_fcidump(kH2Path);
  CHECK(std::abs(increment_energy(ints, {0, 1}, {}) - kH2Fci) < 1e-8);
  const auto t = correlation_table(ints);
  CHECK(std::abs(t.e_ref - kH2Hf) < 1e-8);
  CHECK(std::abs(t.delta1.at(0)) < 1e-10);
  CHECK(std::abs(t.delta1.at(1)) < 1e-10);
  CHECK(std::abs(t.pair(0, 1) - (kH2Fci - kH2Hf)) < 1e-8);
  CHECK(t.pair(1, 0) == t.pair(0, 1));

  const auto sel = select_active(t, 0.3, ints.homo(), ints.lumo());
  CHECK(sel.orbitals == std::vector<int>{0, 1});
  CHECK(sel.warning.empty());
}

TEST_CASE("table sizes and vanishing single increments on the closed-shell reference") {
  const auto ints = oracle::molecular_integrals(5, 4, 7);
  const auto t = correlation_table(ints);
  CHECK(t.delta1.size() == 5);
  CHECK(t.delta2.size() == 10);
  for (const auto& [key, v] : t.delta2) CHECK(key.first < key.second);
  for (const auto& [p, d] : t.delta1) CHECK(std::abs(d) < 1e-10);
}

TEST_CASE("full-order expansion telescopes to the full CI energy") {
  for (int n_elec : {2, 4})
    for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
      CAPTURE(n_elec);
      CAPTURE(seed);
      const auto ints = oracle::random_integrals(3, n_elec, seed, 0.3);
      const auto t = correlation_table(ints);
      double sum1 = 0.0, sum2 = 0.0;
      for (const auto& [p, d] : t.delta1) sum1 += d;
      for (const auto& [k, d] : t.delta2) sum2 += d;
      const double e012 = increment_energy(ints, {0, 1, 2}, {});
      const double delta3 = e012 - t.e_ref - sum1 - sum2;
      const double fci = oracle::sector_ground_energy(oracle::from_integrals(ints), n_elec / 2, n_elec / 2);
      CHECK(std::abs(t.e_ref + sum1 + sum2 + delta3 - fci) < 1e-9);
      CHECK(std::abs(sum1 + sum2 + delta3 - (fci - t.e_ref)) < 1e-9);
      for (const auto& [p, d] : t.delta1) CHECK(std::abs(d) < 1e-10);
    }
}

TEST_CASE("nonempty base shifts the reference") {
  const auto ints = oracle::molecular_integrals(4, 4, 5);
  const auto t = correlation_table(ints, {1, 2});
  CHECK(t.base == std::vector<int>{1, 2});
  CHECK(t.delta1.size() == 2);
  CHECK(t.delta2.size() == 1);
  CHECK(t.e_ref == doctest::Approx(increment_energy(ints, {1, 2}, {})).epsilon(1e-14));
  CHECK(t.pair(0, 3) + t.delta1.at(0) + t.delta1.at(3) + t.e_ref ==
        doctest::Approx(increment_energy(ints, {0, 1, 2, 3}, {})).epsilon(1e-13));
}

TEST_CASE("table is independent of evaluation order") {
  const auto ints = oracle::molecular_integrals(5, 6, 17);
  const auto a = correlation_table(ints);
  const auto b = correlation_table(ints);
  CHECK(a.delta1 == b.delta1);
  CHECK(a.delta2 == b.delta2);
  CHECK(correlation_csv(a) == correlation_csv(b));
  // Serial evaluation in reverse order yields the same values.
  for (int i = 4; i >= 0; --i)
    for (int j = 4; j > i; --j) {
      const double eij = increment_energy(ints, {i, j}, {});
      CHECK(a.pair(i, j) == eij - a.delta1.at(i) - a.delta1.at(j) - a.e_ref);
    }
}

TEST_CASE("single contributing pair selects exactly that pair") {
  CorrelationTable t;
  for (int p = 0; p < 5; ++p) t.delta1[p] = 0.0;
  t.delta2[{1, 3}] = -0.02;
  const auto sel = select_active(t, 0.3, 1, 3);
  CHECK(sel.orbitals == std::vector<int>{1, 3});
}

TEST_CASE("synthetic six-orbital scores") {
  const auto t = table_from_scores({0.0, 0.2, 1.0, 0.9, 0.25, 0.05});
  const auto sel = select_active(t, 0.3, 1, 2);
  CHECK(sel.orbitals == std::vector<int>{1, 2, 3});
  CHECK(sel.ranking == std::vector<int>{2, 3, 4, 1, 5, 0});
  CHECK(select_active(t, 0.3, 2, 3).orbitals == std::vector<int>{2, 3});
  CHECK(select_active(t, 0.3, 0, 5).orbitals == std::vector<int>{0, 2, 3, 5});
}

TEST_CASE("ties in the ranking fall back to index order") {
  const auto sel = select_active(table_from_scores({0.5, 1.0, 0.5, 1.0}), 0.5, 0, 1);
  CHECK(sel.ranking == std::vector<int>{1, 3, 0, 2});
  CHECK(sel.orbitals == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("scores add single and pair magnitudes") {
  CorrelationTable t;
  t.delta1 = {{0, -0.1}, {1, 0.05}, {2, 0.0}};
  t.delta2[{0, 1}] = -0.2;
  t.delta2[{1, 2}] = 0.3;
  const auto sel = select_active(t, 1.0, 0, 1);
  CHECK(sel.scores.at(0) == doctest::Approx(0.3));
  CHECK(sel.scores.at(1) == doctest::Approx(0.55));
  CHECK(sel.scores.at(2) == doctest::Approx(0.3));
}

TEST_CASE("raising the threshold never adds orbitals") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    CorrelationTable t;
    for (int p = 0; p < 8; ++p) t.delta1[p] = -0.01 * u(rng);
    for (int p = 0; p < 8; ++p)
      for (int q = p + 1; q < 8; ++q) t.delta2[{p, q}] = -0.01 * u(rng) * u(rng);
    std::vector<int> previous;
    for (int k = 1; k <= 10; ++k) {
      const auto sel = select_active(t, 0.1 * k, 3, 4);
      CHECK(std::binary_search(sel.orbitals.begin(), sel.orbitals.end(), 3));
      CHECK(std::binary_search(sel.orbitals.begin(), sel.orbitals.end(), 4));
      CHECK(std::is_sorted(sel.orbitals.begin(), sel.orbitals.end()));
      if (k > 1) CHECK(std::includes(previous.begin(), previous.end(), sel.orbitals.begin(), sel.orbitals.end()));
      previous = sel.orbitals;
    }
  }
}

TEST_CASE("all-zero scores fall back to HOMO and LUMO with a warning") {
  const auto sel = select_active(table_from_scores({0, 0, 0, 0}), 0.3, 1, 2);
  CHECK(sel.orbitals == std::vector<int>{1, 2});
  CHECK_FALSE(sel.warning.empty());
}

TEST_CASE("threshold must lie in (0, 1]") {
  const auto t = table_from_scores({1.0, 0.5});
  CHECK_THROWS_AS(select_active(t, 0.0, 0, 1), Error);
  CHECK_THROWS_AS(select_active(t, 1.5, 0, 1), Error);
  CHECK_NOTHROW(select_active(t, 1.0, 0, 1));
}

TEST_CASE("correlation CSV carries single increments on the diagonal") {
  CorrelationTable t;
  t.delta1 = {{0, -0.5}, {1, 0.25}};
  t.delta2[{0, 1}] = -0.125;
  CHECK(correlation_csv(t) == "i,j,delta_hartree\n0,0,-0.5\n1,1,0.25\n0,1,-0.125\n");
}

TEST_CASE("failing subset solves name the subset") {
  const auto ints = oracle::molecular_integrals(7, 6, 1);
  CasciOptions opts;
  opts.max_determinants = 3;
  CHECK_THROWS_WITH_AS(correlation_table(ints, {}, opts), doctest::Contains("subset"), Error);
}
