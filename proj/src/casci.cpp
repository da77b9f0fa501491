#include "nisqchem/casci.hpp"

#include <algorithm>
#include <random>

#include <Eigen/Eigenvalues>

namespace nisqchem {

namespace {

std::vector<std::uint64_t> occupation_strings(int n_orb, int n_occ) {
  std::vector<std::uint64_t> out;
  if (n_occ == 0) return {0};
  // Gosper's hack walks same-popcount masks in ascending order.
  std::uint64_t s = (std::uint64_t{1} << n_occ) - 1;
  const std::uint64_t limit = std::uint64_t{1} << n_orb;
  while (s < limit) {
    out.push_back(s);
    const std::uint64_t c = s & (~s + 1);
    const std::uint64_t r = s + c;
    s = (((r ^ s) >> 2) / c) | r;
  }
  return out;
}

std::vector<int> bits_of(std::uint64_t s) {
  std::vector<int> out;
  while (s) {
    out.push_back(__builtin_ctzll(s));
    s &= s - 1;
  }
  return out;
}

// Sign picked up by a_i or a+_i acting on `s`, which is then updated.
double annihilate(std::uint64_t& s, int i) {
  const double sign = popcount(s & ((std::uint64_t{1} << i) - 1)) % 2 ? -1.0 : 1.0;
  s ^= std::uint64_t{1} << i;
  return sign;
}

double create(std::uint64_t& s, int a) { return annihilate(s, a); }

double single_phase(std::uint64_t s, int i, int a) {
  double sign = annihilate(s, i);
  return sign * create(s, a);
}

double diagonal(const Determinant& d, const ActiveSpaceHamiltonian& ham) {
  const auto occ_a = bits_of(d.alpha);
  const auto occ_b = bits_of(d.beta);
  double e = ham.e_frozen;
  for (int i : occ_a) e += ham.h_eff(i, i);
  for (int i : occ_b) e += ham.h_eff(i, i);
  auto same_spin = [&](const std::vector<int>& occ) {
    double v = 0.0;
    for (int i : occ)
      for (int j : occ) v += ham.eri(i, i, j, j) - ham.eri(i, j, j, i);
    return 0.5 * v;
  };
  e += same_spin(occ_a) + same_spin(occ_b);
  for (int i : occ_a)
    for (int j : occ_b) e += ham.eri(i, i, j, j);
  return e;
}

// <d1| H |d2> where d1 differs from d2 by i -> a in one spin string.
double single_excitation(std::uint64_t same1, std::uint64_t same2, std::uint64_t other,
                         const ActiveSpaceHamiltonian& ham) {
  const int i = __builtin_ctzll(same2 & ~same1);
  const int a = __builtin_ctzll(same1 & ~same2);
  double v = ham.h_eff(a, i);
  for (int k : bits_of(same1 & same2)) v += ham.eri(a, i, k, k) - ham.eri(a, k, k, i);
  for (int k : bits_of(other)) v += ham.eri(a, i, k, k);
  return single_phase(same2, i, a) * v;
}

}  // namespace

std::vector<Determinant> enumerate_determinants(int n_act, int n_alpha, int n_beta) {
  if (n_act < 0 || n_alpha < 0 || n_beta < 0 || n_alpha > n_act || n_beta > n_act)
    throw Error("enumerate_determinants: electron counts exceed orbital count");
  if (n_act > 63) throw Error("enumerate_determinants: at most 63 active orbitals");
  const auto alphas = occupation_strings(n_act, n_alpha);
  const auto betas = occupation_strings(n_act, n_beta);
  std::vector<Determinant> dets;
  dets.reserve(alphas.size() * betas.size());
  for (auto a : alphas)
    for (auto b : betas) dets.push_back({a, b});
  return dets;
}

double matrix_element(const Determinant& d1, const Determinant& d2,
                      const ActiveSpaceHamiltonian& ham) {
  if (popcount(d1.alpha) != popcount(d2.alpha) || popcount(d1.beta) != popcount(d2.beta))
    return 0.0;
  const std::uint64_t da = d1.alpha ^ d2.alpha;
  const std::uint64_t db = d1.beta ^ d2.beta;
  const int ea = popcount(da) / 2;
  const int eb = popcount(db) / 2;
  if (ea + eb > 2) return 0.0;
  if (ea + eb == 0) return diagonal(d1, ham);
  if (ea == 1 && eb == 0) return single_excitation(d1.alpha, d2.alpha, d2.beta, ham);
  if (ea == 0 && eb == 1) return single_excitation(d1.beta, d2.beta, d2.alpha, ham);
  if (ea == 1 && eb == 1) {
    const int i = __builtin_ctzll(d2.alpha & ~d1.alpha);
    const int a = __builtin_ctzll(d1.alpha & ~d2.alpha);
    const int j = __builtin_ctzll(d2.beta & ~d1.beta);
    const int b = __builtin_ctzll(d1.beta & ~d2.beta);
    return single_phase(d2.alpha, i, a) * single_phase(d2.beta, j, b) * ham.eri(a, i, b, j);
  }
  // Same-spin double: d1 = sign * a+_a a+_b a_j a_i d2.
  const bool alpha = ea == 2;
  std::uint64_t s = alpha ? d2.alpha : d2.beta;
  const std::uint64_t s1 = alpha ? d1.alpha : d1.beta;
  const auto holes = bits_of(s & ~s1);
  const auto parts = bits_of(s1 & ~s);
  const int i = holes[0], j = holes[1], a = parts[0], b = parts[1];
  double sign = annihilate(s, i);
  sign *= annihilate(s, j);
  sign *= create(s, b);
  sign *= create(s, a);
  return sign * (ham.eri(a, i, b, j) - ham.eri(a, j, b, i));
}

SparseMatrix assemble_hamiltonian(const std::vector<Determinant>& basis,
                                  const ActiveSpaceHamiltonian& ham) {
  // The basis is a product of sorted alpha and beta string lists.
  std::vector<std::uint64_t> alphas, betas;
  for (const auto& d : basis) {
    if (alphas.empty() || alphas.back() != d.alpha) alphas.push_back(d.alpha);
  }
  for (const auto& d : basis) {
    if (d.alpha != basis.front().alpha) break;
    betas.push_back(d.beta);
  }
  const std::size_t nb = betas.size();
  if (alphas.size() * nb != basis.size())
    throw Error("assemble_hamiltonian: basis is not an alpha x beta product");

  auto neighbours = [](const std::vector<std::uint64_t>& strs) {
    std::vector<std::vector<std::pair<std::size_t, int>>> out(strs.size());
    for (std::size_t x = 0; x < strs.size(); ++x)
      for (std::size_t y = 0; y < strs.size(); ++y) {
        const int deg = popcount(strs[x] ^ strs[y]) / 2;
        if (deg <= 2) out[x].emplace_back(y, deg);
      }
    return out;
  };
  const auto na_links = neighbours(alphas);
  const auto nb_links = neighbours(betas);

  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t ia = 0; ia < alphas.size(); ++ia)
    for (const auto& [ja, dega] : na_links[ia])
      for (std::size_t ib = 0; ib < nb; ++ib)
        for (const auto& [jb, degb] : nb_links[ib]) {
          if (dega + degb > 2) continue;
          const std::size_t row = ia * nb + ib;
          const std::size_t col = ja * nb + jb;
          const double v = matrix_element(basis[row], basis[col], ham);
          if (v != 0.0) triplets.emplace_back(row, col, v);
        }
  SparseMatrix h(basis.size(), basis.size());
  h.setFromTriplets(triplets.begin(), triplets.end());
  return h;
}

Eigenpair lowest_eigenpair_lanczos(const std::function<void(const Vector&, Vector&)>& apply,
                                   Eigen::Index dim, const Vector& start,
                                   const CasciOptions& opts) {
  if (dim == 0) throw Error("lanczos: empty operator");
  Vector x = start.normalized();
  const Eigen::Index m = std::min<Eigen::Index>(opts.krylov_dim, dim);
  Matrix basis(dim, m);
  Vector w(dim), r(dim);
  double last_residual = 0.0;
  for (int restart = 0; restart < opts.max_restarts; ++restart) {
    std::vector<double> diag, off;
    basis.col(0) = x;
    Eigen::Index used = 0;
    for (Eigen::Index k = 0; k < m; ++k) {
      apply(basis.col(k), w);
      const double a = basis.col(k).dot(w);
      diag.push_back(a);
      used = k + 1;
      for (int pass = 0; pass < 2; ++pass)
        w -= basis.leftCols(used) * (basis.leftCols(used).transpose() * w);
      const double b = w.norm();
      if (k + 1 == m || b < 1e-13) break;
      off.push_back(b);
      basis.col(k + 1) = w / b;
    }
    Matrix t = Matrix::Zero(used, used);
    for (Eigen::Index k = 0; k < used; ++k) {
      t(k, k) = diag[k];
      if (k + 1 < used) t(k, k + 1) = t(k + 1, k) = off[k];
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(t);
    const double theta = es.eigenvalues()(0);
    x = basis.leftCols(used) * es.eigenvectors().col(0);
    x.normalize();
    apply(x, r);
    r -= theta * x;
    last_residual = r.norm();
    if (last_residual < opts.residual_tol) return {theta, x};
  }
  throw Error("lanczos: no convergence after " + std::to_string(opts.max_restarts) +
              " restarts (residual " + std::to_string(last_residual) + ")");
}

CIResult ground_state(const ActiveSpaceHamiltonian& ham, int n_alpha, int n_beta,
                      const CasciOptions& opts) {
  CIResult result;
  result.basis = enumerate_determinants(ham.n_act, n_alpha, n_beta);
  const std::size_t dim = result.basis.size();
  if (dim > opts.max_determinants)
    throw Error("ground_state: " + std::to_string(dim) + " determinants exceed cap of " +
                std::to_string(opts.max_determinants));

  const SparseMatrix h = assemble_hamiltonian(result.basis, ham);
  if (dim < opts.dense_limit) {
    Eigen::SelfAdjointEigenSolver<Matrix> es{Matrix(h)};
    result.energy = es.eigenvalues()(0);
    result.coefficients = es.eigenvectors().col(0);
  } else {
    // Unit vector on the first determinant, lightly dressed with a fixed
    // pseudo-random tail so symmetry-orthogonal starts still converge.
    Vector start = Vector::Zero(static_cast<Eigen::Index>(dim));
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (Eigen::Index i = 0; i < start.size(); ++i) start(i) = 1e-3 * dist(rng);
    start(0) += 1.0;
    auto apply = [&h](const Vector& in, Vector& out) { out.noalias() = h * in; };
    auto pair = lowest_eigenpair_lanczos(apply, h.rows(), start, opts);
    result.energy = pair.value;
    result.coefficients = std::move(pair.vector);
  }
  Eigen::Index imax = 0;
  result.coefficients.cwiseAbs().maxCoeff(&imax);
  if (result.coefficients(imax) < 0) result.coefficients = -result.coefficients;
  return result;
}

CIResult ground_state(const ActiveSpaceHamiltonian& ham, const CasciOptions& opts) {
  return ground_state(ham, ham.n_act_elec / 2, ham.n_act_elec / 2, opts);
}

}  // namespace nisqchem
