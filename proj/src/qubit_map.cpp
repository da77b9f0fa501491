#include "nisqchem/qubit_map.hpp"

#include <algorithm>
#include <functional>

namespace nisqchem {

std::vector<std::pair<LadderProduct, Complex>> normal_ordered(const LadderProduct& product) {
  // Insertion sort with anticommutation; a_p a+_q = delta_pq - a+_q a_p spawns
  // a shorter term which is ordered recursively.
  std::vector<std::pair<LadderProduct, Complex>> out;
  LadderProduct term = product;
  Complex coeff{1.0, 0.0};
  for (std::size_t i = 1; i < term.size(); ++i) {
    for (std::size_t j = i; j > 0; --j) {
      LadderOp& left = term[j - 1];
      LadderOp& right = term[j];
      const bool swap_needed =
          (!left.dagger && right.dagger) ||
          (left.dagger == right.dagger && left.mode < right.mode);
      if (left.dagger == right.dagger && left.mode == right.mode) return out;  // a a = 0
      if (!swap_needed) break;
      if (!left.dagger && right.dagger && left.mode == right.mode) {
        LadderProduct contracted(term.begin(), term.begin() + (j - 1));
        contracted.insert(contracted.end(), term.begin() + (j + 1), term.end());
        for (auto& [t, c] : normal_ordered(contracted)) out.emplace_back(std::move(t), coeff * c);
      }
      std::swap(left, right);
      coeff = -coeff;
    }
  }
  out.emplace_back(std::move(term), coeff);
  return out;
}

void FermionOperator::add(const LadderProduct& product, Complex c) {
  for (const auto& op : product) n_modes_ = std::max(n_modes_, op.mode + 1);
  for (auto& [t, v] : normal_ordered(product)) terms_[t] += c * v;
}

int spin_orbital(int spatial, int spin, int n_spatial, SpinOrdering ordering) {
  return ordering == SpinOrdering::Interleaved ? 2 * spatial + spin : spatial + spin * n_spatial;
}

FermionOperator to_fermion(const ActiveSpaceHamiltonian& ham, SpinOrdering ordering) {
  FermionOperator op;
  const int n = ham.n_act;
  op.set_n_modes(2 * n);
  op.add_constant(ham.e_frozen);
  auto mode = [&](int p, int s) { return spin_orbital(p, s, n, ordering); };
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      const double v = ham.h_eff(p, q);
      if (v == 0.0) continue;
      for (int s = 0; s < 2; ++s) op.add({{mode(p, s), true}, {mode(q, s), false}}, v);
    }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          const double v = ham.eri(p, q, r, s);
          if (v == 0.0) continue;
          for (int sig = 0; sig < 2; ++sig)
            for (int tau = 0; tau < 2; ++tau)
              op.add({{mode(p, sig), true},
                      {mode(r, tau), true},
                      {mode(s, tau), false},
                      {mode(q, sig), false}},
                     0.5 * v);
        }
  return op;
}

namespace {

QubitOperator map_terms(const FermionOperator& op,
                        const std::function<QubitOperator(const LadderOp&)>& ladder) {
  const int n = op.n_modes();
  std::vector<QubitOperator> raising(n), lowering(n);
  for (int j = 0; j < n; ++j) {
    raising[j] = ladder({j, true});
    lowering[j] = ladder({j, false});
  }
  QubitOperator out(n);
  for (const auto& [product, c] : op.terms()) {
    QubitOperator t = QubitOperator::identity(c, n);
    for (const auto& l : product) t = t * (l.dagger ? raising[l.mode] : lowering[l.mode]);
    out += t;
  }
  out = simplify(out);
  out.set_n_qubits(n);
  return out;
}

PauliString z_string(const std::vector<int>& qubits) {
  PauliString s;
  for (int q : qubits) s.z |= std::uint64_t{1} << q;
  return s;
}

PauliString x_string(const std::vector<int>& qubits) {
  PauliString s;
  for (int q : qubits) s.x |= std::uint64_t{1} << q;
  return s;
}

PauliString combine(const PauliString& a, const PauliString& b) {
  return {a.x | b.x, a.z | b.z};
}

}  // namespace

QubitOperator jordan_wigner(const FermionOperator& op) {
  return map_terms(op, [](const LadderOp& l) {
    std::vector<int> below(l.mode);
    for (int q = 0; q < l.mode; ++q) below[q] = q;
    const PauliString zs = z_string(below);
    QubitOperator t;
    t.add(combine(zs, PauliString::single(l.mode, Pauli::X)), 0.5);
    t.add(combine(zs, PauliString::single(l.mode, Pauli::Y)),
          l.dagger ? Complex{0, -0.5} : Complex{0, 0.5});
    return t;
  });
}

BravyiKitaevTree::BravyiKitaevTree(int n_modes) : n(n_modes), parent(n_modes, -1),
                                                  range_start(n_modes, 0) {
  if (n_modes <= 0 || n_modes > 64) throw Error("BravyiKitaevTree: need 1..64 modes");
  // Node `right` covers [left, right]; its left half's root is the pivot.
  std::function<void(int, int, int)> split = [&](int left, int right, int owner) {
    if (left >= right) return;
    const int pivot = (left + right) >> 1;
    parent[pivot] = owner;
    range_start[pivot] = left;
    split(left, pivot, pivot);
    split(pivot + 1, right, owner);
  };
  range_start[n - 1] = 0;
  split(0, n - 1, n - 1);
}

std::vector<int> BravyiKitaevTree::update_set(int j) const {
  std::vector<int> out;
  for (int p = parent[j]; p >= 0; p = parent[p]) out.push_back(p);
  return out;
}

std::vector<int> BravyiKitaevTree::parity_set(int j) const {
  std::vector<int> out;
  for (int k = j - 1; k >= 0; k = range_start[k] - 1) out.push_back(k);
  return out;
}

std::vector<int> BravyiKitaevTree::flip_set(int j) const {
  std::vector<int> out;
  for (int k = 0; k < n; ++k)
    if (parent[k] == j) out.push_back(k);
  return out;
}

std::vector<int> BravyiKitaevTree::remainder_set(int j) const {
  auto p = parity_set(j);
  const auto f = flip_set(j);
  std::erase_if(p, [&](int k) { return std::find(f.begin(), f.end(), k) != f.end(); });
  return p;
}

std::uint64_t BravyiKitaevTree::encode(std::uint64_t occupation) const {
  std::uint64_t bits = 0;
  for (int k = 0; k < n; ++k) {
    const std::uint64_t width = k - range_start[k] + 1;
    const std::uint64_t mask =
        (width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1)) << range_start[k];
    if (popcount(occupation & mask) % 2) bits |= std::uint64_t{1} << k;
  }
  return bits;
}

QubitOperator bravyi_kitaev(const FermionOperator& op) {
  const BravyiKitaevTree tree(std::max(op.n_modes(), 1));
  return map_terms(op, [&](const LadderOp& l) {
    const int j = l.mode;
    const PauliString xu = x_string(tree.update_set(j));
    const PauliString c = combine(combine(xu, PauliString::single(j, Pauli::X)),
                                  z_string(tree.parity_set(j)));
    const PauliString d = combine(combine(xu, PauliString::single(j, Pauli::Y)),
                                  z_string(tree.remainder_set(j)));
    // a+ = (c - i d) / 2, a = (c + i d) / 2
    QubitOperator t;
    t.add(c, 0.5);
    t.add(d, l.dagger ? Complex{0, -0.5} : Complex{0, 0.5});
    return t;
  });
}

std::uint64_t reference_occupation(int n_spatial, int n_elec, SpinOrdering ordering) {
  std::uint64_t occ = 0;
  for (int p = 0; p < n_elec / 2; ++p)
    for (int s = 0; s < 2; ++s) occ |= std::uint64_t{1} << spin_orbital(p, s, n_spatial, ordering);
  return occ;
}

std::vector<int> z_diagonal_qubits(const QubitOperator& op) {
  std::uint64_t offdiag = 0;
  for (const auto& [p, c] : op.terms()) offdiag |= p.x;
  std::vector<int> out;
  for (int q = 0; q < op.n_qubits(); ++q)
    if (!((offdiag >> q) & 1u)) out.push_back(q);
  return out;
}

TaperedOperator taper_two_qubits(const QubitOperator& op, int n_elec) {
  const int n = op.n_qubits();
  if (n < 2 || n % 2 != 0) throw Error("taper_two_qubits: need an even qubit count >= 2");
  const int q_alpha = n / 2 - 1;
  const int q_total = n - 1;
  const auto diag = z_diagonal_qubits(op);
  auto is_diag = [&](int q) { return std::find(diag.begin(), diag.end(), q) != diag.end(); };
  if (!is_diag(q_alpha) || !is_diag(q_total))
    throw Error("taper_two_qubits: symmetry qubits not Z-diagonal");

  const BravyiKitaevTree tree(n);
  const std::uint64_t encoded =
      tree.encode(reference_occupation(n / 2, n_elec, SpinOrdering::Blocked));

  TaperedOperator result;
  result.removed = {q_alpha, q_total};
  for (int q : result.removed) result.eigenvalues.push_back((encoded >> q) & 1u ? -1.0 : 1.0);

  auto compact = [&](std::uint64_t bits) {
    std::uint64_t out = 0;
    int k = 0;
    for (int q = 0; q < n; ++q) {
      if (q == q_alpha || q == q_total) continue;
      if ((bits >> q) & 1u) out |= std::uint64_t{1} << k;
      ++k;
    }
    return out;
  };

  QubitOperator reduced(n - 2);
  for (const auto& [p, c] : op.terms()) {
    Complex v = c;
    for (std::size_t k = 0; k < result.removed.size(); ++k)
      if ((p.z >> result.removed[k]) & 1u) v *= result.eigenvalues[k];
    reduced.add(PauliString{compact(p.x), compact(p.z)}, v);
  }
  result.op = simplify(reduced);
  result.op.set_n_qubits(n - 2);
  result.reference_bits = compact(encoded);
  return result;
}

}  // namespace nisqchem
