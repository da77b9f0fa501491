#include "nisqchem/hamstore.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace nisqchem {

namespace {

std::size_t pair_index(int a, int b) {
  if (a < b) std::swap(a, b);
  return static_cast<std::size_t>(a) * (a + 1) / 2 + b;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

// Splits "NORB=  2,NELEC= 2,MS2=0, ORBSYM=1,1," into key -> raw value text.
std::map<std::string, std::string> parse_namelist(std::string_view header) {
  std::map<std::string, std::string> fields;
  std::vector<std::pair<std::size_t, std::size_t>> keys;  // [start, '=' position)
  for (std::size_t eq = header.find('='); eq != std::string_view::npos;
       eq = header.find('=', eq + 1)) {
    std::size_t end = eq;
    while (end > 0 && std::isspace(static_cast<unsigned char>(header[end - 1]))) --end;
    std::size_t start = end;
    while (start > 0 && (std::isalnum(static_cast<unsigned char>(header[start - 1])) ||
                         header[start - 1] == '_'))
      --start;
    keys.emplace_back(start, eq);
  }
  for (std::size_t k = 0; k < keys.size(); ++k) {
    const auto [start, eq] = keys[k];
    std::size_t stop = k + 1 < keys.size() ? keys[k + 1].first : header.size();
    std::size_t end = eq;
    while (end > start && std::isspace(static_cast<unsigned char>(header[end - 1]))) --end;
    fields[upper(header.substr(start, end - start))] =
        std::string(header.substr(eq + 1, stop - eq - 1));
  }
  return fields;
}

int header_int(const std::map<std::string, std::string>& fields, const std::string& key) {
  auto it = fields.find(key);
  if (it == fields.end()) throw Error("FCIDUMP: missing header key " + key);
  std::istringstream in(it->second);
  int value = 0;
  if (!(in >> value)) throw Error("FCIDUMP: header key " + key + " is not an integer");
  return value;
}

double parse_value(std::string token, std::size_t line_no) {
  for (auto& c : token)
    if (c == 'D' || c == 'd') c = 'e';
  try {
    std::size_t used = 0;
    double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw Error("FCIDUMP: non-numeric value '" + token + "' on line " +
                std::to_string(line_no));
  }
}

}  // namespace

OrbitalIntegrals::OrbitalIntegrals(int n_orb, int n_elec, int ms2)
    : n_orb_(n_orb), n_elec_(n_elec), ms2_(ms2) {
  if (n_orb <= 0) throw Error("OrbitalIntegrals: n_orb must be positive");
  if (n_elec <= 0 || n_elec > 2 * n_orb)
    throw Error("OrbitalIntegrals: NELEC must satisfy 0 < NELEC <= 2*NORB");
  if (ms2 != 0) throw Error("OrbitalIntegrals: only closed-shell MS2=0 is supported");
  if (n_elec % 2 != 0) throw Error("OrbitalIntegrals: closed shell requires even NELEC");
  if (n_orb > 63) throw Error("OrbitalIntegrals: at most 63 orbitals are supported");
  h_ = Matrix::Zero(n_orb, n_orb);
  const std::size_t npair = pair_index(n_orb - 1, n_orb - 1) + 1;
  eri_.assign(npair * (npair + 1) / 2, 0.0);
}

void OrbitalIntegrals::check_index(int p) const {
  if (p < 0 || p >= n_orb_)
    throw Error("orbital index " + std::to_string(p) + " out of range [0, " +
                std::to_string(n_orb_) + ")");
}

std::size_t OrbitalIntegrals::eri_index(int p, int q, int r, int s) const {
  check_index(p);
  check_index(q);
  check_index(r);
  check_index(s);
  return pair_index(static_cast<int>(pair_index(p, q)), static_cast<int>(pair_index(r, s)));
}

double OrbitalIntegrals::h(int p, int q) const {
  check_index(p);
  check_index(q);
  return h_(p, q);
}

double OrbitalIntegrals::eri(int p, int q, int r, int s) const {
  return eri_[eri_index(p, q, r, s)];
}

void OrbitalIntegrals::set_h(int p, int q, double value) {
  check_index(p);
  check_index(q);
  h_(p, q) = value;
  h_(q, p) = value;
}

void OrbitalIntegrals::set_eri(int p, int q, int r, int s, double value) {
  eri_[eri_index(p, q, r, s)] = value;
}

std::vector<OrbitalIntegrals::EriEntry> OrbitalIntegrals::unique_eri() const {
  std::vector<EriEntry> out;
  for (int p = 0; p < n_orb_; ++p)
    for (int q = 0; q <= p; ++q)
      for (int r = 0; r <= p; ++r)
        for (int s = 0; s <= r; ++s) {
          if (pair_index(p, q) < pair_index(r, s)) continue;
          const double v = eri(p, q, r, s);
          if (v != 0.0) out.push_back({p, q, r, s, v});
        }
  return out;
}

OrbitalIntegrals parse_fcidump(std::string_view text) {
  std::istringstream lines{std::string(text)};
  std::string line;
  std::size_t line_no = 0;

  // Namelist: from "&FCI" up to "&END" or a line holding only "/".
  std::string header;
  bool started = false, closed = false;
  while (!closed && std::getline(lines, line)) {
    ++line_no;
    std::string up = upper(line);
    if (!started) {
      const std::size_t at = up.find("&FCI");
      if (at == std::string::npos) {
        if (up.find_first_not_of(" \t\r") == std::string::npos) continue;
        break;
      }
      started = true;
      line = line.substr(at + 4);
      up = up.substr(at + 4);
    }
    std::size_t stop = up.find("&END");
    const std::size_t first = up.find_first_not_of(" \t\r");
    if (stop == std::string::npos && first != std::string::npos && up[first] == '/' &&
        up.find_first_not_of(" \t\r", first + 1) == std::string::npos)
      stop = first;
    if (stop != std::string::npos) {
      line = line.substr(0, stop);
      closed = true;
    }
    header += line;
    header += '\n';
  }
  if (!started) throw Error("FCIDUMP: missing &FCI header");
  if (!closed) throw Error("FCIDUMP: unterminated &FCI header");

  const auto fields = parse_namelist(header);
  const int norb = header_int(fields, "NORB");
  const int nelec = header_int(fields, "NELEC");
  const int ms2 = header_int(fields, "MS2");
  if (norb <= 0) throw Error("FCIDUMP: NORB must be positive");
  if (nelec > 2 * norb) throw Error("FCIDUMP: NELEC exceeds 2*NORB");
  if (ms2 != 0) throw Error("FCIDUMP: only MS2=0 is supported");

  OrbitalIntegrals ints(norb, nelec, ms2);
  while (std::getline(lines, line)) {
    ++line_no;
    std::istringstream fields_in(line);
    std::string value_tok;
    if (!(fields_in >> value_tok)) continue;
    int idx[4];
    for (int& i : idx) {
      if (!(fields_in >> i))
        throw Error("FCIDUMP: malformed integral line " + std::to_string(line_no));
      if (i < 0 || i > norb)
        throw Error("FCIDUMP: index " + std::to_string(i) + " out of [0, NORB] on line " +
                    std::to_string(line_no));
    }
    const double v = parse_value(value_tok, line_no);
    const auto [i, j, k, l] = idx;
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      ints.set_core(v);
    } else if (k == 0 && l == 0) {
      if (j == 0) continue;  // orbital-energy line
      if (i == 0) throw Error("FCIDUMP: malformed one-electron indices on line " +
                              std::to_string(line_no));
      ints.set_h(i - 1, j - 1, v);
    } else {
      if (i == 0 || j == 0 || k == 0 || l == 0)
        throw Error("FCIDUMP: zero index in two-electron line " + std::to_string(line_no));
      ints.set_eri(i - 1, j - 1, k - 1, l - 1, v);
    }
  }
  return ints;
}

OrbitalIntegrals read_fcidump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open FCIDUMP file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_fcidump(buf.str());
}

std::string write_fcidump(const OrbitalIntegrals& ints) {
  std::ostringstream out;
  out << " &FCI NORB=" << ints.n_orb() << ",NELEC=" << ints.n_elec() << ",MS2=" << ints.ms2()
      << ",\n &END\n";
  char buf[96];
  auto line = [&](double v, int i, int j, int k, int l) {
    std::snprintf(buf, sizeof buf, "%.17e %d %d %d %d\n", v, i, j, k, l);
    out << buf;
  };
  for (const auto& e : ints.unique_eri()) line(e.value, e.p + 1, e.q + 1, e.r + 1, e.s + 1);
  for (int p = 0; p < ints.n_orb(); ++p)
    for (int q = 0; q <= p; ++q)
      if (ints.h()(p, q) != 0.0) line(ints.h()(p, q), p + 1, q + 1, 0, 0);
  line(ints.e_core(), 0, 0, 0, 0);
  return out.str();
}

ActiveSpaceHamiltonian fold_core(const OrbitalIntegrals& ints, std::vector<int> active) {
  std::sort(active.begin(), active.end());
  if (std::adjacent_find(active.begin(), active.end()) != active.end())
    throw Error("fold_core: duplicate orbital in active set");
  for (int p : active)
    if (p < 0 || p >= ints.n_orb())
      throw Error("fold_core: active orbital " + std::to_string(p) + " out of range");

  std::vector<int> frozen;
  for (int i = 0; i < ints.n_occupied(); ++i)
    if (!std::binary_search(active.begin(), active.end(), i)) frozen.push_back(i);

  ActiveSpaceHamiltonian ham;
  ham.n_act = static_cast<int>(active.size());
  ham.n_act_elec = ints.n_elec() - 2 * static_cast<int>(frozen.size());
  if (ham.n_act_elec < 0 || ham.n_act_elec > 2 * ham.n_act)
    throw Error("fold_core: inconsistent active electron count " +
                std::to_string(ham.n_act_elec));
  ham.orbital_ids = active;

  double e = ints.e_core();
  for (int i : frozen) {
    e += 2.0 * ints.h(i, i);
    for (int j : frozen) e += 2.0 * ints.eri(i, i, j, j) - ints.eri(i, j, j, i);
  }
  ham.e_frozen = e;

  const int n = ham.n_act;
  ham.h_eff = Matrix::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const int p = active[a], q = active[b];
      double v = ints.h(p, q);
      for (int i : frozen) v += 2.0 * ints.eri(p, q, i, i) - ints.eri(p, i, i, q);
      ham.h_eff(a, b) = v;
    }

  ham.eri_act.resize(static_cast<std::size_t>(n) * n * n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          ham.eri_act[((static_cast<std::size_t>(a) * n + b) * n + c) * n + d] =
              ints.eri(active[a], active[b], active[c], active[d]);
  return ham;
}

}  // namespace nisqchem
