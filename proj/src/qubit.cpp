#include "sdqw/qubit.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace sdqw {

namespace {

constexpr int kMaxQubits = 14;

bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

int log2_exact(Eigen::Index n) { return std::countr_zero(static_cast<unsigned long long>(n)); }

// i^k for k mod 4.
Complex i_power(int k) {
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

struct Masks {
  std::uint64_t x = 0, z = 0;
};

Masks masks_of(const std::vector<PauliLabel>& factors) {
  const int m = static_cast<int>(factors.size());
  Masks out;
  for (int k = 0; k < m; ++k) {
    const std::uint64_t bit = std::uint64_t{1} << (m - 1 - k);
    const PauliLabel p = factors[k];
    if (p == PauliLabel::X || p == PauliLabel::Y) out.x |= bit;
    if (p == PauliLabel::Y || p == PauliLabel::Z) out.z |= bit;
  }
  return out;
}

std::vector<PauliLabel> factors_of(std::uint64_t x, std::uint64_t z, int m) {
  std::vector<PauliLabel> f(m);
  for (int k = 0; k < m; ++k) {
    const std::uint64_t bit = std::uint64_t{1} << (m - 1 - k);
    const bool xb = x & bit, zb = z & bit;
    f[k] = xb ? (zb ? PauliLabel::Y : PauliLabel::X) : (zb ? PauliLabel::Z : PauliLabel::I);
  }
  return f;
}

// Adds coefficient * P to out.
void accumulate(const PauliString& p, CMatrix& out) {
  const Masks mk = masks_of(p.factors);
  const Complex pre = p.coefficient * i_power(std::popcount(mk.x & mk.z));
  const std::uint64_t dim = out.rows();
  for (std::uint64_t col = 0; col < dim; ++col) {
    const double sign = (std::popcount(col & mk.z) & 1) ? -1.0 : 1.0;
    out(static_cast<Eigen::Index>(col ^ mk.x), static_cast<Eigen::Index>(col)) += sign * pre;
  }
}

QubitRegister plain_register(int n_qubits) { return {n_qubits, false}; }

void require_same_width(const PauliDecomposition& a, const PauliDecomposition& b) {
  if (a.n_qubits() != b.n_qubits())
    throw ValidationError("Pauli sums act on different numbers of qubits");
}

}  // namespace

char to_char(PauliLabel p) {
  static constexpr char names[] = {'I', 'X', 'Y', 'Z'};
  return names[static_cast<int>(p)];
}

PauliLabel pauli_label_from_char(char c) {
  switch (c) {
    case 'I': case '0': return PauliLabel::I;
    case 'X': case '1': return PauliLabel::X;
    case 'Y': case '2': return PauliLabel::Y;
    case 'Z': case '3': return PauliLabel::Z;
    default: throw ValidationError(std::string("unknown Pauli label '") + c + "'");
  }
}

std::string PauliString::label() const {
  std::string s;
  for (PauliLabel p : factors) s.push_back(to_char(p));
  return s;
}

CMatrix PauliDecomposition::reconstruct() const {
  const int m = n_qubits();
  const Eigen::Index dim = Eigen::Index{1} << m;
  CMatrix out = CMatrix::Zero(dim, dim);
  for (const PauliString& p : terms) {
    if (static_cast<int>(p.factors.size()) != m)
      throw ValidationError("Pauli string length does not match the register");
    accumulate(p, out);
  }
  return out;
}

void PauliDecomposition::canonicalize(double drop_tolerance) {
  std::map<std::vector<PauliLabel>, Complex> merged;
  for (const PauliString& p : terms) merged[p.factors] += p.coefficient;
  terms.clear();
  for (auto& [factors, c] : merged)
    if (std::abs(c) >= drop_tolerance) terms.push_back({c, factors});
}

std::vector<std::string> encode_positions(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw ValidationError("number of position qubits must be in [1, " +
                          std::to_string(kMaxQubits) + "]");
  const int n = 1 << n_qubits;
  std::vector<std::string> out(n);
  for (int j = 0; j < n; ++j) {
    std::string bits(n_qubits, '0');
    for (int k = 0; k < n_qubits; ++k)
      if (j & (1 << (n_qubits - 1 - k))) bits[k] = '1';
    out[j] = std::move(bits);
  }
  return out;
}

int decode_position(std::string_view bits) {
  if (bits.empty() || static_cast<int>(bits.size()) > kMaxQubits)
    throw ValidationError("bit string length out of range");
  int j = 0;
  for (char b : bits) {
    if (b != '0' && b != '1') throw ValidationError("bit string must contain only 0 and 1");
    j = 2 * j + (b - '0');
  }
  return j;
}

PauliDecomposition decompose(const CMatrix& matrix, QubitRegister reg) {
  if (matrix.rows() != matrix.cols() || !is_power_of_two(matrix.rows()))
    throw ValidationError("matrix dimension must be a power of two, got " +
                          std::to_string(matrix.rows()) + "x" + std::to_string(matrix.cols()));
  const int m = log2_exact(matrix.rows());
  if (m > kMaxQubits) throw ValidationError("matrix too large for Pauli decomposition");
  if (reg.n_qubits() != m)
    throw ValidationError("register holds " + std::to_string(reg.n_qubits()) +
                          " qubits but the matrix acts on " + std::to_string(m));
  const std::uint64_t dim = std::uint64_t{1} << m;
  const double norm = 1.0 / static_cast<double>(dim);
  PauliDecomposition out;
  out.reg = reg;
  for (std::uint64_t x = 0; x < dim; ++x) {
    for (std::uint64_t z = 0; z < dim; ++z) {
      Complex acc = 0.0;
      for (std::uint64_t col = 0; col < dim; ++col) {
        const Complex v = matrix(static_cast<Eigen::Index>(col ^ x), static_cast<Eigen::Index>(col));
        acc += (std::popcount(col & z) & 1) ? -v : v;
      }
      // conj(i^k) = i^{-k}
      const Complex c = acc * i_power(-std::popcount(x & z)) * norm;
      if (std::abs(c) >= kPauliDropTolerance) out.terms.push_back({c, factors_of(x, z, m)});
    }
  }
  out.canonicalize();
  return out;
}

PauliDecomposition decompose(const CMatrix& matrix) {
  if (matrix.rows() != matrix.cols() || !is_power_of_two(matrix.rows()))
    throw ValidationError("matrix dimension must be a power of two");
  return decompose(matrix, plain_register(log2_exact(matrix.rows())));
}

CMatrix pauli_matrix(const PauliString& p) {
  const Eigen::Index dim = Eigen::Index{1} << p.factors.size();
  CMatrix out = CMatrix::Zero(dim, dim);
  accumulate(p, out);
  return out;
}

PauliDecomposition pauli_term(Complex coefficient, std::initializer_list<PauliLabel> factors) {
  PauliDecomposition d;
  d.reg = plain_register(static_cast<int>(factors.size()));
  d.terms.push_back({coefficient, std::vector<PauliLabel>(factors)});
  return d;
}

PauliDecomposition kron(const PauliDecomposition& a, const PauliDecomposition& b) {
  PauliDecomposition out;
  out.reg = a.reg.has_coin_qubit
                ? QubitRegister{a.reg.n_position_qubits + b.n_qubits(), true}
                : plain_register(a.n_qubits() + b.n_qubits());
  for (const PauliString& p : a.terms) {
    for (const PauliString& q : b.terms) {
      PauliString r{p.coefficient * q.coefficient, p.factors};
      r.factors.insert(r.factors.end(), q.factors.begin(), q.factors.end());
      out.terms.push_back(std::move(r));
    }
  }
  out.canonicalize();
  return out;
}

PauliDecomposition operator+(const PauliDecomposition& a, const PauliDecomposition& b) {
  require_same_width(a, b);
  PauliDecomposition out = a;
  out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
  out.canonicalize();
  return out;
}

PauliDecomposition operator-(const PauliDecomposition& a, const PauliDecomposition& b) {
  return a + Complex(-1.0) * b;
}

PauliDecomposition operator*(Complex s, const PauliDecomposition& a) {
  PauliDecomposition out = a;
  for (PauliString& p : out.terms) p.coefficient *= s;
  out.canonicalize();
  return out;
}

bool equivalent(PauliDecomposition a, PauliDecomposition b, double tol) {
  if (a.n_qubits() != b.n_qubits()) return false;
  a.canonicalize(tol);
  b.canonicalize(tol);
  if (a.terms.size() != b.terms.size()) return false;
  for (std::size_t k = 0; k < a.terms.size(); ++k) {
    if (a.terms[k].factors != b.terms[k].factors) return false;
    if (std::abs(a.terms[k].coefficient - b.terms[k].coefficient) > tol) return false;
  }
  return true;
}

PauliDecomposition shift_with_coin(int n_qubits, ShiftDirection direction) {
  encode_positions(n_qubits);  // validates the register size
  const Lattice lattice(1 << n_qubits, 1.0, 0);
  const LinearOperator s = build_shift(lattice, direction, 2);
  return decompose(s.matrix, {n_qubits, true});
}

std::vector<ProjectedRotation> coin_as_projected_rotations(const RestrictedCoinField& field,
                                                           double t, double tau,
                                                           const Lattice& lattice) {
  const int n = lattice.n_sites();
  if (!is_power_of_two(n) || n < 2)
    throw ValidationError("lattice size must be a power of two, got " + std::to_string(n));
  const int n_qubits = log2_exact(n);
  std::vector<ProjectedRotation> out;
  out.reserve(n);
  for (int j = 0; j < n; ++j) {
    const double x = lattice.position(j);
    ProjectedRotation r;
    r.site = j;
    for (int k = 0; k < n_qubits; ++k) r.projector_signs.push_back((j >> (n_qubits - 1 - k)) & 1 ? -1 : 1);
    r.phase = field.xi(x, t) + tau * field.lambda(x, t);
    r.angle = field.theta(x, t) + tau * field.vartheta(x, t);
    if (!std::isfinite(r.phase) || !std::isfinite(r.angle)) {
      std::ostringstream os;
      os << "coin " << field.label << " is not finite at site " << j << " (x=" << x << ", t=" << t
         << ")";
      throw DomainError(os.str(), j, x, t);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ProjectedRotation> coin_as_projected_rotations(const RestrictedCoinField& field,
                                                           double t, double tau, int n_qubits,
                                                           double spacing) {
  encode_positions(n_qubits);
  return coin_as_projected_rotations(field, t, tau, Lattice(1 << n_qubits, spacing, 0));
}

PauliDecomposition to_decomposition(std::span<const ProjectedRotation> rotations, int n_qubits) {
  if (rotations.size() != (std::size_t{1} << n_qubits))
    throw ValidationError("expected one projected rotation per site");
  PauliDecomposition total;
  total.reg = {n_qubits, true};
  for (const ProjectedRotation& r : rotations) {
    if (static_cast<int>(r.projector_signs.size()) != n_qubits)
      throw ValidationError("projector length does not match the register");
    const Complex ph = std::polar(1.0, r.phase);
    PauliDecomposition term = pauli_term(ph * std::cos(r.angle), {PauliLabel::I}) +
                              pauli_term(-kI * ph * std::sin(r.angle), {PauliLabel::X});
    term.reg = {0, true};
    for (int s : r.projector_signs)
      term = kron(term, pauli_term(0.5, {PauliLabel::I}) + pauli_term(0.5 * s, {PauliLabel::Z}));
    total.terms.insert(total.terms.end(), term.terms.begin(), term.terms.end());
  }
  total.canonicalize();
  return total;
}

CMatrix reconstruct(std::span<const ProjectedRotation> rotations, int n_qubits) {
  return to_decomposition(rotations, n_qubits).reconstruct();
}

void write_text(std::ostream& out, const PauliDecomposition& d) {
  char buf[64];
  for (const PauliString& p : d.terms) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g", p.coefficient.real(), p.coefficient.imag());
    out << buf;
    for (PauliLabel l : p.factors) out << ' ' << to_char(l);
    out << '\n';
  }
}

PauliDecomposition read_text(std::istream& in, QubitRegister reg) {
  PauliDecomposition d;
  d.reg = reg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    double re = 0.0, im = 0.0;
    if (!(ls >> re >> im)) throw ValidationError("line " + std::to_string(line_no) + ": bad coefficient");
    PauliString p{{re, im}, {}};
    std::string tok;
    while (ls >> tok) {
      if (tok.size() != 1) throw ValidationError("line " + std::to_string(line_no) + ": bad label " + tok);
      p.factors.push_back(pauli_label_from_char(tok[0]));
    }
    if (static_cast<int>(p.factors.size()) != reg.n_qubits())
      throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(reg.n_qubits()) + " labels");
    d.terms.push_back(std::move(p));
  }
  return d;
}

}  // namespace sdqw
