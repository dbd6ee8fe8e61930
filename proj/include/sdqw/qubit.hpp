#pragma once

#include "sdqw/common.hpp"
#include "sdqw/lattice.hpp"
#include "sdqw/operators.hpp"

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sdqw {

// sigma_0 .. sigma_3. The numeric value is the label's rank in canonical order.
enum class PauliLabel : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char to_char(PauliLabel p);
PauliLabel pauli_label_from_char(char c);

// coefficient * factors[0] (x) factors[1] (x) ...; factors[0] acts on the most
// significant bit of the matrix index.
struct PauliString {
  Complex coefficient{1.0, 0.0};
  std::vector<PauliLabel> factors;

  std::string label() const;
};

struct QubitRegister {
  int n_position_qubits = 0;
  bool has_coin_qubit = false;

  int n_qubits() const { return n_position_qubits + (has_coin_qubit ? 1 : 0); }
  bool operator==(const QubitRegister&) const = default;
};

inline constexpr double kPauliDropTolerance = 1e-14;

struct PauliDecomposition {
  std::vector<PauliString> terms;
  QubitRegister reg;

  int n_qubits() const { return reg.n_qubits(); }
  CMatrix reconstruct() const;
  // Sort lexicographically by labels, merge duplicates, drop |c| < drop_tolerance.
  void canonicalize(double drop_tolerance = kPauliDropTolerance);
};

// Site j <-> binary digits of j on n_qubits, most significant first.
std::vector<std::string> encode_positions(int n_qubits);
int decode_position(std::string_view bits);

// Hilbert-Schmidt projection c_P = Tr(P^dagger M) / 2^m, returned in canonical order.
PauliDecomposition decompose(const CMatrix& matrix, QubitRegister reg);
PauliDecomposition decompose(const CMatrix& matrix);

// Dense matrix of a single string (coefficient included).
CMatrix pauli_matrix(const PauliString& p);

// Term algebra, for writing grouped forms such as (sigma_0 + sigma_3)/2 (x) ...
PauliDecomposition pauli_term(Complex coefficient, std::initializer_list<PauliLabel> factors);
PauliDecomposition kron(const PauliDecomposition& a, const PauliDecomposition& b);
PauliDecomposition operator+(const PauliDecomposition& a, const PauliDecomposition& b);
PauliDecomposition operator-(const PauliDecomposition& a, const PauliDecomposition& b);
PauliDecomposition operator*(Complex s, const PauliDecomposition& a);

// Same terms after canonicalization, coefficients within tol.
bool equivalent(PauliDecomposition a, PauliDecomposition b, double tol = 1e-12);

// Controlled shift on (coin qubit, n position qubits); positions start at site 0.
PauliDecomposition shift_with_coin(int n_qubits, ShiftDirection direction);

// e^{i phase} e^{-i angle sigma_1} on the coin, controlled by one position basis state.
struct ProjectedRotation {
  int site = 0;
  // +1 for (sigma_0 + sigma_3)/2 (bit 0), -1 for (sigma_0 - sigma_3)/2 (bit 1), MSB first.
  std::vector<int> projector_signs;
  double phase = 0.0;
  double angle = 0.0;
};

// One term per site of a lattice whose size is a power of two.
std::vector<ProjectedRotation> coin_as_projected_rotations(const RestrictedCoinField& field,
                                                           double t, double tau,
                                                           const Lattice& lattice);
// Lattice of 2^n sites, spacing a, site 0 at x = 0.
std::vector<ProjectedRotation> coin_as_projected_rotations(const RestrictedCoinField& field,
                                                           double t, double tau, int n_qubits,
                                                           double spacing);

PauliDecomposition to_decomposition(std::span<const ProjectedRotation> rotations, int n_qubits);
CMatrix reconstruct(std::span<const ProjectedRotation> rotations, int n_qubits);

// One line per term: "coeff_re coeff_im L0 L1 ...".
void write_text(std::ostream& out, const PauliDecomposition& d);
PauliDecomposition read_text(std::istream& in, QubitRegister reg);

}  // namespace sdqw
