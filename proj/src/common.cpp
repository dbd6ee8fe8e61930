#include "sdqw/common.hpp"

#include <array>

namespace sdqw {

double unitarity_defect(const CMatrix& m) {
  const CMatrix d = m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols());
  return max_abs(d);
}

double max_abs(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

const Eigen::Matrix2cd& pauli(int r) {
  static const std::array<Eigen::Matrix2cd, 4> table = [] {
    std::array<Eigen::Matrix2cd, 4> s;
    s[0] << 1, 0, 0, 1;
    s[1] << 0, 1, 1, 0;
    s[2] << 0, -kI, kI, 0;
    s[3] << 1, 0, 0, -1;
    return s;
  }();
  if (r < 0 || r > 3) throw ValidationError("pauli index out of range");
  return table[static_cast<std::size_t>(r)];
}

}  // namespace sdqw
