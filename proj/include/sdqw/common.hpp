#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

namespace sdqw {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

using ScalarField = std::function<double(double x, double t)>;
using ComplexField = std::function<Complex(double x, double t)>;

// Natural units throughout.
inline constexpr double kHbar = 1.0;
inline constexpr double kLightSpeed = 1.0;

inline constexpr Complex kI{0.0, 1.0};

// Raised for malformed inputs (sizes, normalization, config values).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a field is evaluated outside its mathematical domain.
class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& what, int site = -1, double x = 0.0, double t = 0.0)
      : std::domain_error(what), site_(site), x_(x), t_(t) {}
  int site() const { return site_; }
  double x() const { return x_; }
  double t() const { return t_; }

 private:
  int site_;
  double x_;
  double t_;
};

// Max-entry norm of M^dagger M - I.
double unitarity_defect(const CMatrix& m);

// Max-entry norm.
double max_abs(const CMatrix& m);

const Eigen::Matrix2cd& pauli(int r);

}  // namespace sdqw
