#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace rtqw {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// A point of Z^d.
using Site = std::vector<int>;

// A spectral hypothesis (simple isolated eigenvalue, irreducibility) fails.
class AssumptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative procedure exhausted its budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr double kPi = 3.14159265358979323846;

// Internal labels are enumerated as (+1, ..., +d, -1, ..., -d).
inline int label_of(int index, int dim) { return index < dim ? index + 1 : -(index - dim + 1); }
inline int index_of(int label, int dim) {
  if (label == 0 || label > dim || label < -dim) throw std::invalid_argument("internal label out of range");
  return label > 0 ? label - 1 : dim + (-label) - 1;
}

}  // namespace rtqw
