#pragma once

#include <complex>

#include <Eigen/Dense>

namespace hamflow {

using cplx = std::complex<double>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr cplx kI{0.0, 1.0};

// Real layout of complex vectors.
//
// A complex vector made of consecutive blocks of length n is stored as
// [Re block0, Im block0, Re block1, Im block1, ...]. For a chart point on M
// (one block) this is (q, p) with z = q + ip; for an ambient point (z, u) it
// is (Re z, Im z, Re u, Im u).

Vector to_real(const CVector& c, int block);
CVector from_real(const Vector& r, int block);

/// Real matrix of the R-linear map c -> A c, in the block layout above.
Matrix realify(const CMatrix& a, int block);

/// Real matrix of the R-linear map c -> conj(c).
Matrix conjugation(int size, int block);

/// Real matrix of multiplication by i on a vector with `size` complex entries.
Matrix complex_structure(int size, int block);

/// Largest singular value.
double operator_norm(const Matrix& m);

/// Ratio of largest to smallest singular value; +inf if singular.
double condition_number(const Matrix& m);

}  // namespace hamflow
