#include "hamflow/linalg.hpp"

#include <limits>

namespace hamflow {

namespace {

int re_index(int a, int block) { return 2 * block * (a / block) + a % block; }
int im_index(int a, int block) { return re_index(a, block) + block; }

}  // namespace

Vector to_real(const CVector& c, int block) {
  Vector r(2 * c.size());
  for (int a = 0; a < c.size(); ++a) {
    r(re_index(a, block)) = c(a).real();
    r(im_index(a, block)) = c(a).imag();
  }
  return r;
}

CVector from_real(const Vector& r, int block) {
  CVector c(r.size() / 2);
  for (int a = 0; a < c.size(); ++a) {
    c(a) = cplx(r(re_index(a, block)), r(im_index(a, block)));
  }
  return c;
}

Matrix realify(const CMatrix& a, int block) {
  Matrix r = Matrix::Zero(2 * a.rows(), 2 * a.cols());
  for (int i = 0; i < a.rows(); ++i) {
    const int ri = re_index(i, block), ii = im_index(i, block);
    for (int j = 0; j < a.cols(); ++j) {
      const int rj = re_index(j, block), ij = im_index(j, block);
      const cplx v = a(i, j);
      r(ri, rj) = v.real();
      r(ri, ij) = -v.imag();
      r(ii, rj) = v.imag();
      r(ii, ij) = v.real();
    }
  }
  return r;
}

Matrix conjugation(int size, int block) {
  Matrix r = Matrix::Identity(2 * size, 2 * size);
  for (int a = 0; a < size; ++a) {
    const int ii = im_index(a, block);
    r(ii, ii) = -1.0;
  }
  return r;
}

Matrix complex_structure(int size, int block) {
  return realify(kI * CMatrix::Identity(size, size), block);
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double condition_number(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

}  // namespace hamflow
