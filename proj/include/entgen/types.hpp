#pragma once

#include <Eigen/Dense>

namespace entgen {

using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using Mat24 = Eigen::Matrix<double, 2, 4>;
using Mat42 = Eigen::Matrix<double, 4, 2>;
using Mat84 = Eigen::Matrix<double, 8, 4>;
using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;

// Symplectic form J for the phase-space ordering (X1, P1, X2, P2).
inline Mat4 symplectic_form() {
  Mat4 j = Mat4::Zero();
  j(0, 1) = 1.0;
  j(1, 0) = -1.0;
  j(2, 3) = 1.0;
  j(3, 2) = -1.0;
  return j;
}

// 8x8 form [[0, I4], [-I4, 0]] used for Hamiltonian-matrix checks.
inline Mat8 symplectic_form8() {
  Mat8 j = Mat8::Zero();
  j.block<4, 4>(0, 4) = Mat4::Identity();
  j.block<4, 4>(4, 0) = -Mat4::Identity();
  return j;
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Derived::RowsAtCompileTime,
              Derived::ColsAtCompileTime>
symmetrize(const Eigen::MatrixBase<Derived>& m) {
  return 0.5 * (m + m.transpose());
}

}  // namespace entgen
