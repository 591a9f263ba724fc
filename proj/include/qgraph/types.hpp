#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace qgraph {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;

/// Tolerance on ||U^dagger U - I||_max accepted for user-supplied unitaries.
inline constexpr double kUnitaryTolerance = 1e-10;

/// Max-norm distance of U^dagger U from the identity.
double unitarity_defect(const CMatrix& u);

/// Maps an angle to (-pi, pi].
double normalize_angle(double radians);

}  // namespace qgraph
