#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <vector>

namespace hp {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr Complex I{0.0, 1.0};

/// Japanese bracket <v> = (1 + |v|^2)^{1/2}.
inline double bracket(double abs_sq) { return std::sqrt(1.0 + abs_sq); }

inline double positive_part(double v) { return v > 0.0 ? v : 0.0; }

} // namespace hp
