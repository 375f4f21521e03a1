#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>

namespace uavnet {

template <typename Scalar>
using Vec3T = Eigen::Matrix<Scalar, 3, 1>;
using Vec3 = Vec3T<double>;
using Vec2 = Eigen::Vector2d;

template <typename Scalar>
using MatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// 0/1 matrices (adjacency a_ij, association c_im).
using BinaryMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kLightSpeed = 3e8;
inline constexpr double kBoltzmann = 1.380649e-23;
inline constexpr double kPi = 3.14159265358979323846;

}  // namespace uavnet
