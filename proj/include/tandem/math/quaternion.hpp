#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cmath>
#include <stdexcept>

namespace tandem::math {

/// Unit quaternion, scalar-first (w, x, y, z), Hamilton product convention.
struct Quaternion {
  double w{1.0};
  double x{0.0};
  double y{0.0};
  double z{0.0};

  Quaternion() = default;
  Quaternion(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

  static Quaternion identity() { return {1.0, 0.0, 0.0, 0.0}; }

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

  bool is_finite() const {
    return std::isfinite(w) && std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }

  Quaternion conjugate() const { return {w, -x, -y, -z}; }

  Eigen::Vector4d coeffs() const { return {w, x, y, z}; }
};

inline void check_finite(const Quaternion& q, const char* who) {
  if (!q.is_finite()) throw std::invalid_argument(std::string(who) + ": non-finite quaternion");
}

inline void check_finite(const Eigen::Vector3d& v, const char* who) {
  if (!v.allFinite()) throw std::invalid_argument(std::string(who) + ": non-finite vector");
}

inline Quaternion normalized(const Quaternion& q) {
  const double n = q.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw std::invalid_argument("normalized: degenerate quaternion norm");
  return {q.w / n, q.x / n, q.y / n, q.z / n};
}

/// Hamilton product a ⊗ b, renormalized.
inline Quaternion quat_mul(const Quaternion& a, const Quaternion& b) {
  check_finite(a, "quat_mul");
  check_finite(b, "quat_mul");
  Quaternion r{a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
               a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
               a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
               a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
  return normalized(r);
}

/// Raw Hamilton product without renormalization (for derivatives).
inline Quaternion quat_mul_raw(const Quaternion& a, const Quaternion& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

/// Kinematic map q̇ = ½ q ⊗ (0, ω). Result is a raw 4-vector (w, x, y, z), not a unit quaternion.
inline Eigen::Vector4d quat_derivative(const Quaternion& q, const Eigen::Vector3d& omega) {
  check_finite(q, "quat_derivative");
  check_finite(omega, "quat_derivative");
  const Quaternion r = quat_mul_raw(q, Quaternion{0.0, omega.x(), omega.y(), omega.z()});
  return {0.5 * r.w, 0.5 * r.x, 0.5 * r.y, 0.5 * r.z};
}

/// exp(½ v) as a unit quaternion; v is a rotation vector.
inline Quaternion quat_exp(const Eigen::Vector3d& v) {
  const double angle = v.norm();
  if (angle < 1e-12) {
    // second-order series keeps unit norm to machine precision
    const double w = 1.0 - angle * angle / 8.0;
    return normalized({w, 0.5 * v.x(), 0.5 * v.y(), 0.5 * v.z()});
  }
  const double half = 0.5 * angle;
  const Eigen::Vector3d axis = v / angle;
  const double s = std::sin(half);
  return {std::cos(half), axis.x() * s, axis.y() * s, axis.z() * s};
}

/// Rotation-vector logarithm of a unit quaternion, in (-π, π].
inline Eigen::Vector3d quat_log(const Quaternion& q_in) {
  Quaternion q = q_in;
  if (q.w < 0.0) q = {-q.w, -q.x, -q.y, -q.z};  // principal branch
  const double vn = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
  if (vn < 1e-12) return 2.0 * Eigen::Vector3d(q.x, q.y, q.z);
  const double angle = 2.0 * std::atan2(vn, q.w);
  return (angle / vn) * Eigen::Vector3d(q.x, q.y, q.z);
}

/// Exponential-map integration q ⊗ exp(½ ω dt).
inline Quaternion integrate_quat(const Quaternion& q, const Eigen::Vector3d& omega, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_quat: dt must be positive");
  check_finite(q, "integrate_quat");
  check_finite(omega, "integrate_quat");
  return quat_mul(q, quat_exp(omega * dt));
}

inline Eigen::Matrix3d quat_to_rotation(const Quaternion& q_in) {
  const Quaternion q = normalized(q_in);
  const double w = q.w, x = q.x, y = q.y, z = q.z;
  Eigen::Matrix3d R;
  R << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return R;
}

inline Quaternion quat_from_rotation(const Eigen::Matrix3d& R) {
  Eigen::Quaterniond eq(R);
  return normalized({eq.w(), eq.x(), eq.y(), eq.z()});
}

inline Quaternion quat_from_axis_angle(const Eigen::Vector3d& axis, double angle) {
  return quat_exp(axis.normalized() * angle);
}

/// ZYX Euler angles (roll, pitch, yaw): R = Rz(yaw) Ry(pitch) Rx(roll).
inline Eigen::Matrix3d euler_zyx_to_rotation(const Eigen::Vector3d& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(rpy.y(), Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

inline Eigen::Vector3d rotation_to_euler_zyx(const Eigen::Matrix3d& R) {
  const double pitch = std::asin(std::clamp(-R(2, 0), -1.0, 1.0));
  const double roll = std::atan2(R(2, 1), R(2, 2));
  const double yaw = std::atan2(R(1, 0), R(0, 0));
  return {roll, pitch, yaw};
}

inline Quaternion euler_zyx_to_quat(const Eigen::Vector3d& rpy) {
  return quat_from_rotation(euler_zyx_to_rotation(rpy));
}

inline Eigen::Vector3d quat_to_euler_zyx(const Quaternion& q) {
  return rotation_to_euler_zyx(quat_to_rotation(q));
}

/// Mapping T(Θ) with Θ̇ = T(Θ) ω for world-frame angular velocity and ZYX Euler angles.
inline Eigen::Matrix3d euler_zyx_rate_map(const Eigen::Vector3d& rpy) {
  const double pitch = rpy.y(), yaw = rpy.z();
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  const double cy = std::cos(yaw), sy = std::sin(yaw);
  if (std::abs(cp) < 1e-9)
    throw std::invalid_argument("euler_zyx_rate_map: pitch at gimbal lock");
  // ω = E(Θ) Θ̇ with E columns = world axes of the successive rotations; invert analytically.
  Eigen::Matrix3d T;
  T << cy / cp, sy / cp, 0.0,
      -sy, cy, 0.0,
      cy * sp / cp, sy * sp / cp, 1.0;
  return T;
}

/// Tangent-space difference log(a⁻¹ ⊗ b): rotation taking a to b, in a's frame.
inline Eigen::Vector3d quat_box_minus(const Quaternion& b, const Quaternion& a) {
  return quat_log(quat_mul(a.conjugate(), b));
}

inline double wrap_angle(double a) {
  a = std::fmod(a + M_PI, 2.0 * M_PI);
  if (a < 0) a += 2.0 * M_PI;
  return a - M_PI;
}

}  // namespace tandem::math
