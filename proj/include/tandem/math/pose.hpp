#pragma once

#include <Eigen/Core>

#include "tandem/math/quaternion.hpp"

namespace tandem::math {

struct Pose {
  Eigen::Vector3d position{Eigen::Vector3d::Zero()};
  Quaternion orientation{Quaternion::identity()};

  Eigen::Matrix3d rotation() const { return quat_to_rotation(orientation); }

  Eigen::Vector3d transform(const Eigen::Vector3d& p_local) const {
    return position + rotation() * p_local;
  }
};

}  // namespace tandem::math
