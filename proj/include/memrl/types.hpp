#pragma once

#include <Eigen/Core>

namespace memrl {

using StateId = int;
using ActionId = int;

/// Flat policy parameter vector; the meta-iterate and adapted parameters share it.
using ParamVector = Eigen::VectorXd;

/// Throws std::domain_error if any entry is NaN or infinite.
void require_finite(const ParamVector& params, const char* what);

} // namespace memrl
