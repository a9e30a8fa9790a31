#pragma once

#include <Eigen/Dense>

namespace gapboot {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A collection of observations, one d-vector per column, in time order.
/// Accepts owning matrices, contiguous blocks and strided maps without copying.
using ObsView = Eigen::Ref<const Matrix>;

/// Read-only strided view over observations stored column-major.
using StridedObs = Eigen::Map<const Matrix, 0, Eigen::OuterStride<>>;

/// Contiguous run of whole columns.
using ColumnBlock = Eigen::Block<const Matrix, Eigen::Dynamic, Eigen::Dynamic, true>;

}  // namespace gapboot
