#pragma once

#include <cstddef>

#include "gapboot/types.hpp"

namespace gapboot {

enum class Axis { row, column };

/// A p x m grid of d-dimensional observations laid out period by period.
///
/// Observation t = i*p + j (0-based) sits in row j (time slot) and column i
/// (period).  Storage is a d x n matrix whose column t is observation t, so a
/// period is a contiguous block and a row is a strided view.  Immutable once
/// built; safe to share across threads.
class DataArray {
public:
    DataArray(Matrix series, std::size_t slots, std::size_t periods, std::size_t gap = 0);

    std::size_t slots() const noexcept { return slots_; }
    std::size_t periods() const noexcept { return periods_; }
    std::size_t size() const noexcept { return slots_ * periods_; }
    Eigen::Index dim() const noexcept { return series_.rows(); }
    /// Count of parent-series steps deleted between consecutive periods (metadata only).
    std::size_t gap() const noexcept { return gap_; }

    const Matrix& series() const noexcept { return series_; }

    /// Row j restricted to periods [first, first + count).
    StridedObs row_window(std::size_t j, std::size_t first, std::size_t count) const;
    StridedObs row(std::size_t j) const { return row_window(j, 0, periods_); }

    /// Periods [first, first + count) as one contiguous run of count*p observations.
    ColumnBlock period_window(std::size_t first, std::size_t count) const;
    ColumnBlock period(std::size_t i) const { return period_window(i, 1); }

private:
    Matrix series_;
    std::size_t slots_;
    std::size_t periods_;
    std::size_t gap_;
};

/// Arranges a d x n series (one observation per column) into a p x m array.
/// Throws DimensionError when n != p*m and DataError on the first non-finite entry.
DataArray build_data_array(Matrix series, std::size_t slots, std::size_t periods,
                           std::size_t gap = 0);

/// Copies out row j (length m) or column i (length p); 0-based index.
Matrix slice(const DataArray& array, Axis axis, std::size_t index);

}  // namespace gapboot
