#include "gapboot/data_array.hpp"

#include <cmath>
#include <string>

#include "gapboot/errors.hpp"

namespace gapboot {

DataArray::DataArray(Matrix series, std::size_t slots, std::size_t periods, std::size_t gap)
    : series_(std::move(series)), slots_(slots), periods_(periods), gap_(gap) {
    if (slots_ < 1) throw DimensionError("data array needs at least one time slot (p >= 1)");
    if (periods_ < 2) throw DimensionError("data array needs at least two periods (m >= 2)");
    if (series_.rows() < 1) throw DimensionError("observations must have dimension d >= 1");
    const auto expected = slots_ * periods_;
    if (static_cast<std::size_t>(series_.cols()) != expected) {
        throw DimensionError("series length mismatch: expected p*m = " + std::to_string(expected) +
                             " observations, got " + std::to_string(series_.cols()));
    }
    for (Eigen::Index t = 0; t < series_.cols(); ++t) {
        for (Eigen::Index c = 0; c < series_.rows(); ++c) {
            if (!std::isfinite(series_(c, t))) {
                throw DataError("non-finite value at observation " + std::to_string(t) +
                                ", component " + std::to_string(c));
            }
        }
    }
}

StridedObs DataArray::row_window(std::size_t j, std::size_t first, std::size_t count) const {
    if (j >= slots_) {
        throw BoundsError("row index " + std::to_string(j) + " out of range [0, " +
                          std::to_string(slots_) + ")");
    }
    if (first + count > periods_ || count == 0) {
        throw BoundsError("period window [" + std::to_string(first) + ", " +
                          std::to_string(first + count) + ") outside [0, " +
                          std::to_string(periods_) + ")");
    }
    const auto d = series_.rows();
    const auto stride = static_cast<Eigen::Index>(slots_) * d;
    const double* start = series_.data() + (static_cast<Eigen::Index>(first * slots_ + j)) * d;
    return StridedObs(start, d, static_cast<Eigen::Index>(count), Eigen::OuterStride<>(stride));
}

ColumnBlock DataArray::period_window(std::size_t first, std::size_t count) const {
    if (first + count > periods_ || count == 0) {
        throw BoundsError("period window [" + std::to_string(first) + ", " +
                          std::to_string(first + count) + ") outside [0, " +
                          std::to_string(periods_) + ")");
    }
    return series_.middleCols(static_cast<Eigen::Index>(first * slots_),
                              static_cast<Eigen::Index>(count * slots_));
}

DataArray build_data_array(Matrix series, std::size_t slots, std::size_t periods,
                           std::size_t gap) {
    return DataArray(std::move(series), slots, periods, gap);
}

Matrix slice(const DataArray& array, Axis axis, std::size_t index) {
    if (axis == Axis::row) return array.row(index);
    if (index >= array.periods()) {
        throw BoundsError("column index " + std::to_string(index) + " out of range [0, " +
                          std::to_string(array.periods()) + ")");
    }
    return array.period(index);
}

}  // namespace gapboot
