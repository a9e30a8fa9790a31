#pragma once

#include <cstdint>

#include <gapboot/data_array.hpp>
#include <gapboot/random.hpp>

namespace testutil {

inline gapboot::Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t key,
                                      double lo = -1.0, double hi = 1.0) {
    gapboot::CounterRng rng(key);
    gapboot::Matrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = lo + (hi - lo) * gapboot::uniform01(rng);
    }
    return m;
}

inline gapboot::DataArray random_array(Eigen::Index d, std::size_t p, std::size_t m, std::uint64_t key) {
    return gapboot::DataArray(uniform_matrix(d, static_cast<Eigen::Index>(p * m), key), p, m);
}

inline gapboot::Matrix row_vector(std::initializer_list<double> values) {
    gapboot::Matrix m(1, static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double v : values) m(0, i++) = v;
    return m;
}

}  // namespace testutil
