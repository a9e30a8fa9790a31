#pragma once

#include <cstddef>
#include <iosfwd>

#include "gapboot/od_bootstrap.hpp"
#include "gapboot/od_model.hpp"

namespace gapboot {

/// Reads `day,slot,o1..o7,d1..d7` CSV.  Rows must already be day-major and
/// slot-minor.  Throws DataError with the line number on malformed input and
/// DimensionError when `slots` does not match the slot labels.
ODDataset read_od_csv(std::istream& in, std::size_t slots);

void write_od_csv(const ODDataset& data, std::ostream& out);

/// `param,estimate,std_gb1,std_gb2`, 21 rows from p11 to p66.
void write_od_results(const ODAnalysis& analysis, std::ostream& out);

}  // namespace gapboot
