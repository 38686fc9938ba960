#pragma once

#include <algorithm>
#include <iterator>

#include "linkmap/graph.hpp"

namespace linkmap::testing {

/// |X ∩ Y| / min(|X|, |Y|) straight from set operations; 0 when either is empty.
inline double oracle_ssc(const DomainSet& x, const DomainSet& y) {
    if (x.empty() || y.empty()) return 0;
    DomainSet common;
    std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::inserter(common, common.end()));
    return static_cast<double>(common.size()) / static_cast<double>(std::min(x.size(), y.size()));
}

} // namespace linkmap::testing
