#pragma once

#include <cstdint>

#include "hardylab/geometry.hpp"

namespace hardylab::detail {

// Visits every grid cell with its 2^n corner node indices; corner c has
// bit k set when it sits on the upper side along axis k.
template <class F>
void for_each_cell(const GridDomain& g, F&& visit) {
    const int n = g.dim();
    const int corners = 1 << n;
    std::size_t stride[8];
    std::size_t s = 1;
    for (int k = 0; k < n; ++k) {
        stride[k] = s;
        s *= static_cast<std::size_t>(g.shape[k]);
    }
    std::size_t offset[256];
    for (int c = 0; c < corners; ++c) {
        offset[c] = 0;
        for (int k = 0; k < n; ++k)
            if (c & (1 << k)) offset[c] += stride[k];
    }
    std::int64_t idx[8] = {0};
    std::size_t node[256];
    while (true) {
        std::size_t base = g.ravel(idx);
        for (int c = 0; c < corners; ++c) node[c] = base + offset[c];
        visit(static_cast<const std::size_t*>(node));
        int k = 0;
        while (k < n && idx[k] == g.shape[k] - 2) idx[k++] = 0;
        if (k == n) break;
        ++idx[k];
    }
}

}  // namespace hardylab::detail
