#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace hardylab::detail {

// Buckets point indices by cubic cell. Keys may collide; callers always
// confirm candidates with an exact distance test.
class SpatialHash {
public:
    SpatialHash(int dim, double cell) : dim_(dim), cell_(cell) {}

    void insert(const double* x, std::size_t id) { table_[key_of(x, nullptr)].push_back(id); }

    template <class F>
    void for_neighbors(const double* x, F&& visit) const {
        std::int64_t base[8];
        key_of(x, base);
        std::int64_t off[8] = {0};
        for (int k = 0; k < dim_; ++k) off[k] = -1;
        while (true) {
            std::uint64_t key = 1469598103934665603ull;
            for (int k = 0; k < dim_; ++k) key = mix(key, base[k] + off[k]);
            auto it = table_.find(key);
            if (it != table_.end())
                for (std::size_t id : it->second) visit(id);
            int k = 0;
            while (k < dim_ && off[k] == 1) off[k++] = -1;
            if (k == dim_) break;
            ++off[k];
        }
    }

private:
    static std::uint64_t mix(std::uint64_t h, std::int64_t v) {
        h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        return h * 1099511628211ull;
    }

    std::uint64_t key_of(const double* x, std::int64_t* cells) const {
        std::uint64_t key = 1469598103934665603ull;
        for (int k = 0; k < dim_; ++k) {
            auto c = static_cast<std::int64_t>(std::floor(x[k] / cell_));
            if (cells) cells[k] = c;
            key = mix(key, c);
        }
        return key;
    }

    int dim_;
    double cell_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> table_;
};

}  // namespace hardylab::detail
