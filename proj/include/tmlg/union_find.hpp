#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace tmlg {

// Disjoint sets with union by size and path halving.
class UnionFind {
public:
    explicit UnionFind(std::uint32_t n) : parent_(n), size_(n, 1), components_(n) {
        std::iota(parent_.begin(), parent_.end(), 0U);
    }

    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        --components_;
        return true;
    }

    std::uint32_t component_size(std::uint32_t x) { return size_[find(x)]; }
    std::uint32_t components() const { return components_; }

    std::uint32_t largest_component() {
        std::uint32_t best = 0;
        for (std::uint32_t i = 0; i < parent_.size(); ++i) {
            if (parent_[i] == i && size_[i] > best) best = size_[i];
        }
        return best;
    }

private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> size_;
    std::uint32_t components_;
};

}  // namespace tmlg
