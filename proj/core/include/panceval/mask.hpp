#pragma once

// Binary foreground masks extracted from label volumes by code.

#include <bit>
#include <cstdint>
#include <vector>

#include "panceval/grid.hpp"

namespace panceval {

class BinaryMask {
public:
    BinaryMask() = default;
    explicit BinaryMask(GridSpec grid) : grid_(grid) {
        grid_.validate();
        words_.assign((grid_.voxel_count() + 63) / 64, 0);
    }

    const GridSpec& grid() const { return grid_; }
    std::size_t size() const { return grid_.voxel_count(); }

    bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool v = true) {
        const std::uint64_t bit = 1ULL << (i & 63);
        if (v) words_[i >> 6] |= bit;
        else words_[i >> 6] &= ~bit;
    }
    std::size_t index(std::size_t x, std::size_t y, std::size_t z) const {
        return x + grid_.dims[0] * (y + grid_.dims[1] * z);
    }
    bool at(std::size_t x, std::size_t y, std::size_t z) const {
        return test(index(x, y, z));
    }

    std::size_t popcount() const {
        std::size_t n = 0;
        for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }
    bool empty() const { return popcount() == 0; }

    std::size_t intersection_count(const BinaryMask& other) const {
        std::size_t n = 0;
        for (std::size_t i = 0; i < words_.size(); ++i)
            n += static_cast<std::size_t>(std::popcount(words_[i] & other.words_[i]));
        return n;
    }

private:
    GridSpec grid_;
    std::vector<std::uint64_t> words_;
};

inline BinaryMask extract_mask(const LabelVolume& vol, LabelCode code) {
    BinaryMask m(vol.grid());
    const auto& v = vol.voxels();
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] == code) m.set(i);
    return m;
}

// Foreground voxels with at least one six-connected background neighbor;
// volume faces count as background.
BinaryMask boundary_mask(const BinaryMask& mask);

}  // namespace panceval
