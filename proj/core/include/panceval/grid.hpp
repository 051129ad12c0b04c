#pragma once

// Volumetric data model shared by the whole pipeline.
//
// Voxel arrays are linearized with x fastest, then y, then z:
//   index(x, y, z) = x + nx * (y + ny * z)
// All I/O paths convert into this layout. Grids are axis-aligned;
// orientation beyond axis permutation + flip is rejected at load time.

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace panceval {

using LabelCode = std::uint32_t;

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct GridSpec {
    std::array<std::size_t, 3> dims{0, 0, 0};   // voxel counts (nx, ny, nz)
    std::array<double, 3> spacing{1.0, 1.0, 1.0};  // mm per voxel along each axis
    std::array<double, 3> origin{0.0, 0.0, 0.0};   // world coords (mm) of voxel (0,0,0) center

    std::size_t voxel_count() const { return dims[0] * dims[1] * dims[2]; }

    // World coordinate of a voxel center along one axis.
    double world(int axis, std::size_t index) const {
        return origin[axis] + spacing[axis] * static_cast<double>(index);
    }

    // Throws Error on non-positive dims or non-finite/non-positive spacing.
    void validate() const;

    bool operator==(const GridSpec&) const = default;
};

// Default relative tolerance for grid comparison; absorbs header rounding.
inline constexpr double kGridRelTol = 1e-3;

// Dims must match exactly; spacing within rel_tol relative, origin within
// rel_tol * spacing absolute.
bool grids_compatible(const GridSpec& a, const GridSpec& b, double rel_tol = kGridRelTol);

class LabelVolume {
public:
    LabelVolume() = default;
    LabelVolume(GridSpec grid, std::vector<LabelCode> voxels);
    LabelVolume(GridSpec grid, LabelCode fill = 0);

    const GridSpec& grid() const { return grid_; }
    const std::array<std::size_t, 3>& dims() const { return grid_.dims; }
    const std::vector<LabelCode>& voxels() const { return voxels_; }
    std::vector<LabelCode>& voxels() { return voxels_; }
    std::size_t size() const { return voxels_.size(); }

    std::size_t index(std::size_t x, std::size_t y, std::size_t z) const {
        return x + grid_.dims[0] * (y + grid_.dims[1] * z);
    }
    LabelCode at(std::size_t x, std::size_t y, std::size_t z) const {
        return voxels_[index(x, y, z)];
    }
    LabelCode& at(std::size_t x, std::size_t y, std::size_t z) {
        return voxels_[index(x, y, z)];
    }

    LabelCode max_code() const;

private:
    GridSpec grid_;
    std::vector<LabelCode> voxels_;
};

// Nearest-neighbor resampling onto the target grid. Each output voxel takes
// the code of the input voxel whose center is nearest in world coordinates;
// exactly equidistant centers resolve toward the lower index on each axis.
LabelVolume resample_nearest(const LabelVolume& vol, const GridSpec& target);

}  // namespace panceval
