#include "panceval/grid.hpp"

#include <algorithm>
#include <cmath>

namespace panceval {

void GridSpec::validate() const {
    for (int a = 0; a < 3; ++a) {
        if (dims[a] == 0)
            throw Error("GridSpec: dimension " + std::to_string(a) + " is zero");
        if (!std::isfinite(spacing[a]) || spacing[a] <= 0.0)
            throw Error("GridSpec: spacing component " + std::to_string(a) +
                        " must be finite and > 0");
        if (!std::isfinite(origin[a]))
            throw Error("GridSpec: origin component " + std::to_string(a) + " is not finite");
    }
}

bool grids_compatible(const GridSpec& a, const GridSpec& b, double rel_tol) {
    if (rel_tol < 0.0) throw Error("grids_compatible: rel_tol must be >= 0");
    if (a.dims != b.dims) return false;
    for (int ax = 0; ax < 3; ++ax) {
        const double s = std::max(std::abs(a.spacing[ax]), std::abs(b.spacing[ax]));
        if (std::abs(a.spacing[ax] - b.spacing[ax]) > rel_tol * s) return false;
        if (std::abs(a.origin[ax] - b.origin[ax]) > rel_tol * s) return false;
    }
    return true;
}

LabelVolume::LabelVolume(GridSpec grid, std::vector<LabelCode> voxels)
    : grid_(grid), voxels_(std::move(voxels)) {
    grid_.validate();
    if (voxels_.size() != grid_.voxel_count())
        throw Error("LabelVolume: voxel array length " + std::to_string(voxels_.size()) +
                    " does not match grid voxel count " + std::to_string(grid_.voxel_count()));
}

LabelVolume::LabelVolume(GridSpec grid, LabelCode fill) : grid_(grid) {
    grid_.validate();
    voxels_.assign(grid_.voxel_count(), fill);
}

LabelCode LabelVolume::max_code() const {
    LabelCode m = 0;
    for (LabelCode c : voxels_) m = std::max(m, c);
    return m;
}

namespace {

// Nearest input index along one axis for a target center at world coordinate w.
// Ties (fraction exactly 0.5) resolve to the lower index.
std::size_t nearest_index(double w, double origin, double spacing, std::size_t n) {
    const double f = (w - origin) / spacing;
    if (f <= 0.0) return 0;
    const double lo = std::floor(f);
    double idx = (f - lo <= 0.5) ? lo : lo + 1.0;
    if (idx >= static_cast<double>(n)) idx = static_cast<double>(n - 1);
    return static_cast<std::size_t>(idx);
}

}  // namespace

LabelVolume resample_nearest(const LabelVolume& vol, const GridSpec& target) {
    target.validate();
    const GridSpec& src = vol.grid();
    if (target == src) return vol;  // identity resample

    LabelVolume out(target);
    std::vector<std::size_t> map_x(target.dims[0]), map_y(target.dims[1]), map_z(target.dims[2]);
    for (std::size_t i = 0; i < target.dims[0]; ++i)
        map_x[i] = nearest_index(target.world(0, i), src.origin[0], src.spacing[0], src.dims[0]);
    for (std::size_t j = 0; j < target.dims[1]; ++j)
        map_y[j] = nearest_index(target.world(1, j), src.origin[1], src.spacing[1], src.dims[1]);
    for (std::size_t k = 0; k < target.dims[2]; ++k)
        map_z[k] = nearest_index(target.world(2, k), src.origin[2], src.spacing[2], src.dims[2]);

    std::size_t o = 0;
    for (std::size_t k = 0; k < target.dims[2]; ++k)
        for (std::size_t j = 0; j < target.dims[1]; ++j)
            for (std::size_t i = 0; i < target.dims[0]; ++i, ++o)
                out.voxels()[o] = vol.at(map_x[i], map_y[j], map_z[k]);
    return out;
}

}  // namespace panceval
