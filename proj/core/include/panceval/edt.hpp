#pragma once

// Exact Euclidean distance transform under anisotropic spacing, via the
// separable lower-envelope-of-parabolas method applied axis by axis to
// squared distances. Distances are between voxel centers, in mm.

#include <vector>

#include "panceval/mask.hpp"

namespace panceval {

// Squared distance (mm^2) from every voxel center to the nearest foreground
// voxel center. Throws on an empty mask.
std::vector<double> edt_squared(const BinaryMask& mask);

// Distance field in mm.
std::vector<double> edt(const BinaryMask& mask);

}  // namespace panceval
