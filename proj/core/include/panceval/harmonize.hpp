#pragma once

// Harmonization primitives and the two scheme builders.
//
// build_ref8 refines the raw PANORAMA labels: the TS aorta is masked out of
// the PANORAMA arteries label (the removed voxels become the aorta code) and
// the remaining TS aorta support is painted onto background, yielding the
// 8-label scheme. build_all45 groups the 117 TS structures into the anatomy
// prior codes and merges the refined PANORAMA labels on top; PANORAMA wins
// wherever both sources claim a voxel.

#include <map>
#include <set>

#include "panceval/recipe.hpp"

namespace panceval {

// Output voxel = mapping[input voxel]. Grid unchanged. Throws if a code
// present in the volume has no mapping entry; code 0 defaults to 0 unless
// mapped explicitly.
LabelVolume group_remap(const LabelVolume& vol,
                        const std::map<LabelCode, LabelCode>& mapping);

// Voxels equal to victim_code where the mask volume equals mask_code are
// relabeled to replacement; everything else passes through.
LabelVolume mask_out(const LabelVolume& victim, LabelCode victim_code,
                     const LabelVolume& mask, LabelCode mask_code,
                     LabelCode replacement, double rel_tol = kGridRelTol);

// Output voxel = overlay voxel where overlay voxel is in overlay_codes, else
// base voxel. An overlay code that also occurs in the base is an error unless
// listed in allowed_shared.
LabelVolume precedence_merge(const LabelVolume& base, const LabelVolume& overlay,
                             const std::set<LabelCode>& overlay_codes,
                             const std::set<LabelCode>& allowed_shared = {},
                             double rel_tol = kGridRelTol);

// PANORAMA + TS 117-structure volumes -> REF_8 volume.
LabelVolume build_ref8(const LabelVolume& panorama, const LabelVolume& ts,
                       const Recipe& recipe, double rel_tol = kGridRelTol);

// PANORAMA + TS 117-structure volumes -> ALL_45 volume.
LabelVolume build_all45(const LabelVolume& panorama, const LabelVolume& ts,
                        const Recipe& recipe, double rel_tol = kGridRelTol);

}  // namespace panceval
