#pragma once

// Per-case segmentation metrics: Dice, full Hausdorff distance in mm
// (boundary-to-boundary, 6-connectivity, voxel centers) and detection.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "panceval/mask.hpp"

namespace panceval {

// 2|A^B| / (|A|+|B|); 1.0 when both masks are empty.
double dice(const BinaryMask& a, const BinaryMask& b, double rel_tol = kGridRelTol);

// Symmetric Hausdorff distance between boundary voxel sets, in mm.
// Throws if either mask is empty.
double hausdorff(const BinaryMask& a, const BinaryMask& b, double rel_tol = kGridRelTol);

// True iff foreground voxel count > min_voxels.
bool detect(const BinaryMask& pred, std::size_t min_voxels = 0);

enum class EmptyMaskPolicy {
    Missing,         // leave HD unset; downstream drops the case listwise
    ImputeDiagonal,  // reference-grid bounding-box diagonal in mm
};

struct CaseMetrics {
    std::string case_id;
    std::string model_id;
    std::optional<double> dsc;
    std::optional<double> hd_mm;
    bool detected = false;
    bool hd_imputed = false;
};

struct EvaluateOptions {
    EmptyMaskPolicy policy = EmptyMaskPolicy::ImputeDiagonal;
    std::size_t min_voxels = 0;
    double rel_tol = kGridRelTol;
    bool auto_resample = false;  // resample pred onto the ref grid on mismatch
};

CaseMetrics evaluate_case(const LabelVolume& ref, const LabelVolume& pred,
                          LabelCode code, const EvaluateOptions& opts = {});

// Bounding-box diagonal between the extreme voxel centers, in mm.
double grid_diagonal_mm(const GridSpec& grid);

// Delimited metrics table: case_id, model_id, dsc, hd_mm, detected, hd_imputed.
void write_metrics(const std::vector<CaseMetrics>& rows, const std::filesystem::path& path);
std::vector<CaseMetrics> read_metrics(const std::filesystem::path& path);

}  // namespace panceval
