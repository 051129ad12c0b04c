#pragma once

// NIfTI-1 single-file label volume reader/writer (.nii and .nii.gz).
//
// Read supports the integer datatypes uint8 / int16 / uint16 / int32 only,
// rejects rescaled data (scl_slope must be 0 or 1, scl_inter 0) and reduces
// orientation to axis permutation + flip; oblique orientations are rejected.
// When both qform and sform are present, sform wins.
//
// Write emits uint8 when the max code fits in a byte, uint16 otherwise
// (sform only, identity direction), gzip-compressed when the path ends in
// ".gz".

#include <cstdint>
#include <filesystem>
#include <optional>

#include "panceval/grid.hpp"

namespace panceval {

enum class NiftiDatatype : std::int16_t {
    Uint8 = 2,
    Int16 = 4,
    Int32 = 8,
    Uint16 = 512,
};

struct NiftiHeaderSubset {
    std::int16_t dim[8] = {0};
    NiftiDatatype datatype = NiftiDatatype::Uint8;
    std::int16_t bitpix = 0;
    float pixdim[8] = {0};
    float vox_offset = 0;
    float scl_slope = 0;
    float scl_inter = 0;
    std::int16_t qform_code = 0;
    std::int16_t sform_code = 0;
    float quatern[3] = {0};  // b, c, d
    float qoffset[3] = {0};
    float srow[3][4] = {{0}};
    bool gzipped = false;
};

struct NiftiReadResult {
    LabelVolume volume;
    NiftiHeaderSubset header;
};

NiftiReadResult read_label_volume(const std::filesystem::path& path);

// datatype: if nullopt, uint8 when max code < 256, else uint16.
void write_label_volume(const LabelVolume& vol, const std::filesystem::path& path,
                        std::optional<NiftiDatatype> datatype = std::nullopt);

}  // namespace panceval
