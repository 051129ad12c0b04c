#include "panceval/nifti.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace panceval {

namespace {

#pragma pack(push, 1)
struct Nifti1Header {
    std::int32_t sizeof_hdr;
    char data_type[10];
    char db_name[18];
    std::int32_t extents;
    std::int16_t session_error;
    char regular;
    char dim_info;
    std::int16_t dim[8];
    float intent_p1, intent_p2, intent_p3;
    std::int16_t intent_code;
    std::int16_t datatype;
    std::int16_t bitpix;
    std::int16_t slice_start;
    float pixdim[8];
    float vox_offset;
    float scl_slope;
    float scl_inter;
    std::int16_t slice_end;
    char slice_code;
    char xyzt_units;
    float cal_max;
    float cal_min;
    float slice_duration;
    float toffset;
    std::int32_t glmax;
    std::int32_t glmin;
    char descrip[80];
    char aux_file[24];
    std::int16_t qform_code;
    std::int16_t sform_code;
    float quatern_b, quatern_c, quatern_d;
    float qoffset_x, qoffset_y, qoffset_z;
    float srow_x[4];
    float srow_y[4];
    float srow_z[4];
    char intent_name[16];
    char magic[4];
};
#pragma pack(pop)
static_assert(sizeof(Nifti1Header) == 348, "NIfTI-1 header must be 348 bytes");

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path, bool& gzipped) {
    {
        std::ifstream probe(path, std::ios::binary);
        if (!probe) throw Error("cannot open file: " + path.string());
        unsigned char m[2] = {0, 0};
        probe.read(reinterpret_cast<char*>(m), 2);
        gzipped = probe.gcount() == 2 && m[0] == 0x1F && m[1] == 0x8B;
    }
    if (!gzipped) {
        std::ifstream in(path, std::ios::binary | std::ios::ate);
        const auto size = static_cast<std::size_t>(in.tellg());
        in.seekg(0);
        std::vector<std::uint8_t> bytes(size);
        in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
        if (!in) throw Error("short read: " + path.string());
        return bytes;
    }
    gzFile gz = gzopen(path.string().c_str(), "rb");
    if (!gz) throw Error("cannot open gzip file: " + path.string());
    std::vector<std::uint8_t> bytes;
    std::uint8_t buf[1 << 16];
    int n;
    while ((n = gzread(gz, buf, sizeof buf)) > 0)
        bytes.insert(bytes.end(), buf, buf + n);
    const bool bad = n < 0;
    gzclose(gz);
    if (bad) throw Error("gzip decompression failed: " + path.string());
    return bytes;
}

int bitpix_for(NiftiDatatype dt) {
    switch (dt) {
        case NiftiDatatype::Uint8: return 8;
        case NiftiDatatype::Int16: return 16;
        case NiftiDatatype::Uint16: return 16;
        case NiftiDatatype::Int32: return 32;
    }
    return 0;
}

bool identity_scaling(float slope, float inter) {
    const bool slope_ok = slope == 0.0f || slope == 1.0f || std::isnan(slope);
    const bool inter_ok = inter == 0.0f || std::isnan(inter);
    return slope_ok && inter_ok;
}

// Direction matrix columns are voxel-axis step vectors in world mm
// (spacing included); t is the world position of voxel (0,0,0).
struct Orientation {
    double m[3][3];
    double t[3];
};

Orientation orientation_from_header(const Nifti1Header& h) {
    Orientation o{};
    if (h.sform_code > 0) {
        const float* rows[3] = {h.srow_x, h.srow_y, h.srow_z};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) o.m[r][c] = rows[r][c];
            o.t[r] = rows[r][3];
        }
        return o;
    }
    if (h.qform_code > 0) {
        const double b = h.quatern_b, c = h.quatern_c, d = h.quatern_d;
        const double a2 = 1.0 - (b * b + c * c + d * d);
        const double a = a2 > 0.0 ? std::sqrt(a2) : 0.0;
        double r[3][3] = {
            {a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)},
            {2 * (b * c + a * d), a * a + c * c - b * b - d * d, 2 * (c * d - a * b)},
            {2 * (b * d - a * c), 2 * (c * d + a * b), a * a + d * d - b * b - c * c}};
        const double qfac = h.pixdim[0] < 0.0f ? -1.0 : 1.0;
        for (int row = 0; row < 3; ++row)
            for (int col = 0; col < 3; ++col) {
                double s = h.pixdim[col + 1];
                if (col == 2) s *= qfac;
                o.m[row][col] = r[row][col] * s;
            }
        o.t[0] = h.qoffset_x;
        o.t[1] = h.qoffset_y;
        o.t[2] = h.qoffset_z;
        return o;
    }
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) o.m[r][c] = r == c ? h.pixdim[r + 1] : 0.0;
    return o;
}

}  // namespace

NiftiReadResult read_label_volume(const std::filesystem::path& path) {
    bool gzipped = false;
    const std::vector<std::uint8_t> bytes = read_file_bytes(path, gzipped);
    if (bytes.size() < sizeof(Nifti1Header))
        throw Error("malformed header: file shorter than 348 bytes: " + path.string());

    Nifti1Header h;
    std::memcpy(&h, bytes.data(), sizeof h);
    if (h.sizeof_hdr != 348)
        throw Error("malformed header: sizeof_hdr != 348 (byte-swapped or not NIfTI-1): " +
                    path.string());
    if (std::memcmp(h.magic, "ni1", 4) == 0)
        throw Error("two-file NIfTI (ni1) is not supported: " + path.string());
    if (std::memcmp(h.magic, "n+1", 4) != 0)
        throw Error("malformed header: bad magic: " + path.string());

    if (h.dim[0] < 3 || h.dim[0] > 7)
        throw Error("unsupported dimensionality dim[0]=" + std::to_string(h.dim[0]));
    for (int d = 4; d <= h.dim[0]; ++d)
        if (h.dim[d] > 1)
            throw Error("4D+ volumes with non-singleton extra dims are not supported");
    for (int d = 1; d <= 3; ++d)
        if (h.dim[d] <= 0) throw Error("malformed header: non-positive dim");

    NiftiDatatype dt;
    switch (h.datatype) {
        case 2: dt = NiftiDatatype::Uint8; break;
        case 4: dt = NiftiDatatype::Int16; break;
        case 8: dt = NiftiDatatype::Int32; break;
        case 512: dt = NiftiDatatype::Uint16; break;
        default:
            throw Error("unsupported datatype code " + std::to_string(h.datatype));
    }
    if (h.bitpix != bitpix_for(dt))
        throw Error("malformed header: bitpix inconsistent with datatype");
    if (!identity_scaling(h.scl_slope, h.scl_inter))
        throw Error("non-identity scaling (scl_slope/scl_inter) on a label volume");

    const std::size_t nx = static_cast<std::size_t>(h.dim[1]);
    const std::size_t ny = static_cast<std::size_t>(h.dim[2]);
    const std::size_t nz = static_cast<std::size_t>(h.dim[3]);
    const std::size_t nvox = nx * ny * nz;
    const std::size_t bytes_per = static_cast<std::size_t>(h.bitpix) / 8;

    const auto offset = static_cast<std::size_t>(h.vox_offset);
    if (h.vox_offset < 348.0f || offset + nvox * bytes_per > bytes.size())
        throw Error("malformed header: payload exceeds file size: " + path.string());

    // Decode to the unsigned internal representation.
    std::vector<LabelCode> raw(nvox);
    const std::uint8_t* p = bytes.data() + offset;
    switch (dt) {
        case NiftiDatatype::Uint8:
            for (std::size_t i = 0; i < nvox; ++i) raw[i] = p[i];
            break;
        case NiftiDatatype::Uint16:
            for (std::size_t i = 0; i < nvox; ++i) {
                std::uint16_t v;
                std::memcpy(&v, p + 2 * i, 2);
                raw[i] = v;
            }
            break;
        case NiftiDatatype::Int16:
            for (std::size_t i = 0; i < nvox; ++i) {
                std::int16_t v;
                std::memcpy(&v, p + 2 * i, 2);
                if (v < 0) throw Error("negative label value in " + path.string());
                raw[i] = static_cast<LabelCode>(v);
            }
            break;
        case NiftiDatatype::Int32:
            for (std::size_t i = 0; i < nvox; ++i) {
                std::int32_t v;
                std::memcpy(&v, p + 4 * i, 4);
                if (v < 0) throw Error("negative label value in " + path.string());
                raw[i] = static_cast<LabelCode>(v);
            }
            break;
    }

    // Reduce orientation to axis permutation + flip.
    const Orientation o = orientation_from_header(h);
    const std::size_t in_dims[3] = {nx, ny, nz};
    int world_axis[3];   // voxel axis c -> world axis
    int sign[3];         // +1 / -1 along that world axis
    double spacing_of_col[3];
    bool world_used[3] = {false, false, false};
    for (int c = 0; c < 3; ++c) {
        int best = 0;
        double best_abs = 0.0;
        double norm = 0.0;
        for (int r = 0; r < 3; ++r) {
            const double v = std::abs(o.m[r][c]);
            norm += v * v;
            if (v > best_abs) {
                best_abs = v;
                best = r;
            }
        }
        norm = std::sqrt(norm);
        if (best_abs <= 0.0 || norm <= 0.0)
            throw Error("malformed header: degenerate orientation in " + path.string());
        for (int r = 0; r < 3; ++r)
            if (r != best && std::abs(o.m[r][c]) > 1e-3 * norm)
                throw Error("oblique orientation is not supported (reorient first): " +
                            path.string());
        if (world_used[best])
            throw Error("malformed header: orientation is not a permutation: " + path.string());
        world_used[best] = true;
        world_axis[c] = best;
        sign[c] = o.m[best][c] >= 0.0 ? 1 : -1;
        spacing_of_col[c] = best_abs;
    }

    GridSpec grid;
    for (int c = 0; c < 3; ++c) {
        const int w = world_axis[c];
        grid.dims[w] = in_dims[c];
        grid.spacing[w] = spacing_of_col[c];
        grid.origin[w] = sign[c] > 0
            ? o.t[w]
            : o.t[w] + o.m[w][c] * static_cast<double>(in_dims[c] - 1);
    }
    grid.validate();

    LabelVolume vol(grid);
    std::size_t src = 0;
    std::size_t widx[3];
    for (std::size_t k = 0; k < nz; ++k)
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t i = 0; i < nx; ++i, ++src) {
                const std::size_t in_idx[3] = {i, j, k};
                for (int c = 0; c < 3; ++c) {
                    const int w = world_axis[c];
                    widx[w] = sign[c] > 0 ? in_idx[c] : in_dims[c] - 1 - in_idx[c];
                }
                vol.at(widx[0], widx[1], widx[2]) = raw[src];
            }

    NiftiHeaderSubset subset;
    for (int d = 0; d < 8; ++d) {
        subset.dim[d] = h.dim[d];
        subset.pixdim[d] = h.pixdim[d];
    }
    subset.datatype = dt;
    subset.bitpix = h.bitpix;
    subset.vox_offset = h.vox_offset;
    subset.scl_slope = h.scl_slope;
    subset.scl_inter = h.scl_inter;
    subset.qform_code = h.qform_code;
    subset.sform_code = h.sform_code;
    subset.quatern[0] = h.quatern_b;
    subset.quatern[1] = h.quatern_c;
    subset.quatern[2] = h.quatern_d;
    subset.qoffset[0] = h.qoffset_x;
    subset.qoffset[1] = h.qoffset_y;
    subset.qoffset[2] = h.qoffset_z;
    for (int c = 0; c < 4; ++c) {
        subset.srow[0][c] = h.srow_x[c];
        subset.srow[1][c] = h.srow_y[c];
        subset.srow[2][c] = h.srow_z[c];
    }
    subset.gzipped = gzipped;
    return {std::move(vol), subset};
}

void write_label_volume(const LabelVolume& vol, const std::filesystem::path& path,
                        std::optional<NiftiDatatype> datatype) {
    const LabelCode maxc = vol.max_code();
    NiftiDatatype dt = datatype.value_or(maxc < 256 ? NiftiDatatype::Uint8
                                                    : NiftiDatatype::Uint16);
    LabelCode limit;
    switch (dt) {
        case NiftiDatatype::Uint8: limit = 255; break;
        case NiftiDatatype::Int16: limit = 32767; break;
        case NiftiDatatype::Uint16: limit = 65535; break;
        case NiftiDatatype::Int32: limit = 2147483647u; break;
    }
    if (maxc > limit)
        throw Error("code overflow: max code " + std::to_string(maxc) +
                    " does not fit the requested datatype");

    const GridSpec& g = vol.grid();
    Nifti1Header h{};
    h.sizeof_hdr = 348;
    h.regular = 'r';
    h.dim[0] = 3;
    for (int a = 0; a < 3; ++a) h.dim[a + 1] = static_cast<std::int16_t>(g.dims[a]);
    for (int d = 4; d < 8; ++d) h.dim[d] = 1;
    h.datatype = static_cast<std::int16_t>(dt);
    h.bitpix = static_cast<std::int16_t>(bitpix_for(dt));
    h.pixdim[0] = 1.0f;
    for (int a = 0; a < 3; ++a) h.pixdim[a + 1] = static_cast<float>(g.spacing[a]);
    h.vox_offset = 352.0f;
    h.scl_slope = 1.0f;
    h.scl_inter = 0.0f;
    h.sform_code = 1;
    h.qform_code = 0;
    float* rows[3] = {h.srow_x, h.srow_y, h.srow_z};
    for (int r = 0; r < 3; ++r) {
        rows[r][r] = static_cast<float>(g.spacing[r]);
        rows[r][3] = static_cast<float>(g.origin[r]);
    }
    std::memcpy(h.magic, "n+1", 4);

    const std::size_t nvox = vol.size();
    const std::size_t bytes_per = static_cast<std::size_t>(h.bitpix) / 8;
    std::vector<std::uint8_t> payload(nvox * bytes_per);
    const auto& vox = vol.voxels();
    switch (dt) {
        case NiftiDatatype::Uint8:
            for (std::size_t i = 0; i < nvox; ++i)
                payload[i] = static_cast<std::uint8_t>(vox[i]);
            break;
        case NiftiDatatype::Uint16:
            for (std::size_t i = 0; i < nvox; ++i) {
                const auto v = static_cast<std::uint16_t>(vox[i]);
                std::memcpy(payload.data() + 2 * i, &v, 2);
            }
            break;
        case NiftiDatatype::Int16:
            for (std::size_t i = 0; i < nvox; ++i) {
                const auto v = static_cast<std::int16_t>(vox[i]);
                std::memcpy(payload.data() + 2 * i, &v, 2);
            }
            break;
        case NiftiDatatype::Int32:
            for (std::size_t i = 0; i < nvox; ++i) {
                const auto v = static_cast<std::int32_t>(vox[i]);
                std::memcpy(payload.data() + 4 * i, &v, 4);
            }
            break;
    }

    const char pad[4] = {0, 0, 0, 0};  // empty extension flag
    const bool gz = path.extension() == ".gz";
    if (gz) {
        gzFile out = gzopen(path.string().c_str(), "wb");
        if (!out) throw Error("cannot write file: " + path.string());
        bool ok = gzwrite(out, &h, sizeof h) == static_cast<int>(sizeof h) &&
                  gzwrite(out, pad, 4) == 4 &&
                  (payload.empty() ||
                   gzwrite(out, payload.data(), static_cast<unsigned>(payload.size())) ==
                       static_cast<int>(payload.size()));
        ok = gzclose(out) == Z_OK && ok;
        if (!ok) throw Error("write failed: " + path.string());
    } else {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot write file: " + path.string());
        out.write(reinterpret_cast<const char*>(&h), sizeof h);
        out.write(pad, 4);
        out.write(reinterpret_cast<const char*>(payload.data()),
                  static_cast<std::streamsize>(payload.size()));
        if (!out) throw Error("write failed: " + path.string());
    }
}

}  // namespace panceval
