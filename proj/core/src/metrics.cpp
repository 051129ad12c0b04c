#include "panceval/metrics.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "panceval/edt.hpp"

namespace panceval {

BinaryMask boundary_mask(const BinaryMask& mask) {
    const GridSpec& g = mask.grid();
    const std::size_t nx = g.dims[0], ny = g.dims[1], nz = g.dims[2];
    BinaryMask out(g);
    for (std::size_t z = 0; z < nz; ++z)
        for (std::size_t y = 0; y < ny; ++y)
            for (std::size_t x = 0; x < nx; ++x) {
                if (!mask.at(x, y, z)) continue;
                const bool edge =
                    x == 0 || x + 1 == nx || !mask.at(x - 1, y, z) || !mask.at(x + 1, y, z) ||
                    y == 0 || y + 1 == ny || !mask.at(x, y - 1, z) || !mask.at(x, y + 1, z) ||
                    z == 0 || z + 1 == nz || !mask.at(x, y, z - 1) || !mask.at(x, y, z + 1);
                if (edge) out.set(mask.index(x, y, z));
            }
    return out;
}

double dice(const BinaryMask& a, const BinaryMask& b, double rel_tol) {
    if (!grids_compatible(a.grid(), b.grid(), rel_tol))
        throw Error("dice: incompatible grids");
    const std::size_t na = a.popcount();
    const std::size_t nb = b.popcount();
    if (na + nb == 0) return 1.0;
    const std::size_t inter = a.intersection_count(b);
    return 2.0 * static_cast<double>(inter) / static_cast<double>(na + nb);
}

namespace {

double directed_max(const BinaryMask& from_boundary, const std::vector<double>& to_field) {
    double m = 0.0;
    for (std::size_t i = 0; i < from_boundary.size(); ++i)
        if (from_boundary.test(i)) m = std::max(m, to_field[i]);
    return m;
}

}  // namespace

double hausdorff(const BinaryMask& a, const BinaryMask& b, double rel_tol) {
    if (!grids_compatible(a.grid(), b.grid(), rel_tol))
        throw Error("hausdorff: incompatible grids");
    if (a.empty() || b.empty())
        throw Error("hausdorff: empty mask");
    const BinaryMask ba = boundary_mask(a);
    const BinaryMask bb = boundary_mask(b);
    const std::vector<double> dist_to_b = edt(bb);
    const std::vector<double> dist_to_a = edt(ba);
    return std::max(directed_max(ba, dist_to_b), directed_max(bb, dist_to_a));
}

bool detect(const BinaryMask& pred, std::size_t min_voxels) {
    return pred.popcount() > min_voxels;
}

double grid_diagonal_mm(const GridSpec& grid) {
    double s = 0.0;
    for (int a = 0; a < 3; ++a) {
        const double d = static_cast<double>(grid.dims[a] - 1) * grid.spacing[a];
        s += d * d;
    }
    return std::sqrt(s);
}

CaseMetrics evaluate_case(const LabelVolume& ref, const LabelVolume& pred,
                          LabelCode code, const EvaluateOptions& opts) {
    const LabelVolume* p = &pred;
    LabelVolume resampled;
    if (!grids_compatible(ref.grid(), pred.grid(), opts.rel_tol)) {
        if (!opts.auto_resample)
            throw Error("evaluate_case: reference and prediction grids are incompatible");
        resampled = resample_nearest(pred, ref.grid());
        p = &resampled;
    }

    const BinaryMask ref_mask = extract_mask(ref, code);
    const BinaryMask pred_mask = extract_mask(*p, code);

    CaseMetrics m;
    m.detected = detect(pred_mask, opts.min_voxels);
    m.dsc = dice(ref_mask, pred_mask, opts.rel_tol);

    const bool ref_empty = ref_mask.empty();
    const bool pred_empty = pred_mask.empty();
    if (!ref_empty && !pred_empty) {
        m.hd_mm = hausdorff(ref_mask, pred_mask, opts.rel_tol);
    } else if (ref_empty && pred_empty) {
        m.hd_mm = 0.0;
    } else if (opts.policy == EmptyMaskPolicy::ImputeDiagonal) {
        m.hd_mm = grid_diagonal_mm(ref.grid());
        m.hd_imputed = true;
    }
    return m;
}

void write_metrics(const std::vector<CaseMetrics>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write metrics file: " + path.string());
    out << "case_id\tmodel_id\tdsc\thd_mm\tdetected\thd_imputed\n";
    out.precision(17);
    for (const auto& r : rows) {
        out << r.case_id << '\t' << r.model_id << '\t';
        if (r.dsc) out << *r.dsc;
        out << '\t';
        if (r.hd_mm) out << *r.hd_mm;
        out << '\t' << (r.detected ? 1 : 0) << '\t' << (r.hd_imputed ? 1 : 0) << '\n';
    }
    if (!out) throw Error("write failed: " + path.string());
}

std::vector<CaseMetrics> read_metrics(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open metrics file: " + path.string());
    std::string line;
    if (!std::getline(in, line) ||
        line.rfind("case_id\tmodel_id\tdsc\thd_mm\tdetected\thd_imputed", 0) != 0)
        throw Error("bad metrics header in " + path.string());

    std::vector<CaseMetrics> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::string field;
        std::istringstream ss(line);
        while (std::getline(ss, field, '\t')) f.push_back(field);
        while (f.size() < 6) f.emplace_back();
        if (f.size() != 6)
            throw Error(path.string() + ":" + std::to_string(lineno) + ": expected 6 fields");
        CaseMetrics m;
        m.case_id = f[0];
        m.model_id = f[1];
        if (!f[2].empty()) m.dsc = std::stod(f[2]);
        if (!f[3].empty()) m.hd_mm = std::stod(f[3]);
        m.detected = f[4] == "1";
        m.hd_imputed = f[5] == "1";
        rows.push_back(std::move(m));
    }
    return rows;
}

}  // namespace panceval
