#include "panceval/phantom.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "panceval/mask.hpp"
#include "panceval/nifti.hpp"
#include "panceval/rng.hpp"

namespace panceval {

namespace {

bool organ_contains(const Organ& organ, double x, double y, double z) {
    const double dx = x - organ.center_mm[0];
    const double dy = y - organ.center_mm[1];
    const double dz = z - organ.center_mm[2];
    if (organ.shape == OrganShape::Cuboid) {
        return std::abs(dx) <= organ.radii_mm[0] && std::abs(dy) <= organ.radii_mm[1] &&
               std::abs(dz) <= organ.radii_mm[2];
    }
    const double ex = dx / organ.radii_mm[0];
    const double ey = dy / organ.radii_mm[1];
    const double ez = dz / organ.radii_mm[2];
    return ex * ex + ey * ey + ez * ez <= 1.0;
}

BinaryMask rasterize(const Organ& organ, const GridSpec& g) {
    BinaryMask m(g);
    // Bounding box keeps rasterization cheap on large grids.
    std::size_t lo[3], hi[3];
    for (int a = 0; a < 3; ++a) {
        const double min_mm = organ.center_mm[a] - organ.radii_mm[a];
        const double max_mm = organ.center_mm[a] + organ.radii_mm[a];
        const double flo = std::floor((min_mm - g.origin[a]) / g.spacing[a]);
        const double fhi = std::ceil((max_mm - g.origin[a]) / g.spacing[a]);
        lo[a] = flo < 0.0 ? 0 : static_cast<std::size_t>(flo);
        hi[a] = fhi < 0.0 ? 0 : std::min(g.dims[a], static_cast<std::size_t>(fhi) + 1);
    }
    for (std::size_t z = lo[2]; z < hi[2]; ++z)
        for (std::size_t y = lo[1]; y < hi[1]; ++y)
            for (std::size_t x = lo[0]; x < hi[0]; ++x)
                if (organ_contains(organ, g.world(0, x), g.world(1, y), g.world(2, z)))
                    m.set(m.index(x, y, z));
    return m;
}

BinaryMask shift_mask(const BinaryMask& m, const std::array<int, 3>& d) {
    const GridSpec& g = m.grid();
    BinaryMask out(g);
    for (std::size_t z = 0; z < g.dims[2]; ++z)
        for (std::size_t y = 0; y < g.dims[1]; ++y)
            for (std::size_t x = 0; x < g.dims[0]; ++x) {
                if (!m.at(x, y, z)) continue;
                const long long nx = static_cast<long long>(x) + d[0];
                const long long ny = static_cast<long long>(y) + d[1];
                const long long nz = static_cast<long long>(z) + d[2];
                if (nx < 0 || ny < 0 || nz < 0 ||
                    nx >= static_cast<long long>(g.dims[0]) ||
                    ny >= static_cast<long long>(g.dims[1]) ||
                    nz >= static_cast<long long>(g.dims[2]))
                    continue;
                out.set(out.index(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny),
                                  static_cast<std::size_t>(nz)));
            }
    return out;
}

BinaryMask morph_step(const BinaryMask& m, bool dilate) {
    const GridSpec& g = m.grid();
    BinaryMask out(g);
    const long long nx = static_cast<long long>(g.dims[0]);
    const long long ny = static_cast<long long>(g.dims[1]);
    const long long nz = static_cast<long long>(g.dims[2]);
    auto get = [&](long long x, long long y, long long z) {
        if (x < 0 || y < 0 || z < 0 || x >= nx || y >= ny || z >= nz) return false;
        return m.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                    static_cast<std::size_t>(z));
    };
    for (long long z = 0; z < nz; ++z)
        for (long long y = 0; y < ny; ++y)
            for (long long x = 0; x < nx; ++x) {
                const bool c = get(x, y, z);
                const bool any_n = get(x - 1, y, z) || get(x + 1, y, z) || get(x, y - 1, z) ||
                                   get(x, y + 1, z) || get(x, y, z - 1) || get(x, y, z + 1);
                const bool all_n = get(x - 1, y, z) && get(x + 1, y, z) && get(x, y - 1, z) &&
                                   get(x, y + 1, z) && get(x, y, z - 1) && get(x, y, z + 1);
                const bool v = dilate ? (c || any_n) : (c && all_n);
                if (v) out.set(out.index(static_cast<std::size_t>(x),
                                         static_cast<std::size_t>(y),
                                         static_cast<std::size_t>(z)));
            }
    return out;
}

BinaryMask perturb(const BinaryMask& m, const Perturbation& p, Rng& rng) {
    switch (p.kind) {
        case Perturbation::Kind::None:
            return m;
        case Perturbation::Kind::Shift:
            return shift_mask(m, p.shift_voxels);
        case Perturbation::Kind::Dilate: {
            BinaryMask out = m;
            for (int i = 0; i < p.radius_voxels; ++i) out = morph_step(out, true);
            return out;
        }
        case Perturbation::Kind::Erode: {
            BinaryMask out = m;
            for (int i = 0; i < p.radius_voxels; ++i) out = morph_step(out, false);
            return out;
        }
        case Perturbation::Kind::Drop:
            if (rng.uniform() < p.drop_probability) return BinaryMask(m.grid());
            return m;
    }
    return m;
}

// First organ in spec order wins where masks overlap.
LabelVolume compose(const GridSpec& g, const std::vector<Organ>& organs,
                    const std::vector<BinaryMask>& masks) {
    LabelVolume vol(g);
    auto& v = vol.voxels();
    for (std::size_t o = 0; o < organs.size(); ++o)
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] == 0 && masks[o].test(i)) v[i] = organs[o].code;
    return vol;
}

void warn_if_clipped(const Organ& organ, const GridSpec& g) {
    for (int a = 0; a < 3; ++a) {
        const double lo = g.world(a, 0) - 0.5 * g.spacing[a];
        const double hi = g.world(a, g.dims[a] - 1) + 0.5 * g.spacing[a];
        if (organ.center_mm[a] - organ.radii_mm[a] < lo ||
            organ.center_mm[a] + organ.radii_mm[a] > hi) {
            std::cerr << "phantom: organ code " << organ.code
                      << " extends outside the grid on axis " << a << "; clipping\n";
            return;
        }
    }
}

}  // namespace

PhantomPair generate(const PhantomSpec& spec) {
    spec.grid.validate();
    if (!spec.perturbations.empty() && spec.perturbations.size() != spec.organs.size())
        throw Error("phantom: perturbation list must match organ list");
    for (const auto& organ : spec.organs) {
        for (double r : organ.radii_mm)
            if (r <= 0.0) throw Error("phantom: organ radii must be > 0");
        warn_if_clipped(organ, spec.grid);
    }

    std::vector<BinaryMask> ref_masks;
    ref_masks.reserve(spec.organs.size());
    for (const auto& organ : spec.organs) ref_masks.push_back(rasterize(organ, spec.grid));

    std::vector<BinaryMask> pred_masks;
    pred_masks.reserve(spec.organs.size());
    for (std::size_t o = 0; o < spec.organs.size(); ++o) {
        const Perturbation p =
            spec.perturbations.empty() ? Perturbation{} : spec.perturbations[o];
        Rng rng = Rng::stream(spec.seed, o);
        pred_masks.push_back(perturb(ref_masks[o], p, rng));
    }

    return {compose(spec.grid, spec.organs, ref_masks),
            compose(spec.grid, spec.organs, pred_masks)};
}

StudySpec StudySpec::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open phantom spec: " + path.string());

    StudySpec spec;
    std::string raw;
    int lineno = 0;
    int version = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::istringstream ls(raw);
        std::string key;
        if (!(ls >> key)) continue;
        auto fail = [&](const std::string& msg) -> Error {
            return Error(path.string() + ":" + std::to_string(lineno) + ": " + msg);
        };
        if (key == "version") ls >> version;
        else if (key == "cases") ls >> spec.n_cases;
        else if (key == "seed") ls >> spec.seed;
        else if (key == "target") ls >> spec.target_code;
        else if (key == "jitter") ls >> spec.jitter_mm;
        else if (key == "dims") ls >> spec.grid.dims[0] >> spec.grid.dims[1] >> spec.grid.dims[2];
        else if (key == "spacing")
            ls >> spec.grid.spacing[0] >> spec.grid.spacing[1] >> spec.grid.spacing[2];
        else if (key == "origin")
            ls >> spec.grid.origin[0] >> spec.grid.origin[1] >> spec.grid.origin[2];
        else if (key == "organ") {
            Organ o;
            std::string shape;
            if (!(ls >> o.code >> shape >> o.center_mm[0] >> o.center_mm[1] >> o.center_mm[2] >>
                  o.radii_mm[0] >> o.radii_mm[1] >> o.radii_mm[2]))
                throw fail("malformed organ line");
            if (shape == "cuboid") o.shape = OrganShape::Cuboid;
            else if (shape == "ellipsoid") o.shape = OrganShape::Ellipsoid;
            else throw fail("unknown organ shape: " + shape);
            spec.organs.push_back(o);
        } else if (key == "model") {
            ModelProfile m;
            if (!(ls >> m.name)) throw fail("model line needs a name");
            std::string tok;
            while (ls >> tok) {
                auto eq = tok.find('=');
                const std::string op = tok.substr(0, eq);
                const std::string arg = eq == std::string::npos ? "" : tok.substr(eq + 1);
                if (op == "none") {
                    m.perturbation.kind = Perturbation::Kind::None;
                } else if (op == "dilate") {
                    m.perturbation.kind = Perturbation::Kind::Dilate;
                    m.perturbation.radius_voxels = std::stoi(arg);
                } else if (op == "erode") {
                    m.perturbation.kind = Perturbation::Kind::Erode;
                    m.perturbation.radius_voxels = std::stoi(arg);
                } else if (op == "shift") {
                    m.perturbation.kind = Perturbation::Kind::Shift;
                    std::istringstream as(arg);
                    std::string c;
                    for (int a = 0; a < 3 && std::getline(as, c, ','); ++a)
                        m.perturbation.shift_voxels[a] = std::stoi(c);
                } else if (op == "drop") {
                    m.perturbation.kind = Perturbation::Kind::Drop;
                    m.perturbation.drop_probability = std::stod(arg);
                } else if (op == "drop_cases") {
                    m.drop_case_count = static_cast<std::size_t>(std::stoul(arg));
                } else {
                    throw fail("unknown model option: " + op);
                }
            }
            spec.models.push_back(std::move(m));
        } else {
            throw fail("unknown key: " + key);
        }
    }
    if (version != 1) throw Error(path.string() + ": unsupported phantom spec version");
    if (spec.organs.empty()) throw Error(path.string() + ": no organs defined");
    if (spec.models.empty()) throw Error(path.string() + ": no model profiles defined");
    if (spec.n_cases < 1) throw Error(path.string() + ": cases must be >= 1");
    spec.grid.validate();
    return spec;
}

Manifest generate_study(const StudySpec& spec, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir / "ref");
    for (const auto& m : spec.models) fs::create_directories(out_dir / "pred" / m.name);

    Manifest manifest;
    manifest.path_columns.push_back("ref");
    for (const auto& m : spec.models) manifest.path_columns.push_back(m.name);

    for (std::size_t c = 0; c < spec.n_cases; ++c) {
        // Per-case organ jitter from a case-indexed stream; independent of
        // processing order.
        Rng jitter_rng = Rng::stream(spec.seed, c);
        std::vector<Organ> organs = spec.organs;
        if (spec.jitter_mm > 0.0)
            for (auto& organ : organs)
                for (int a = 0; a < 3; ++a)
                    organ.center_mm[a] += jitter_rng.uniform(-spec.jitter_mm, spec.jitter_mm);

        std::vector<BinaryMask> ref_masks;
        for (const auto& organ : organs) ref_masks.push_back(rasterize(organ, spec.grid));
        const LabelVolume ref = compose(spec.grid, organs, ref_masks);

        std::ostringstream id;
        id << "case_" << std::setw(4) << std::setfill('0') << c;
        CaseRecord rec;
        rec.case_id = id.str();
        rec.pdac = c % 2 == 0;

        const fs::path ref_path = out_dir / "ref" / (rec.case_id + ".nii.gz");
        write_label_volume(ref, ref_path);
        rec.paths["ref"] = ref_path.string();

        for (std::size_t mi = 0; mi < spec.models.size(); ++mi) {
            const ModelProfile& profile = spec.models[mi];
            Rng rng = Rng::stream(splitmix64(spec.seed + 1 + mi), c);
            std::vector<BinaryMask> pred_masks;
            for (std::size_t o = 0; o < organs.size(); ++o) {
                BinaryMask m = perturb(ref_masks[o], profile.perturbation, rng);
                if (organs[o].code == spec.target_code && c < profile.drop_case_count)
                    m = BinaryMask(spec.grid);
                pred_masks.push_back(std::move(m));
            }
            const LabelVolume pred = compose(spec.grid, organs, pred_masks);
            const fs::path pred_path =
                out_dir / "pred" / profile.name / (rec.case_id + ".nii.gz");
            write_label_volume(pred, pred_path);
            rec.paths[profile.name] = pred_path.string();
        }
        manifest.cases.push_back(std::move(rec));
    }

    manifest.save(out_dir / "manifest.tsv");
    return manifest;
}

}  // namespace panceval
