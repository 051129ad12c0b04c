#include "panceval/harmonize.hpp"

#include <algorithm>

namespace panceval {

LabelVolume group_remap(const LabelVolume& vol,
                        const std::map<LabelCode, LabelCode>& mapping) {
    // Dense lookup over the observed code range.
    const LabelCode maxc = vol.max_code();
    std::vector<LabelCode> lut(static_cast<std::size_t>(maxc) + 1);
    std::vector<bool> have(static_cast<std::size_t>(maxc) + 1, false);
    for (const auto& [from, to] : mapping) {
        if (from <= maxc) {
            lut[from] = to;
            have[from] = true;
        }
    }
    if (!have[0] && mapping.count(0) == 0) {
        lut[0] = 0;  // background passes through unless remapped explicitly
        have[0] = true;
    }

    LabelVolume out(vol.grid());
    auto& dst = out.voxels();
    const auto& src = vol.voxels();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const LabelCode c = src[i];
        if (!have[c])
            throw Error("group_remap: code " + std::to_string(c) + " has no mapping entry");
        dst[i] = lut[c];
    }
    return out;
}

LabelVolume mask_out(const LabelVolume& victim, LabelCode victim_code,
                     const LabelVolume& mask, LabelCode mask_code,
                     LabelCode replacement, double rel_tol) {
    if (!grids_compatible(victim.grid(), mask.grid(), rel_tol))
        throw Error("mask_out: victim and mask grids are incompatible");
    LabelVolume out = victim;
    auto& dst = out.voxels();
    const auto& m = mask.voxels();
    for (std::size_t i = 0; i < dst.size(); ++i)
        if (dst[i] == victim_code && m[i] == mask_code) dst[i] = replacement;
    return out;
}

LabelVolume precedence_merge(const LabelVolume& base, const LabelVolume& overlay,
                             const std::set<LabelCode>& overlay_codes,
                             const std::set<LabelCode>& allowed_shared,
                             double rel_tol) {
    if (!grids_compatible(base.grid(), overlay.grid(), rel_tol))
        throw Error("precedence_merge: grids are incompatible");

    std::set<LabelCode> base_codes(base.voxels().begin(), base.voxels().end());
    for (LabelCode c : overlay_codes)
        if (base_codes.count(c) && allowed_shared.count(c) == 0)
            throw Error("precedence_merge: overlay code " + std::to_string(c) +
                        " collides with a base code");

    LabelVolume out = base;
    auto& dst = out.voxels();
    const auto& ov = overlay.voxels();
    for (std::size_t i = 0; i < dst.size(); ++i)
        if (overlay_codes.count(ov[i])) dst[i] = ov[i];
    return out;
}

LabelVolume build_ref8(const LabelVolume& panorama, const LabelVolume& ts,
                       const Recipe& recipe, double rel_tol) {
    if (!grids_compatible(panorama.grid(), ts.grid(), rel_tol))
        throw Error("build_ref8: PANORAMA and TS grids are incompatible");

    // Raw PANORAMA codes into REF_8 codes.
    LabelVolume refined = group_remap(panorama, recipe.panorama_map());

    // Split the arteries label: aorta voxels (per TS) become the aorta code.
    refined = mask_out(refined, recipe.aorta_mask_victim(), ts,
                       recipe.aorta_mask_ts_code(), recipe.aorta_mask_replacement(),
                       rel_tol);

    // Paint the remaining TS aorta support onto background so the aorta is a
    // complete structure, with PANORAMA labels keeping precedence.
    LabelVolume aorta(ts.grid());
    const auto& tsv = ts.voxels();
    auto& av = aorta.voxels();
    const LabelCode aorta_code = recipe.aorta_mask_replacement();
    for (std::size_t i = 0; i < tsv.size(); ++i)
        if (tsv[i] == recipe.aorta_mask_ts_code()) av[i] = aorta_code;

    std::set<LabelCode> pan_codes;
    for (const auto& [from, to] : recipe.panorama_map()) pan_codes.insert(to);
    LabelVolume out = precedence_merge(aorta, refined, pan_codes, {}, rel_tol);

    ValidationReport report = validate_against_scheme(out, recipe.scheme("REF_8"));
    if (!report.ok())
        throw Error("build_ref8: output contains codes outside REF_8");
    return out;
}

LabelVolume build_all45(const LabelVolume& panorama, const LabelVolume& ts,
                        const Recipe& recipe, double rel_tol) {
    LabelVolume ref8 = build_ref8(panorama, ts, recipe, rel_tol);

    std::map<LabelCode, LabelCode> ts_grouping;
    for (const auto& [code, entry] : recipe.ts_map()) ts_grouping[code] = entry.target;
    LabelVolume priors = group_remap(ts, ts_grouping);

    LabelVolume out = precedence_merge(priors, ref8, recipe.panorama_wins(),
                                       recipe.shared_codes(), rel_tol);

    ValidationReport report = validate_against_scheme(out, recipe.scheme("ALL_45"));
    if (!report.ok())
        throw Error("build_all45: output contains codes outside ALL_45");
    return out;
}

}  // namespace panceval
