#pragma once

// Loader for the versioned harmonization recipe file: label scheme catalogs,
// the PANORAMA 6-label remap, the TotalSegmentator 117-structure grouping
// table and the aorta mask-out rule parameters. Static coverage checks run
// at load time so a transcription error fails fast, not mid-cohort.

#include <filesystem>
#include <map>
#include <set>
#include <string>

#include "panceval/scheme.hpp"

namespace panceval {

struct TsMapEntry {
    std::string name;
    LabelCode target = 0;
};

class Recipe {
public:
    static Recipe load(const std::filesystem::path& path);

    int version() const { return version_; }
    const LabelScheme& scheme(const std::string& name) const;
    bool has_scheme(const std::string& name) const { return schemes_.count(name) != 0; }

    // PANORAMA raw code -> REF_8 code; total over PAN_6 minus background.
    const std::map<LabelCode, LabelCode>& panorama_map() const { return panorama_map_; }
    // TS structure code -> (name, ALL_45 code); covers codes 1..117 exactly.
    const std::map<LabelCode, TsMapEntry>& ts_map() const { return ts_map_; }

    LabelCode aorta_mask_victim() const { return aorta_mask_victim_; }
    LabelCode aorta_mask_ts_code() const { return aorta_mask_ts_code_; }
    LabelCode aorta_mask_replacement() const { return aorta_mask_replacement_; }
    const std::set<LabelCode>& panorama_wins() const { return panorama_wins_; }
    const std::set<LabelCode>& shared_codes() const { return shared_codes_; }

private:
    void check() const;

    int version_ = 0;
    std::map<std::string, LabelScheme> schemes_;
    std::map<LabelCode, LabelCode> panorama_map_;
    std::map<LabelCode, TsMapEntry> ts_map_;
    LabelCode aorta_mask_victim_ = 0;
    LabelCode aorta_mask_ts_code_ = 0;
    LabelCode aorta_mask_replacement_ = 0;
    std::set<LabelCode> panorama_wins_;
    std::set<LabelCode> shared_codes_;
};

}  // namespace panceval
