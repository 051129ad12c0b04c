#pragma once

// Label scheme catalogs: the 8-label refined scheme (REF_8), the 45-label
// scheme with anatomy priors (ALL_45), the raw 6-label PANORAMA scheme and
// the 117-structure TotalSegmentator scheme.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "panceval/grid.hpp"

namespace panceval {

enum class LabelSource { Background, Panorama, TS, Derived };

LabelSource label_source_from_string(const std::string& s);
std::string to_string(LabelSource s);

struct SchemeEntry {
    LabelCode code = 0;
    std::string name;
    LabelSource source = LabelSource::Background;
};

class LabelScheme {
public:
    LabelScheme() = default;
    LabelScheme(std::string name, std::vector<SchemeEntry> entries);

    const std::string& name() const { return name_; }
    const std::vector<SchemeEntry>& entries() const { return entries_; }
    bool contains(LabelCode code) const { return by_code_.count(code) != 0; }
    const SchemeEntry* find(LabelCode code) const;
    LabelCode max_code() const;
    std::size_t size() const { return entries_.size(); }

private:
    std::string name_;
    std::vector<SchemeEntry> entries_;
    std::map<LabelCode, std::size_t> by_code_;
};

struct ValidationReport {
    // Codes present in the volume but absent from the scheme, with voxel counts.
    std::vector<std::pair<LabelCode, std::size_t>> offending;
    bool ok() const { return offending.empty(); }
};

ValidationReport validate_against_scheme(const LabelVolume& vol, const LabelScheme& scheme);

}  // namespace panceval
