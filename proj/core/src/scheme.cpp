#include "panceval/scheme.hpp"

#include <algorithm>

namespace panceval {

LabelSource label_source_from_string(const std::string& s) {
    if (s == "background") return LabelSource::Background;
    if (s == "PANORAMA") return LabelSource::Panorama;
    if (s == "TS") return LabelSource::TS;
    if (s == "derived") return LabelSource::Derived;
    throw Error("unknown label source: " + s);
}

std::string to_string(LabelSource s) {
    switch (s) {
        case LabelSource::Background: return "background";
        case LabelSource::Panorama: return "PANORAMA";
        case LabelSource::TS: return "TS";
        case LabelSource::Derived: return "derived";
    }
    return "?";
}

LabelScheme::LabelScheme(std::string name, std::vector<SchemeEntry> entries)
    : name_(std::move(name)), entries_(std::move(entries)) {
    bool has_background = false;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (!by_code_.emplace(entries_[i].code, i).second)
            throw Error("scheme " + name_ + ": duplicate code " +
                        std::to_string(entries_[i].code));
        if (entries_[i].code == 0) has_background = true;
    }
    if (!has_background)
        throw Error("scheme " + name_ + ": missing background code 0");
}

const SchemeEntry* LabelScheme::find(LabelCode code) const {
    auto it = by_code_.find(code);
    return it == by_code_.end() ? nullptr : &entries_[it->second];
}

LabelCode LabelScheme::max_code() const {
    LabelCode m = 0;
    for (const auto& e : entries_) m = std::max(m, e.code);
    return m;
}

ValidationReport validate_against_scheme(const LabelVolume& vol, const LabelScheme& scheme) {
    std::map<LabelCode, std::size_t> bad;
    for (LabelCode c : vol.voxels())
        if (!scheme.contains(c)) ++bad[c];
    ValidationReport report;
    report.offending.assign(bad.begin(), bad.end());
    return report;
}

}  // namespace panceval
