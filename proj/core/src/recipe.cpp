#include "panceval/recipe.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace panceval {

namespace {

std::string strip(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

Recipe Recipe::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open recipe file: " + path.string());

    Recipe r;
    std::string section;
    std::string scheme_name;
    std::vector<SchemeEntry> scheme_entries;
    auto flush_scheme = [&] {
        if (!scheme_name.empty())
            r.schemes_.emplace(scheme_name, LabelScheme(scheme_name, std::move(scheme_entries)));
        scheme_name.clear();
        scheme_entries.clear();
    };

    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::string line = strip(raw);
        if (line.empty()) continue;
        auto fail = [&](const std::string& msg) -> Error {
            return Error(path.string() + ":" + std::to_string(lineno) + ": " + msg);
        };

        if (line.front() == '[') {
            if (line.back() != ']') throw fail("malformed section header");
            flush_scheme();
            std::istringstream hs(line.substr(1, line.size() - 2));
            hs >> section;
            if (section == "scheme") {
                hs >> scheme_name;
                if (scheme_name.empty()) throw fail("scheme section needs a name");
            }
            continue;
        }

        std::istringstream ls(line);
        if (section.empty()) {
            std::string key;
            ls >> key;
            if (key == "version") {
                ls >> r.version_;
            } else {
                throw fail("unexpected line before first section");
            }
        } else if (section == "scheme") {
            SchemeEntry e;
            std::string src;
            if (!(ls >> e.code >> e.name >> src)) throw fail("malformed scheme entry");
            e.source = label_source_from_string(src);
            scheme_entries.push_back(e);
        } else if (section == "panorama_map") {
            LabelCode from, to;
            if (!(ls >> from >> to)) throw fail("malformed panorama_map entry");
            if (!r.panorama_map_.emplace(from, to).second)
                throw fail("duplicate panorama_map source code");
        } else if (section == "ts_map") {
            LabelCode from;
            TsMapEntry e;
            if (!(ls >> from >> e.name >> e.target)) throw fail("malformed ts_map entry");
            if (!r.ts_map_.emplace(from, e).second)
                throw fail("duplicate ts_map source code");
        } else if (section == "rules") {
            std::string key, eq;
            if (!(ls >> key >> eq) || eq != "=") throw fail("malformed rule");
            if (key == "aorta_mask_victim") ls >> r.aorta_mask_victim_;
            else if (key == "aorta_mask_ts_code") ls >> r.aorta_mask_ts_code_;
            else if (key == "aorta_mask_replacement") ls >> r.aorta_mask_replacement_;
            else if (key == "panorama_wins" || key == "shared_codes") {
                LabelCode c;
                auto& dst = key == "panorama_wins" ? r.panorama_wins_ : r.shared_codes_;
                while (ls >> c) dst.insert(c);
            } else throw fail("unknown rule key: " + key);
        } else {
            throw fail("unknown section: " + section);
        }
    }
    flush_scheme();
    r.check();
    return r;
}

const LabelScheme& Recipe::scheme(const std::string& name) const {
    auto it = schemes_.find(name);
    if (it == schemes_.end()) throw Error("recipe has no scheme named " + name);
    return it->second;
}

void Recipe::check() const {
    if (version_ != 1) throw Error("recipe: unsupported version");
    for (const char* name : {"PAN_6", "REF_8", "ALL_45"})
        if (!has_scheme(name)) throw Error(std::string("recipe: missing scheme ") + name);

    const LabelScheme& ref8 = scheme("REF_8");
    const LabelScheme& all45 = scheme("ALL_45");
    const LabelScheme& pan6 = scheme("PAN_6");

    std::set<LabelCode> ref8_codes;
    for (const auto& e : ref8.entries()) ref8_codes.insert(e.code);
    if (ref8_codes != std::set<LabelCode>{0, 38, 39, 40, 41, 42, 43, 44})
        throw Error("recipe: REF_8 must contain exactly codes {0, 38..44}");

    std::set<LabelCode> all45_codes;
    for (const auto& e : all45.entries()) all45_codes.insert(e.code);
    std::set<LabelCode> expect45;
    for (LabelCode c = 0; c <= 44; ++c) expect45.insert(c);
    if (all45_codes != expect45)
        throw Error("recipe: ALL_45 must contain exactly codes 0..44");

    // panorama_map must be total over PAN_6 foreground and land in REF_8.
    for (const auto& e : pan6.entries()) {
        if (e.code == 0) continue;
        auto it = panorama_map_.find(e.code);
        if (it == panorama_map_.end())
            throw Error("recipe: panorama_map missing PAN_6 code " + std::to_string(e.code));
        if (!ref8.contains(it->second))
            throw Error("recipe: panorama_map target not in REF_8");
    }

    // Coverage: all 117 TS structures, each mapping to exactly one ALL_45 code.
    if (ts_map_.size() != 117)
        throw Error("recipe: ts_map must list exactly 117 structures, got " +
                    std::to_string(ts_map_.size()));
    std::set<LabelCode> targets;
    for (LabelCode c = 1; c <= 117; ++c) {
        auto it = ts_map_.find(c);
        if (it == ts_map_.end())
            throw Error("recipe: ts_map missing TS code " + std::to_string(c));
        if (!all45.contains(it->second.target))
            throw Error("recipe: ts_map target " + std::to_string(it->second.target) +
                        " not in ALL_45");
        targets.insert(it->second.target);
    }
    if (targets.size() != 38)
        throw Error("recipe: ts_map must cover exactly 38 target codes, got " +
                    std::to_string(targets.size()));

    if (!ref8.contains(aorta_mask_victim_) || !ref8.contains(aorta_mask_replacement_))
        throw Error("recipe: aorta mask rule codes not in REF_8");
    if (ts_map_.count(aorta_mask_ts_code_) == 0)
        throw Error("recipe: aorta mask TS code not in ts_map");
    for (LabelCode c : panorama_wins_)
        if (!ref8.contains(c)) throw Error("recipe: panorama_wins code not in REF_8");
}

}  // namespace panceval
