#pragma once

// Case manifests and the PDAC / non-PDAC cohort balancing step.
//
// Manifest format: tab-separated with a header line. The first two columns
// are case_id and pdac (0/1); remaining columns are named file paths
// (e.g. panorama, ts, ref, or one column per model prediction set).

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "panceval/grid.hpp"

namespace panceval {

struct CaseRecord {
    std::string case_id;
    bool pdac = false;
    std::map<std::string, std::string> paths;  // column name -> path
};

struct Manifest {
    std::vector<std::string> path_columns;  // order preserved from the header
    std::vector<CaseRecord> cases;

    static Manifest load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;
};

// Keeps every case of the minority class plus a seeded uniform sample
// (without replacement) of the majority class of equal size. Output preserves
// manifest order. Throws if either class is empty.
std::vector<CaseRecord> balance_cohort(const std::vector<CaseRecord>& cases,
                                       std::uint64_t seed);

}  // namespace panceval
