#pragma once

// Deterministic synthetic abdomen generator. Organs are rasterized by
// voxel-center membership (first organ in spec order wins on shared
// boundaries); predictions apply a per-organ perturbation. All randomness
// comes from the pipeline RNG (mt19937_64, splitmix64 per-case streams), so
// identical spec + seed gives byte-identical outputs regardless of
// generation order.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "panceval/cohort.hpp"
#include "panceval/grid.hpp"

namespace panceval {

enum class OrganShape { Cuboid, Ellipsoid };

struct Organ {
    LabelCode code = 0;
    OrganShape shape = OrganShape::Ellipsoid;
    std::array<double, 3> center_mm{0, 0, 0};
    std::array<double, 3> radii_mm{1, 1, 1};  // half-extents for cuboids
};

struct Perturbation {
    enum class Kind { None, Shift, Dilate, Erode, Drop };
    Kind kind = Kind::None;
    std::array<int, 3> shift_voxels{0, 0, 0};
    int radius_voxels = 0;
    double drop_probability = 0.0;
};

struct PhantomSpec {
    GridSpec grid;
    std::vector<Organ> organs;
    std::vector<Perturbation> perturbations;  // parallel to organs; empty = all none
    std::uint64_t seed = 0;
};

struct PhantomPair {
    LabelVolume reference;
    LabelVolume prediction;
};

PhantomPair generate(const PhantomSpec& spec);

struct ModelProfile {
    std::string name;
    Perturbation perturbation;          // applied to every organ
    std::size_t drop_case_count = 0;    // target organ removed in the first N cases
};

struct StudySpec {
    GridSpec grid;
    std::vector<Organ> organs;
    std::size_t n_cases = 1;
    std::uint64_t seed = 0;
    LabelCode target_code = 44;   // organ subject to drop_case_count
    double jitter_mm = 0.0;       // per-case uniform center jitter
    std::vector<ModelProfile> models;

    static StudySpec load(const std::filesystem::path& path);
};

// Writes reference volumes, one prediction set per model profile and a
// manifest (columns: ref plus one per model). Returns the manifest.
Manifest generate_study(const StudySpec& spec, const std::filesystem::path& out_dir);

}  // namespace panceval
