#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "panceval/metrics.hpp"
#include "panceval/nifti.hpp"
#include "panceval/phantom.hpp"

using namespace panceval;
namespace fs = std::filesystem;

namespace {

const GridSpec kGrid{{32, 24, 16}, {1.0, 1.0, 1.0}, {0, 0, 0}};

PhantomSpec basic_spec() {
    PhantomSpec spec;
    spec.grid = kGrid;
    // Cuboid covering voxel centers x 5..14, y 7..12, z 5..10 (10 x 6 x 6).
    Organ lesion;
    lesion.code = 38;
    lesion.shape = OrganShape::Cuboid;
    lesion.center_mm = {9.5, 9.5, 7.5};
    lesion.radii_mm = {4.5, 2.5, 2.5};
    spec.organs.push_back(lesion);
    return spec;
}

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "panceval_phantom_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("generation is deterministic in spec and seed") {
    PhantomSpec spec = basic_spec();
    spec.seed = 77;
    spec.perturbations = {Perturbation{Perturbation::Kind::Drop, {0, 0, 0}, 0, 0.5}};
    const PhantomPair a = generate(spec);
    const PhantomPair b = generate(spec);
    CHECK(a.reference.voxels() == b.reference.voxels());
    CHECK(a.prediction.voxels() == b.prediction.voxels());
}

TEST_CASE("cuboid rasterization covers exactly the expected voxels") {
    const PhantomPair p = generate(basic_spec());
    const BinaryMask m = extract_mask(p.reference, 38);
    CHECK(m.popcount() == 10 * 6 * 6);
    CHECK(m.at(5, 8, 6));
    CHECK_FALSE(m.at(4, 8, 6));
}

TEST_CASE("unperturbed prediction equals the reference") {
    const PhantomPair p = generate(basic_spec());
    CHECK(p.prediction.voxels() == p.reference.voxels());
}

TEST_CASE("shift by 3 voxels gives dice 0.7 and hausdorff 3.0") {
    PhantomSpec spec = basic_spec();
    Perturbation shift;
    shift.kind = Perturbation::Kind::Shift;
    shift.shift_voxels = {3, 0, 0};
    spec.perturbations = {shift};
    const PhantomPair p = generate(spec);
    const CaseMetrics m = evaluate_case(p.reference, p.prediction, 38);
    CHECK(*m.dsc == doctest::Approx(0.7).epsilon(1e-12));  // 7 of 10 slabs overlap
    CHECK(*m.hd_mm == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("dilation strictly grows the mask and erosion inverts one step") {
    PhantomSpec spec = basic_spec();
    Perturbation dilate;
    dilate.kind = Perturbation::Kind::Dilate;
    dilate.radius_voxels = 1;
    spec.perturbations = {dilate};
    const PhantomPair grown = generate(spec);
    const BinaryMask ref = extract_mask(grown.reference, 38);
    const BinaryMask big = extract_mask(grown.prediction, 38);
    CHECK(big.popcount() > ref.popcount());
    CHECK(big.intersection_count(ref) == ref.popcount());  // superset

    spec.perturbations[0].kind = Perturbation::Kind::Erode;
    const PhantomPair shrunk = generate(spec);
    const BinaryMask small = extract_mask(shrunk.prediction, 38);
    CHECK(small.popcount() < ref.popcount());
    CHECK(small.intersection_count(ref) == small.popcount());  // subset
    // One 6-connected step adds one voxel per exposed face of the cuboid
    // and erosion peels one layer off each side.
    CHECK(big.popcount() == 10 * 6 * 6 + 2 * (6 * 6 + 10 * 6 + 10 * 6));
    CHECK(small.popcount() == 8 * 4 * 4);
}

TEST_CASE("drop with probability 1 empties the organ, probability 0 keeps it") {
    PhantomSpec spec = basic_spec();
    spec.perturbations = {Perturbation{Perturbation::Kind::Drop, {0, 0, 0}, 0, 1.0}};
    CHECK(extract_mask(generate(spec).prediction, 38).empty());
    spec.perturbations[0].drop_probability = 0.0;
    CHECK(extract_mask(generate(spec).prediction, 38).popcount() == 10 * 6 * 6);
}

TEST_CASE("first organ wins on overlap") {
    PhantomSpec spec = basic_spec();
    Organ second = spec.organs[0];
    second.code = 41;
    second.center_mm[0] += 4.0;  // overlaps the lesion
    spec.organs.push_back(second);
    const PhantomPair p = generate(spec);
    const BinaryMask lesion = extract_mask(p.reference, 38);
    CHECK(lesion.popcount() == 10 * 6 * 6);  // untouched by the later organ
    CHECK(extract_mask(p.reference, 41).popcount() < 10 * 6 * 6);
}

TEST_CASE("study spec file round-trip drives generate_study") {
    const fs::path dir = temp_dir("study");
    const fs::path spec_path = dir / "study.txt";
    {
        std::ofstream out(spec_path);
        out << "version 1\n"
               "cases 6\n"
               "seed 99\n"
               "target 38\n"
               "jitter 1.0\n"
               "dims 32 24 16\n"
               "spacing 1 1 1\n"
               "origin 0 0 0\n"
               "organ 38 cuboid 10 10 8 4.5 2.5 2.5\n"
               "organ 44 ellipsoid 22 12 8 6 5 4\n"
               "model good none\n"
               "model misser drop_cases=4 dilate=1\n";
    }
    const StudySpec spec = StudySpec::load(spec_path);
    CHECK(spec.n_cases == 6);
    CHECK(spec.jitter_mm == 1.0);
    REQUIRE(spec.models.size() == 2);
    CHECK(spec.models[1].drop_case_count == 4);
    CHECK(spec.models[1].perturbation.kind == Perturbation::Kind::Dilate);

    const Manifest manifest = generate_study(spec, dir / "out");
    CHECK(manifest.cases.size() == 6);
    CHECK(manifest.path_columns == std::vector<std::string>{"ref", "good", "misser"});
    CHECK(manifest.cases[0].case_id == "case_0000");

    // The target organ is absent under the dropping model for the first 4
    // cases and present afterwards; the clean model always has it.
    for (std::size_t c = 0; c < 6; ++c) {
        const auto& rec = manifest.cases[c];
        const LabelVolume ref = read_label_volume(rec.paths.at("ref")).volume;
        const LabelVolume good = read_label_volume(rec.paths.at("good")).volume;
        const LabelVolume miss = read_label_volume(rec.paths.at("misser")).volume;
        CHECK_FALSE(extract_mask(ref, 38).empty());
        CHECK(good.voxels() == ref.voxels());
        if (c < 4) CHECK(extract_mask(miss, 38).empty());
        else CHECK_FALSE(extract_mask(miss, 38).empty());
        // The non-target organ survives the drop and is dilated.
        CHECK(extract_mask(miss, 44).popcount() > extract_mask(ref, 44).popcount());
    }

    // Regeneration is byte-identical.
    const Manifest again = generate_study(spec, dir / "out2");
    for (std::size_t c = 0; c < 6; ++c) {
        const auto a = read_label_volume(manifest.cases[c].paths.at("misser")).volume;
        const auto b = read_label_volume(again.cases[c].paths.at("misser")).volume;
        CHECK(a.voxels() == b.voxels());
    }
}

TEST_CASE("jitter moves organs across cases but respects the seed") {
    const fs::path dir = temp_dir("jitter");
    StudySpec spec;
    spec.grid = kGrid;
    spec.organs = basic_spec().organs;
    spec.n_cases = 3;
    spec.seed = 5;
    spec.jitter_mm = 2.0;
    ModelProfile m;
    m.name = "good";
    spec.models.push_back(m);
    const Manifest manifest = generate_study(spec, dir);
    const auto v0 = read_label_volume(manifest.cases[0].paths.at("ref")).volume;
    const auto v1 = read_label_volume(manifest.cases[1].paths.at("ref")).volume;
    CHECK(v0.voxels() != v1.voxels());
}

TEST_CASE("spec validation failures") {
    PhantomSpec spec = basic_spec();
    spec.organs[0].radii_mm[1] = 0.0;
    CHECK_THROWS_AS(generate(spec), Error);

    PhantomSpec ragged = basic_spec();
    ragged.perturbations.assign(2, Perturbation{});
    CHECK_THROWS_AS(generate(ragged), Error);
}
