#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "panceval/cohort.hpp"

using namespace panceval;
namespace fs = std::filesystem;

namespace {

std::vector<CaseRecord> synthetic_cohort(std::size_t total, std::size_t pdac) {
    std::vector<CaseRecord> cases;
    cases.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        CaseRecord c;
        c.case_id = "case_" + std::to_string(i);
        c.pdac = i < pdac;
        cases.push_back(std::move(c));
    }
    return cases;
}

fs::path temp_file(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "panceval_cohort_tests";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("balancing 2229 cases with 675 positives keeps 1350") {
    const auto cases = synthetic_cohort(2229, 675);
    const auto out = balance_cohort(cases, 42);
    CHECK(out.size() == 1350);
    std::size_t pos = 0;
    for (const auto& c : out) pos += c.pdac ? 1 : 0;
    CHECK(pos == 675);
    // All positives survive.
    std::set<std::string> ids;
    for (const auto& c : out) ids.insert(c.case_id);
    for (std::size_t i = 0; i < 675; ++i)
        CHECK(ids.count("case_" + std::to_string(i)) == 1);
}

TEST_CASE("balancing preserves manifest order") {
    const auto cases = synthetic_cohort(40, 10);
    const auto out = balance_cohort(cases, 7);
    for (std::size_t i = 1; i < out.size(); ++i) {
        const auto a = std::stoul(out[i - 1].case_id.substr(5));
        const auto b = std::stoul(out[i].case_id.substr(5));
        CHECK(a < b);
    }
}

TEST_CASE("balancing is seed-deterministic and seed-sensitive") {
    const auto cases = synthetic_cohort(300, 80);
    const auto a = balance_cohort(cases, 1234);
    const auto b = balance_cohort(cases, 1234);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].case_id == b[i].case_id);

    const auto c = balance_cohort(cases, 1235);
    bool differs = c.size() != a.size();
    for (std::size_t i = 0; !differs && i < a.size(); ++i)
        differs = a[i].case_id != c[i].case_id;
    CHECK(differs);
}

TEST_CASE("majority class can be the positives") {
    const auto cases = synthetic_cohort(30, 25);
    const auto out = balance_cohort(cases, 3);
    CHECK(out.size() == 10);
    std::size_t pos = 0;
    for (const auto& c : out) pos += c.pdac ? 1 : 0;
    CHECK(pos == 5);
}

TEST_CASE("already balanced cohort passes through unchanged") {
    const auto cases = synthetic_cohort(20, 10);
    const auto out = balance_cohort(cases, 9);
    REQUIRE(out.size() == 20);
    for (std::size_t i = 0; i < 20; ++i) CHECK(out[i].case_id == cases[i].case_id);
}

TEST_CASE("empty class is an error") {
    CHECK_THROWS_AS(balance_cohort(synthetic_cohort(10, 0), 1), Error);
    CHECK_THROWS_AS(balance_cohort(synthetic_cohort(10, 10), 1), Error);
    CHECK_THROWS_AS(balance_cohort({}, 1), Error);
}

TEST_CASE("manifest round-trip") {
    const fs::path path = temp_file("roundtrip.tsv");
    {
        std::ofstream out(path);
        out << "case_id\tpdac\tref\tmodelA\n";
        out << "c1\t1\t/data/c1_ref.nii.gz\t/data/c1_a.nii.gz\n";
        out << "c2\t0\t/data/c2_ref.nii.gz\t/data/c2_a.nii.gz\n";
    }
    const Manifest m = Manifest::load(path);
    REQUIRE(m.cases.size() == 2);
    CHECK(m.path_columns == std::vector<std::string>{"ref", "modelA"});
    CHECK(m.cases[0].case_id == "c1");
    CHECK(m.cases[0].pdac);
    CHECK_FALSE(m.cases[1].pdac);
    CHECK(m.cases[1].paths.at("modelA") == "/data/c2_a.nii.gz");

    const fs::path copy = temp_file("copy.tsv");
    m.save(copy);
    const Manifest m2 = Manifest::load(copy);
    REQUIRE(m2.cases.size() == 2);
    CHECK(m2.path_columns == m.path_columns);
    CHECK(m2.cases[1].paths == m.cases[1].paths);
}

TEST_CASE("manifest rejects duplicates and bad pdac flags") {
    const fs::path dup = temp_file("dup.tsv");
    {
        std::ofstream out(dup);
        out << "case_id\tpdac\tref\n";
        out << "c1\t1\ta\n";
        out << "c1\t0\tb\n";
    }
    CHECK_THROWS_AS(Manifest::load(dup), Error);

    const fs::path bad = temp_file("badflag.tsv");
    {
        std::ofstream out(bad);
        out << "case_id\tpdac\tref\n";
        out << "c1\t2\ta\n";
    }
    CHECK_THROWS_AS(Manifest::load(bad), Error);

    const fs::path header = temp_file("badheader.tsv");
    {
        std::ofstream out(header);
        out << "id\tpdac\tref\n";
        out << "c1\t1\ta\n";
    }
    CHECK_THROWS_AS(Manifest::load(header), Error);
}
