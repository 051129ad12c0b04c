#include "panceval/cohort.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "panceval/rng.hpp"

namespace panceval {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, '\t')) {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        out.push_back(field);
    }
    return out;
}

}  // namespace

Manifest Manifest::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open manifest: " + path.string());

    Manifest m;
    std::string line;
    if (!std::getline(in, line)) throw Error("manifest is empty: " + path.string());
    auto header = split_tabs(line);
    if (header.size() < 2 || header[0] != "case_id" || header[1] != "pdac")
        throw Error("manifest header must start with case_id<TAB>pdac: " + path.string());
    m.path_columns.assign(header.begin() + 2, header.end());

    std::set<std::string> seen;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = split_tabs(line);
        if (fields.size() != header.size())
            throw Error(path.string() + ":" + std::to_string(lineno) +
                        ": expected " + std::to_string(header.size()) + " fields");
        CaseRecord rec;
        rec.case_id = fields[0];
        if (!seen.insert(rec.case_id).second)
            throw Error(path.string() + ": duplicate case id " + rec.case_id);
        if (fields[1] != "0" && fields[1] != "1")
            throw Error(path.string() + ":" + std::to_string(lineno) +
                        ": pdac flag must be 0 or 1");
        rec.pdac = fields[1] == "1";
        for (std::size_t i = 0; i < m.path_columns.size(); ++i)
            rec.paths[m.path_columns[i]] = fields[i + 2];
        m.cases.push_back(std::move(rec));
    }
    return m;
}

void Manifest::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write manifest: " + path.string());
    out << "case_id\tpdac";
    for (const auto& col : path_columns) out << '\t' << col;
    out << '\n';
    for (const auto& rec : cases) {
        out << rec.case_id << '\t' << (rec.pdac ? 1 : 0);
        for (const auto& col : path_columns) out << '\t' << rec.paths.at(col);
        out << '\n';
    }
}

std::vector<CaseRecord> balance_cohort(const std::vector<CaseRecord>& cases,
                                       std::uint64_t seed) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < cases.size(); ++i)
        (cases[i].pdac ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty())
        throw Error("balance_cohort: both PDAC and non-PDAC cases are required");

    auto& majority = pos.size() >= neg.size() ? pos : neg;
    const std::size_t m = std::min(pos.size(), neg.size());

    // Partial Fisher-Yates: the first m entries are a uniform sample.
    Rng rng(seed);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + rng.bounded(majority.size() - i);
        std::swap(majority[i], majority[j]);
    }
    majority.resize(m);

    std::vector<bool> keep(cases.size(), false);
    for (std::size_t i : pos) keep[i] = true;
    for (std::size_t i : neg) keep[i] = true;

    std::vector<CaseRecord> out;
    out.reserve(2 * m);
    for (std::size_t i = 0; i < cases.size(); ++i)
        if (keep[i]) out.push_back(cases[i]);
    return out;
}

}  // namespace panceval
