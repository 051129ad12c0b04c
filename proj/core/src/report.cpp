#include "panceval/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace panceval {

namespace {

using nlohmann::json;

std::string fmt(double v, int prec) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(prec) << v;
    return ss.str();
}

std::string mean_sd(double mean, double sd, int prec) {
    return fmt(mean, prec) + " +/- " + fmt(sd, prec);
}

void render_row(std::ostringstream& out, const std::vector<std::string>& cells,
                const std::vector<std::size_t>& widths) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        out << std::left << std::setw(static_cast<int>(widths[i]) + 2) << cells[i];
    }
    out << '\n';
}

std::string render_table(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths(rows[0].size(), 0);
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i)
            widths[i] = std::max(widths[i], row[i].size());
    std::ostringstream out;
    render_row(out, rows[0], widths);
    std::size_t total = 0;
    for (std::size_t w : widths) total += w + 2;
    out << std::string(total, '-') << '\n';
    for (std::size_t r = 1; r < rows.size(); ++r) render_row(out, rows[r], widths);
    return out.str();
}

json matrix_to_json(const std::vector<std::vector<double>>& m) { return json(m); }

std::vector<std::vector<double>> matrix_from_json(const json& j) {
    return j.get<std::vector<std::vector<double>>>();
}

json test_to_json(const TestResult& t) {
    return json{{"statistic", t.statistic}, {"df", t.df}, {"p", t.p}, {"method", t.method}};
}

TestResult test_from_json(const json& j) {
    TestResult t;
    t.statistic = j.at("statistic");
    t.df = j.at("df");
    t.p = j.at("p");
    t.method = j.at("method");
    return t;
}

}  // namespace

std::string format_p(double p) {
    if (p < 0.0005) return "< 0.001";
    return fmt(p, 3);
}

std::string render_summary_table(const StudyResult& study) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"Metric"};
    for (const auto& m : study.models) header.push_back(m.model_id);
    header.push_back("p-value");
    rows.push_back(header);

    std::vector<std::string> dsc{"DSC"};
    for (const auto& m : study.models) dsc.push_back(mean_sd(m.dsc_mean, m.dsc_sd, 2));
    dsc.push_back(format_p(study.friedman_dsc.p));
    rows.push_back(dsc);

    std::vector<std::string> hd{"HD (mm)"};
    for (const auto& m : study.models) hd.push_back(mean_sd(m.hd_mean, m.hd_sd, 1));
    hd.push_back(format_p(study.friedman_hd.p));
    rows.push_back(hd);

    std::vector<std::string> det{"Detection failure (n)"};
    for (const auto& m : study.models) det.push_back(std::to_string(m.detection_failures));
    det.push_back(format_p(study.cochran_detection.p));
    rows.push_back(det);

    std::ostringstream out;
    out << "Segmentation performance (n = " << study.n_complete << " cases";
    if (study.n_dropped_incomplete > 0)
        out << ", " << study.n_dropped_incomplete << " dropped incomplete";
    if (study.n_dropped_missing_hd > 0)
        out << ", " << study.n_dropped_missing_hd << " dropped for HD (missing)";
    out << ")\n\n" << render_table(rows);
    return out.str();
}

std::string render_pairwise_table(const StudyResult& study) {
    const std::size_t k = study.models.size();
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"Metric"};
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            pairs.emplace_back(i, j);
            header.push_back(study.models[i].model_id + " vs. " + study.models[j].model_id);
        }
    rows.push_back(header);

    std::vector<std::string> dsc{"DSC"};
    for (auto [i, j] : pairs) dsc.push_back(format_p(study.nemenyi_dsc[i][j]));
    rows.push_back(dsc);
    std::vector<std::string> hd{"HD (mm)"};
    for (auto [i, j] : pairs) hd.push_back(format_p(study.nemenyi_hd[i][j]));
    rows.push_back(hd);
    std::vector<std::string> det{"Detection failure (n)"};
    for (auto [i, j] : pairs) det.push_back(format_p(study.mcnemar_detection[i][j]));
    rows.push_back(det);

    std::ostringstream out;
    out << "Pairwise post-hoc comparisons\n\n" << render_table(rows);
    return out.str();
}

std::string study_to_json(const StudyResult& study) {
    json models = json::array();
    for (const auto& m : study.models)
        models.push_back(json{{"model_id", m.model_id},
                              {"n_cases", m.n_cases},
                              {"dsc_mean", m.dsc_mean},
                              {"dsc_sd", m.dsc_sd},
                              {"hd_mean", m.hd_mean},
                              {"hd_sd", m.hd_sd},
                              {"detection_failures", m.detection_failures}});
    json j{{"models", models},
           {"n_complete", study.n_complete},
           {"n_dropped_incomplete", study.n_dropped_incomplete},
           {"n_dropped_missing_hd", study.n_dropped_missing_hd},
           {"friedman_dsc", test_to_json(study.friedman_dsc)},
           {"friedman_hd", test_to_json(study.friedman_hd)},
           {"cochran_detection", test_to_json(study.cochran_detection)},
           {"nemenyi_dsc", matrix_to_json(study.nemenyi_dsc)},
           {"nemenyi_hd", matrix_to_json(study.nemenyi_hd)},
           {"mcnemar_detection", matrix_to_json(study.mcnemar_detection)}};
    return j.dump(2);
}

StudyResult study_from_json(const std::string& json_text) {
    json j = json::parse(json_text);
    StudyResult s;
    for (const auto& jm : j.at("models")) {
        ModelSummary m;
        m.model_id = jm.at("model_id");
        m.n_cases = jm.at("n_cases");
        m.dsc_mean = jm.at("dsc_mean");
        m.dsc_sd = jm.at("dsc_sd");
        m.hd_mean = jm.at("hd_mean");
        m.hd_sd = jm.at("hd_sd");
        m.detection_failures = jm.at("detection_failures");
        s.models.push_back(std::move(m));
    }
    s.n_complete = j.at("n_complete");
    s.n_dropped_incomplete = j.at("n_dropped_incomplete");
    s.n_dropped_missing_hd = j.at("n_dropped_missing_hd");
    s.friedman_dsc = test_from_json(j.at("friedman_dsc"));
    s.friedman_hd = test_from_json(j.at("friedman_hd"));
    s.cochran_detection = test_from_json(j.at("cochran_detection"));
    s.nemenyi_dsc = matrix_from_json(j.at("nemenyi_dsc"));
    s.nemenyi_hd = matrix_from_json(j.at("nemenyi_hd"));
    s.mcnemar_detection = matrix_from_json(j.at("mcnemar_detection"));
    return s;
}

void save_study(const StudyResult& study, const std::filesystem::path& json_path) {
    std::ofstream out(json_path);
    if (!out) throw Error("cannot write study file: " + json_path.string());
    out << study_to_json(study) << '\n';
}

StudyResult load_study(const std::filesystem::path& json_path) {
    std::ifstream in(json_path);
    if (!in) throw Error("cannot open study file: " + json_path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return study_from_json(ss.str());
}

}  // namespace panceval
