// Batch CLI: harmonize -> evaluate -> stats, plus phantom study generation
// and cohort balancing. All commands are non-interactive and re-runnable;
// outputs are written to a temp name and atomically renamed.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include "panceval/cohort.hpp"
#include "panceval/harmonize.hpp"
#include "panceval/metrics.hpp"
#include "panceval/nifti.hpp"
#include "panceval/parallel.hpp"
#include "panceval/phantom.hpp"
#include "panceval/report.hpp"
#include "panceval/stats.hpp"

namespace fs = std::filesystem;
using namespace panceval;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string manifest_path;
    std::string recipe_path;
    std::string out_dir = "out";
    unsigned jobs = 0;  // 0 = hardware concurrency
    bool strict = false;
    std::uint64_t seed = 0;
    std::string hd_policy = "impute-diagonal";
    std::size_t min_voxels = 0;
    LabelCode pancreas_code = 44;
    double rel_tol = kGridRelTol;
    bool auto_resample = false;
};

// Config file: one "key = value" per line, '#' comments. CLI flags override
// config values; environment variables (PANCEVAL_MANIFEST, PANCEVAL_RECIPE,
// PANCEVAL_OUT) override path entries only.
void apply_config(CommonOpts& o) {
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw Error("cannot open config file: " + o.config_path);
        std::string raw;
        while (std::getline(in, raw)) {
            auto hash = raw.find('#');
            if (hash != std::string::npos) raw.erase(hash);
            std::istringstream ls(raw);
            std::string key, eq, value;
            if (!(ls >> key >> eq >> value) || eq != "=") continue;
            if (key == "manifest" && o.manifest_path.empty()) o.manifest_path = value;
            else if (key == "recipe" && o.recipe_path.empty()) o.recipe_path = value;
            else if (key == "out" && o.out_dir == "out") o.out_dir = value;
            else if (key == "jobs" && o.jobs == 0) o.jobs = std::stoul(value);
            else if (key == "seed" && o.seed == 0) o.seed = std::stoull(value);
            else if (key == "hd_policy") o.hd_policy = value;
            else if (key == "min_voxels") o.min_voxels = std::stoul(value);
            else if (key == "pancreas_code") o.pancreas_code = std::stoul(value);
            else if (key == "rel_tol") o.rel_tol = std::stod(value);
            else if (key == "strict") o.strict = value == "1" || value == "true";
            else if (key == "auto_resample") o.auto_resample = value == "1" || value == "true";
        }
    }
    if (const char* v = std::getenv("PANCEVAL_MANIFEST")) o.manifest_path = v;
    if (const char* v = std::getenv("PANCEVAL_RECIPE")) o.recipe_path = v;
    if (const char* v = std::getenv("PANCEVAL_OUT")) o.out_dir = v;
}

EmptyMaskPolicy parse_policy(const std::string& s) {
    if (s == "missing") return EmptyMaskPolicy::Missing;
    if (s == "impute-diagonal") return EmptyMaskPolicy::ImputeDiagonal;
    throw Error("unknown --hd-policy: " + s + " (expected missing|impute-diagonal)");
}

void atomic_write_text(const fs::path& path, const std::string& text) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw Error("cannot write " + tmp.string());
        out << text;
    }
    fs::rename(tmp, path);
}

void atomic_write_volume(const LabelVolume& vol, const fs::path& path) {
    // Keep the real extension on the temp name so gzip detection holds.
    const fs::path tmp = path.parent_path() / (".tmp." + path.filename().string());
    write_label_volume(vol, tmp);
    fs::rename(tmp, path);
}

std::mutex log_mutex;

int cmd_harmonize(const CommonOpts& o) {
    const Manifest manifest = Manifest::load(o.manifest_path);
    if (std::find(manifest.path_columns.begin(), manifest.path_columns.end(), "panorama") ==
            manifest.path_columns.end() ||
        std::find(manifest.path_columns.begin(), manifest.path_columns.end(), "ts") ==
            manifest.path_columns.end())
        throw Error("harmonize manifest needs 'panorama' and 'ts' path columns");

    const Recipe recipe = Recipe::load(o.recipe_path);
    fs::create_directories(o.out_dir);

    std::vector<std::string> failures(manifest.cases.size());
    parallel_for(manifest.cases.size(), o.jobs, [&](std::size_t i) {
        const CaseRecord& rec = manifest.cases[i];
        try {
            const LabelVolume panorama = read_label_volume(rec.paths.at("panorama")).volume;
            const LabelVolume ts = read_label_volume(rec.paths.at("ts")).volume;

            const LabelVolume ref8 = build_ref8(panorama, ts, recipe, o.rel_tol);
            const LabelVolume all45 = build_all45(panorama, ts, recipe, o.rel_tol);
            atomic_write_volume(ref8, fs::path(o.out_dir) / (rec.case_id + "_ref8.nii.gz"));
            atomic_write_volume(all45, fs::path(o.out_dir) / (rec.case_id + "_all45.nii.gz"));

            // Rule-application counts for the audit log.
            std::size_t aorta_overlap = 0, pan_voxels = 0;
            const auto& pv = panorama.voxels();
            const auto& tv = ts.voxels();
            for (std::size_t v = 0; v < pv.size(); ++v) {
                if (pv[v] != 0) ++pan_voxels;
                if (pv[v] == 3 && tv[v] == recipe.aorta_mask_ts_code()) ++aorta_overlap;
            }
            std::lock_guard lock(log_mutex);
            std::cout << rec.case_id << ": ok, panorama_voxels=" << pan_voxels
                      << " aorta_masked=" << aorta_overlap << '\n';
        } catch (const std::exception& e) {
            failures[i] = e.what();
            std::lock_guard lock(log_mutex);
            std::cerr << rec.case_id << ": FAILED: " << e.what() << '\n';
        }
    });

    std::size_t n_failed = 0;
    for (const auto& f : failures)
        if (!f.empty()) ++n_failed;
    std::cout << "harmonized " << manifest.cases.size() - n_failed << "/"
              << manifest.cases.size() << " cases\n";
    return n_failed > 0 && o.strict ? 1 : 0;
}

int cmd_evaluate(const CommonOpts& o) {
    const Manifest manifest = Manifest::load(o.manifest_path);
    if (std::find(manifest.path_columns.begin(), manifest.path_columns.end(), "ref") ==
        manifest.path_columns.end())
        throw Error("evaluate manifest needs a 'ref' path column");
    std::vector<std::string> models;
    for (const auto& col : manifest.path_columns)
        if (col != "ref") models.push_back(col);
    if (models.empty()) throw Error("evaluate manifest needs at least one prediction column");

    EvaluateOptions opts;
    opts.policy = parse_policy(o.hd_policy);
    opts.min_voxels = o.min_voxels;
    opts.rel_tol = o.rel_tol;
    opts.auto_resample = o.auto_resample;

    std::vector<std::vector<CaseMetrics>> per_case(manifest.cases.size());
    std::vector<std::string> failures(manifest.cases.size());
    parallel_for(manifest.cases.size(), o.jobs, [&](std::size_t i) {
        const CaseRecord& rec = manifest.cases[i];
        try {
            const LabelVolume ref = read_label_volume(rec.paths.at("ref")).volume;
            for (const auto& model : models) {
                const LabelVolume pred = read_label_volume(rec.paths.at(model)).volume;
                CaseMetrics m = evaluate_case(ref, pred, o.pancreas_code, opts);
                m.case_id = rec.case_id;
                m.model_id = model;
                per_case[i].push_back(std::move(m));
            }
        } catch (const std::exception& e) {
            failures[i] = e.what();
            std::lock_guard lock(log_mutex);
            std::cerr << rec.case_id << ": FAILED: " << e.what() << '\n';
        }
    });

    // Aggregate in manifest order regardless of completion order.
    std::vector<CaseMetrics> rows;
    std::size_t n_failed = 0;
    for (std::size_t i = 0; i < per_case.size(); ++i) {
        if (!failures[i].empty()) ++n_failed;
        for (auto& m : per_case[i]) rows.push_back(std::move(m));
    }

    fs::create_directories(o.out_dir);
    const fs::path metrics_path = fs::path(o.out_dir) / "metrics.tsv";
    const fs::path tmp = metrics_path.string() + ".tmp";
    write_metrics(rows, tmp);
    fs::rename(tmp, metrics_path);
    std::cout << "wrote " << rows.size() << " metric rows to " << metrics_path.string() << '\n';

    if (!rows.empty() && models.size() >= 2) {
        const StudyResult study = run_study(rows);
        std::cout << '\n' << render_summary_table(study);
    }
    return n_failed > 0 && o.strict ? 1 : 0;
}

int cmd_stats(const CommonOpts& o, const std::string& metrics_path) {
    const std::vector<CaseMetrics> rows = read_metrics(metrics_path);
    const StudyResult study = run_study(rows);

    fs::create_directories(o.out_dir);
    const fs::path json_path = fs::path(o.out_dir) / "study.json";
    atomic_write_text(json_path, study_to_json(study) + "\n");
    const std::string table1 = render_summary_table(study);
    const std::string table2 = render_pairwise_table(study);
    atomic_write_text(fs::path(o.out_dir) / "table1.txt", table1);
    atomic_write_text(fs::path(o.out_dir) / "table2.txt", table2);

    std::cout << table1 << '\n' << table2;
    if (study.n_dropped_incomplete > 0)
        std::cout << "\ndropped " << study.n_dropped_incomplete << " incomplete cases\n";
    if (study.n_dropped_missing_hd > 0)
        std::cout << "dropped " << study.n_dropped_missing_hd << " cases with missing HD\n";
    return 0;
}

int cmd_phantom(const CommonOpts& o, const std::string& spec_path) {
    const StudySpec spec = StudySpec::load(spec_path);
    const Manifest manifest = generate_study(spec, o.out_dir);
    std::cout << "generated " << manifest.cases.size() << " cases with "
              << spec.models.size() << " prediction sets under " << o.out_dir << '\n';
    return 0;
}

int cmd_cohort(const CommonOpts& o, const std::string& out_path) {
    Manifest manifest = Manifest::load(o.manifest_path);
    manifest.cases = balance_cohort(manifest.cases, o.seed);
    const fs::path out = out_path.empty()
        ? fs::path(o.manifest_path).replace_extension(".balanced.tsv")
        : fs::path(out_path);
    const fs::path tmp = out.string() + ".tmp";
    manifest.save(tmp);
    fs::rename(tmp, out);
    std::size_t pdac = 0;
    for (const auto& c : manifest.cases)
        if (c.pdac) ++pdac;
    std::cout << "balanced cohort: " << manifest.cases.size() << " cases (" << pdac
              << " PDAC, " << manifest.cases.size() - pdac << " non-PDAC) -> "
              << out.string() << '\n';
    return 0;
}

int cmd_report(const std::string& study_path) {
    const StudyResult study = load_study(study_path);
    std::cout << render_summary_table(study) << '\n' << render_pairwise_table(study);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pancreas segmentation evaluation pipeline"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string metrics_path, spec_path, study_path, cohort_out;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", o.config_path, "key = value config file");
        cmd->add_option("--out", o.out_dir, "output directory");
        cmd->add_option("--jobs", o.jobs, "worker threads (0 = all cores)");
        cmd->add_flag("--strict", o.strict, "nonzero exit on any case failure");
    };

    auto* harmonize = app.add_subcommand("harmonize", "build REF_8 / ALL_45 label volumes");
    harmonize->add_option("--manifest", o.manifest_path, "case manifest (panorama, ts columns)")
        ->required();
    harmonize->add_option("--recipe", o.recipe_path, "harmonization recipe file")->required();
    add_common(harmonize);

    auto* evaluate = app.add_subcommand("evaluate", "compute per-case DSC / HD / detection");
    evaluate->add_option("--manifest", o.manifest_path, "case manifest (ref + model columns)")
        ->required();
    evaluate->add_option("--hd-policy", o.hd_policy, "missing|impute-diagonal");
    evaluate->add_option("--min-voxels", o.min_voxels, "detection threshold");
    evaluate->add_option("--code", o.pancreas_code, "target label code (default 44)");
    evaluate->add_option("--rel-tol", o.rel_tol, "grid comparison tolerance");
    evaluate->add_flag("--auto-resample", o.auto_resample,
                       "resample predictions onto the reference grid");
    add_common(evaluate);

    auto* stats = app.add_subcommand("stats", "run the statistical battery on a metrics table");
    stats->add_option("--metrics", metrics_path, "metrics.tsv from evaluate")->required();
    add_common(stats);

    auto* phantom = app.add_subcommand("phantom", "generate a synthetic phantom study");
    phantom->add_option("--spec", spec_path, "phantom study spec file")->required();
    add_common(phantom);

    auto* cohort = app.add_subcommand("cohort", "balance PDAC / non-PDAC classes");
    cohort->add_option("--manifest", o.manifest_path, "case manifest")->required();
    cohort->add_option("--seed", o.seed, "sampling seed")->required();
    cohort->add_option("--out-manifest", cohort_out, "balanced manifest path");
    add_common(cohort);

    auto* report = app.add_subcommand("report", "render tables from a study.json");
    report->add_option("--study", study_path, "study.json from stats")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        apply_config(o);
        if (harmonize->parsed()) return cmd_harmonize(o);
        if (evaluate->parsed()) return cmd_evaluate(o);
        if (stats->parsed()) return cmd_stats(o, metrics_path);
        if (phantom->parsed()) return cmd_phantom(o, spec_path);
        if (cohort->parsed()) return cmd_cohort(o, cohort_out);
        if (report->parsed()) return cmd_report(study_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
