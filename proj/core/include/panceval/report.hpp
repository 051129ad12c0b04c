#pragma once

// Rendering of study results: 3-decimal p-values with "< 0.001" flooring,
// Table-1-style summary and Table-2-style pairwise tables, and a
// machine-readable JSON serialization.

#include <string>

#include "panceval/stats.hpp"

namespace panceval {

// "< 0.001" below 0.0005, else three decimals.
std::string format_p(double p);

// Metric rows x model columns with the omnibus p-value column.
std::string render_summary_table(const StudyResult& study);

// Pairwise post-hoc p-values, one column per model pair.
std::string render_pairwise_table(const StudyResult& study);

std::string study_to_json(const StudyResult& study);
StudyResult study_from_json(const std::string& json_text);

void save_study(const StudyResult& study, const std::filesystem::path& json_path);
StudyResult load_study(const std::filesystem::path& json_path);

}  // namespace panceval
