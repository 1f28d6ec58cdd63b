#pragma once

#include "islab/experiment.hpp"

namespace islab {

/// Fixed-column CSV, one row per K:
/// K,epsilon,E,k_trunc,err_l2_f0,err_hm1_f1,err_h1_f0,err_l2_f1,ceiling,wall_s
std::string report_csv(const ExperimentReport& report);

/// Full-metadata JSON (lossless round trip through parse_report_json).
std::string report_json(const ExperimentReport& report);
ExperimentReport parse_report_json(const std::string& text);

/// Reparses a CSV produced by report_csv (round-trip check and the `report`
/// subcommand input path).
std::vector<ReportRow> parse_report_csv(const std::string& text);

/// Static log-log error plot with the ceiling overlay.
std::string report_svg(const ExperimentReport& report);

std::string bound_rows_csv(const BoundSuiteResult& result);

/// Writes csv/json/svg files under dir with the given stem.
void emit_report(const ExperimentReport& report, const std::string& dir,
                 const std::string& stem);

/// Byte comparison that ignores the volatile wall-clock column/fields.
bool reports_equal_modulo_timing(const std::string& csv_a, const std::string& csv_b);

}  // namespace islab
