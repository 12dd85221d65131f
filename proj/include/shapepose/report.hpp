#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "shapepose/metrics.hpp"

namespace shapepose {

struct EvalRow {
  int scene_id = 0;
  int frame_id = 0;
  int gt_index = 0;
  int obj_id = 0;
  std::string prediction_id;
  bool ok = false;
  std::string error;

  double add_sb = 0.0;
  double gt_diameter = 0.0;
  double pred_diameter = 0.0;
  /// One flag per configured ADD-SB threshold.
  std::vector<bool> recall_hits;
  double dre = 0.0;
  bool dre_hit = false;
  double cd_norm = 0.0;
  std::optional<double> occlusion;
  std::optional<OcclusionBin> occlusion_bin;
  std::optional<double> selection_score;
  /// Set by the outlier cap; the row stays in the CSV but not in aggregates.
  bool excluded = false;
};

struct EvalAggregate {
  std::string kind;  // "dataset", "object" or "occlusion_bin"
  std::string group;
  std::size_t count = 0;
  double mean_add_sb = 0.0;
  double median_add_sb = 0.0;
  double mean_cd_norm = 0.0;
  double median_cd_norm = 0.0;
  double mean_dre = 0.0;
  std::vector<double> recalls;
  double dre_recall = 0.0;

  bool operator==(const EvalAggregate&) const = default;
};

struct EvalReport {
  std::string dataset;
  std::vector<double> thresholds{0.10, 0.05};
  double dre_threshold = 0.05;
  std::vector<EvalRow> rows;
  std::vector<EvalAggregate> aggregates;
  /// Rows with an amodal mask whose occlusion exceeds the last bin.
  std::size_t occlusion_out_of_range = 0;
};

/// Aggregates over ok, non-excluded rows: the whole dataset, each object and
/// each occlusion bin (in that order). Medians take the lower-middle element.
std::vector<EvalAggregate> aggregate_eval(const EvalReport& r);
std::size_t count_out_of_range(const EvalReport& r);

struct SelectionRow {
  int scene_id = 0;
  int frame_id = 0;
  int gt_index = 0;
  int obj_id = 0;
  bool ok = false;
  std::string error;

  std::size_t candidates = 0;
  std::size_t selected = 0;
  std::size_t oracle = 0;
  std::vector<double> scores;
  double first_add_sb = 0.0;
  double first_cd_norm = 0.0;
  double selected_add_sb = 0.0;
  double selected_cd_norm = 0.0;
  double oracle_add_sb = 0.0;
  double oracle_cd_norm = 0.0;
  double worst_add_sb = 0.0;
  double worst_cd_norm = 0.0;
};

struct SelectionAggregate {
  std::string column;
  double mean = 0.0;
  double median = 0.0;

  bool operator==(const SelectionAggregate&) const = default;
};

struct SelectionReport {
  std::string mode;
  std::string oracle_criterion;
  std::vector<SelectionRow> rows;
  std::size_t count = 0;
  std::vector<SelectionAggregate> aggregates;
};

std::vector<SelectionAggregate> aggregate_selection(const SelectionReport& r);

struct OcclusionRow {
  int scene_id = 0;
  int frame_id = 0;
  int gt_index = 0;
  int obj_id = 0;
  std::size_t visible_pixels = 0;
  std::size_t amodal_pixels = 0;
  std::optional<double> fraction;
  std::optional<OcclusionBin> bin;
  std::string note;
};

struct OcclusionReport {
  std::vector<OcclusionRow> rows;
  /// Indexed by OcclusionBin, including OutOfRange.
  std::array<std::size_t, 5> bin_counts{};
  std::size_t unavailable = 0;
};

/// Writes instances.csv, aggregates.json, occlusion_add_sb.svg, occlusion_cd_norm.svg.
/// Throws IoError when the directory cannot be written and MalformedRecord when
/// the stored aggregates disagree with a recomputation from the rows.
void emit_report(const EvalReport& r, const std::filesystem::path& dir);
/// Writes selection.csv and selection_aggregates.json.
void emit_report(const SelectionReport& r, const std::filesystem::path& dir);
/// Writes occlusion.csv, occlusion_bins.json and occlusion_bins.svg.
void emit_report(const OcclusionReport& r, const std::filesystem::path& dir);

/// Column order of instances.csv.
std::vector<std::string> eval_csv_header(const std::vector<double>& thresholds);

/// "%.17g", or an empty field for absent values.
std::string format_number(double v);

}  // namespace shapepose
