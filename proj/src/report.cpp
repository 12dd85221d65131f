#include "shapepose/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "shapepose/errors.hpp"
#include "shapepose/robust_stats.hpp"

namespace shapepose {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr std::array<OcclusionBin, 4> kPlottedBins = {OcclusionBin::Visible, OcclusionBin::Low,
                                                      OcclusionBin::Medium, OcclusionBin::High};

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorKind::IoError, "cannot create output directory " + dir.string());
  }
}

ordered_json number_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

EvalAggregate summarize(const std::string& kind, const std::string& group,
                        const std::vector<const EvalRow*>& rows, const EvalReport& r) {
  EvalAggregate a;
  a.kind = kind;
  a.group = group;
  a.count = rows.size();
  a.recalls.assign(r.thresholds.size(), std::nan(""));
  if (rows.empty()) {
    a.mean_add_sb = a.median_add_sb = a.mean_cd_norm = a.median_cd_norm = a.mean_dre =
        a.dre_recall = std::nan("");
    return a;
  }
  std::vector<double> add, cd, de;
  std::vector<AddSbSample> samples;
  for (const EvalRow* row : rows) {
    add.push_back(row->add_sb);
    cd.push_back(row->cd_norm);
    de.push_back(row->dre);
    samples.push_back({row->add_sb, row->gt_diameter});
  }
  a.mean_add_sb = stats::mean(add);
  a.median_add_sb = stats::lower_median(add);
  a.mean_cd_norm = stats::mean(cd);
  a.median_cd_norm = stats::lower_median(cd);
  a.mean_dre = stats::mean(de);
  for (std::size_t k = 0; k < r.thresholds.size(); ++k) {
    a.recalls[k] = add_sb_recall(samples, r.thresholds[k]);
  }
  a.dre_recall = dre_recall(de, r.dre_threshold);
  return a;
}

bool same_number(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

bool same_aggregate(const EvalAggregate& a, const EvalAggregate& b) {
  if (a.kind != b.kind || a.group != b.group || a.count != b.count) return false;
  if (a.recalls.size() != b.recalls.size()) return false;
  for (std::size_t i = 0; i < a.recalls.size(); ++i) {
    if (!same_number(a.recalls[i], b.recalls[i])) return false;
  }
  return same_number(a.mean_add_sb, b.mean_add_sb) && same_number(a.median_add_sb, b.median_add_sb) &&
         same_number(a.mean_cd_norm, b.mean_cd_norm) &&
         same_number(a.median_cd_norm, b.median_cd_norm) && same_number(a.mean_dre, b.mean_dre) &&
         same_number(a.dre_recall, b.dre_recall);
}

/// Vertical bar chart with one bar per label; NaN values draw no bar.
std::string bar_chart_svg(const std::string& title, const std::string& y_label,
                          const std::vector<std::string>& labels, const std::vector<double>& values) {
  const int width = 480, height = 320, left = 64, right = 16, top = 40, bottom = 48;
  const int plot_w = width - left - right, plot_h = height - top - bottom;
  double vmax = 0.0;
  for (double v : values) {
    if (std::isfinite(v)) vmax = std::max(vmax, v);
  }
  if (vmax <= 0.0) vmax = 1.0;

  std::ostringstream os;
  char buf[256];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"14\">"
     << title << "</text>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
     << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
     << top + plot_h << "\" stroke=\"black\"/>\n";
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%d\" y=\"%d\" text-anchor=\"end\" font-family=\"sans-serif\" "
                "font-size=\"10\">%.4g</text>\n",
                left - 4, top + 4, vmax);
  os << buf;
  os << "<text x=\"14\" y=\"" << top + plot_h / 2
     << "\" font-family=\"sans-serif\" font-size=\"11\" transform=\"rotate(-90 14 "
     << top + plot_h / 2 << ")\" text-anchor=\"middle\">" << y_label << "</text>\n";

  const std::size_t n = labels.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double slot = static_cast<double>(plot_w) / std::max<std::size_t>(n, 1);
    const double x = left + slot * i + slot * 0.15;
    const double w = slot * 0.7;
    if (i < values.size() && std::isfinite(values[i])) {
      const double h = plot_h * values[i] / vmax;
      std::snprintf(buf, sizeof(buf),
                    "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"#6a51a3\"/>\n",
                    x, top + plot_h - h, w, h);
      os << buf;
      std::snprintf(buf, sizeof(buf),
                    "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                    "font-size=\"10\">%.4g</text>\n",
                    x + w / 2, top + plot_h - h - 4, values[i]);
      os << buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.2f\" y=\"%d\" text-anchor=\"middle\" font-family=\"sans-serif\" "
                  "font-size=\"11\">",
                  x + w / 2, top + plot_h + 18);
    os << buf << labels[i] << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<std::string> bin_labels() {
  std::vector<std::string> out;
  for (auto b : kPlottedBins) out.push_back(occlusion_bin_label(b));
  return out;
}

}  // namespace

std::string format_number(double v) {
  if (!std::isfinite(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<EvalAggregate> aggregate_eval(const EvalReport& r) {
  std::vector<const EvalRow*> all;
  std::map<int, std::vector<const EvalRow*>> by_object;
  std::map<int, std::vector<const EvalRow*>> by_bin;
  for (const auto& row : r.rows) {
    if (!row.ok || row.excluded) continue;
    all.push_back(&row);
    by_object[row.obj_id].push_back(&row);
    if (row.occlusion_bin && *row.occlusion_bin != OcclusionBin::OutOfRange) {
      by_bin[static_cast<int>(*row.occlusion_bin)].push_back(&row);
    }
  }
  std::vector<EvalAggregate> out;
  out.push_back(summarize("dataset", r.dataset, all, r));
  for (const auto& [obj, rows] : by_object) {
    out.push_back(summarize("object", std::to_string(obj), rows, r));
  }
  for (auto b : kPlottedBins) {
    out.push_back(summarize("occlusion_bin", occlusion_bin_label(b), by_bin[static_cast<int>(b)], r));
  }
  return out;
}

std::size_t count_out_of_range(const EvalReport& r) {
  return static_cast<std::size_t>(std::count_if(r.rows.begin(), r.rows.end(), [](const EvalRow& row) {
    return row.ok && !row.excluded && row.occlusion_bin == OcclusionBin::OutOfRange;
  }));
}

std::vector<std::string> eval_csv_header(const std::vector<double>& thresholds) {
  std::vector<std::string> h = {"scene_id",   "frame_id",    "gt_index",      "obj_id",
                                "prediction", "status",      "add_sb",        "gt_diameter",
                                "pred_diameter"};
  for (double t : thresholds) h.push_back("recall@" + short_number(t));
  for (const char* c : {"dre", "dre_hit", "cd_norm", "occlusion", "occlusion_bin",
                        "selection_score", "excluded", "error"}) {
    h.push_back(c);
  }
  return h;
}

void emit_report(const EvalReport& r, const fs::path& dir) {
  const auto recomputed = aggregate_eval(r);
  bool consistent = recomputed.size() == r.aggregates.size();
  for (std::size_t i = 0; consistent && i < recomputed.size(); ++i) {
    consistent = same_aggregate(recomputed[i], r.aggregates[i]);
  }
  if (!consistent || count_out_of_range(r) != r.occlusion_out_of_range) {
    throw Error(ErrorKind::MalformedRecord, "report aggregates disagree with their rows");
  }
  prepare_dir(dir);

  std::ostringstream csv;
  const auto header = eval_csv_header(r.thresholds);
  for (std::size_t i = 0; i < header.size(); ++i) csv << (i ? "," : "") << header[i];
  csv << '\n';
  for (const auto& row : r.rows) {
    std::vector<std::string> f = {std::to_string(row.scene_id), std::to_string(row.frame_id),
                                  std::to_string(row.gt_index), std::to_string(row.obj_id),
                                  csv_field(row.prediction_id), row.ok ? "ok" : "error"};
    if (row.ok) {
      f.push_back(format_number(row.add_sb));
      f.push_back(format_number(row.gt_diameter));
      f.push_back(format_number(row.pred_diameter));
      for (std::size_t k = 0; k < r.thresholds.size(); ++k) {
        f.push_back(k < row.recall_hits.size() && row.recall_hits[k] ? "1" : "0");
      }
      f.push_back(format_number(row.dre));
      f.push_back(row.dre_hit ? "1" : "0");
      f.push_back(format_number(row.cd_norm));
    } else {
      for (std::size_t k = 0; k < 3 + r.thresholds.size() + 3; ++k) f.emplace_back();
    }
    f.push_back(opt_number(row.occlusion));
    f.push_back(row.occlusion_bin ? occlusion_bin_label(*row.occlusion_bin) : "");
    f.push_back(opt_number(row.selection_score));
    f.push_back(row.excluded ? "1" : "0");
    f.push_back(csv_field(row.error));
    for (std::size_t i = 0; i < f.size(); ++i) csv << (i ? "," : "") << f[i];
    csv << '\n';
  }
  write_file(dir / "instances.csv", csv.str());

  ordered_json j;
  j["dataset"] = r.dataset;
  j["thresholds"] = r.thresholds;
  j["dre_threshold"] = r.dre_threshold;
  j["instances"] = r.rows.size();
  j["errors"] = std::count_if(r.rows.begin(), r.rows.end(), [](const EvalRow& x) { return !x.ok; });
  j["excluded"] =
      std::count_if(r.rows.begin(), r.rows.end(), [](const EvalRow& x) { return x.excluded; });
  j["occlusion_out_of_range"] = r.occlusion_out_of_range;
  ordered_json groups = ordered_json::array();
  for (const auto& a : r.aggregates) {
    ordered_json g;
    g["kind"] = a.kind;
    g["group"] = a.group;
    g["count"] = a.count;
    g["mean_add_sb"] = number_or_null(a.mean_add_sb);
    g["median_add_sb"] = number_or_null(a.median_add_sb);
    g["mean_cd_norm"] = number_or_null(a.mean_cd_norm);
    g["median_cd_norm"] = number_or_null(a.median_cd_norm);
    g["mean_dre"] = number_or_null(a.mean_dre);
    ordered_json rec = ordered_json::object();
    for (std::size_t k = 0; k < r.thresholds.size(); ++k) {
      rec["add_sb@" + short_number(r.thresholds[k])] = number_or_null(a.recalls[k]);
    }
    g["recall"] = rec;
    g["dre@" + short_number(r.dre_threshold)] = number_or_null(a.dre_recall);
    groups.push_back(g);
  }
  j["groups"] = groups;
  write_file(dir / "aggregates.json", j.dump(2) + "\n");

  std::vector<double> add_bins, cd_bins;
  for (const auto& a : r.aggregates) {
    if (a.kind != "occlusion_bin") continue;
    add_bins.push_back(a.mean_add_sb);
    cd_bins.push_back(a.mean_cd_norm);
  }
  write_file(dir / "occlusion_add_sb.svg",
             bar_chart_svg("ADD-SB by occlusion", "mean ADD-SB [m]", bin_labels(), add_bins));
  write_file(dir / "occlusion_cd_norm.svg",
             bar_chart_svg("Normalized Chamfer by occlusion", "mean CD / diameter", bin_labels(),
                           cd_bins));
}

std::vector<SelectionAggregate> aggregate_selection(const SelectionReport& r) {
  struct Column {
    const char* name;
    double SelectionRow::*field;
  };
  static const Column columns[] = {
      {"first_add_sb", &SelectionRow::first_add_sb},
      {"first_cd_norm", &SelectionRow::first_cd_norm},
      {"selected_add_sb", &SelectionRow::selected_add_sb},
      {"selected_cd_norm", &SelectionRow::selected_cd_norm},
      {"oracle_add_sb", &SelectionRow::oracle_add_sb},
      {"oracle_cd_norm", &SelectionRow::oracle_cd_norm},
      {"worst_add_sb", &SelectionRow::worst_add_sb},
      {"worst_cd_norm", &SelectionRow::worst_cd_norm},
  };
  std::vector<SelectionAggregate> out;
  for (const auto& c : columns) {
    std::vector<double> v;
    for (const auto& row : r.rows) {
      if (row.ok) v.push_back(row.*(c.field));
    }
    SelectionAggregate a;
    a.column = c.name;
    a.mean = v.empty() ? std::nan("") : stats::mean(v);
    a.median = v.empty() ? std::nan("") : stats::lower_median(v);
    out.push_back(a);
  }
  return out;
}

void emit_report(const SelectionReport& r, const fs::path& dir) {
  const auto recomputed = aggregate_selection(r);
  bool consistent = recomputed.size() == r.aggregates.size();
  for (std::size_t i = 0; consistent && i < recomputed.size(); ++i) {
    consistent = recomputed[i].column == r.aggregates[i].column &&
                 same_number(recomputed[i].mean, r.aggregates[i].mean) &&
                 same_number(recomputed[i].median, r.aggregates[i].median);
  }
  if (!consistent) {
    throw Error(ErrorKind::MalformedRecord, "selection aggregates disagree with their rows");
  }
  prepare_dir(dir);

  std::ostringstream csv;
  csv << "scene_id,frame_id,gt_index,obj_id,status,candidates,selected,oracle,scores,"
         "first_add_sb,first_cd_norm,selected_add_sb,selected_cd_norm,oracle_add_sb,"
         "oracle_cd_norm,worst_add_sb,worst_cd_norm,error\n";
  for (const auto& row : r.rows) {
    csv << row.scene_id << ',' << row.frame_id << ',' << row.gt_index << ',' << row.obj_id << ','
        << (row.ok ? "ok" : "error") << ',';
    if (row.ok) {
      std::string scores;
      for (std::size_t i = 0; i < row.scores.size(); ++i) {
        scores += (i ? ";" : "") + format_number(row.scores[i]);
      }
      csv << row.candidates << ',' << row.selected << ',' << row.oracle << ',' << scores << ','
          << format_number(row.first_add_sb) << ',' << format_number(row.first_cd_norm) << ','
          << format_number(row.selected_add_sb) << ',' << format_number(row.selected_cd_norm)
          << ',' << format_number(row.oracle_add_sb) << ',' << format_number(row.oracle_cd_norm)
          << ',' << format_number(row.worst_add_sb) << ',' << format_number(row.worst_cd_norm)
          << ',';
    } else {
      csv << ",,,,,,,,,,,,";
    }
    csv << csv_field(row.error) << '\n';
  }
  write_file(dir / "selection.csv", csv.str());

  ordered_json j;
  j["mode"] = r.mode;
  j["oracle_criterion"] = r.oracle_criterion;
  j["instances"] = r.rows.size();
  j["evaluated"] = r.count;
  ordered_json cols = ordered_json::object();
  for (const auto& a : r.aggregates) {
    cols[a.column] = {{"mean", number_or_null(a.mean)}, {"median", number_or_null(a.median)}};
  }
  j["columns"] = cols;
  write_file(dir / "selection_aggregates.json", j.dump(2) + "\n");
}

void emit_report(const OcclusionReport& r, const fs::path& dir) {
  prepare_dir(dir);
  std::ostringstream csv;
  csv << "scene_id,frame_id,gt_index,obj_id,visible_pixels,amodal_pixels,occlusion,"
         "occlusion_bin,note\n";
  for (const auto& row : r.rows) {
    csv << row.scene_id << ',' << row.frame_id << ',' << row.gt_index << ',' << row.obj_id << ','
        << row.visible_pixels << ',' << row.amodal_pixels << ',' << opt_number(row.fraction) << ','
        << (row.bin ? occlusion_bin_label(*row.bin) : "") << ',' << csv_field(row.note) << '\n';
  }
  write_file(dir / "occlusion.csv", csv.str());

  ordered_json j;
  j["instances"] = r.rows.size();
  j["unavailable"] = r.unavailable;
  ordered_json bins = ordered_json::object();
  for (int b = 0; b < 5; ++b) {
    bins[occlusion_bin_label(static_cast<OcclusionBin>(b))] = r.bin_counts[b];
  }
  j["bins"] = bins;
  write_file(dir / "occlusion_bins.json", j.dump(2) + "\n");

  std::vector<double> counts;
  for (auto b : kPlottedBins) counts.push_back(static_cast<double>(r.bin_counts[static_cast<int>(b)]));
  write_file(dir / "occlusion_bins.svg",
             bar_chart_svg("Instances by occlusion", "count", bin_labels(), counts));
}

}  // namespace shapepose
