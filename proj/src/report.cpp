// Copyright 2026 The mixsent Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mixsent/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "mixsent/errors.hpp"

namespace mixsent {

namespace fs = std::filesystem;

Json to_json(const ConfigResult& r) {
  Json runs = Json::array();
  for (const auto& run : r.runs) runs.push_back(to_json(run));
  return {{"key_hash", r.key_hash},
          {"dataset", r.dataset},
          {"dataset_index", r.dataset_index},
          {"dataset_stats", r.dataset_stats},
          {"config", to_json(r.config)},
          {"mean", r.mean},
          {"stddev", r.stddev},
          {"run_accuracies", r.run_accuracies},
          {"runs", runs}};
}

ConfigResult config_result_from_json(const Json& j) {
  try {
    ConfigResult r;
    r.key_hash = j.at("key_hash").get<std::string>();
    r.dataset = j.at("dataset").get<std::string>();
    r.dataset_index = j.at("dataset_index").get<std::size_t>();
    r.dataset_stats = j.value("dataset_stats", Json::object());
    r.config = train_config_from_json(j.at("config"));
    r.mean = j.at("mean").get<double>();
    r.stddev = j.at("stddev").get<double>();
    r.run_accuracies = j.at("run_accuracies").get<std::vector<double>>();
    for (const auto& run : j.at("runs")) r.runs.push_back(run_result_from_json(run));
    return r;
  } catch (const Json::exception& e) {
    throw ParseError(kResultFile, 0, e.what());
  }
}

void write_config_result(const fs::path& dir, const ConfigResult& result) {
  fs::create_directories(dir);
  const fs::path tmp = dir / (std::string(kResultFile) + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << to_json(result).dump(1) << "\n";
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  fs::rename(tmp, dir / kResultFile);  // a result file only ever appears complete
}

ConfigResult read_config_result(const fs::path& dir) {
  const fs::path path = dir / kResultFile;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return config_result_from_json(Json::parse(in));
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

namespace {

std::vector<fs::path> result_dirs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("results directory not found: " + dir.string());
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_directory() && fs::exists(entry.path() / kResultFile)) dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

}  // namespace

std::vector<ConfigResult> load_results(const fs::path& dir) {
  std::vector<ConfigResult> out;
  for (const auto& d : result_dirs(dir)) out.push_back(read_config_result(d));
  return out;
}

std::string format_cell(double mean, double stddev) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f±%.2f", 100.0 * mean, 100.0 * stddev);
  return buf;
}

namespace {

std::string row_label(const TrainConfig& c) {
  std::string label = (c.encoder == EncoderKind::kCnn ? "CNN " : "LSTM ") + method_name(c.method);
  char buf[64];
  if (c.is_mixup() && c.alpha != 1.0) {
    std::snprintf(buf, sizeof buf, " (alpha=%g)", c.alpha);
    label += buf;
  }
  if (!c.is_mixup() && (c.effective_dropout() != kBaselineDropout || c.effective_l2() != kBaselineL2)) {
    std::snprintf(buf, sizeof buf, " (dropout=%g, l2=%g)", c.effective_dropout(), c.effective_l2());
    label += buf;
  }
  return label;
}

std::string displayed_mean(double mean) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * mean);
  return buf;
}

// Terminal columns taken by a UTF-8 string (one per code point).
std::size_t width(const std::string& s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char ch) { return (static_cast<unsigned char>(ch) & 0xC0) != 0x80; }));
}

std::string pad(const std::string& s, std::size_t w) { return s + std::string(w > width(s) ? w - width(s) : 0, ' '); }

}  // namespace

std::vector<ReportTable> build_tables(const std::vector<ConfigResult>& results) {
  std::map<int, std::vector<const ConfigResult*>> by_regime;
  for (const auto& r : results) by_regime[static_cast<int>(r.config.regime)].push_back(&r);

  std::vector<ReportTable> tables;
  for (const auto& [regime, members] : by_regime) {
    ReportTable t;
    t.regime = regime_name(members.front()->config.regime);

    std::map<std::pair<std::size_t, std::string>, bool> columns;
    std::map<std::tuple<int, int, double, double, double>, std::string> rows;
    for (const auto* r : members) {
      columns[{r->dataset_index, r->dataset}] = true;
      const auto& c = r->config;
      const double alpha = c.is_mixup() ? c.alpha : 1.0;
      rows[{static_cast<int>(c.encoder), static_cast<int>(c.method), alpha, -c.effective_dropout(), -c.effective_l2()}] =
          row_label(c);
    }
    for (const auto& [key, _] : columns) t.datasets.push_back(key.second);
    for (const auto& [key, label] : rows) t.rows.push_back(label);
    t.cells.assign(t.rows.size(), std::vector<ReportCell>(t.datasets.size()));

    for (const auto* r : members) {
      const auto row = static_cast<std::size_t>(std::find(t.rows.begin(), t.rows.end(), row_label(r->config)) -
                                                t.rows.begin());
      const auto col = static_cast<std::size_t>(
          std::find(t.datasets.begin(), t.datasets.end(), r->dataset) - t.datasets.begin());
      ReportCell& cell = t.cells[row][col];
      if (cell.present)
        throw DataError("two results for " + t.rows[row] + " on " + r->dataset + " under " + t.regime);
      cell.present = true;
      cell.mean = r->mean;
      cell.stddev = r->stddev;
      cell.text = format_cell(r->mean, r->stddev);
    }

    // best per column, compared at the displayed precision so visual ties all win
    for (std::size_t c = 0; c < t.datasets.size(); ++c) {
      double best = -1.0;
      for (std::size_t r = 0; r < t.rows.size(); ++r)
        if (t.cells[r][c].present) best = std::max(best, std::stod(displayed_mean(t.cells[r][c].mean)));
      for (std::size_t r = 0; r < t.rows.size(); ++r) {
        auto& cell = t.cells[r][c];
        if (cell.present && std::stod(displayed_mean(cell.mean)) == best) cell.best = true;
      }
    }
    tables.push_back(std::move(t));
  }
  return tables;
}

std::string render_text(const std::vector<ReportTable>& tables) {
  std::ostringstream os;
  if (tables.empty()) {
    os << "no results\n";
    return os.str();
  }
  for (std::size_t k = 0; k < tables.size(); ++k) {
    const auto& t = tables[k];
    if (k) os << "\n";
    os << "Regime: " << t.regime << "  (accuracy %, mean±std over runs; * = best in column)\n";
    std::size_t label_w = std::string("Model").size();
    for (const auto& r : t.rows) label_w = std::max(label_w, width(r));
    std::vector<std::size_t> col_w(t.datasets.size());
    for (std::size_t c = 0; c < t.datasets.size(); ++c) {
      col_w[c] = width(t.datasets[c]);
      for (std::size_t r = 0; r < t.rows.size(); ++r)
        col_w[c] = std::max(col_w[c], width(t.cells[r][c].text) + 1);
    }
    os << pad("Model", label_w);
    for (std::size_t c = 0; c < t.datasets.size(); ++c) os << "  " << pad(t.datasets[c], col_w[c]);
    os << "\n";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      os << pad(t.rows[r], label_w);
      for (std::size_t c = 0; c < t.datasets.size(); ++c) {
        const auto& cell = t.cells[r][c];
        const std::string text = cell.present ? cell.text + (cell.best ? "*" : "") : "-";
        os << "  " << pad(text, col_w[c]);
      }
      os << "\n";
    }
  }
  return os.str();
}

std::string render_csv(const ReportTable& t) {
  std::ostringstream os;
  os << "model";
  for (const auto& d : t.datasets) os << "," << d;
  os << "\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    os << t.rows[r];
    for (const auto& cell : t.cells[r]) os << "," << (cell.present ? cell.text + (cell.best ? "*" : "") : "");
    os << "\n";
  }
  return os.str();
}

std::string curves_csv(const ConfigResult& result) {
  std::ostringstream os;
  os << "step,train_ce,test_ce\n";
  if (result.runs.empty()) return os.str();
  const auto& steps = result.runs.front().curve_steps;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    double train = 0.0, test = 0.0;
    for (const auto& run : result.runs) {
      if (run.curve_steps.size() != steps.size()) throw DataError("runs of one config disagree on curve length");
      train += run.train_ce[i];
      test += run.test_ce_curve[i];
    }
    const double n = static_cast<double>(result.runs.size());
    char buf[96];
    std::snprintf(buf, sizeof buf, "%zu,%.10g,%.10g\n", steps[i], train / n, test / n);
    os << buf;
  }
  return os.str();
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

std::vector<ReportTable> emit_report(const fs::path& results_dir) {
  const auto dirs = result_dirs(results_dir);
  std::vector<ConfigResult> results;
  for (const auto& d : dirs) results.push_back(read_config_result(d));
  for (std::size_t i = 0; i < dirs.size(); ++i) write_text(dirs[i] / kCurvesFile, curves_csv(results[i]));

  auto tables = build_tables(results);
  write_text(results_dir / "report.txt", render_text(tables));
  for (const auto& t : tables) write_text(results_dir / ("report_" + t.regime + ".csv"), render_csv(t));
  return tables;
}

}  // namespace mixsent
