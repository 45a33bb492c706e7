// Copyright 2026 The uralprobe Authors.
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

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "uralprobe/runner.hpp"

namespace uralprobe {
namespace {

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string format_cell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

// Commas would break the unquoted CSV.
std::string csv_field(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  return s;
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::string results_csv_header() {
  return "fingerprint,task_id,language,model,pooling,layers,metric,value,"
         "majority_baseline,epochs,timestamp";
}

Report emit_report(std::vector<ResultRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.fingerprint, a.task_id) < std::tie(b.fingerprint, b.task_id);
  });

  Report report;
  std::ostringstream csv;
  csv << results_csv_header() << '\n';
  for (const ResultRow& r : rows) {
    csv << csv_field(r.fingerprint) << ',' << csv_field(r.task_id) << ','
        << csv_field(r.language) << ',' << csv_field(r.model) << ','
        << csv_field(r.pooling) << ',' << csv_field(r.layers) << ','
        << csv_field(r.metric) << ',' << format_double(r.value) << ','
        << format_double(r.majority_baseline) << ',' << r.epochs << ','
        << csv_field(r.timestamp) << '\n';
  }
  report.csv = csv.str();

  // (metric, pooling, layers) -> language -> model -> values
  using Cells = std::map<std::string, std::map<std::string, std::vector<double>>>;
  std::map<std::tuple<std::string, std::string, std::string>, Cells> tables;
  for (const ResultRow& r : rows) {
    tables[{r.metric, r.pooling, r.layers}][r.language][r.model].push_back(r.value);
  }

  std::ostringstream md;
  for (const auto& [key, cells] : tables) {
    const auto& [metric, pooling, layers] = key;
    std::set<std::string> models;
    for (const auto& [lang, by_model] : cells) {
      for (const auto& [model, values] : by_model) models.insert(model);
    }
    md << "### " << metric << " (pooling " << pooling << ", layers " << layers
       << ")\n\n| language |";
    for (const auto& m : models) md << ' ' << m << " |";
    md << "\n|---|";
    for (std::size_t i = 0; i < models.size(); ++i) md << "---|";
    md << '\n';
    for (const auto& [lang, by_model] : cells) {
      md << "| " << lang << " |";
      for (const auto& m : models) {
        const auto it = by_model.find(m);
        if (it == by_model.end()) {
          md << " - |";
          continue;
        }
        double sum = 0.0;
        for (double v : it->second) sum += v;
        md << ' ' << format_cell(sum / static_cast<double>(it->second.size())) << " |";
      }
      md << '\n';
    }
    md << '\n';
  }

  std::map<std::pair<std::string, std::string>, std::vector<ResultRow>> groups;
  for (const ResultRow& r : rows) groups[{r.language, r.model}].push_back(r);
  bool header_written = false;
  for (const auto& [key, group] : groups) {
    const auto gap = pooling_gap(group);
    if (!gap) continue;
    if (!header_written) {
      md << "### last - first subword gap (mean over tasks)\n\n"
            "| language | model | gap |\n|---|---|---|\n";
      header_written = true;
    }
    md << "| " << key.first << " | " << key.second << " | " << format_cell(*gap)
       << " |\n";
  }
  report.markdown = md.str();
  return report;
}

std::vector<ResultRow> parse_results_csv(std::string_view text) {
  std::vector<ResultRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != results_csv_header()) {
        throw ParseError("unexpected results header", line_no);
      }
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 11) {
      throw ParseError("expected 11 fields, got " + std::to_string(f.size()),
                       line_no);
    }
    ResultRow r;
    r.fingerprint = f[0];
    r.task_id = f[1];
    r.language = f[2];
    r.model = f[3];
    r.pooling = f[4];
    r.layers = f[5];
    r.metric = f[6];
    try {
      r.value = parse_double(f[7]);
      r.majority_baseline = parse_double(f[8]);
      r.epochs = static_cast<std::size_t>(parse_double(f[9]));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
    r.timestamp = f[10];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::optional<double> pooling_gap(const std::vector<ResultRow>& rows) {
  std::map<std::tuple<std::string, std::string, std::string, std::string>,
           std::pair<std::vector<double>, std::vector<double>>>
      pairs;
  for (const ResultRow& r : rows) {
    auto& slot = pairs[{r.language, r.model, r.layers, r.task_id}];
    if (r.pooling == "first") slot.first.push_back(r.value);
    if (r.pooling == "last") slot.second.push_back(r.value);
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& [key, slot] : pairs) {
    if (slot.first.empty() || slot.second.empty()) continue;
    double first = 0.0;
    for (double v : slot.first) first += v;
    double last = 0.0;
    for (double v : slot.second) last += v;
    sum += last / static_cast<double>(slot.second.size()) -
           first / static_cast<double>(slot.first.size());
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

}  // namespace uralprobe
