// Copyright 2026 The lengthctl Authors
// SPDX-License-Identifier: Apache-2.0

#include "lengthctl/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <tuple>

#include "lengthctl/error.hpp"
#include "lengthctl/prompt.hpp"

namespace lengthctl {

namespace {

constexpr double k_tie_tolerance = 1e-12;

std::string format(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, value);
  return buf;
}

std::string format_pm(double mean, double std) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.3f ± %.3f", mean, std);
  return buf;
}

// "1573.8" -> "1,573.8"
std::string group_thousands(std::string number) {
  const auto dot = number.find('.');
  const std::size_t int_end = dot == std::string::npos ? number.size() : dot;
  const std::size_t start = (!number.empty() && number[0] == '-') ? 1 : 0;
  for (std::size_t i = int_end; i > start + 3;) {
    i -= 3;
    number.insert(i, ",");
  }
  return number;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

std::vector<const GenerationRecord*> successful(const RecordStore& store) {
  std::vector<const GenerationRecord*> out;
  for (const auto& r : store.records) {
    if (r.ok()) out.push_back(&r);
  }
  if (out.empty()) throw Error(ErrorKind::EmptyStore, "store holds no successful records");
  return out;
}

std::vector<std::string> axis_order(const RecordStore& store, const char* field,
                                    const std::string GenerationRecord::*member) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  const auto& settings = store.header.settings;
  if (settings.is_object() && settings.contains(field) && settings[field].is_array()) {
    for (const auto& v : settings[field]) {
      if (v.is_string() && seen.insert(v.get<std::string>()).second) out.push_back(v.get<std::string>());
    }
  }
  for (const auto& r : store.records) {
    if (seen.insert(r.*member).second) out.push_back(r.*member);
  }
  return out;
}

std::size_t index_of(const std::vector<std::string>& v, const std::string& s) {
  return static_cast<std::size_t>(std::find(v.begin(), v.end(), s) - v.begin());
}

}  // namespace

std::string variant_label(std::string_view variant_id) {
  const auto* builtin = PromptVariant::find_builtin(variant_id);
  return builtin != nullptr ? builtin->display_name() : std::string(variant_id);
}

std::vector<std::string> endpoint_order(const RecordStore& store) {
  return axis_order(store, "endpoints", &GenerationRecord::endpoint_id);
}

std::vector<std::string> variant_order(const RecordStore& store) {
  return axis_order(store, "variants", &GenerationRecord::variant_id);
}

std::vector<std::string> ReportTable::best_columns(std::size_t row) const {
  std::vector<std::string> out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (cells[row][c] && cells[row][c]->best) out.push_back(columns[c]);
  }
  return out;
}

ReportTable mapd_table(const RecordStore& store, StdKind kind) {
  const auto records = successful(store);
  ReportTable table;
  table.caption = "MAPD (mean ± " + std::string(to_string(kind)) + " std) by model and prompting strategy";
  table.std_kind = kind;

  // Axes come from the whole store so a variant with no successful record
  // still shows up as a column of empty cells.
  std::vector<std::pair<std::pair<std::string, std::string>, double>> values;
  for (const auto* r : records) values.push_back({{r->endpoint_id, r->variant_id}, r->metrics.apd});
  table.rows = endpoint_order(store);
  table.columns = variant_order(store);

  const auto groups = aggregate(values, kind);
  table.cells.assign(table.rows.size(), std::vector<std::optional<ReportCell>>(table.columns.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    double best = INFINITY;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const auto it = groups.find({table.rows[r], table.columns[c]});
      if (it == groups.end()) continue;
      table.cells[r][c] = ReportCell{it->second, false};
      best = std::min(best, it->second.mean);
    }
    for (auto& cell : table.cells[r]) {
      if (cell && cell->stats.mean <= best + k_tie_tolerance) cell->best = true;
    }
  }
  return table;
}

std::string to_markdown(const ReportTable& table) {
  std::string out = table.caption + "\n\n| Model |";
  for (const auto& c : table.columns) out += " " + variant_label(c) + " |";
  out += " Best |\n|---|";
  for (std::size_t c = 0; c < table.columns.size(); ++c) out += "---|";
  out += "---|\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out += "| " + table.rows[r] + " |";
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const auto& cell = table.at(r, c);
      if (!cell) {
        out += " n/a |";
      } else if (cell->best) {
        out += " **" + format_pm(cell->stats.mean, cell->stats.std) + "** |";
      } else {
        out += " " + format_pm(cell->stats.mean, cell->stats.std) + " |";
      }
    }
    std::string best;
    for (const auto& b : table.best_columns(r)) best += (best.empty() ? "" : ", ") + variant_label(b);
    out += " " + best + " |\n";
  }
  return out;
}

std::string to_csv(const ReportTable& table) {
  std::string out = "endpoint,variant,mean,std,n,best\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const auto& cell = table.at(r, c);
      out += csv_field(table.rows[r]) + "," + csv_field(table.columns[c]) + ",";
      if (cell) {
        out += format("%.17g", cell->stats.mean) + "," + format("%.17g", cell->stats.std) + "," +
               std::to_string(cell->stats.n) + "," + (cell->best ? "1" : "0") + "\n";
      } else {
        out += ",,0,0\n";
      }
    }
  }
  return out;
}

std::vector<Improvement> improvement_summary(const RecordStore& store, StdKind kind) {
  const auto table = mapd_table(store, kind);
  std::map<std::string, Family> families;
  for (const auto& r : store.records) families.emplace(r.variant_id, r.family);

  std::vector<Improvement> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::optional<std::size_t> vanilla;
    std::optional<std::size_t> thinking;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const auto& cell = table.at(r, c);
      if (!cell) continue;
      auto& slot = families.at(table.columns[c]) == Family::Thinking ? thinking : vanilla;
      if (!slot || cell->stats.mean < table.at(r, *slot)->stats.mean) slot = c;
    }
    if (!vanilla || !thinking) continue;
    Improvement imp;
    imp.endpoint_id = table.rows[r];
    imp.best_vanilla = table.columns[*vanilla];
    imp.vanilla_mapd = table.at(r, *vanilla)->stats.mean;
    imp.best_thinking = table.columns[*thinking];
    imp.thinking_mapd = table.at(r, *thinking)->stats.mean;
    if (imp.vanilla_mapd == 0.0) continue;  // nothing to improve on
    imp.improvement_pct = relative_improvement(imp.thinking_mapd, imp.vanilla_mapd);
    out.push_back(std::move(imp));
  }
  return out;
}

std::string format_improvements(const std::vector<Improvement>& improvements) {
  std::string out;
  for (const auto& imp : improvements) {
    out += imp.endpoint_id + ": best " + variant_label(imp.best_thinking) + " " + format("%.3f", imp.thinking_mapd) +
           " vs best " + variant_label(imp.best_vanilla) + " " + format("%.3f", imp.vanilla_mapd) + ", " +
           format("%.1f", imp.improvement_pct) + "% improvement\n";
  }
  return out;
}

std::string format_best_summary(const ReportTable& table, const std::vector<Improvement>& improvements) {
  std::string out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::string best;
    double mean = 0.0;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const auto& cell = table.at(r, c);
      if (!cell || !cell->best) continue;
      best += (best.empty() ? "" : ", ") + variant_label(table.columns[c]);
      mean = cell->stats.mean;
    }
    if (best.empty()) {
      out += table.rows[r] + ": no successful records\n";
    } else {
      out += table.rows[r] + ": best " + best + " (MAPD " + format("%.3f", mean) + ")\n";
    }
  }
  return out + format_improvements(improvements);
}

std::string_view to_string(Deviation d) noexcept {
  switch (d) {
    case Deviation::Over: return "over";
    case Deviation::Under: return "under";
    case Deviation::Exact: return "exact";
  }
  return "";
}

Deviation classify_ratio(double ratio) noexcept {
  if (ratio > 1.0) return Deviation::Over;
  if (ratio < 1.0) return Deviation::Under;
  return Deviation::Exact;
}

std::vector<FidelityPoint> fidelity_points(const RecordStore& store) {
  const auto records = successful(store);
  const auto endpoints = endpoint_order(store);
  const auto variants = variant_order(store);
  std::vector<FidelityPoint> out;
  out.reserve(records.size());
  for (const auto* r : records) {
    out.push_back({r->endpoint_id, r->variant_id, r->target_words, r->attempt_index, r->metrics.ratio,
                   classify_ratio(r->metrics.ratio)});
  }
  const auto key = [&](const FidelityPoint& p) {
    return std::make_tuple(index_of(endpoints, p.endpoint_id), index_of(variants, p.variant_id), p.target_words,
                           p.attempt_index);
  };
  std::stable_sort(out.begin(), out.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
  return out;
}

std::vector<OverlayRow> fidelity_overlay(const std::vector<FidelityPoint>& points, StdKind kind) {
  std::vector<std::string> endpoints;
  std::vector<std::pair<std::pair<std::size_t, int>, double>> values;
  for (const auto& p : points) {
    auto idx = index_of(endpoints, p.endpoint_id);
    if (idx == endpoints.size()) endpoints.push_back(p.endpoint_id);
    values.push_back({{idx, p.target_words}, p.ratio});
  }
  std::vector<OverlayRow> out;
  for (const auto& [key, stats] : aggregate(values, kind)) out.push_back({endpoints[key.first], key.second, stats});
  return out;
}

std::string to_csv(const std::vector<FidelityPoint>& points) {
  std::string out = "endpoint,variant,target,attempt,ratio,class\n";
  for (const auto& p : points) {
    out += csv_field(p.endpoint_id) + "," + csv_field(p.variant_id) + "," + std::to_string(p.target_words) + "," +
           std::to_string(p.attempt_index) + "," + format("%.17g", p.ratio) + "," + std::string(to_string(p.deviation)) +
           "\n";
  }
  return out;
}

std::vector<FidelityPoint> read_fidelity_csv(std::string_view csv) {
  std::vector<FidelityPoint> out;
  std::size_t line_no = 0;
  while (!csv.empty()) {
    const auto nl = csv.find('\n');
    std::string_view line = csv.substr(0, nl);
    csv = nl == std::string_view::npos ? std::string_view{} : csv.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no++ == 0 || line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6) {
      throw Error(ErrorKind::InvalidArgument, "fidelity CSV line " + std::to_string(line_no) + " has " +
                                                  std::to_string(f.size()) + " fields");
    }
    FidelityPoint p;
    p.endpoint_id = f[0];
    p.variant_id = f[1];
    p.target_words = std::atoi(f[2].c_str());
    p.attempt_index = std::atoi(f[3].c_str());
    p.ratio = std::strtod(f[4].c_str(), nullptr);
    p.deviation = classify_ratio(p.ratio);
    if (f[5] != to_string(p.deviation)) {
      throw Error(ErrorKind::InvalidArgument, "fidelity CSV line " + std::to_string(line_no) + ": class '" + f[5] +
                                                  "' does not match ratio");
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::string to_csv(const std::vector<OverlayRow>& overlay) {
  std::string out = "endpoint,target,mean,std,n\n";
  for (const auto& row : overlay) {
    out += csv_field(row.endpoint_id) + "," + std::to_string(row.target_words) + "," + format("%.17g", row.ratio.mean) +
           "," + format("%.17g", row.ratio.std) + "," + std::to_string(row.ratio.n) + "\n";
  }
  return out;
}

double round2(double value) noexcept { return std::round(value * 100.0) / 100.0; }

CostTable make_cost_table(const FamilyCost& vanilla, const FamilyCost& thinking) {
  CostTable t;
  t.vanilla = vanilla;
  t.thinking = thinking;
  t.token_ratio = vanilla.avg_tokens > 0.0 ? round2(thinking.avg_tokens / vanilla.avg_tokens) : 0.0;
  t.latency_ratio = vanilla.avg_latency_ms > 0.0 ? round2(thinking.avg_latency_ms / vanilla.avg_latency_ms) : 0.0;
  return t;
}

CostTable cost_table(const RecordStore& store) {
  FamilyCost families[2];
  bool estimated = false;
  for (const auto& r : store.records) {
    if (!r.ok()) continue;
    auto& f = families[r.family == Family::Thinking ? 1 : 0];
    ++f.n;
    f.avg_tokens += static_cast<double>(r.input_tokens + r.output_tokens);
    f.avg_latency_ms += r.latency_ms;
    estimated = estimated || r.tokens_estimated;
  }
  for (int i = 0; i < 2; ++i) {
    if (families[i].n == 0) {
      throw Error(ErrorKind::MissingFamily,
                  std::string("store has no successful ") + (i == 0 ? "vanilla" : "thinking") + " records");
    }
    families[i].avg_tokens /= static_cast<double>(families[i].n);
    families[i].avg_latency_ms /= static_cast<double>(families[i].n);
  }
  auto table = make_cost_table(families[0], families[1]);
  table.tokens_estimated = estimated;
  return table;
}

std::string to_markdown(const CostTable& t) {
  const auto tokens = [](double v) { return group_thousands(std::to_string(std::llround(v))); };
  const auto latency = [](double v) { return group_thousands(format("%.1f", v)) + " ms"; };
  const auto ratio = [](double v) { return " (" + format("%.2f", v) + "×)"; };
  std::string out = "| Strategy | Avg. tokens | Avg. latency |\n|---|---|---|\n";
  out += "| Vanilla | " + tokens(t.vanilla.avg_tokens) + " | " + latency(t.vanilla.avg_latency_ms) + " |\n";
  out += "| Thinking | " + tokens(t.thinking.avg_tokens) + ratio(t.token_ratio) + " | " +
         latency(t.thinking.avg_latency_ms) + ratio(t.latency_ratio) + " |\n";
  if (t.tokens_estimated) out += "\nSome token counts are estimated from text length.\n";
  return out;
}

std::vector<SignificanceRow> significance_tests(const RecordStore& store, std::size_t n_resamples,
                                                std::uint64_t seed) {
  std::map<std::pair<std::string, std::string>, std::map<PairKey, double>> series;
  for (const auto& r : store.records) {
    if (r.ok()) series[{r.endpoint_id, r.variant_id}][PairKey{r.target_words, r.attempt_index}] = r.metrics.apd;
  }
  const auto variants = variant_order(store);
  std::vector<SignificanceRow> out;
  for (const auto& endpoint : endpoint_order(store)) {
    for (std::size_t i = 0; i < variants.size(); ++i) {
      for (std::size_t j = i + 1; j < variants.size(); ++j) {
        const auto a = series.find({endpoint, variants[i]});
        const auto b = series.find({endpoint, variants[j]});
        if (a == series.end() || b == series.end()) continue;
        std::map<PairKey, double> ca;
        std::map<PairKey, double> cb;
        for (const auto& [key, value] : a->second) {
          const auto it = b->second.find(key);
          if (it == b->second.end()) continue;
          ca.emplace(key, value);
          cb.emplace(key, it->second);
        }
        if (ca.size() < 2) continue;
        out.push_back({endpoint, variants[i], variants[j], paired_significance(ca, cb, n_resamples, seed)});
      }
    }
  }
  return out;
}

std::string to_csv(const std::vector<SignificanceRow>& rows) {
  std::string out = "endpoint,variant_a,variant_b,n_pairs,mean_diff,p_value,exact,resamples,seed\n";
  for (const auto& row : rows) {
    const auto& r = row.result;
    out += csv_field(row.endpoint_id) + "," + csv_field(row.variant_a) + "," + csv_field(row.variant_b) + "," +
           std::to_string(r.n_pairs) + "," + format("%.17g", r.statistic) + "," + format("%.17g", r.p_value) + "," +
           (r.exact ? "1" : "0") + "," + std::to_string(r.n_resamples) + "," + std::to_string(r.seed) + "\n";
  }
  return out;
}

std::vector<QualityRow> quality_table(const RecordStore& store, const std::vector<QualityScores>& scores) {
  std::map<std::string, std::string> variant_of;
  for (const auto& r : store.records) variant_of.emplace(r.record_id, r.variant_id);

  std::map<std::string, std::array<std::vector<double>, 4>> groups;
  for (const auto& s : scores) {
    const auto it = variant_of.find(s.record_id);
    if (it == variant_of.end()) continue;
    auto& group = groups[it->second];
    for (std::size_t d = 0; d < k_dimensions.size(); ++d) {
      if (s.dimensions[d].score) group[d].push_back(*s.dimensions[d].score);
    }
  }
  std::vector<QualityRow> out;
  for (const auto& v : variant_order(store)) {
    const auto it = groups.find(v);
    if (it == groups.end()) continue;
    QualityRow row;
    row.variant_id = v;
    for (std::size_t d = 0; d < k_dimensions.size(); ++d) {
      const auto& values = it->second[d];
      row.counts[d] = values.size();
      if (!values.empty()) row.means[d] = summarize(values).mean;
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::string to_markdown(const std::vector<QualityRow>& rows) {
  constexpr std::array<Dimension, 4> layout = {Dimension::Correctness, Dimension::Faithfulness,
                                               Dimension::Completeness, Dimension::Relevance};
  std::array<double, 4> best;
  best.fill(-INFINITY);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < layout.size(); ++i) {
      const auto& m = row.means[static_cast<std::size_t>(layout[i])];
      if (m) best[i] = std::max(best[i], *m);
    }
  }
  std::string out =
      "| Prompting Strategy | Correctness | Faithfulness | Completeness | Relevance |\n|---|---|---|---|---|\n";
  for (const auto& row : rows) {
    out += "| " + variant_label(row.variant_id) + " |";
    for (std::size_t i = 0; i < layout.size(); ++i) {
      const auto& m = row.means[static_cast<std::size_t>(layout[i])];
      if (!m) {
        out += " n/a |";
      } else if (*m >= best[i] - k_tie_tolerance) {
        out += " **" + format("%.2f", *m) + "** |";
      } else {
        out += " " + format("%.2f", *m) + " |";
      }
    }
    out += "\n";
  }
  return out;
}

std::string to_csv(const std::vector<QualityRow>& rows) {
  std::string out = "variant";
  for (auto d : k_dimensions) out += "," + std::string(to_string(d)) + "," + std::string(to_string(d)) + "_n";
  out += "\n";
  for (const auto& row : rows) {
    out += csv_field(row.variant_id);
    for (std::size_t d = 0; d < k_dimensions.size(); ++d) {
      out += "," + (row.means[d] ? format("%.17g", *row.means[d]) : std::string()) + "," + std::to_string(row.counts[d]);
    }
    out += "\n";
  }
  return out;
}

std::string to_jsonl(const RecordStore& store) {
  std::string out;
  for (const auto& r : store.records) out += record_to_json(r).dump() + "\n";
  return out;
}

}  // namespace lengthctl
