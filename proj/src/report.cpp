#include <algorithm>
#include <array>
#include <charconv>
#include <ostream>
#include <string>

#include <json.hpp>

#include "tsplab/errors.hpp"
#include "tsplab/io.hpp"

namespace tsplab::io {
namespace {

constexpr std::string_view kScoreSentinel = "\xe2\x89\xa5" "100%";  // ≥100%

std::string fixed(double v, int decimals) {
  std::array<char, 64> buf;
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, decimals);
  std::string text(buf.data(), ptr);
  if (text.front() == '-' && text.find_first_not_of("-0.") == std::string::npos) text.erase(0, 1);
  return text;
}

std::string score_cell(const MethodSummary& s) {
  if (s.score) return format_percent(*s.score);
  if (s.score_undefined) return std::string(kScoreSentinel);
  return "";
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_csv(std::ostream& out, const BenchReport& report) {
  out << "method,count,length,gap,gap_ratio_of_means,heatmap_seconds,search_seconds,"
         "wall_seconds,lkh_gap,score\n";
  for (const auto& s : report.methods) {
    out << csv_escape(s.method) << ',' << s.count << ',' << format_double(s.mean_length) << ','
        << format_double(s.gap) << ',' << format_double(s.ratio_of_means_gap) << ','
        << format_double(s.heatmap_seconds) << ',' << format_double(s.search_seconds) << ','
        << format_double(report.wall_seconds) << ','
        << (s.lkh_gap ? format_double(*s.lkh_gap) : "") << ','
        << (s.score ? format_double(*s.score) : (s.score_undefined ? kScoreSentinel : ""))
        << '\n';
  }
}

void write_json(std::ostream& out, const BenchReport& report) {
  nlohmann::ordered_json j;
  j["wall_seconds"] = report.wall_seconds;
  auto& methods = j["methods"] = nlohmann::ordered_json::array();
  for (const auto& s : report.methods) {
    nlohmann::ordered_json m;
    m["method"] = s.method;
    m["count"] = s.count;
    m["length"] = s.mean_length;
    m["gap"] = s.gap;
    m["gap_ratio_of_means"] = s.ratio_of_means_gap;
    m["heatmap_seconds"] = s.heatmap_seconds;
    m["search_seconds"] = s.search_seconds;
    m["lkh_gap"] = s.lkh_gap ? nlohmann::ordered_json(*s.lkh_gap) : nullptr;
    m["score"] = s.score ? nlohmann::ordered_json(*s.score) : nullptr;
    if (s.score_undefined) m["score_note"] = std::string(kScoreSentinel);
    methods.push_back(std::move(m));
  }
  auto& records = j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : report.records) {
    nlohmann::ordered_json rec;
    rec["instance_id"] = r.instance_id;
    rec["method"] = r.method;
    rec["length"] = r.length;
    rec["elapsed"] = r.elapsed;
    rec["heatmap_seconds"] = r.heatmap_seconds;
    rec["seed"] = r.seed;
    rec["actions"] = r.actions;
    if (!r.trace.empty()) {
      auto& tr = rec["trace"] = nlohmann::ordered_json::array();
      for (const auto& p : r.trace) tr.push_back({p.time, p.best_length});
    }
    records.push_back(std::move(rec));
  }
  out << j.dump(2) << '\n';
}

// Column widths count code points so the sentinel lines up.
std::size_t display_width(const std::string& s) {
  std::size_t w = 0;
  for (unsigned char c : s) w += (c & 0xc0) != 0x80;
  return w;
}

void write_md(std::ostream& out, const BenchReport& report) {
  const std::vector<std::string> head{"Method", "Length", "Gap", "Gap (ratio of means)",
                                      "Time",   "LKH Gap", "Score"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : report.methods) {
    rows.push_back({s.method, fixed(s.mean_length, 5), format_percent(s.gap),
                    format_percent(s.ratio_of_means_gap),
                    fixed(s.heatmap_seconds, 2) + "s+" + fixed(s.search_seconds, 2) + "s",
                    s.lkh_gap ? format_percent(*s.lkh_gap, 4) : "", score_cell(s)});
  }
  std::vector<std::size_t> width(head.size());
  for (std::size_t c = 0; c < head.size(); ++c) {
    width[c] = display_width(head[c]);
    for (const auto& r : rows) width[c] = std::max(width[c], display_width(r[c]));
  }
  auto emit = [&](const std::vector<std::string>& cells) {
    out << '|';
    for (std::size_t c = 0; c < cells.size(); ++c) {
      out << ' ' << cells[c] << std::string(width[c] - display_width(cells[c]), ' ') << " |";
    }
    out << '\n';
  };
  emit(head);
  out << '|';
  for (std::size_t c = 0; c < head.size(); ++c) out << std::string(width[c] + 2, '-') << '|';
  out << '\n';
  for (const auto& r : rows) emit(r);
  out << "\nwall time: " << fixed(report.wall_seconds, 2) << "s\n";
}

}  // namespace

std::string format_percent(double fraction, int decimals) {
  return fixed(fraction * 100.0, decimals) + "%";
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  if (name == "md") return ReportFormat::md;
  throw InvalidArgument("unknown report format '" + std::string(name) + "'");
}

void write_report(std::ostream& out, const BenchReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::csv:
      write_csv(out, report);
      return;
    case ReportFormat::json:
      write_json(out, report);
      return;
    case ReportFormat::md:
      write_md(out, report);
      return;
  }
}

void write_records_csv(std::ostream& out, std::span<const RunRecord> records) {
  out << "instance_id,method,length,elapsed,heatmap_seconds,seed,actions\n";
  for (const auto& r : records) {
    out << r.instance_id << ',' << csv_escape(r.method) << ',' << format_double(r.length) << ','
        << format_double(r.elapsed) << ',' << format_double(r.heatmap_seconds) << ',' << r.seed
        << ',' << r.actions << '\n';
  }
}

}  // namespace tsplab::io
