#pragma once

// File formats.
//
// Instance file: one instance per line, "x1 y1 x2 y2 ... [output i1 ... in i1]"
// where the optional tour after `output` uses 1-based indices and repeats its
// first index at the end.
//
// Heatmap file, text: first line n, then n rows of n decimals.
// Heatmap file, binary: "HMAP1", uint64 n, then n*n float64, little endian.
// Loading zeroes the diagonal.
//
// Reference lengths: CSV with header "instance_id,length"; ids are 0-based
// line numbers of the instance file.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsplab/bench.hpp"
#include "tsplab/geometry.hpp"
#include "tsplab/heatmap.hpp"

namespace tsplab::io {

struct InstanceEntry {
  TspInstance instance;
  std::optional<Tour> reference;
};

enum class HeatmapFormat { text, binary };

/// Shortest decimal that reads back to the same double; locale independent.
std::string format_double(double v);
/// Strict, locale independent. Throws std::invalid_argument.
double parse_double(std::string_view s);

std::vector<InstanceEntry> parse_instances(std::istream& in, std::string_view source = "<input>");
std::vector<InstanceEntry> read_instances(const std::filesystem::path& path);
void write_instances(std::ostream& out, std::span<const InstanceEntry> entries);
void write_instances(std::ostream& out, std::span<const TspInstance> instances);
void write_instances_file(const std::filesystem::path& path,
                          std::span<const InstanceEntry> entries);

/// Detects the binary variant by its magic.
Heatmap parse_heatmap(std::istream& in, std::string_view source = "<input>");
Heatmap read_heatmap(const std::filesystem::path& path);
void write_heatmap(std::ostream& out, const Heatmap& heatmap, HeatmapFormat format);
void write_heatmap_file(const std::filesystem::path& path, const Heatmap& heatmap,
                        HeatmapFormat format);

RefLengths parse_ref_lengths(std::istream& in, std::string_view source = "<input>");
RefLengths read_ref_lengths(const std::filesystem::path& path);
void write_ref_lengths(std::ostream& out, const RefLengths& refs);

enum class ReportFormat { csv, json, md };
ReportFormat parse_report_format(std::string_view name);

void write_report(std::ostream& out, const BenchReport& report, ReportFormat format);
/// instance_id,method,length,elapsed,heatmap_seconds,seed,actions
void write_records_csv(std::ostream& out, std::span<const RunRecord> records);

/// "5.00%" style, fixed 2 decimals.
std::string format_percent(double fraction, int decimals = 2);

}  // namespace tsplab::io
