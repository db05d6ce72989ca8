#include "tsplab/io.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <limits>
#include <sstream>

#include "tsplab/errors.hpp"

namespace tsplab::io {
namespace {

std::size_t parse_error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_instances(in);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

TEST(Numbers, RoundTrip) {
  for (double v : {0.0, 1.0, 0.1, 1.0 / 3.0, 5e-324, 0.9999999999999999, 123456.789}) {
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.0066), "0.0066");
  EXPECT_THROW(parse_double("1.0x"), std::invalid_argument);
  EXPECT_THROW(parse_double(""), std::invalid_argument);
  EXPECT_EQ(format_percent(0.05), "5.00%");
  EXPECT_EQ(format_percent(-1e-9), "0.00%");
  EXPECT_EQ(format_percent(0.000121, 4), "0.0121%");
}

TEST(Instances, ParsesTour) {
  std::istringstream in("0.0 0.0 1.0 0.0 1.0 1.0 0.0 1.0 output 1 2 3 4 1\n");
  const auto entries = parse_instances(in);
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].instance, TspInstance({{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
  ASSERT_TRUE(entries[0].reference.has_value());
  EXPECT_EQ(entries[0].reference->order(), (std::vector<Vertex>{0, 1, 2, 3}));
}

TEST(Instances, WithoutTourAndBlankLines) {
  std::istringstream in("0.1 0.2 0.3 0.4\n\n0.5 0.5 0.6 0.6 0.7 0.7\n");
  const auto entries = parse_instances(in);
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_FALSE(entries[0].reference.has_value());
  EXPECT_EQ(entries[1].instance.size(), 3u);
}

TEST(Instances, ErrorsCarryLineNumbers) {
  EXPECT_EQ(parse_error_line("0.1 0.2 0.3\n"), 1u);
  EXPECT_EQ(parse_error_line("0.1 0.2 0.3 0.4\n0.1 0.2 1.5 0.4\n"), 2u);
  EXPECT_EQ(parse_error_line("0.1 0.2 0.3 0.4\n\n0.1 0.2 0.3 0.4 output 1 3 1\n"), 3u);
  EXPECT_EQ(parse_error_line("0 0 1 0 1 1 output 1 2 2 1\n"), 1u);
  EXPECT_EQ(parse_error_line("0 0 1 0 1 1 output 1 2 3\n"), 1u);
  EXPECT_EQ(parse_error_line("0 0 1 0 1 1 output 1 2 x 1\n"), 1u);
  EXPECT_EQ(parse_error_line("0.5 0.5\n"), 1u);
  EXPECT_EQ(parse_error_line("0 abc 1 0\n"), 1u);
}

TEST(Instances, WriteParseRoundTrip) {
  const auto insts = generate_instances(37, 5, 61);
  std::vector<InstanceEntry> entries;
  Rng rng(62);
  for (std::size_t i = 0; i < insts.size(); ++i) {
    entries.push_back({insts[i], i % 2 == 0 ? std::optional<Tour>(random_tour(37, rng))
                                            : std::nullopt});
  }
  std::stringstream buf;
  write_instances(buf, entries);
  const auto back = parse_instances(buf);
  ASSERT_EQ(back.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    EXPECT_EQ(back[i].instance, entries[i].instance);
    EXPECT_EQ(back[i].reference, entries[i].reference);
  }
}

TEST(Instances, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "tsplab_io_instances.txt";
  const auto insts = generate_instances(9, 3, 63);
  std::vector<InstanceEntry> entries;
  for (const auto& inst : insts) entries.push_back({inst, std::nullopt});
  write_instances_file(path, entries);
  const auto back = read_instances(path);
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(back[i].instance, insts[i]);
  std::filesystem::remove(path);
  EXPECT_THROW(read_instances(path), IoError);
}

TEST(Heatmaps, BinaryRoundTripIsBitwise) {
  const auto inst = generate_instance(41, 64, 0);
  const Heatmap h = softdist(inst, 0.0066);
  std::stringstream buf;
  write_heatmap(buf, h, HeatmapFormat::binary);
  const Heatmap back = parse_heatmap(buf);
  ASSERT_EQ(back.size(), h.size());
  EXPECT_EQ(std::memcmp(back.values().data(), h.values().data(), h.values().size() * 8), 0);
}

TEST(Heatmaps, TextRoundTrip) {
  const auto inst = generate_instance(23, 65, 0);
  const Heatmap h = softdist(inst, 0.01);
  std::stringstream buf;
  write_heatmap(buf, h, HeatmapFormat::text);
  const Heatmap back = parse_heatmap(buf);
  for (std::size_t i = 0; i < h.values().size(); ++i) {
    EXPECT_NEAR(back.values()[i], h.values()[i], 1e-12);
  }
}

TEST(Heatmaps, TwoCityText) {
  std::istringstream in("2\n0 1\n1 0\n");
  const Heatmap h = parse_heatmap(in);
  EXPECT_EQ(h, softdist(TspInstance({{0.2, 0.3}, {0.7, 0.1}}), 0.5));
}

TEST(Heatmaps, DiagonalIsZeroedOnLoad) {
  std::istringstream in("3\n5 1 2\n1 5 3\n2 3 5\n");
  const Heatmap h = parse_heatmap(in);
  EXPECT_EQ(h(0, 0), 0.0);
  EXPECT_EQ(h(1, 1), 0.0);
  EXPECT_EQ(h(1, 2), 3.0);
}

TEST(Heatmaps, FormatErrors) {
  for (const char* text : {"2\n0 1\n", "2\n0 1\n1 0\n1 0\n", "2\n0 -1\n1 0\n", "2\n0 1 2\n1 0\n",
                           "x\n", "", "2\n0 nan\n1 0\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(parse_heatmap(in), ParseError) << text;
  }
  std::stringstream truncated;
  write_heatmap(truncated, zeros_heatmap(4), HeatmapFormat::binary);
  std::string bytes = truncated.str();
  bytes.resize(bytes.size() - 3);
  std::istringstream in(bytes);
  EXPECT_THROW(parse_heatmap(in), ParseError);
  EXPECT_THROW(read_heatmap("/nonexistent/heatmap.bin"), IoError);
}

TEST(RefLengths, RoundTripAndErrors) {
  const RefLengths refs{{0, 7.6}, {3, 1.0 / 3.0}, {10, 16.5}};
  std::stringstream buf;
  write_ref_lengths(buf, refs);
  EXPECT_EQ(parse_ref_lengths(buf), refs);

  for (const char* text : {"instance_id,length\n0,1.0\n0,2.0\n", "0,1.0\n",
                           "instance_id,length\n0,0\n", "instance_id,length\n-1,1.0\n",
                           "instance_id,length\n0\n", ""}) {
    std::istringstream in(text);
    EXPECT_THROW(parse_ref_lengths(in), ParseError) << text;
  }
}

TEST(Reports, FormatsRender) {
  RunRecord r;
  r.instance_id = 0;
  r.method = "softdist(0.0066)";
  r.length = 1.02;
  const RefLengths refs{{0, 1.0}};
  const RefLengths lkh{{0, 1.01}};
  const BenchReport rep = aggregate(std::span(&r, 1), refs, &lkh);

  std::ostringstream csv, json, md;
  write_report(csv, rep, ReportFormat::csv);
  write_report(json, rep, ReportFormat::json);
  write_report(md, rep, ReportFormat::md);
  EXPECT_NE(csv.str().find("softdist(0.0066)"), std::string::npos);
  EXPECT_NE(json.str().find("\"score\""), std::string::npos);
  EXPECT_NE(md.str().find("50.00%"), std::string::npos);
  EXPECT_NE(md.str().find("2.00%"), std::string::npos);

  r.length = 1.0;
  const BenchReport exact = aggregate(std::span(&r, 1), refs, &lkh);
  std::ostringstream md2;
  write_report(md2, exact, ReportFormat::md);
  EXPECT_NE(md2.str().find("\xe2\x89\xa5" "100%"), std::string::npos);

  EXPECT_EQ(parse_report_format("json"), ReportFormat::json);
  EXPECT_THROW(parse_report_format("xml"), InvalidArgument);
}

}  // namespace
}  // namespace tsplab::io
