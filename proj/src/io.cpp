#include "tsplab/io.hpp"

#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "tsplab/errors.hpp"

namespace tsplab::io {
namespace {

constexpr std::string_view kHeatmapMagic = "HMAP1";

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

long long parse_integer(std::string_view s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  }
  return v;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void put_u64_le(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes;
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

bool get_u64_le(std::istream& in, std::uint64_t& v) {
  std::array<unsigned char, 8> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) return false;
  v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return true;
}

Heatmap finish_heatmap(std::size_t n, std::vector<double> values, std::string_view source) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0) {
      throw ParseError(std::string(source), 0,
                       "heatmap entry (" + std::to_string(i / n) + "," + std::to_string(i % n) +
                           ") is negative or nonfinite");
    }
  }
  for (std::size_t i = 0; i < n; ++i) values[i * n + i] = 0.0;
  return Heatmap(n, std::move(values));
}

Heatmap parse_binary_heatmap(std::istream& in, std::string_view source) {
  std::uint64_t n = 0;
  if (!get_u64_le(in, n)) throw ParseError(std::string(source), 0, "truncated binary header");
  if (n < 2 || n > (1u << 20)) {
    throw ParseError(std::string(source), 0, "implausible heatmap size " + std::to_string(n));
  }
  std::vector<double> values(n * n);
  for (auto& v : values) {
    std::uint64_t bits = 0;
    if (!get_u64_le(in, bits)) {
      throw ParseError(std::string(source), 0, "binary heatmap shorter than n*n entries");
    }
    v = std::bit_cast<double>(bits);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw ParseError(std::string(source), 0, "trailing bytes after binary heatmap");
  }
  return finish_heatmap(n, std::move(values), source);
}

Heatmap parse_text_heatmap(std::istream& in, std::string_view source) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    try {
      const long long v = parse_integer(t);
      if (v < 2) throw std::invalid_argument("size below 2");
      n = static_cast<std::size_t>(v);
    } catch (const std::invalid_argument& e) {
      throw ParseError(std::string(source), line_no, std::string("bad heatmap size: ") + e.what());
    }
    break;
  }
  if (n == 0) throw ParseError(std::string(source), line_no, "empty heatmap file");

  std::vector<double> values;
  values.reserve(n * n);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (rows == n) throw ParseError(std::string(source), line_no, "more than n rows");
    if (tokens.size() != n) {
      throw ParseError(std::string(source), line_no,
                       "row has " + std::to_string(tokens.size()) + " entries, expected " +
                           std::to_string(n));
    }
    for (const auto tok : tokens) {
      double v = 0.0;
      try {
        v = parse_double(tok);
      } catch (const std::invalid_argument& e) {
        throw ParseError(std::string(source), line_no, e.what());
      }
      if (v < 0.0 || !std::isfinite(v)) {
        throw ParseError(std::string(source), line_no, "negative or nonfinite heatmap entry");
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (rows != n) {
    throw ParseError(std::string(source), line_no,
                     "expected " + std::to_string(n) + " rows, got " + std::to_string(rows));
  }
  return finish_heatmap(n, std::move(values), source);
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf;
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) {
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  }
  return v;
}

std::vector<InstanceEntry> parse_instances(std::istream& in, std::string_view source) {
  std::vector<InstanceEntry> out;
  std::string line;
  std::size_t line_no = 0;
  const std::string src(source);
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;

    std::size_t split = tokens.size();
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (tokens[i] == "output") {
        split = i;
        break;
      }
    }
    if (split % 2 != 0) throw ParseError(src, line_no, "odd number of coordinates");
    std::vector<Point> pts(split / 2);
    for (std::size_t i = 0; i < split; ++i) {
      double v = 0.0;
      try {
        v = parse_double(tokens[i]);
      } catch (const std::invalid_argument& e) {
        throw ParseError(src, line_no, e.what());
      }
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ParseError(src, line_no,
                         "coordinate " + std::string(tokens[i]) + " outside [0, 1]");
      }
      (i % 2 == 0 ? pts[i / 2].x : pts[i / 2].y) = v;
    }
    if (pts.size() < 2) throw ParseError(src, line_no, "instance needs at least 2 points");
    const std::size_t n = pts.size();

    std::optional<Tour> reference;
    if (split < tokens.size()) {
      const std::size_t count = tokens.size() - split - 1;
      if (count != n + 1) {
        throw ParseError(src, line_no,
                         "tour has " + std::to_string(count) + " indices, expected " +
                             std::to_string(n + 1));
      }
      std::vector<Vertex> order;
      order.reserve(n + 1);
      for (std::size_t i = split + 1; i < tokens.size(); ++i) {
        long long v = 0;
        try {
          v = parse_integer(tokens[i]);
        } catch (const std::invalid_argument& e) {
          throw ParseError(src, line_no, e.what());
        }
        if (v < 1 || v > static_cast<long long>(n)) {
          throw ParseError(src, line_no, "tour index " + std::to_string(v) + " out of range");
        }
        order.push_back(static_cast<Vertex>(v - 1));
      }
      if (order.front() != order.back()) {
        throw ParseError(src, line_no, "tour must end at its first index");
      }
      order.pop_back();
      if (!is_permutation_of_range(order)) {
        throw ParseError(src, line_no, "tour is not a permutation of 1.." + std::to_string(n));
      }
      reference = Tour(std::move(order));
    }
    out.push_back({TspInstance(std::move(pts)), std::move(reference)});
  }
  return out;
}

std::vector<InstanceEntry> read_instances(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_instances(in, path.string());
}

void write_instances(std::ostream& out, std::span<const InstanceEntry> entries) {
  for (const auto& e : entries) {
    bool first = true;
    for (const auto& p : e.instance.points()) {
      if (!first) out << ' ';
      out << format_double(p.x) << ' ' << format_double(p.y);
      first = false;
    }
    if (e.reference) {
      out << " output";
      for (Vertex v : e.reference->order()) out << ' ' << (v + 1);
      out << ' ' << (e.reference->order().front() + 1);
    }
    out << '\n';
  }
}

void write_instances(std::ostream& out, std::span<const TspInstance> instances) {
  std::vector<InstanceEntry> entries;
  entries.reserve(instances.size());
  for (const auto& inst : instances) entries.push_back({inst, std::nullopt});
  write_instances(out, entries);
}

void write_instances_file(const std::filesystem::path& path,
                          std::span<const InstanceEntry> entries) {
  auto out = open_out(path);
  write_instances(out, entries);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Heatmap parse_heatmap(std::istream& in, std::string_view source) {
  std::array<char, 5> head{};
  in.read(head.data(), head.size());
  const auto got = static_cast<std::size_t>(in.gcount());
  if (got == head.size() && std::string_view(head.data(), head.size()) == kHeatmapMagic) {
    return parse_binary_heatmap(in, source);
  }
  // Not binary: hand the consumed prefix back to the text parser.
  std::stringstream text;
  text.write(head.data(), static_cast<std::streamsize>(got));
  in.clear();
  text << in.rdbuf();
  return parse_text_heatmap(text, source);
}

Heatmap read_heatmap(const std::filesystem::path& path) {
  auto in = open_in(path, true);
  return parse_heatmap(in, path.string());
}

void write_heatmap(std::ostream& out, const Heatmap& heatmap, HeatmapFormat format) {
  const std::size_t n = heatmap.size();
  if (format == HeatmapFormat::binary) {
    out.write(kHeatmapMagic.data(), static_cast<std::streamsize>(kHeatmapMagic.size()));
    put_u64_le(out, n);
    for (double v : heatmap.values()) put_u64_le(out, std::bit_cast<std::uint64_t>(v));
    return;
  }
  out << n << '\n';
  std::string row;
  for (std::size_t i = 0; i < n; ++i) {
    row.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j) row += ' ';
      row += format_double(heatmap(i, j));
    }
    row += '\n';
    out << row;
  }
}

void write_heatmap_file(const std::filesystem::path& path, const Heatmap& heatmap,
                        HeatmapFormat format) {
  auto out = open_out(path, format == HeatmapFormat::binary);
  write_heatmap(out, heatmap, format);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

RefLengths parse_ref_lengths(std::istream& in, std::string_view source) {
  const std::string src(source);
  RefLengths refs;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (!header) {
      if (t != "instance_id,length") {
        throw ParseError(src, line_no, "expected header 'instance_id,length'");
      }
      header = true;
      continue;
    }
    const auto comma = t.find(',');
    if (comma == std::string_view::npos || t.find(',', comma + 1) != std::string_view::npos) {
      throw ParseError(src, line_no, "expected two comma-separated fields");
    }
    long long id = 0;
    double len = 0.0;
    try {
      id = parse_integer(trim(t.substr(0, comma)));
      len = parse_double(trim(t.substr(comma + 1)));
    } catch (const std::invalid_argument& e) {
      throw ParseError(src, line_no, e.what());
    }
    if (id < 0) throw ParseError(src, line_no, "negative instance id");
    if (!(len > 0.0) || !std::isfinite(len)) {
      throw ParseError(src, line_no, "length must be positive");
    }
    if (!refs.emplace(static_cast<std::size_t>(id), len).second) {
      throw ParseError(src, line_no, "duplicate instance id " + std::to_string(id));
    }
  }
  if (!header) throw ParseError(src, line_no, "missing header 'instance_id,length'");
  return refs;
}

RefLengths read_ref_lengths(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_ref_lengths(in, path.string());
}

void write_ref_lengths(std::ostream& out, const RefLengths& refs) {
  out << "instance_id,length\n";
  for (const auto& [id, len] : refs) out << id << ',' << format_double(len) << '\n';
}

}  // namespace tsplab::io
