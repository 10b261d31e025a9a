#include "trajcast/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

namespace trajcast {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

template <class T>
T parse_number(std::string_view text, std::size_t line, const char* column) {
  text = trim(text);
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ParseError(line, std::string("invalid ") + column + " value '" + std::string(text) + "'");
  }
  return value;
}

struct RawRow {
  std::uint64_t vehicle_id;
  std::uint64_t window_index;
  std::uint64_t t;
  double x, y;
  std::size_t line;
};

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(n));
}

void write_csv(const TrajectoryDataset& dataset, std::ostream& out) {
  out << kTrajectoryCsvHeader << '\n';
  for (const auto& seq : dataset.sequences()) {
    for (std::size_t t = 0; t < seq.points.size(); ++t) {
      const auto& p = seq.points[t];
      out << seq.vehicle_id << ',' << seq.window_index << ',' << t << ',' << format_double(p.x) << ','
          << format_double(p.y) << '\n';
    }
  }
}

void write_csv(const TrajectoryDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_csv(dataset, out);
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::vector<TrajectorySequence> read_csv_sequences(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  ++line_no;
  if (trim(line) != kTrajectoryCsvHeader) {
    throw ParseError(1, std::string("expected header '") + kTrajectoryCsvHeader + "'");
  }

  std::vector<RawRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 5) {
      throw ParseError(line_no, "expected 5 fields, found " + std::to_string(fields.size()));
    }
    RawRow row{parse_number<std::uint64_t>(fields[0], line_no, "vehicle_id"),
               parse_number<std::uint64_t>(fields[1], line_no, "window_index"),
               parse_number<std::uint64_t>(fields[2], line_no, "t"),
               parse_number<double>(fields[3], line_no, "x"),
               parse_number<double>(fields[4], line_no, "y"),
               line_no};
    if (!std::isfinite(row.x) || !std::isfinite(row.y)) throw ParseError(line_no, "non-finite coordinate");
    rows.push_back(row);
  }

  // Group consecutive rows.
  std::vector<std::vector<RawRow>> groups;
  for (const auto& row : rows) {
    const bool same = !groups.empty() && groups.back().front().vehicle_id == row.vehicle_id &&
                      groups.back().front().window_index == row.window_index;
    if (same) {
      if (row.t != groups.back().size()) {
        throw ParseError(row.line, "expected t=" + std::to_string(groups.back().size()) + ", found " +
                                       std::to_string(row.t));
      }
      groups.back().push_back(row);
    } else {
      if (row.t != 0) throw ParseError(row.line, "sequence does not start at t=0");
      groups.push_back({row});
    }
  }

  if (!groups.empty()) {
    const std::size_t len = groups.front().size();
    for (const auto& g : groups) {
      if (g.size() != len) {
        throw ParseError(g.back().line, "inconsistent sequence length " + std::to_string(g.size()) +
                                            " (expected " + std::to_string(len) + ")");
      }
    }
  }

  std::vector<TrajectorySequence> sequences;
  sequences.reserve(groups.size());
  for (const auto& g : groups) {
    TrajectorySequence seq;
    seq.vehicle_id = g.front().vehicle_id;
    seq.window_index = g.front().window_index;
    const std::uint64_t base = seq.window_index * static_cast<std::uint64_t>(g.size());
    for (const auto& r : g) seq.points.push_back({base + r.t, r.x, r.y});
    sequences.push_back(std::move(seq));
  }
  return sequences;
}

TrajectoryDataset read_csv(std::istream& in, std::optional<SequenceConfig> config) {
  auto sequences = read_csv_sequences(in);
  SequenceConfig cfg = config.value_or(SequenceConfig{});
  if (!sequences.empty()) {
    const std::size_t len = sequences.front().points.size();
    if (config && config->total_len != len) {
      // Header is line 1 and the first sequence starts on line 2.
      throw ParseError(2, "sequence length " + std::to_string(len) + " does not match total_len " +
                              std::to_string(config->total_len));
    }
    if (!config) {
      cfg.total_len = len;
      cfg.alpha = len / 2;
    }
  }
  return TrajectoryDataset(cfg, std::move(sequences));
}

TrajectoryDataset read_csv(const std::filesystem::path& path, std::optional<SequenceConfig> config) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return read_csv(in, config);
}

}  // namespace trajcast
