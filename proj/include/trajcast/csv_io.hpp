#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "trajcast/trajectory.hpp"

namespace trajcast {

/// Malformed input; the message names the offending 1-based line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline constexpr const char* kTrajectoryCsvHeader = "vehicle_id,window_index,t,x,y";

/// Writes `vehicle_id,window_index,t,x,y` rows with 17 significant digits.
void write_csv(const TrajectoryDataset& dataset, std::ostream& out);
void write_csv(const TrajectoryDataset& dataset, const std::filesystem::path& path);

/// Header check, grouping and equal-length check only; no window config.
std::vector<TrajectorySequence> read_csv_sequences(std::istream& in);

/// Reads the CSV written by write_csv. Rows must be grouped by
/// (vehicle_id, window_index) with t = 0, 1, ... inside each group, and every
/// group must have the same length. When `config` is given its total_len must
/// match that length; otherwise total_len is inferred and alpha defaults to
/// half of it. Frame indices are rebuilt as window_index * total_len + t.
TrajectoryDataset read_csv(std::istream& in, std::optional<SequenceConfig> config = std::nullopt);
TrajectoryDataset read_csv(const std::filesystem::path& path, std::optional<SequenceConfig> config = std::nullopt);

/// Formats a double so that reading it back yields the same bits.
std::string format_double(double value);

}  // namespace trajcast
