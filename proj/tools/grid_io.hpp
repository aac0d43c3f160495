#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tvmax/grid.hpp"

namespace tvmax::cli {

// Unreadable or malformed grid file (CLI exit code 2).
class MalformedInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class GridFormat { kCsv, kJson };

// Format from the file extension; nullopt when it is neither .csv nor .json.
std::optional<GridFormat> format_from_extension(const std::filesystem::path& path);

// Rectangular rows of comma-separated decimals, no header.
ScoreGrid parse_csv(const std::string& text);
// {"rows": a, "cols": b, "data": [a*b numbers, row-major]}; other keys are ignored.
ScoreGrid parse_json(const std::string& text);

ScoreGrid read_grid(const std::filesystem::path& path, GridFormat format);

// %.17g, which round-trips every finite double.
std::string format_number(double v);

struct JsonGridFields {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::span<const double> data;
  std::string transform;
  std::optional<double> lambda;
  // Already-serialised members appended after "data", e.g. {"groups", "[0,1]"}.
  std::vector<std::pair<std::string, std::string>> extra;
};

// Deterministic pretty-free JSON rendering, newline terminated.
std::string render_json(const JsonGridFields& fields);

std::string render_int_array(std::span<const std::size_t> values);

// Plain PGM (P2): pixel = round(255 * p / max p), all zero if max p is 0.
std::string render_pgm(const ScoreGrid& distribution);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace tvmax::cli
