#include "grid_io.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tvmax/error.hpp"

namespace tvmax::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& token, std::size_t line) {
  const std::string t = trim(token);
  if (t.empty()) throw MalformedInput("empty field on line " + std::to_string(line));
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
    throw MalformedInput("bad number '" + t + "' on line " + std::to_string(line));
  }
  return v;
}

}  // namespace

std::optional<GridFormat> format_from_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".csv") return GridFormat::kCsv;
  if (ext == ".json") return GridFormat::kJson;
  return std::nullopt;
}

ScoreGrid parse_csv(const std::string& text) {
  std::vector<double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::size_t count = 0;
    std::string field;
    std::istringstream fields(line);
    while (std::getline(fields, field, ',')) {
      data.push_back(parse_number(field, line_no));
      ++count;
    }
    if (!line.empty() && trim(line).back() == ',') {
      throw MalformedInput("trailing comma on line " + std::to_string(line_no));
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      throw MalformedInput("line " + std::to_string(line_no) + " has " + std::to_string(count) +
                           " fields, expected " + std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0) throw MalformedInput("no data rows");
  try {
    return ScoreGrid(rows, cols, std::move(data));
  } catch (const Error& e) {
    throw MalformedInput(e.what());
  }
}

ScoreGrid parse_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedInput(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw MalformedInput("top-level JSON value must be an object");
  for (const char* key : {"rows", "cols"}) {
    if (!doc.contains(key) || !doc[key].is_number_unsigned()) {
      throw MalformedInput(std::string("missing or non-integer \"") + key + "\"");
    }
  }
  if (!doc.contains("data") || !doc["data"].is_array()) {
    throw MalformedInput("missing \"data\" array");
  }
  const auto rows = doc["rows"].get<std::size_t>();
  const auto cols = doc["cols"].get<std::size_t>();
  std::vector<double> data;
  data.reserve(doc["data"].size());
  for (const auto& v : doc["data"]) {
    if (!v.is_number()) throw MalformedInput("non-numeric entry in \"data\"");
    data.push_back(v.get<double>());
  }
  try {
    return ScoreGrid(rows, cols, std::move(data));
  } catch (const Error& e) {
    throw MalformedInput(e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedInput("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  out << contents;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

ScoreGrid read_grid(const std::filesystem::path& path, GridFormat format) {
  const std::string text = read_file(path);
  return format == GridFormat::kCsv ? parse_csv(text) : parse_json(text);
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string render_int_array(std::span<const std::size_t> values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(values[i]);
  }
  return out + "]";
}

std::string render_json(const JsonGridFields& f) {
  std::string out = "{\n";
  out += "  \"rows\": " + std::to_string(f.rows) + ",\n";
  out += "  \"cols\": " + std::to_string(f.cols) + ",\n";
  if (!f.transform.empty()) out += "  \"transform\": \"" + f.transform + "\",\n";
  if (f.lambda) out += "  \"lambda\": " + format_number(*f.lambda) + ",\n";
  out += "  \"data\": [";
  for (std::size_t i = 0; i < f.data.size(); ++i) {
    if (i) out += ", ";
    out += format_number(f.data[i]);
  }
  out += "]";
  for (const auto& [key, value] : f.extra) out += ",\n  \"" + key + "\": " + value;
  out += "\n}\n";
  return out;
}

std::string render_pgm(const ScoreGrid& distribution) {
  const auto values = distribution.values();
  const double peak = *std::max_element(values.begin(), values.end());
  std::string out = "P2\n" + std::to_string(distribution.cols()) + " " +
                    std::to_string(distribution.rows()) + "\n255\n";
  for (std::size_t r = 0; r < distribution.rows(); ++r) {
    for (std::size_t c = 0; c < distribution.cols(); ++c) {
      const long pixel = peak > 0.0 ? std::lround(255.0 * distribution(r, c) / peak) : 0;
      if (c) out += ' ';
      out += std::to_string(std::clamp(pixel, 0L, 255L));
    }
    out += '\n';
  }
  return out;
}

}  // namespace tvmax::cli
