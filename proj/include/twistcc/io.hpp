#pragma once

// File formats: config JSON, CSV, PGM rasters and run manifests.
// Numbers are written with 17 significant digits so they read back exactly.

#include <Eigen/Dense>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "twistcc/config.hpp"
#include "twistcc/error.hpp"

namespace twistcc {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct ConfigFile {
  PlanarConfig config;
  PotentialParams params;
};

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline double json_number(const nlohmann::json& v, const std::string& what) {
  if (!v.is_number()) throw InputError(what + " must be a number");
  return v.get<double>();
}

}  // namespace detail

/// Parses { "A": number, "masses": [...], "positions": [[x, y], ...] }.
/// "A" is optional and defaults to 3.
inline ConfigFile parse_config(const std::string& text, const std::string& source = "<input>") {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, col] = detail::line_column(text, byte);
    throw InputError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON: " +
                         e.what(),
                     line, col);
  }
  if (!doc.is_object()) throw InputError(source + ": config must be a JSON object");
  if (!doc.contains("masses") || !doc["masses"].is_array()) throw InputError(source + ": missing array \"masses\"");
  if (!doc.contains("positions") || !doc["positions"].is_array())
    throw InputError(source + ": missing array \"positions\"");
  const auto& jm = doc["masses"];
  const auto& jp = doc["positions"];
  if (jm.size() != jp.size())
    throw InputError(source + ": " + std::to_string(jm.size()) + " masses but " + std::to_string(jp.size()) +
                     " positions");
  const auto n = static_cast<Eigen::Index>(jm.size());
  Eigen::VectorXd m(n);
  Eigen::VectorXd q(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    m[i] = detail::json_number(jm[k], source + ": masses[" + std::to_string(i) + "]");
    if (!jp[k].is_array() || jp[k].size() != 2)
      throw InputError(source + ": positions[" + std::to_string(i) + "] must be [x, y]");
    q[2 * i] = detail::json_number(jp[k][0], source + ": positions[" + std::to_string(i) + "][0]");
    q[2 * i + 1] = detail::json_number(jp[k][1], source + ": positions[" + std::to_string(i) + "][1]");
  }
  PotentialParams params;
  if (doc.contains("A")) params.A = detail::json_number(doc["A"], source + ": A");
  return {PlanarConfig(q, m), params};
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline ConfigFile read_config(const std::filesystem::path& path) {
  return parse_config(read_text_file(path), path.string());
}

inline std::string config_json(const PlanarConfig& c, const PotentialParams& params) {
  std::ostringstream os;
  os << "{\n  \"A\": " << format_double(params.A) << ",\n  \"masses\": [";
  for (std::size_t i = 0; i < c.size(); ++i) os << (i ? ", " : "") << format_double(c.mass(i));
  os << "],\n  \"positions\": [";
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto p = c.position(i);
    os << (i ? ", " : "") << "[" << format_double(p.x()) << ", " << format_double(p.y()) << "]";
  }
  os << "]\n}\n";
  return os.str();
}

/// Writes to a temporary sibling and renames it over the target.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw InputError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline void write_config(const std::filesystem::path& path, const PlanarConfig& c, const PotentialParams& params) {
  atomic_write(path, config_json(c, params));
}

/// CSV text built row by row. Cells are written verbatim; numbers should go
/// through format_double.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : columns_(header.size()) { add_row(std::move(header)); }

  void add_row(std::vector<std::string> cells) {
    if (cells.size() != columns_) throw InputError("CSV row has the wrong number of cells");
    for (std::size_t k = 0; k < cells.size(); ++k) text_ += (k ? "," : "") + cells[k];
    text_ += '\n';
  }

  const std::string& str() const noexcept { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

/// Binary PGM (P5). Row 0 of `pixels` is written last, so with rows ordered by
/// increasing z4 the image has z4 pointing up.
inline std::string pgm_bytes(std::size_t width, std::size_t height, const std::vector<unsigned char>& pixels) {
  if (pixels.size() != width * height) throw InputError("PGM pixel count does not match the image size");
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  for (std::size_t r = height; r-- > 0;)
    out.append(reinterpret_cast<const char*>(pixels.data() + r * width), width);
  return out;
}

struct RunManifest {
  std::string subcommand;
  nlohmann::json inputs = nlohmann::json::object();
  std::vector<std::string> outputs;
  nlohmann::json tolerances = nlohmann::json::object();
  std::optional<unsigned long long> seed;
  std::string version;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["subcommand"] = subcommand;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["tolerances"] = tolerances;
    j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
    j["version"] = version;
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j["timestamp"] = buf;
    return j;
  }

  void write(const std::filesystem::path& path) const { atomic_write(path, to_json().dump(2) + "\n"); }
};

}  // namespace twistcc
