#include "topodist/io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace topodist::io {

static_assert(std::endian::native == std::endian::little,
              "feature files are little-endian; big-endian hosts need byte swaps");

namespace {

constexpr char kMagic[4] = {'T', 'D', 'F', '1'};
constexpr std::uint16_t kVersion = 1;
constexpr std::uint64_t kMaxEntries = std::uint64_t{1} << 27;  // 1 GiB of payload

std::string format_double(double v) {
  std::array<char, 64> buf;
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return std::string(buf.data());
}

FeatureMatrix read_features_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io_failure, "cannot open " + path.string());
  }
  char magic[4];
  if (!in.read(magic, 4)) {
    throw Error(ErrorCode::truncated_file, "file too short for header: " + path.string());
  }
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw Error(ErrorCode::bad_magic, "not a feature file (bad magic): " + path.string());
  }
  std::uint16_t version = 0;
  std::uint32_t n = 0, m = 0;
  if (!in.read(reinterpret_cast<char*>(&version), sizeof version) ||
      !in.read(reinterpret_cast<char*>(&n), sizeof n) ||
      !in.read(reinterpret_cast<char*>(&m), sizeof m)) {
    throw Error(ErrorCode::truncated_file, "file too short for header: " + path.string());
  }
  if (version != kVersion) {
    throw Error(ErrorCode::unsupported_version,
                "unsupported feature file version " + std::to_string(version));
  }
  if (n == 0 || m == 0) {
    throw Error(ErrorCode::schema_violation, "feature file declares an empty matrix");
  }
  const std::uint64_t entries = static_cast<std::uint64_t>(n) * m;
  if (entries > kMaxEntries) {
    throw Error(ErrorCode::dimension_overflow,
                "declared size " + std::to_string(n) + "x" + std::to_string(m) + " is too large");
  }

  Eigen::MatrixXd values(n, m);
  std::vector<double> row(m);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(8 * m))) {
      throw Error(ErrorCode::truncated_file, "payload shorter than header declares: " + path.string());
    }
    for (std::uint32_t j = 0; j < m; ++j) {
      if (!std::isfinite(row[j])) {
        throw Error(ErrorCode::non_finite_value, "payload contains a non-finite value");
      }
      values(i, j) = row[j];
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorCode::schema_violation, "trailing bytes after payload: " + path.string());
  }
  return FeatureMatrix(std::move(values));
}

FeatureMatrix read_features_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io_failure, "cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::truncated_file, "empty csv file: " + path.string());
  }
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
  std::uint64_t n = 0, m = 0;
  {
    char extra = 0;
    if (std::sscanf(line.c_str(), "%lu,%lu %c", &n, &m, &extra) != 2) {
      throw Error(ErrorCode::malformed_csv, "csv header must be 'n,m', got: " + line);
    }
  }
  if (n == 0 || m == 0) {
    throw Error(ErrorCode::schema_violation, "csv header declares an empty matrix");
  }
  if (n * m > kMaxEntries) {
    throw Error(ErrorCode::dimension_overflow, "declared csv size is too large");
  }

  Eigen::MatrixXd values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (std::uint64_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) {
      throw Error(ErrorCode::truncated_file,
                  "csv has fewer rows than the header declares: " + path.string());
    }
    std::stringstream row(line);
    std::string field;
    for (std::uint64_t j = 0; j < m; ++j) {
      if (!std::getline(row, field, ',')) {
        throw Error(ErrorCode::malformed_csv, "row " + std::to_string(i) + " has too few fields");
      }
      char* end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
      if (end == field.c_str() || (end && *end != '\0')) {
        throw Error(ErrorCode::malformed_csv, "cannot parse '" + field + "' as a number");
      }
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::non_finite_value, "csv contains a non-finite value");
      }
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
    if (std::getline(row, field, ',')) {
      throw Error(ErrorCode::malformed_csv, "row " + std::to_string(i) + " has too many fields");
    }
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line != "\r") {
      throw Error(ErrorCode::malformed_csv, "csv has more rows than the header declares");
    }
  }
  return FeatureMatrix(std::move(values));
}

}  // namespace

FeatureFormat parse_format(const std::string& name) {
  if (name == "binary") return FeatureFormat::binary;
  if (name == "csv") return FeatureFormat::csv;
  throw Error(ErrorCode::invalid_argument, "unknown feature format: " + name);
}

FeatureMatrix read_features(const std::filesystem::path& path, FeatureFormat format) {
  return format == FeatureFormat::binary ? read_features_binary(path) : read_features_csv(path);
}

void write_features(const FeatureMatrix& features, const std::filesystem::path& path,
                    FeatureFormat format) {
  const Eigen::MatrixXd& values = features.values();
  const std::uint32_t n = static_cast<std::uint32_t>(values.rows());
  const std::uint32_t m = static_cast<std::uint32_t>(values.cols());

  if (format == FeatureFormat::binary) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::io_failure, "cannot open " + path.string() + " for writing");
    }
    out.write(kMagic, 4);
    out.write(reinterpret_cast<const char*>(&kVersion), sizeof kVersion);
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(&m), sizeof m);
    std::vector<double> row(m);
    for (std::uint32_t i = 0; i < n; ++i) {
      for (std::uint32_t j = 0; j < m; ++j) row[j] = values(i, j);
      out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(8 * m));
    }
    if (!out.good()) {
      throw Error(ErrorCode::io_failure, "error writing " + path.string());
    }
    return;
  }

  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::io_failure, "cannot open " + path.string() + " for writing");
  }
  out << n << "," << m << "\n";
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < m; ++j) {
      if (j) out << ",";
      out << format_double(values(i, j));
    }
    out << "\n";
  }
  if (!out.good()) {
    throw Error(ErrorCode::io_failure, "error writing " + path.string());
  }
}

void write_diagram(const PersistenceDiagram& diagram, const std::filesystem::path& path,
                   const nlohmann::json& metadata) {
  int dim = 0;
  for (std::size_t i = 0; i < diagram.pairs.size(); ++i) {
    if (i == 0) dim = diagram.pairs[i].dim;
    if (diagram.pairs[i].dim != dim) {
      throw Error(ErrorCode::mixed_dimension_diagram,
                  "diagram documents hold a single homology dimension");
    }
  }
  nlohmann::json doc;
  doc["dimension"] = dim;
  doc["n_points"] = diagram.n_points;
  nlohmann::json pairs = nlohmann::json::array();
  for (const PersistencePair& p : diagram.pairs) {
    nlohmann::json entry = nlohmann::json::array();
    entry.push_back(p.birth);
    if (std::isinf(p.death)) {
      entry.push_back(nullptr);
    } else {
      entry.push_back(p.death);
    }
    pairs.push_back(std::move(entry));
  }
  doc["pairs"] = std::move(pairs);
  doc["metadata"] = metadata;

  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::io_failure, "cannot open " + path.string() + " for writing");
  }
  out << doc.dump(2) << "\n";
  if (!out.good()) {
    throw Error(ErrorCode::io_failure, "error writing " + path.string());
  }
}

PersistenceDiagram read_diagram(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io_failure, "cannot open " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::schema_violation, "invalid diagram json: " + std::string(e.what()));
  }

  if (!doc.is_object() || !doc.contains("dimension") || !doc.contains("pairs") ||
      !doc.contains("n_points") || !doc["dimension"].is_number_integer() ||
      !doc["pairs"].is_array() || !doc["n_points"].is_number_unsigned()) {
    throw Error(ErrorCode::schema_violation, "diagram document is missing required fields");
  }
  const int dim = doc["dimension"].get<int>();
  if (dim != 0 && dim != 1) {
    throw Error(ErrorCode::schema_violation, "diagram dimension must be 0 or 1");
  }

  PersistenceDiagram diagram;
  diagram.n_points = doc["n_points"].get<std::size_t>();
  for (const nlohmann::json& entry : doc["pairs"]) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
        !(entry[1].is_number() || entry[1].is_null())) {
      throw Error(ErrorCode::schema_violation, "diagram pairs must be [birth, death-or-null]");
    }
    PersistencePair p;
    p.birth = entry[0].get<double>();
    p.death = entry[1].is_null() ? kInfiniteDeath : entry[1].get<double>();
    p.dim = dim;
    if (!std::isfinite(p.birth) || p.birth < 0.0) {
      throw Error(ErrorCode::schema_violation, "birth values must be finite and nonnegative");
    }
    if (p.death < p.birth) {
      throw Error(ErrorCode::schema_violation, "death must be >= birth");
    }
    diagram.pairs.push_back(p);
  }
  return diagram;
}

nlohmann::json report_payload(const ScoreReport& report) {
  nlohmann::json payload;
  payload["metric"] = report.metric;
  if (std::isfinite(report.value)) {
    payload["value"] = report.value;
    payload["infinite"] = false;
  } else {
    payload["value"] = nullptr;
    payload["infinite"] = true;
  }
  payload["metadata"] = report.metadata;
  return payload;
}

void write_report(const ScoreReport& report, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["payload"] = report_payload(report);
  doc["timing"] = {{"wall_time_seconds", report.wall_time_seconds}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::io_failure, "cannot open " + path.string() + " for writing");
  }
  out << doc.dump(2) << "\n";
  if (!out.good()) {
    throw Error(ErrorCode::io_failure, "error writing " + path.string());
  }
}

}  // namespace topodist::io
