#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "topodist/geometry.hpp"
#include "topodist/metrics.hpp"
#include "topodist/persistence.hpp"

namespace topodist::io {

enum class FeatureFormat { binary, csv };

FeatureFormat parse_format(const std::string& name);

// Binary feature files: magic "TDF1", u16 version, u32 n, u32 m, then n*m
// little-endian 64-bit floats in row-major order. CSV files start with an
// "n,m" header line. Binary round-trips are bit-exact; CSV is written with 17
// significant digits so values survive a round-trip too.
FeatureMatrix read_features(const std::filesystem::path& path, FeatureFormat format);
void write_features(const FeatureMatrix& features, const std::filesystem::path& path,
                    FeatureFormat format);

// Diagram documents are JSON with fields dimension, n_points, pairs (each
// [birth, death], infinite death encoded as null) and free-form metadata.
void write_diagram(const PersistenceDiagram& diagram, const std::filesystem::path& path,
                   const nlohmann::json& metadata = nlohmann::json::object());
PersistenceDiagram read_diagram(const std::filesystem::path& path);

// Reports are split into a deterministic "payload" section (metric, value,
// metadata) and a "timing" section; reruns with the same seed produce
// byte-identical payloads.
nlohmann::json report_payload(const ScoreReport& report);
void write_report(const ScoreReport& report, const std::filesystem::path& path);

}  // namespace topodist::io
