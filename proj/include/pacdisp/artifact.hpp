#pragma once

#include <filesystem>
#include <string>

#include "pacdisp/dataset.hpp"
#include "pacdisp/model.hpp"

namespace pacdisp {

inline constexpr int kArtifactFormatVersion = 1;

// A fitted model with the schema it was trained under and free-form training
// metadata (seed, parameters, data provenance, metrics).
struct ModelArtifact {
    int format_version = kArtifactFormatVersion;
    TrainedModel model;
    Schema schema;
    nlohmann::json metadata = nlohmann::json::object();
};

// Canonical text form: pretty-printed JSON with sorted keys and a checksum
// field covering everything else. Saving a loaded artifact reproduces the
// original bytes.
std::string serialize_artifact(const ModelArtifact& artifact);
// Throws ModelError "UnsupportedVersion" or "CorruptArtifact".
ModelArtifact parse_artifact(const std::string& text);

void save_model(const ModelArtifact& artifact, const std::filesystem::path& path);
ModelArtifact load_model(const std::filesystem::path& path);

std::string checksum_hex(const std::string& bytes);

} // namespace pacdisp
