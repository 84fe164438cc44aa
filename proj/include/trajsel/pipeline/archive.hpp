#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "trajsel/pipeline/config.hpp"

namespace trajsel::pipeline {

std::string sha256_hex(std::string_view data);

/// Reads a whole file; FileError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);
/// Writes via a temporary sibling and rename, creating parent directories.
void write_file(const std::filesystem::path& path, std::string_view content);
nlohmann::json read_json(const std::filesystem::path& path);

/// {config_hash, files: {relative path: sha256}} over every regular file in
/// `dir` except manifest.json, keys sorted. Written to dir/manifest.json.
nlohmann::json write_manifest(const std::filesystem::path& dir, const ExperimentConfig& config);
/// Recomputes file hashes; throws ConsistencyError on any mismatch.
void verify_manifest(const std::filesystem::path& dir);

}  // namespace trajsel::pipeline
