#pragma once

// Run manifests: a JSON record written next to every CLI output.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace toonfuse {

inline constexpr const char* kToolVersion = "0.1.0";

struct FileDigest {
    std::string path;
    std::string fnv1a64;  ///< 16 lowercase hex digits
};

FileDigest digest_file(const std::filesystem::path& path);

struct RunManifest {
    std::string command;
    nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
    std::vector<FileDigest> inputs;
    std::vector<FileDigest> outputs;
    std::string tool_version = kToolVersion;
};

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const std::string& text);

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

}  // namespace toonfuse
