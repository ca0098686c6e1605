#include "toonfuse/manifest.hpp"

#include "toonfuse/binary_io.hpp"

namespace toonfuse {

using nlohmann::ordered_json;

FileDigest digest_file(const std::filesystem::path& path) {
    const Bytes bytes = read_file(path);
    return {path.generic_string(), hex64(fnv1a64(bytes))};
}

namespace {

ordered_json digests_to_json(const std::vector<FileDigest>& digests) {
    ordered_json arr = ordered_json::array();
    for (const auto& d : digests) arr.push_back({{"path", d.path}, {"fnv1a64", d.fnv1a64}});
    return arr;
}

std::vector<FileDigest> digests_from_json(const ordered_json& arr) {
    std::vector<FileDigest> out;
    for (const auto& d : arr) out.push_back({d.at("path").get<std::string>(), d.at("fnv1a64").get<std::string>()});
    return out;
}

}  // namespace

std::string manifest_to_json(const RunManifest& manifest) {
    ordered_json j;
    j["command"] = manifest.command;
    j["tool_version"] = manifest.tool_version;
    j["parameters"] = manifest.parameters;
    j["inputs"] = digests_to_json(manifest.inputs);
    j["outputs"] = digests_to_json(manifest.outputs);
    return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("manifest: ") + e.what());
    }
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.parameters = j.at("parameters");
    m.inputs = digests_from_json(j.at("inputs"));
    m.outputs = digests_from_json(j.at("outputs"));
    return m;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
    const std::string text = manifest_to_json(manifest);
    write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace toonfuse
