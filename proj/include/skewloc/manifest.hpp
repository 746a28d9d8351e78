#pragma once

// Run manifests: resolved config, timing and SHA-256 of every output file.
// Link against OpenSSL::Crypto when including this header.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "skewloc/errors.hpp"
#include "skewloc/io.hpp"

namespace skewloc {

inline std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw NumericError("SHA-256 initialisation failed", "manifest");
    }
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::string hex;
    char two[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(two, sizeof two, "%02x", md[i]);
        hex += two;
    }
    return hex;
}

struct RunManifest {
    std::string command;
    RunConfig config;
    double wall_seconds = 0.0;
    std::vector<std::string> outputs;

    nlohmann::json to_json() const {
        nlohmann::json files = nlohmann::json::array();
        for (const auto& f : outputs) {
            files.push_back({{"path", std::filesystem::path(f).filename().string()},
                             {"bytes", std::filesystem::file_size(f)},
                             {"sha256", sha256_file(f)}});
        }
        return {{"schema", json_schema},
                {"command", command},
                {"tool_version", version},
                {"seed", config.experiment.seed},
                {"config", skewloc::to_json(config)},
                {"config_text", to_config_text(config)},
                {"wall_seconds", wall_seconds},
                {"outputs", files}};
    }

    void write(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw ConfigError("cannot write manifest '" + path + "'");
        out << to_json().dump(2) << '\n';
    }
};

/// Re-hashes the files listed in a manifest (relative to its directory); returns the mismatches.
inline std::vector<std::string> check_manifest(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw ConfigError("cannot open manifest '" + manifest_path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("manifest is not valid JSON: " + std::string(e.what()));
    }
    const auto dir = std::filesystem::path(manifest_path).parent_path();
    std::vector<std::string> bad;
    for (const auto& f : j.at("outputs")) {
        const auto path = (dir / f.at("path").get<std::string>()).string();
        if (!std::filesystem::exists(path)) {
            bad.push_back(path + ": missing");
        } else if (sha256_file(path) != f.at("sha256").get<std::string>()) {
            bad.push_back(path + ": checksum mismatch");
        }
    }
    return bad;
}

}  // namespace skewloc
