#include "hopflab/errors.hpp"
#include "hopflab/io/commands.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hopflab::io {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr const char* kManifest = "manifest.json";

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& data) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + p.string());
    out << data;
    out.close();
    if (!out) throw IoError("write failed for " + p.string());
}

}  // namespace

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw IoError("sha256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned i = 0; i < len; ++i) {
        s += hex[md[i] >> 4];
        s += hex[md[i] & 15];
    }
    return s;
}

std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void prepare_output_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
    if (!fs::is_directory(dir)) throw IoError("output path is not a directory: " + dir);
    const fs::path probe = fs::path(dir) / ".hopflab_write_probe";
    {
        std::ofstream out(probe);
        if (!out) throw IoError("output directory is not writable: " + dir);
    }
    fs::remove(probe, ec);
}

void write_outputs(const std::string& verb, const std::string& preset, const RunConfig& cfg, const RunOutputs& out,
                   const std::string& started) {
    const fs::path dir(cfg.output_dir);
    std::vector<std::string> produced;
    for (const auto& f : out.files) {
        write_file(dir / f.name, f.content);
        produced.push_back(f.name);
    }

    ordered_json j;
    j["artifact"] = "hopflab";
    j["version"] = kVersion;
    j["command"] = verb;
    j["preset"] = preset.empty() ? ordered_json(nullptr) : ordered_json(preset);
    j["started"] = started;
    j["finished"] = utc_timestamp();
    ordered_json conf = ordered_json::object();
    for (const auto& [k, v] : cfg.values) conf[k] = v;
    j["config"] = std::move(conf);
    j["warnings"] = out.warnings;

    // Every regular file currently in the directory, including leftovers from earlier runs.
    std::vector<std::string> names;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const std::string rel = fs::relative(e.path(), dir).generic_string();
        if (rel != kManifest) names.push_back(rel);
    }
    std::sort(names.begin(), names.end());
    ordered_json files = ordered_json::array();
    for (const auto& n : names) {
        const std::string data = read_file(dir / n);
        ordered_json e;
        e["file"] = n;
        e["sha256"] = sha256_hex(data);
        e["bytes"] = data.size();
        e["produced_by_this_run"] = std::find(produced.begin(), produced.end(), n) != produced.end();
        files.push_back(std::move(e));
    }
    j["files"] = std::move(files);
    write_file(dir / kManifest, j.dump(2) + "\n");
}

}  // namespace hopflab::io
