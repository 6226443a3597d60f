#include "mmpol/sweep.hpp"

#include "json.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace mmpol {

using ojson = nlohmann::ordered_json;

std::string format_cell(const Cell& cell) {
    struct Visitor {
        std::string operator()(std::monostate) const { return "null"; }
        std::string operator()(double x) const {
            if (!std::isfinite(x)) return "null";
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", x);
            return buf;
        }
        std::string operator()(std::int64_t x) const { return std::to_string(x); }
        std::string operator()(bool x) const { return x ? "true" : "false"; }
        std::string operator()(const std::string& s) const { return s; }
    };
    return std::visit(Visitor{}, cell);
}

std::string to_csv(const SweepTable& table) {
    std::string out;
    for (std::size_t k = 0; k < table.columns.size(); ++k) {
        if (k) out += ',';
        out += table.columns[k];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) out += ',';
            out += format_cell(row[k]);
        }
        out += '\n';
    }
    return out;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256: digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

namespace {

ojson cell_json(const Cell& cell) {
    struct Visitor {
        ojson operator()(std::monostate) const { return nullptr; }
        ojson operator()(double x) const { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }
        ojson operator()(std::int64_t x) const { return x; }
        ojson operator()(bool x) const { return x; }
        ojson operator()(const std::string& s) const { return s; }
    };
    return std::visit(Visitor{}, cell);
}

std::string to_json_rows(const SweepTable& table) {
    ojson rows = ojson::array();
    for (const auto& row : table.rows) {
        ojson obj = ojson::object();
        for (std::size_t k = 0; k < row.size(); ++k) obj[table.columns[k]] = cell_json(row[k]);
        rows.push_back(std::move(obj));
    }
    return rows.dump(1) + "\n";
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (out) out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw std::filesystem::filesystem_error("cannot write output file", path,
                                                std::make_error_code(std::errc::io_error));
}

}  // namespace

WrittenFiles write_outputs(const RunConfig& config, const SweepTable& table) {
    std::filesystem::create_directories(config.directory);
    WrittenFiles written;
    ojson files = ojson::array();
    auto emit = [&](const std::string& suffix, const std::string& bytes) {
        const auto path = config.directory / (config.name + suffix);
        write_file(path, bytes);
        written.data.push_back(path);
        files.push_back({{"path", path.filename().string()}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
    };
    if (config.formats != OutputFormats::json) emit(".csv", to_csv(table));
    if (config.formats != OutputFormats::csv) emit(".json", to_json_rows(table));

    ojson manifest;
    manifest["schema_version"] = kSchemaVersion;
    manifest["tool"] = "mmpol";
    manifest["tool_version"] = kToolVersion;
    manifest["name"] = config.name;
    manifest["config"] = ojson::parse(config.source_text.empty() ? config_echo(config) : config.source_text);
    manifest["columns"] = table.columns;
    manifest["row_count"] = table.rows.size();
    manifest["files"] = files;
    written.manifest = config.directory / (config.name + ".manifest.json");
    write_file(written.manifest, manifest.dump(2) + "\n");
    return written;
}

}  // namespace mmpol
