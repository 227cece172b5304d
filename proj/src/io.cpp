#include "noisestab/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "noisestab/errors.hpp"

#ifndef NOISESTAB_VERSION
#define NOISESTAB_VERSION "unknown"
#endif

namespace noisestab {

namespace fs = std::filesystem;

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    // std::to_chars ignores the locale.
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, r.ptr);
}

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary), columns_(header.size()) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_) throw std::logic_error("csv row width does not match header");
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
    out_ << '\n';
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return hex.str();
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

const char* tool_version() { return NOISESTAB_VERSION; }

nlohmann::json RunManifest::to_json() const {
    nlohmann::json files = nlohmann::json::array();
    for (const auto& p : outputs)
        files.push_back({{"path", p.filename().string()}, {"sha256", sha256_file(p)},
                         {"bytes", fs::file_size(p)}});
    return {{"schema_version", kManifestSchemaVersion},
            {"command", command},
            {"parameters", parameters},
            {"seeds", seeds},
            {"tool_version", tool_version},
            {"started", started},
            {"finished", finished},
            {"outputs", files}};
}

void RunManifest::write(const fs::path& path) const {
    const auto j = to_json();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

void ExperimentConfig::validate() const {
    if (!std::isfinite(model.nu)) throw ConfigError("nu: must be finite");
    if (!std::isfinite(model.mu)) throw ConfigError("mu: must be finite");
    try {
        weight.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string(e.what()));
    }
    if (!weight.integrable()) throw ConfigError("q: weight is not integrable for q <= 1");
    try {
        grid.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string(e.what()));
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt: must be positive");
    if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("T: must be positive");
    if (!(tol > 0.0) || !(tol < 1.0)) throw ConfigError("tol: must lie in (0, 1)");
    double value = 0.0, factor = 1.0;
    if (!parse_sigma_expr(sigma_expr, value, factor) && value < 0.0)
        throw ConfigError("sigma: must be non-negative");
}

nlohmann::json ExperimentConfig::to_json() const {
    return {{"model", std::string(to_string(model.kind))},
            {"nu", model.nu},
            {"mu", model.mu},
            {"sigma", sigma_expr},
            {"c", weight.c},
            {"q", weight.q},
            {"L", grid.length},
            {"N", grid.size},
            {"dt", dt},
            {"T", T},
            {"seed", seed},
            {"tol", tol}};
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& value) {
    double x = 0.0;
    const auto r = std::from_chars(value.data(), value.data() + value.size(), x);
    if (r.ec != std::errc() || r.ptr != value.data() + value.size() || !std::isfinite(x))
        throw ConfigError(key + ": invalid number '" + value + "'");
    return x;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
    std::uint64_t x = 0;
    const auto r = std::from_chars(value.data(), value.data() + value.size(), x);
    if (r.ec != std::errc() || r.ptr != value.data() + value.size())
        throw ConfigError(key + ": invalid non-negative integer '" + value + "'");
    return x;
}

}  // namespace

bool parse_sigma_expr(const std::string& expr, double& value, double& factor) {
    const std::string e = trim(expr);
    if (e.rfind("auto", 0) == 0) {
        factor = 1.0;
        if (e.size() > 4) {
            if (e[4] != '*') throw ConfigError("sigma: expected auto or auto*factor, got '" + expr + "'");
            factor = parse_real("sigma", trim(e.substr(5)));
            if (!(factor > 0.0)) throw ConfigError("sigma: auto factor must be positive");
        }
        return true;
    }
    value = parse_real("sigma", e);
    return false;
}

void apply_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    if (key == "model") {
        try {
            cfg.model.kind = parse_operator_kind(value);
        } catch (const std::invalid_argument&) {
            throw ConfigError("model: unknown operator '" + value + "'");
        }
    } else if (key == "nu") {
        cfg.model.nu = parse_real(key, value);
    } else if (key == "mu") {
        cfg.model.mu = parse_real(key, value);
    } else if (key == "sigma") {
        double v = 0.0, f = 1.0;
        parse_sigma_expr(value, v, f);
        cfg.sigma_expr = value;
    } else if (key == "c") {
        cfg.weight.c = parse_real(key, value);
    } else if (key == "q") {
        cfg.weight.q = parse_real(key, value);
    } else if (key == "L") {
        cfg.grid.length = parse_real(key, value);
    } else if (key == "N") {
        cfg.grid.size = static_cast<Eigen::Index>(parse_unsigned(key, value));
    } else if (key == "dt") {
        cfg.dt = parse_real(key, value);
    } else if (key == "T") {
        cfg.T = parse_real(key, value);
    } else if (key == "seed") {
        cfg.seed = parse_unsigned(key, value);
    } else if (key == "tol") {
        cfg.tol = parse_real(key, value);
    } else {
        throw ConfigError("unknown configuration key '" + key + "'");
    }
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        apply_config_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

fs::path default_output_dir() {
    if (const char* env = std::getenv("NOISESTAB_OUT_DIR"); env && *env) return env;
    return ".";
}

std::vector<fs::path> write_field_dump(const fs::path& path, const Field& u, const Grid& g,
                                       const nlohmann::json& meta) {
    check_field(u, g);
    {
        CsvWriter csv(path, {"x", "u"});
        for (Eigen::Index j = 0; j < u.size(); ++j) csv.row({g.x(j), u[j]});
    }
    fs::path sidecar = path;
    sidecar += ".json";
    nlohmann::json j = meta;
    j["L"] = g.length;
    j["N"] = g.size;
    j["data"] = path.filename().string();
    std::ofstream out(sidecar, std::ios::binary);
    out << j.dump(2) << '\n';
    return {path, sidecar};
}

}  // namespace noisestab
