#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "noisestab/model.hpp"
#include "noisestab/weights.hpp"

namespace noisestab {

/// Thrown for malformed configuration; maps to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// "%.17g" with '.' as decimal separator regardless of locale; nan / inf spelled out.
std::string format_double(double x);

/// Comma separated output with a one-line header.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    void row(std::initializer_list<double> values) { row(std::vector<double>(values)); }
    void row(const std::vector<double>& values);
    const std::filesystem::path& path() const { return path_; }
    void close() { out_.close(); }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
};

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

inline constexpr int kManifestSchemaVersion = 1;

struct RunManifest {
    std::string command;
    nlohmann::json parameters = nlohmann::json::object();
    std::vector<std::uint64_t> seeds;
    std::string tool_version;
    std::string started;   ///< ISO 8601 UTC
    std::string finished;
    std::vector<std::filesystem::path> outputs;

    nlohmann::json to_json() const;
    /// Digests every output and writes the manifest next to them.
    void write(const std::filesystem::path& path) const;
};

std::string utc_timestamp();
const char* tool_version();

/// Everything a run can be configured with. Flat key = value file format.
struct ExperimentConfig {
    ModelSpec model;
    std::string sigma_expr = "0";  ///< a number, or "auto" / "auto*f" (f times critical sigma)
    WeightSpec weight;
    Grid grid;
    double dt = 0.0025;
    double T = 500.0;
    std::uint64_t seed = 1;
    double tol = 1e-8;

    /// Module preconditions that can be checked without running anything.
    void validate() const;
    nlohmann::json to_json() const;
};

/// Applies `key = value` to cfg. Throws ConfigError naming the key.
void apply_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Reads `key = value` lines ('#' starts a comment) over the defaults and validates.
ExperimentConfig load_config(const std::filesystem::path& path);

/// True for "auto" / "auto*f" (factor set to f, default 1); otherwise the
/// expression must be a number and is stored in value.
bool parse_sigma_expr(const std::string& expr, double& value, double& factor);

/// Directory for outputs: $NOISESTAB_OUT_DIR, else the current directory.
std::filesystem::path default_output_dir();

/// Writes x,u columns to `path` and a JSON sidecar `path` + ".json" with the
/// grid and `meta`. Returns both paths.
std::vector<std::filesystem::path> write_field_dump(const std::filesystem::path& path, const Field& u,
                                                    const Grid& g, const nlohmann::json& meta);

}  // namespace noisestab
