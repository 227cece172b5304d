#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include "noisestab/cli.hpp"
#include "noisestab/fokker_planck.hpp"
#include "noisestab/io.hpp"

using namespace noisestab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    TempDir() : path(fs::temp_directory_path() / ("noisestab_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++))) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path path;
    static inline int counter = 0;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Result {
    int code;
    std::string out, err;
};

Result cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("17 significant digits, locale independent") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    char ref[64];
    std::snprintf(ref, sizeof ref, "%.17g", -2.5e-300);
    CHECK(format_double(-2.5e-300) == ref);
    CHECK(format_double(NAN) == "nan");
    CHECK(std::stod(format_double(M_PI)) == M_PI);
}

TEST_CASE("csv writer and digest") {
    TempDir dir;
    const auto p = dir.path / "a.csv";
    {
        CsvWriter csv(p, {"x", "y"});
        csv.row({1.0, 0.5});
        CHECK_THROWS_AS(csv.row({1.0}), std::logic_error);
    }
    CHECK(slurp(p) == "x,y\n1,0.5\n");
    std::ofstream(dir.path / "abc.txt", std::ios::binary) << "abc";
    CHECK(sha256_file(dir.path / "abc.txt") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("config files") {
    TempDir dir;
    const auto p = dir.path / "run.cfg";
    std::ofstream(p) << "";
    const auto defaults = load_config(p);
    CHECK(defaults.model.nu == ExperimentConfig{}.model.nu);
    CHECK(defaults.grid.size == 512);

    std::ofstream(p) << "# comment\nnu = 0.2\nmodel = biharmonic  # trailing\nsigma = auto*1.5\nN=256\n";
    const auto cfg = load_config(p);
    CHECK(cfg.model.nu == 0.2);
    CHECK(cfg.model.kind == OperatorKind::biharmonic);
    CHECK(cfg.grid.size == 256);
    double v = 0, f = 0;
    CHECK(parse_sigma_expr(cfg.sigma_expr, v, f));
    CHECK(f == 1.5);

    std::ofstream(p) << "q = 0.5\n";
    CHECK_THROWS_AS(load_config(p), ConfigError);
    std::ofstream(p) << "colour = red\n";
    CHECK_THROWS_WITH_AS(load_config(p), doctest::Contains("colour"), ConfigError);
    std::ofstream(p) << "dt = fast\n";
    CHECK_THROWS_WITH_AS(load_config(p), doctest::Contains("dt"), ConfigError);
    std::ofstream(p) << "N = 7\n";
    CHECK_THROWS_AS(load_config(p), ConfigError);
    CHECK_THROWS_AS(load_config(dir.path / "missing.cfg"), ConfigError);
}

TEST_CASE("cli: moments delegates to the library") {
    TempDir dir;
    const auto r = cli({"moments", "--lambda", "-1", "--sigma", "0.1", "--tol", "1e-8", "--out", dir.path.string()});
    CHECK(r.code == 0);
    CHECK(r.out == format_double(second_moment({-1.0, 0.1}, 1e-8).value) + "\n");
    CHECK(fs::exists(dir.path / "moments.csv"));
    CHECK(fs::exists(dir.path / "moments.manifest.json"));
}

TEST_CASE("cli: figure csv format") {
    TempDir dir;
    const auto r = cli({"figure", "--model", "sh", "--nu", "0.1", "--sigma-max", "1.5", "--points", "40", "--out", dir.path.string()});
    REQUIRE(r.code == 0);
    std::ifstream in(dir.path / "figure.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "sigma,ratio,small_noise");
    double prev = -1.0;
    int rows = 0;
    while (std::getline(in, line)) {
        const double s = std::stod(line.substr(0, line.find(',')));
        CHECK(s > prev);
        prev = s;
        ++rows;
    }
    CHECK(rows == 40);
    CHECK(prev == doctest::Approx(1.5));
}

TEST_CASE("cli: manifest lists every output with its digest") {
    TempDir dir;
    REQUIRE(cli({"rolls", "--nu-min", "0.02", "--nu-max", "0.05", "--points", "4", "--out", dir.path.string()}).code == 0);
    const auto j = nlohmann::json::parse(slurp(dir.path / "rolls.manifest.json"));
    CHECK(j["schema_version"] == kManifestSchemaVersion);
    CHECK(j["command"] == "rolls");
    std::set<std::string> listed;
    for (const auto& o : j["outputs"]) {
        listed.insert(o["path"].get<std::string>());
        CHECK(o["sha256"] == sha256_file(dir.path / o["path"].get<std::string>()));
    }
    for (const auto& e : fs::directory_iterator(dir.path)) {
        const auto name = e.path().filename().string();
        if (name != "rolls.manifest.json") CHECK_MESSAGE(listed.count(name) == 1, "orphan output " << name);
    }
}

TEST_CASE("cli: config file with flag override is reflected in the manifest") {
    TempDir dir;
    const auto cfg = dir.path / "c.cfg";
    std::ofstream(cfg) << "nu = 0.3\nmodel = biharmonic\n";
    REQUIRE(cli({"diameter", "--config", cfg.string(), "--nu", "0.25", "--c", "1", "--out", dir.path.string()}).code == 0);
    const auto j = nlohmann::json::parse(slurp(dir.path / "diameter.manifest.json"));
    CHECK(j["parameters"]["nu"] == 0.25);
    CHECK(j["parameters"]["model"] == "biharmonic");
}

TEST_CASE("cli: deterministic outputs") {
    TempDir a, b;
    for (const auto* d : {&a, &b})
        REQUIRE(cli({"sde", "--lambda", "-0.5", "--sigma", "0.5", "--dt", "0.01", "--T", "200", "--burn-in", "10",
                     "--record", "1", "--seed", "5", "--out", d->path.string()}).code == 0);
    CHECK(slurp(a.path / "sde_path.csv") == slurp(b.path / "sde_path.csv"));
    CHECK(slurp(a.path / "sde_average.csv") == slurp(b.path / "sde_average.csv"));
}

TEST_CASE("cli: exit codes") {
    TempDir dir;
    const auto o = dir.path.string();
    auto r = cli({"frobnicate"});
    CHECK(r.code == 2);
    CHECK(r.err.find("Usage") != std::string::npos);
    CHECK(cli({"moments", "--lambda", "-1", "--bogus", "1"}).code == 2);
    CHECK(cli({"moments", "--sigma", "0.1"}).code == 2);
    CHECK(cli({"moments", "--lambda", "-1", "--sigma", "0.1", "--q", "0.5", "--out", o}).code == 2);
    CHECK(cli({"threshold", "--model", "sh", "--nu", "1.5", "--out", o}).code == 2);
    // no sign change in [1e-6, 1e3]: numerical failure
    CHECK(cli({"threshold", "--model", "biharmonic", "--nu", "1e-9", "--out", o}).code == 1);
    CHECK(cli({"--help"}).code == 0);
    CHECK(cli({}).code == 2);
}

TEST_CASE("default output directory from the environment") {
    TempDir dir;
    ::setenv("NOISESTAB_OUT_DIR", dir.path.c_str(), 1);
    CHECK(default_output_dir() == dir.path);
    CHECK(cli({"diameter", "--model", "biharmonic", "--nu", "0.25"}).code == 0);
    CHECK(fs::exists(dir.path / "diameter.csv"));
    ::unsetenv("NOISESTAB_OUT_DIR");
    CHECK(default_output_dir() == fs::path("."));
}
