#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "isingeq/core_model.hpp"
#include "isingeq/errors.hpp"
#include "isingeq/random_graph.hpp"

namespace isingeq::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3 };

// Bad user input; field() names the offending config key or flag.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& message);
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// variable:start:stop:step, variable one of beta, H, J.
struct Sweep {
    std::string variable;
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;

    // start, start + step, ... up to stop (inclusive within 1e-9 steps).
    std::vector<double> points() const;

    friend bool operator==(const Sweep&, const Sweep&) = default;
};

struct RunConfig {
    std::string command = "solve";  // solve | scan | oracle | simulate | partition
    std::string noise = "gumbel";   // gumbel | probit | table:<path>
    double J = 1.0;
    double beta = 1.0;
    double H = 0.0;
    std::string graph = "complete";  // see parse_graph
    // Expectations: one value on the complete graph, one per degree class (or
    // a single broadcast value) otherwise. Empty means 0.
    std::vector<double> m_exp;
    int N = 10;                // agents for oracle and partition
    std::vector<int> agents;   // degree label per agent, oracle on random graphs
    std::optional<Sweep> sweep;
    std::string out;           // empty writes to standard output
    std::uint64_t seed = 1;
    std::uint64_t samples = 100'000;
    bool iterate = false;
    double m0 = 0.5;
    double tol = 1e-12;         // root bisection
    double scan_step = 1e-3;    // root bracketing grid
    double damping = 0.5;
    double iter_tol = 1e-12;
    int max_iter = 10'000;
    unsigned threads = 0;       // 0 picks the hardware concurrency

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline constexpr const char* kCommands[] = {"solve", "scan", "oracle", "simulate", "partition"};

nlohmann::json to_json(const RunConfig& config);
// Unknown keys and ill-typed values raise ConfigError.
RunConfig config_from_json(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);
void save_config(const RunConfig& config, const std::filesystem::path& path);

Sweep parse_sweep(const std::string& text);
std::string format_sweep(const Sweep& sweep);
NoiseModel parse_noise(const std::string& text);
// complete | regular:z | poisson:lambda:kmax | powerlaw:gamma:kmin:kmax |
// file:<path>. Empty result means the complete graph.
std::optional<DegreeDistribution> parse_graph(const std::string& text);

// Checks every field; throws ConfigError.
void validate(const RunConfig& config);

inline constexpr int kScanRootColumns = 5;
std::string scan_header();

// Command bodies. They validate, compute and write the full report to out.
void cmd_solve(const RunConfig& config, std::ostream& out);
void cmd_scan(const RunConfig& config, std::ostream& out);
void cmd_oracle(const RunConfig& config, std::ostream& out);
void cmd_simulate(const RunConfig& config, std::ostream& out);
void cmd_partition(const RunConfig& config, std::ostream& out);
void run_command(const RunConfig& config, std::ostream& out);

// Whole front end: parses arguments (argv[0] is the program name), runs the
// command and returns the exit code. Reports go to out or to --out.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace isingeq::cli
