#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "isingeq/cli.hpp"

namespace isingeq::cli {

namespace {

// Options are parsed into a scratch config; only those given on the command
// line are copied over the --config file (or the defaults).
class Overrides {
public:
    Overrides(CLI::App& app, RunConfig& scratch) : app_(app), scratch_(scratch) {}

    template <class T>
    CLI::Option* add(const std::string& name, T RunConfig::*field, const std::string& help) {
        auto* option = app_.add_option(name, scratch_.*field, help);
        entries_.push_back({option, [this, field](RunConfig& c) { c.*field = scratch_.*field; }});
        return option;
    }

    CLI::Option* add_flag(const std::string& name, bool RunConfig::*field, const std::string& help) {
        auto* option = app_.add_flag(name, scratch_.*field, help);
        entries_.push_back({option, [this, field](RunConfig& c) { c.*field = scratch_.*field; }});
        return option;
    }

    CLI::Option* add_sweep(const std::string& name, std::string& text, const std::string& help) {
        auto* option = app_.add_option(name, text, help);
        entries_.push_back({option, [&text](RunConfig& c) { c.sweep = parse_sweep(text); }});
        return option;
    }

    void apply(RunConfig& config) const {
        for (const auto& [option, copy] : entries_)
            if (option->count() > 0) copy(config);
    }

private:
    struct Entry {
        CLI::Option* option;
        std::function<void(RunConfig&)> copy;
    };
    CLI::App& app_;
    RunConfig& scratch_;
    std::vector<Entry> entries_;
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Equilibria of the noisy binary-choice Ising game", "isingeq"};
    app.get_formatter()->column_width(34);

    RunConfig scratch;
    std::string sweep_text;
    std::string config_path;
    std::string save_path;
    Overrides flags(app, scratch);

    flags.add("command", &RunConfig::command, "solve | scan | oracle | simulate | partition")
        ->check(CLI::IsMember({"solve", "scan", "oracle", "simulate", "partition"}));
    app.add_option("--config", config_path, "JSON config file; flags override its values");
    app.add_option("--save-config", save_path, "write the effective config as JSON before running");
    flags.add("--noise", &RunConfig::noise, "gumbel | probit | table:<path>");
    flags.add("--J", &RunConfig::J, "coupling J > 0");
    flags.add("--beta", &RunConfig::beta, "noise level beta >= 0");
    flags.add("--H", &RunConfig::H, "external field H");
    flags.add("--graph", &RunConfig::graph,
              "complete | regular:z | poisson:lambda:kmax | powerlaw:gamma:kmin:kmax | file:<path>");
    flags.add("--m-exp", &RunConfig::m_exp, "expectation(s), comma separated, one per degree class")
        ->delimiter(',')
        ->allow_extra_args(false);
    flags.add("--N", &RunConfig::N, "number of agents (oracle, partition)");
    flags.add("--agents", &RunConfig::agents, "degree label per agent, comma separated (oracle)")
        ->delimiter(',')
        ->allow_extra_args(false);
    flags.add_sweep("--sweep", sweep_text, "variable:start:stop:step with variable beta, H or J");
    flags.add("--out", &RunConfig::out, "output file (default: standard output)");
    flags.add("--seed", &RunConfig::seed, "Monte Carlo seed");
    flags.add("--samples", &RunConfig::samples, "Monte Carlo draws per degree class");
    flags.add_flag("--iterate", &RunConfig::iterate, "also run the damped iteration (simulate)");
    flags.add("--m0", &RunConfig::m0, "starting point of the damped iteration");
    flags.add("--tol", &RunConfig::tol, "root bisection tolerance");
    flags.add("--scan-step", &RunConfig::scan_step, "root bracketing grid spacing");
    flags.add("--damping", &RunConfig::damping, "damping of the iteration, in (0, 1]");
    flags.add("--iter-tol", &RunConfig::iter_tol, "iteration stopping tolerance");
    flags.add("--max-iter", &RunConfig::max_iter, "iteration cap");
    flags.add("--threads", &RunConfig::threads, "worker threads, 0 for all cores");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
        flags.apply(config);
        validate(config);
        if (!save_path.empty()) save_config(config, save_path);

        std::ostringstream report;
        run_command(config, report);
        if (config.out.empty()) {
            out << report.str();
        } else {
            std::ofstream file(config.out);
            if (!file || !(file << report.str())) throw ConfigError("out", "cannot write " + config.out);
        }
        return kExitOk;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const nlohmann::json::exception& e) {
        err << "error: config: " << e.what() << '\n';
        return kExitConfig;
    }
}

}  // namespace isingeq::cli
