#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "isingeq/cli.hpp"
#include "isingeq/complete_graph.hpp"
#include "isingeq/montecarlo.hpp"
#include "isingeq/oracle.hpp"

namespace isingeq::cli {

namespace {

using nlohmann::json;

struct Setup {
    NoiseModel noise;
    GameParams params;
    std::optional<DegreeDistribution> degrees;
};

Setup resolve(const RunConfig& c) {
    validate(c);
    return {parse_noise(c.noise), GameParams{c.J, c.beta, c.H}, parse_graph(c.graph)};
}

ScanOptions scan_options(const RunConfig& c) {
    ScanOptions options;
    options.step = c.scan_step;
    options.tol = c.tol;
    return options;
}

double complete_expectation(const RunConfig& c) {
    if (c.m_exp.size() > 1) throw ConfigError("m_exp", "the complete graph takes a single expectation");
    return c.m_exp.empty() ? 0.0 : c.m_exp[0];
}

std::vector<double> class_expectations(const RunConfig& c, const DegreeDistribution& dist) {
    if (c.m_exp.empty()) return std::vector<double>(dist.size(), 0.0);
    if (c.m_exp.size() == 1) return std::vector<double>(dist.size(), c.m_exp[0]);
    if (c.m_exp.size() != dist.size())
        throw ConfigError("m_exp", fmt::format("expected 1 or {} values (one per degree), got {}",
                                               dist.size(), c.m_exp.size()));
    return c.m_exp;
}

json params_json(const GameParams& p) { return {{"J", p.J()}, {"beta", p.beta()}, {"H", p.H()}}; }

json header_json(const RunConfig& c, const Setup& s) {
    json doc = {{"command", c.command}, {"noise", c.noise}, {"graph", c.graph}, {"params", params_json(s.params)}};
    if (s.degrees) {
        doc["degrees"] = s.degrees->degrees();
        doc["mean_degree"] = s.degrees->mean_degree();
        doc["second_moment"] = s.degrees->second_moment();
        doc["truncation_mass"] = s.degrees->truncation_mass();
    }
    return doc;
}

json root_json(const EquilibriumRoot& r) {
    return {{"m", r.m},
            {"residual", r.residual},
            {"stability", to_string(r.stability)},
            {"map_derivative", r.map_derivative}};
}

json root_json(const DegreeClassEquilibrium& r) {
    return {{"m_w", r.m_w},
            {"m_k", r.m_k},
            {"residual", r.residual},
            {"stability", to_string(r.stability)},
            {"map_derivative", r.map_derivative}};
}

json class_sample_json(const mc::ClassSample& s) {
    json doc = {{"p_plus", s.p_plus},
                {"target_mean", s.target_mean},
                {"empirical_mean", s.empirical_mean},
                {"standard_error", s.standard_error},
                {"z_score", s.standard_error > 0.0 ? (s.empirical_mean - s.target_mean) / s.standard_error : 0.0}};
    doc["degree"] = s.degree ? json(*s.degree) : json(nullptr);
    return doc;
}

json trace_json(const mc::IterationTrace& t) {
    return {{"initial", t.initial},
            {"damping", t.damping},
            {"converged", t.converged},
            {"status", t.converged ? "converged" : "max_iter_exceeded"},
            {"iterations", t.iterates.size()},
            {"final_value", t.final_value()},
            {"final_residual", t.final_residual},
            {"iterates", t.iterates}};
}

void write_json(const json& doc, std::ostream& out) { out << doc.dump(2) << '\n'; }

std::string csv_number(double x) { return fmt::format("{:.17g}", x); }

GameParams at_sweep_point(const GameParams& p, const std::string& variable, double value) {
    if (variable == "beta") return p.with_beta(value);
    if (variable == "H") return p.with_H(value);
    return p.with_J(value);
}

unsigned worker_count(unsigned requested, std::size_t jobs) {
    unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

}  // namespace

std::string scan_header() {
    std::string header = "sweep_variable,sweep_value,n_roots";
    for (int i = 1; i <= kScanRootColumns; ++i) header += fmt::format(",root_{0},stability_{0}", i);
    return header;
}

void cmd_solve(const RunConfig& c, std::ostream& out) {
    const Setup s = resolve(c);
    json doc = header_json(c, s);
    json roots = json::array();
    if (s.degrees) {
        for (const auto& r : qre_fixed_point({s.params, s.noise, *s.degrees}, scan_options(c)))
            roots.push_back(root_json(r));
    } else {
        for (const auto& r : qre_roots({s.params, s.noise}, scan_options(c))) roots.push_back(root_json(r));
    }
    doc["n_roots"] = roots.size();
    doc["roots"] = std::move(roots);
    write_json(doc, out);
}

void cmd_scan(const RunConfig& c, std::ostream& out) {
    const Setup s = resolve(c);
    const Sweep& sweep = *c.sweep;
    const auto values = sweep.points();
    const ScanOptions options = scan_options(c);

    std::vector<std::string> rows(values.size());
    std::vector<std::exception_ptr> failures(values.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < values.size(); i = next++) {
            try {
                const GameParams params = at_sweep_point(s.params, sweep.variable, values[i]);
                std::vector<std::pair<double, Stability>> roots;
                if (s.degrees) {
                    for (const auto& r : qre_fixed_point({params, s.noise, *s.degrees}, options))
                        roots.emplace_back(r.m_w, r.stability);
                } else {
                    for (const auto& r : qre_roots({params, s.noise}, options)) roots.emplace_back(r.m, r.stability);
                }
                if (roots.size() > static_cast<std::size_t>(kScanRootColumns))
                    throw NumericalFailure(fmt::format("{} = {}: {} roots exceed the {} CSV root columns",
                                                       sweep.variable, csv_number(values[i]), roots.size(),
                                                       kScanRootColumns));
                std::string row = fmt::format("{},{},{}", sweep.variable, csv_number(values[i]), roots.size());
                for (int k = 0; k < kScanRootColumns; ++k) {
                    if (static_cast<std::size_t>(k) < roots.size())
                        row += fmt::format(",{},{}", csv_number(roots[k].first), to_string(roots[k].second));
                    else
                        row += ",,";
                }
                rows[i] = std::move(row);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    const unsigned workers = worker_count(c.threads, values.size());
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    pool.clear();

    for (const auto& failure : failures)
        if (failure) std::rethrow_exception(failure);
    out << scan_header() << '\n';
    for (const auto& row : rows) out << row << '\n';
}

void cmd_oracle(const RunConfig& c, std::ostream& out) {
    const Setup s = resolve(c);
    json doc = header_json(c, s);
    oracle::EnumerationResult result;
    std::vector<double> best_response;
    if (s.degrees) {
        if (c.agents.empty()) throw ConfigError("agents", "oracle on a random graph needs one degree label per agent");
        if (c.agents.size() > static_cast<std::size_t>(oracle::kMaxAgents))
            throw ConfigError("agents", fmt::format("at most {} agents can be enumerated", oracle::kMaxAgents));
        const auto m_k = class_expectations(c, *s.degrees);
        const RandomGraphGame game{s.params, s.noise, *s.degrees};
        try {
            result = oracle::enumerate_random_small(s.noise, s.params, *s.degrees, c.agents, m_k);
        } catch (const UnknownDegreeLabel& e) {
            throw ConfigError("agents", e.what());
        }
        const double m_w = weighted_expectation(*s.degrees, m_k);
        for (const auto& law : result.classes) best_response.push_back(degree_class_response(game, *law.degree, m_w));
        doc["m_exp"] = m_k;
        doc["m_w_expectation"] = m_w;
        doc["N"] = c.agents.size();
    } else {
        if (c.N > oracle::kMaxAgents)
            throw ConfigError("N", fmt::format("at most {} agents can be enumerated", oracle::kMaxAgents));
        const double m_exp = complete_expectation(c);
        result = oracle::enumerate_complete(s.noise, s.params, c.N, m_exp);
        best_response.push_back(best_response_mean({s.params, s.noise}, m_exp));
        doc["m_exp"] = m_exp;
        doc["N"] = c.N;
    }

    doc["argmax_config"] = result.argmax_config;
    doc["total_mass"] = result.total_mass;
    json classes = json::array();
    for (std::size_t i = 0; i < result.classes.size(); ++i) {
        const auto& law = result.classes[i];
        const auto mode = oracle::binomial_mode(law.count, law.p_plus);
        double distance = 0.0;
        for (double m : law.argmax_m) distance = std::max(distance, std::abs(m - best_response[i]));
        json entry = {{"count", law.count},
                      {"p_plus", law.p_plus},
                      {"m_grid", law.m_grid},
                      {"law", law.law},
                      {"argmax_m", law.argmax_m},
                      {"binomial_mode", mode},
                      {"argmax_matches_binomial_mode", law.argmax_m == mode},
                      {"tv_to_binomial", oracle::total_variation(law.law, oracle::binomial_pmf(law.count, law.p_plus))},
                      {"best_response_mean", best_response[i]},
                      {"argmax_distance_to_best_response", distance},
                      {"argmax_within_two_spacings", distance <= 2.0 / law.count}};
        entry["degree"] = law.degree ? json(*law.degree) : json(nullptr);
        classes.push_back(std::move(entry));
    }
    doc["classes"] = std::move(classes);
    if (s.degrees) doc["joint_law"] = result.joint_law;
    write_json(doc, out);
}

void cmd_simulate(const RunConfig& c, std::ostream& out) {
    const Setup s = resolve(c);
    json doc = header_json(c, s);
    mc::SampleReport report;
    std::optional<mc::IterationTrace> trace;
    const mc::IterationOptions options{c.damping, c.iter_tol, c.max_iter};
    if (s.degrees) {
        const RandomGraphGame game{s.params, s.noise, *s.degrees};
        const auto m_k = class_expectations(c, *s.degrees);
        report = mc::sample_mean_choice(game, m_k, c.samples, c.seed, c.threads);
        if (c.iterate) trace = mc::iterate_to_qre(game, c.m0, options);
        doc["m_exp"] = m_k;
    } else {
        const CompleteGraphGame game{s.params, s.noise};
        const double m_exp = complete_expectation(c);
        report = mc::sample_mean_choice(game, m_exp, c.samples, c.seed, c.threads);
        if (c.iterate) trace = mc::iterate_to_qre(game, c.m0, options);
        doc["m_exp"] = m_exp;
    }
    json classes = json::array();
    for (const auto& cls : report.classes) classes.push_back(class_sample_json(cls));
    doc["samples"] = report.n_samples;
    doc["seed"] = report.seed;
    doc["classes"] = std::move(classes);
    doc["iteration"] = trace ? trace_json(*trace) : json(nullptr);
    write_json(doc, out);
}

void cmd_partition(const RunConfig& c, std::ostream& out) {
    const Setup s = resolve(c);
    const CompleteGraphGame game{s.params, s.noise};
    const double m_exp = complete_expectation(c);
    const PartitionResult z = log_partition_function(game, c.N, m_exp);
    const auto modes = finite_N_distribution(game, c.N, m_exp).modes();
    json doc = header_json(c, s);
    doc["N"] = c.N;
    doc["m_exp"] = m_exp;
    doc["log_z"] = z.log_z;
    doc["closed_form_log_z"] = z.closed_form_log_z;
    doc["dominant_m"] = z.dominant_m;
    doc["likelihood_argmax"] = modes;
    doc["agrees"] = std::find(modes.begin(), modes.end(), z.dominant_m) != modes.end();
    write_json(doc, out);
}

void run_command(const RunConfig& c, std::ostream& out) {
    if (c.command == "solve") return cmd_solve(c, out);
    if (c.command == "scan") return cmd_scan(c, out);
    if (c.command == "oracle") return cmd_oracle(c, out);
    if (c.command == "simulate") return cmd_simulate(c, out);
    if (c.command == "partition") return cmd_partition(c, out);
    throw ConfigError("command", "unknown command '" + c.command + "'");
}

}  // namespace isingeq::cli
