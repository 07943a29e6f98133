#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <string_view>

#include <nlohmann/json.hpp>

#include "isingeq/cli.hpp"

namespace isingeq::cli {

ConfigError::ConfigError(std::string field, const std::string& message)
    : Error(field + ": " + message), field_(std::move(field)) {}

namespace {

using nlohmann::json;

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t begin = 0;
    for (;;) {
        const auto end = text.find(sep, begin);
        parts.push_back(text.substr(begin, end == std::string_view::npos ? end : end - begin));
        if (end == std::string_view::npos) return parts;
        begin = end + 1;
    }
}

template <class T>
T parse_number(std::string_view text, const std::string& field) {
    T value{};
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc{} || ptr != last)
        throw ConfigError(field, "cannot parse number '" + std::string(text) + "'");
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) throw ConfigError(field, "value must be finite");
    }
    return value;
}

template <class T>
void read(const json& doc, const char* key, T& target) {
    const auto it = doc.find(key);
    if (it == doc.end()) return;
    try {
        target = it->get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(key, std::string("wrong type in config: ") + e.what());
    }
}

}  // namespace

std::vector<double> Sweep::points() const {
    std::vector<double> values;
    if (!(step > 0.0) || stop < start) return values;
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    values.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) values.push_back(start + static_cast<double>(i) * step);
    return values;
}

Sweep parse_sweep(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 4) throw ConfigError("sweep", "expected variable:start:stop:step, got '" + text + "'");
    Sweep sweep{std::string(parts[0]), parse_number<double>(parts[1], "sweep"),
                parse_number<double>(parts[2], "sweep"), parse_number<double>(parts[3], "sweep")};
    return sweep;
}

std::string format_sweep(const Sweep& sweep) {
    return sweep.variable + ":" + json(sweep.start).dump() + ":" + json(sweep.stop).dump() + ":" +
           json(sweep.step).dump();
}

NoiseModel parse_noise(const std::string& text) {
    if (text == "gumbel") return NoiseModel::gumbel();
    if (text == "probit") return NoiseModel::probit();
    if (text.rfind("table:", 0) == 0) {
        try {
            return NoiseModel::load_tabulated(text.substr(6));
        } catch (const Error& e) {
            throw ConfigError("noise", e.what());
        }
    }
    throw ConfigError("noise", "expected gumbel, probit or table:<path>, got '" + text + "'");
}

std::optional<DegreeDistribution> parse_graph(const std::string& text) {
    if (text == "complete") return std::nullopt;
    try {
        if (text.rfind("file:", 0) == 0) return DegreeDistribution::load(text.substr(5));
        const auto parts = split(text, ':');
        if (parts[0] == "regular" && parts.size() == 2)
            return DegreeDistribution::regular(parse_number<int>(parts[1], "graph"));
        if (parts[0] == "poisson" && parts.size() == 3)
            return DegreeDistribution::poisson(parse_number<double>(parts[1], "graph"),
                                               parse_number<int>(parts[2], "graph"));
        if (parts[0] == "powerlaw" && parts.size() == 4)
            return DegreeDistribution::powerlaw(parse_number<double>(parts[1], "graph"),
                                                parse_number<int>(parts[2], "graph"),
                                                parse_number<int>(parts[3], "graph"));
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError("graph", e.what());
    }
    throw ConfigError("graph",
                      "expected complete, regular:z, poisson:lambda:kmax, powerlaw:gamma:kmin:kmax or "
                      "file:<path>, got '" + text + "'");
}

json to_json(const RunConfig& c) {
    json doc = {
        {"command", c.command},     {"noise", c.noise},         {"J", c.J},
        {"beta", c.beta},           {"H", c.H},                 {"graph", c.graph},
        {"m_exp", c.m_exp},         {"N", c.N},                 {"agents", c.agents},
        {"out", c.out},             {"seed", c.seed},           {"samples", c.samples},
        {"iterate", c.iterate},     {"m0", c.m0},               {"tol", c.tol},
        {"scan_step", c.scan_step}, {"damping", c.damping},     {"iter_tol", c.iter_tol},
        {"max_iter", c.max_iter},   {"threads", c.threads},
    };
    if (c.sweep) {
        doc["sweep"] = {{"variable", c.sweep->variable},
                        {"start", c.sweep->start},
                        {"stop", c.sweep->stop},
                        {"step", c.sweep->step}};
    } else {
        doc["sweep"] = nullptr;
    }
    return doc;
}

RunConfig config_from_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config", "expected a JSON object");
    static const std::set<std::string> known = {
        "command", "noise", "J",       "beta",      "H",       "graph",    "m_exp",    "N",
        "agents",  "sweep", "out",     "seed",      "samples", "iterate",  "m0",       "tol",
        "scan_step", "damping", "iter_tol", "max_iter", "threads"};
    for (const auto& item : doc.items())
        if (!known.contains(item.key())) throw ConfigError(item.key(), "unknown config key");

    RunConfig c;
    read(doc, "command", c.command);
    read(doc, "noise", c.noise);
    read(doc, "J", c.J);
    read(doc, "beta", c.beta);
    read(doc, "H", c.H);
    read(doc, "graph", c.graph);
    read(doc, "m_exp", c.m_exp);
    read(doc, "N", c.N);
    read(doc, "agents", c.agents);
    read(doc, "out", c.out);
    read(doc, "seed", c.seed);
    read(doc, "samples", c.samples);
    read(doc, "iterate", c.iterate);
    read(doc, "m0", c.m0);
    read(doc, "tol", c.tol);
    read(doc, "scan_step", c.scan_step);
    read(doc, "damping", c.damping);
    read(doc, "iter_tol", c.iter_tol);
    read(doc, "max_iter", c.max_iter);
    read(doc, "threads", c.threads);

    const auto it = doc.find("sweep");
    if (it != doc.end() && !it->is_null()) {
        if (it->is_string()) {
            c.sweep = parse_sweep(it->get<std::string>());
        } else if (it->is_object()) {
            Sweep s;
            read(*it, "variable", s.variable);
            read(*it, "start", s.start);
            read(*it, "stop", s.stop);
            read(*it, "step", s.step);
            c.sweep = s;
        } else {
            throw ConfigError("sweep", "expected an object or variable:start:stop:step");
        }
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path.string());
    try {
        return config_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw ConfigError("config", path.string() + ": " + e.what());
    }
}

void save_config(const RunConfig& config, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("save-config", "cannot write " + path.string());
    out << to_json(config).dump(2) << '\n';
}

void validate(const RunConfig& c) {
    bool known_command = false;
    for (const char* name : kCommands) known_command = known_command || c.command == name;
    if (!known_command) throw ConfigError("command", "unknown command '" + c.command + "'");

    if (!std::isfinite(c.J) || !(c.J > 0.0)) throw ConfigError("J", "must be finite and > 0");
    if (!std::isfinite(c.beta) || c.beta < 0.0) throw ConfigError("beta", "must be finite and >= 0");
    if (!std::isfinite(c.H)) throw ConfigError("H", "must be finite");
    for (double m : c.m_exp)
        if (!(std::abs(m) <= 1.0)) throw ConfigError("m_exp", "expectations must lie in [-1, 1]");
    if (c.N < 1) throw ConfigError("N", "must be >= 1");
    if (!(c.tol > 0.0)) throw ConfigError("tol", "must be > 0");
    if (!(c.scan_step > 0.0) || c.scan_step > 1.0) throw ConfigError("scan_step", "must lie in (0, 1]");
    if (!(c.damping > 0.0) || c.damping > 1.0) throw ConfigError("damping", "must lie in (0, 1]");
    if (!(c.iter_tol > 0.0)) throw ConfigError("iter_tol", "must be > 0");
    if (c.max_iter < 1) throw ConfigError("max_iter", "must be >= 1");
    if (!(std::abs(c.m0) <= 1.0)) throw ConfigError("m0", "must lie in [-1, 1]");
    if (c.samples < 1) throw ConfigError("samples", "must be >= 1");

    if (c.sweep) {
        const Sweep& s = *c.sweep;
        if (s.variable != "beta" && s.variable != "H" && s.variable != "J")
            throw ConfigError("sweep", "variable must be beta, H or J, got '" + s.variable + "'");
        if (!(s.step > 0.0)) throw ConfigError("sweep", "step must be > 0");
        if (s.stop < s.start) throw ConfigError("sweep", "empty range: start > stop");
        if (s.variable == "J" && !(s.start > 0.0)) throw ConfigError("sweep", "J must stay > 0");
        if (s.variable == "beta" && s.start < 0.0) throw ConfigError("sweep", "beta must stay >= 0");
    } else if (c.command == "scan") {
        throw ConfigError("sweep", "scan needs --sweep variable:start:stop:step");
    }
    if (c.command == "partition" && c.graph != "complete")
        throw ConfigError("graph", "partition is defined on the complete graph only");
}

}  // namespace isingeq::cli
