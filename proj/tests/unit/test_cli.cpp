#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "isingeq/cli.hpp"

using namespace isingeq;
using namespace isingeq::cli;
using nlohmann::json;

namespace {

constexpr double kSpontaneousTwo = 0.95750402407726874068;  // m = tanh(2m)

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "isingeq");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
        std::vector<std::string> cells;
        std::size_t begin = 0;
        for (;;) {
            const auto end = line.find(',', begin);
            cells.push_back(line.substr(begin, end == std::string::npos ? end : end - begin));
            if (end == std::string::npos) break;
            begin = end + 1;
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

std::filesystem::path scratch(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("isingeq_cli_" + name);
}

// Numeric cells within 1e-12, everything else verbatim.
void check_same_csv(const std::string& actual, const std::string& expected) {
    const auto a = parse_csv(actual);
    const auto e = parse_csv(expected);
    REQUIRE(a.size() == e.size());
    CHECK(a.front() == e.front());
    for (std::size_t r = 1; r < a.size(); ++r) {
        REQUIRE(a[r].size() == e[r].size());
        for (std::size_t c = 0; c < a[r].size(); ++c) {
            if (c == 1 || c == 3 || c == 5 || c == 7 || c == 9 || c == 11) {
                if (e[r][c].empty()) {
                    CHECK(a[r][c].empty());
                } else {
                    CHECK(std::abs(std::stod(a[r][c]) - std::stod(e[r][c])) <= 1e-12);
                }
            } else {
                CHECK(a[r][c] == e[r][c]);
            }
        }
    }
}

}  // namespace

TEST_CASE("scan header is pinned") {
    CHECK(scan_header() ==
          "sweep_variable,sweep_value,n_roots,root_1,stability_1,root_2,stability_2,root_3,stability_3,"
          "root_4,stability_4,root_5,stability_5");
    CHECK(slurp(std::filesystem::path(ISINGEQ_GOLDEN_DIR) / "scan_header.csv") == scan_header() + "\n");
}

TEST_CASE("scan output matches the golden files") {
    const std::filesystem::path golden(ISINGEQ_GOLDEN_DIR);
    const auto complete = invoke({"scan", "--sweep", "beta:0.5:1.5:0.1"});
    REQUIRE(complete.code == 0);
    check_same_csv(complete.out, slurp(golden / "scan_beta_complete.csv"));

    const auto poisson = invoke({"scan", "--graph", "poisson:4:30", "--sweep", "beta:0.1:0.4:0.05"});
    REQUIRE(poisson.code == 0);
    check_same_csv(poisson.out, slurp(golden / "scan_beta_poisson.csv"));
}

TEST_CASE("sweep grammar") {
    const Sweep s = parse_sweep("H:-0.5:0.5:0.25");
    CHECK(s.variable == "H");
    CHECK(s.points() == std::vector<double>{-0.5, -0.25, 0.0, 0.25, 0.5});
    CHECK(parse_sweep(format_sweep(s)) == s);
    CHECK(Sweep{"beta", 0.5, 1.5, 0.01}.points().size() == 101);
    CHECK_THROWS_AS(parse_sweep("beta:0:1"), ConfigError);
    CHECK_THROWS_AS(parse_sweep("beta:0:x:0.1"), ConfigError);
}

TEST_CASE("graph and noise grammar") {
    CHECK_FALSE(parse_graph("complete").has_value());
    CHECK(parse_graph("regular:3")->degrees() == std::vector<int>{3});
    CHECK(parse_graph("poisson:4:30")->max_degree() == 30);
    CHECK(parse_graph("powerlaw:2.5:1:50")->degrees().front() == 1);

    const auto path = scratch("degrees.json");
    {
        std::ofstream out(path);
        out << R"({"degrees": [1, 3], "probs": [0.5, 0.5]})";
    }
    CHECK(parse_graph("file:" + path.string())->mean_degree() == doctest::Approx(2.0));
    std::filesystem::remove(path);

    for (const char* bad : {"regular", "regular:0", "regular:2.5", "poisson:4", "poisson:-1:30",
                            "powerlaw:0.5:1:10", "lattice", "file:/nonexistent/degrees.json"}) {
        CAPTURE(bad);
        try {
            parse_graph(bad);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.field() == "graph");
        }
    }
    CHECK(parse_noise("probit").kind() == NoiseKind::Probit);
    CHECK_THROWS_AS(parse_noise("cauchy"), ConfigError);
    CHECK_THROWS_AS(parse_noise("table:/nonexistent/table.json"), ConfigError);
}

TEST_CASE("every emitted JSON config reloads to an identical RunConfig") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> small(1, 30);
    const char* graphs[] = {"complete", "regular:4", "poisson:3.5:25", "powerlaw:2.2:1:40"};
    for (int i = 0; i < 200; ++i) {
        RunConfig c;
        c.command = kCommands[i % 5];
        c.noise = i % 2 ? "gumbel" : "probit";
        c.J = std::exp(u(rng));
        c.beta = 3.0 * std::abs(u(rng));
        c.H = u(rng) / 3.0;
        c.graph = graphs[i % 4];
        for (int k = small(rng) % 4; k > 0; --k) c.m_exp.push_back(u(rng));
        c.N = small(rng);
        for (int k = small(rng) % 5; k > 0; --k) c.agents.push_back(small(rng));
        if (i % 3) c.sweep = Sweep{"H", u(rng) - 1.0, u(rng) + 1.0, 1e-3 + std::abs(u(rng))};
        c.seed = rng();
        c.samples = rng() % 1'000'000 + 1;
        c.iterate = i % 2;
        c.m0 = u(rng);
        c.tol = std::pow(10.0, -6.0 - small(rng) % 8);
        c.scan_step = 1e-3 * (1.0 + std::abs(u(rng)));
        c.damping = 0.1 + 0.9 * std::abs(u(rng));
        c.iter_tol = c.tol / 3.0;
        c.max_iter = small(rng) * 100;
        c.threads = static_cast<unsigned>(small(rng) % 8);
        c.out = i % 2 ? "" : "report.json";
        CHECK(config_from_json(json::parse(to_json(c).dump())) == c);
    }
}

TEST_CASE("config file round trip and flags overriding it") {
    const auto path = scratch("config.json");
    const auto saved = scratch("saved.json");
    RunConfig c;
    c.command = "solve";
    c.beta = 2.0;
    c.J = 1.0;
    c.H = 0.1;
    save_config(c, path);
    CHECK(load_config(path) == c);

    const auto r = invoke({"--config", path.string(), "--H", "0", "--save-config", saved.string()});
    REQUIRE(r.code == 0);
    RunConfig expected = c;
    expected.H = 0.0;
    CHECK(load_config(saved) == expected);
    CHECK(json::parse(r.out)["n_roots"] == 3);

    // The file alone keeps its own values.
    CHECK(json::parse(invoke({"--config", path.string()}).out)["params"]["H"] == 0.1);
    std::filesystem::remove(path);
    std::filesystem::remove(saved);
}

TEST_CASE("config loading rejects unknown keys and wrong types") {
    const auto check_field = [](const char* text, const std::string& field) {
        try {
            config_from_json(json::parse(text));
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.field() == field);
        }
    };
    check_field(R"({"betta": 1})", "betta");
    check_field(R"({"beta": "hot"})", "beta");
    check_field(R"({"sweep": 3})", "sweep");
    check_field("[1, 2]", "config");
}

TEST_CASE("solve: three roots at beta J = 2") {
    const auto r = invoke({"solve", "--noise", "gumbel", "--beta", "2", "--J", "1", "--H", "0", "--graph", "complete"});
    REQUIRE(r.code == 0);
    const auto doc = json::parse(r.out);
    REQUIRE(doc["roots"].size() == 3);
    CHECK(doc["roots"][0]["m"].get<double>() == doctest::Approx(-kSpontaneousTwo).epsilon(1e-12));
    CHECK(doc["roots"][1]["m"].get<double>() == 0.0);
    CHECK(doc["roots"][2]["m"].get<double>() == doctest::Approx(kSpontaneousTwo).epsilon(1e-12));
    CHECK(doc["roots"][1]["stability"] == "unstable");
    CHECK(doc["roots"][2]["stability"] == "stable");
}

TEST_CASE("solve: single root below the transition") {
    const auto doc = json::parse(invoke({"solve", "--beta", "0.5", "--J", "1", "--H", "0", "--graph", "complete"}).out);
    REQUIRE(doc["roots"].size() == 1);
    CHECK(doc["roots"][0]["m"].get<double>() == 0.0);
}

TEST_CASE("solve: poisson graph above its threshold") {
    const auto r = invoke({"solve", "--graph", "poisson:4:30", "--beta", "0.3", "--J", "1", "--H", "0"});
    REQUIRE(r.code == 0);
    const auto doc = json::parse(r.out);
    REQUIRE(doc["roots"].size() == 3);
    CHECK(doc["roots"][2]["m_w"].get<double>() > 0.5);
    CHECK(doc["roots"][2]["m_k"].size() == doc["degrees"].size());
}

TEST_CASE("scan: root count switches from 1 to 3 near beta = 1 / J") {
    const auto r = invoke({"scan", "--sweep", "beta:0.5:1.5:0.01", "--J", "1", "--H", "0"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 102);
    // onset: midpoint of the first sweep interval where the count changes
    double onset = NAN;
    int previous = 1;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const int n = std::stoi(rows[i][2]);
        CHECK((n == 1 || n == 3));
        if (n == 3 && previous == 1) onset = 0.5 * (std::stod(rows[i - 1][1]) + std::stod(rows[i][1]));
        previous = n;
    }
    CHECK(std::abs(onset - 1.0) <= 1e-2);
}

TEST_CASE("scan: largest root is nondecreasing in H") {
    const auto r = invoke({"scan", "--sweep", "H:-0.5:0.5:0.02", "--beta", "2", "--J", "1"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    double previous = -1.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const int n = std::stoi(rows[i][2]);
        const double largest = std::stod(rows[i][3 + 2 * (n - 1)]);
        CHECK(largest >= previous);
        previous = largest;
    }
}

TEST_CASE("scan output does not depend on the worker count") {
    const auto a = invoke({"scan", "--sweep", "beta:0.2:2:0.05", "--noise", "probit", "--threads", "1"});
    const auto b = invoke({"scan", "--sweep", "beta:0.2:2:0.05", "--noise", "probit", "--threads", "8"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("exit code 2 names the offending field") {
    const auto expect = [](std::vector<std::string> args, const std::string& field) {
        const auto r = invoke(std::move(args));
        CHECK(r.code == 2);
        CHECK(r.err.find(field) != std::string::npos);
        CHECK(r.out.empty());
    };
    expect({"scan", "--sweep", "beta:1.5:0.5:0.01"}, "sweep");
    expect({"scan", "--sweep", "beta:0.5:1.5:0"}, "sweep");
    expect({"scan", "--sweep", "T:0:1:0.1"}, "sweep");
    expect({"scan"}, "sweep");
    expect({"solve", "--J", "0"}, "J");
    expect({"solve", "--beta", "-1"}, "beta");
    expect({"solve", "--graph", "poisson:4"}, "graph");
    expect({"solve", "--noise", "logit"}, "noise");
    expect({"oracle", "--N", "25"}, "N");
    expect({"oracle", "--graph", "regular:2"}, "agents");
    expect({"oracle", "--graph", "regular:2", "--agents", "2,3"}, "agents");
    expect({"simulate", "--m-exp", "1.5"}, "m_exp");
    expect({"simulate", "--graph", "poisson:4:10", "--m-exp", "0.1,0.2"}, "m_exp");
    expect({"partition", "--graph", "regular:3"}, "graph");
    expect({"partition", "--N", "0"}, "N");
    expect({"--config", "/nonexistent/config.json"}, "config");
    expect({"frobnicate"}, "command");
    expect({"solve", "--beta"}, "beta");
}

TEST_CASE("exit code 3 when the roots overflow the CSV columns") {
    // Staircase log-odds: T(m) has plateaus at 0.2, 0.5 and 0.8, giving 13
    // self-consistent points at beta = J = 1.
    const auto table = scratch("stairs.json");
    {
        json doc;
        doc["x"] = {0.0, 0.2, 0.201, 0.7, 0.701, 1.3, 1.301, 2.0};
        const double a = 2.0 * std::atanh(0.2), b = 2.0 * std::atanh(0.5), c = 2.0 * std::atanh(0.8);
        doc["g"] = {0.0, 0.0, a, a, b, b, c, c};
        std::ofstream(table) << doc.dump();
    }
    const std::string noise = "table:" + table.string();
    const auto solved = invoke({"solve", "--noise", noise});
    REQUIRE(solved.code == 0);
    CHECK(json::parse(solved.out)["n_roots"] == 13);
    const auto r = invoke({"scan", "--noise", noise, "--sweep", "beta:1:1:1"});
    CHECK(r.code == 3);
    CHECK(r.out.empty());

    // Outside the table's range is a configuration problem.
    CHECK(invoke({"solve", "--noise", noise, "--beta", "5"}).code == 2);
    std::filesystem::remove(table);
}

TEST_CASE("oracle report") {
    const auto r = invoke({"oracle", "--N", "8", "--beta", "1.2", "--H", "0.1", "--m-exp", "0.3"});
    REQUIRE(r.code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["argmax_config"].size() == 8);
    const auto& cls = doc["classes"][0];
    CHECK(cls["argmax_matches_binomial_mode"] == true);
    CHECK(cls["tv_to_binomial"].get<double>() < 1e-14);
    CHECK(cls["argmax_within_two_spacings"] == true);
    CHECK(cls["best_response_mean"].get<double>() ==
          doctest::Approx(std::tanh(1.2 * (0.1 + 0.3))).epsilon(1e-14));

    const auto g = invoke({"oracle", "--graph", "file:" ISINGEQ_GOLDEN_DIR "/two_class_degrees.json", "--agents",
                           "1,3,1,3,3", "--m-exp=0.2,-0.1"});
    REQUIRE(g.code == 0);
    const auto two = json::parse(g.out);
    REQUIRE(two["classes"].size() == 2);
    CHECK(two["classes"][0]["degree"] == 1);
    CHECK(two["classes"][1]["count"] == 3);
    CHECK(two["joint_law"].size() == 12);
}

TEST_CASE("simulate is deterministic for a fixed seed") {
    const std::vector<std::string> args = {"simulate", "--beta", "0.8", "--H", "0.1", "--m-exp", "0.2",
                                           "--samples", "20000", "--seed", "77", "--iterate"};
    auto with_threads = args;
    with_threads.insert(with_threads.end(), {"--threads", "3"});
    const auto a = invoke(args);
    const auto b = invoke(with_threads);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto doc = json::parse(a.out);
    CHECK(doc["seed"] == 77);
    CHECK(std::abs(doc["classes"][0]["z_score"].get<double>()) < 5.0);
    CHECK(doc["iteration"]["converged"] == true);

    auto other_seed = args;
    other_seed[10] = "78";
    CHECK(invoke(other_seed).out != a.out);
}

TEST_CASE("partition agrees with the likelihood argmax") {
    const auto r = invoke({"partition", "--N", "200", "--beta", "1.3", "--H", "-0.05", "--m-exp", "0.4"});
    REQUIRE(r.code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["agrees"] == true);
    CHECK(doc["log_z"].get<double>() == doctest::Approx(doc["closed_form_log_z"].get<double>()).epsilon(1e-12));
}

TEST_CASE("--out writes the report to a file") {
    const auto path = scratch("roots.json");
    const auto r = invoke({"solve", "--beta", "2", "--out", path.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    const auto first = slurp(path);
    CHECK(json::parse(first)["n_roots"] == 3);
    REQUIRE(invoke({"solve", "--beta", "2", "--out", path.string()}).code == 0);
    CHECK(slurp(path) == first);
    std::filesystem::remove(path);
}

TEST_CASE("help exits cleanly") {
    const auto r = invoke({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("--sweep") != std::string::npos);
}
