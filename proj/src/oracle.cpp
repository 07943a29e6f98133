#include "isingeq/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "isingeq/errors.hpp"
#include "isingeq/numeric.hpp"

namespace isingeq::oracle {

namespace {

struct Agent {
    std::size_t cls = 0;
    double log_p_plus = 0.0;
    double log_p_minus = 0.0;
};

struct ClassSpec {
    std::optional<int> degree;
    int count = 0;
    double p_plus = 0.0;
};

// Lexicographic order on (s_1, ..., s_N) with -1 < +1; bit i of a config
// index is agent i + 1 choosing +1.
bool lexicographically_smaller(std::uint32_t a, std::uint32_t b) {
    const std::uint32_t diff = a ^ b;
    if (diff == 0) return false;
    const int first = std::countr_zero(diff);
    return ((a >> first) & 1u) == 0u;
}

std::vector<double> argmax_of_law(const std::vector<double>& m_grid, const std::vector<double>& law) {
    double best = -std::numeric_limits<double>::infinity();
    for (double p : law) best = std::max(best, std::log(p));
    const double band = 1e-12 * std::max(1.0, std::abs(best));
    std::vector<double> out;
    for (std::size_t i = 0; i < law.size(); ++i)
        if (std::log(law[i]) >= best - band) out.push_back(m_grid[i]);
    return out;
}

EnumerationResult enumerate(const std::vector<Agent>& agents, const std::vector<ClassSpec>& specs) {
    const int N = static_cast<int>(agents.size());

    std::vector<std::size_t> radix(specs.size());
    std::vector<std::size_t> stride(specs.size());
    std::size_t cells = 1;
    for (std::size_t c = 0; c < specs.size(); ++c) {
        radix[c] = static_cast<std::size_t>(specs[c].count) + 1;
        stride[c] = cells;
        cells *= radix[c];
        if (cells > kMaxJointCells)
            throw TooLarge("joint per-class law exceeds " + std::to_string(kMaxJointCells) + " cells");
    }

    // Every configuration is weighed relative to the most likely one, whose
    // log-probability is the sum of per-agent maxima; the shifted masses are
    // all <= 1 and are summed with compensation in fixed buckets.
    double pivot = 0.0;
    for (const Agent& a : agents) pivot += std::max(a.log_p_plus, a.log_p_minus);

    std::vector<CompensatedSum> buckets(cells);
    CompensatedSum total;
    std::uint32_t best_config = 0;
    double best_log = -std::numeric_limits<double>::infinity();

    const std::uint32_t n_configs = std::uint32_t{1} << N;
    for (std::uint32_t config = 0; config < n_configs; ++config) {
        double log_p = 0.0;
        std::size_t cell = 0;
        for (int i = 0; i < N; ++i) {
            const Agent& a = agents[static_cast<std::size_t>(i)];
            if ((config >> i) & 1u) {
                log_p += a.log_p_plus;
                cell += stride[a.cls];
            } else {
                log_p += a.log_p_minus;
            }
        }
        const double mass = std::exp(log_p - pivot);
        buckets[cell].add(mass);
        total.add(mass);
        if (log_p > best_log || (log_p == best_log && lexicographically_smaller(config, best_config))) {
            best_log = log_p;
            best_config = config;
        }
    }

    EnumerationResult result;
    const double scale = std::exp(pivot);
    result.total_mass = total.value() * scale;
    result.joint_law.resize(cells);
    for (std::size_t i = 0; i < cells; ++i) result.joint_law[i] = buckets[i].value() * scale;

    result.argmax_config.resize(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i)
        result.argmax_config[static_cast<std::size_t>(i)] = ((best_config >> i) & 1u) ? 1 : -1;

    for (std::size_t c = 0; c < specs.size(); ++c) {
        ClassLaw law;
        law.degree = specs[c].degree;
        law.count = specs[c].count;
        law.p_plus = specs[c].p_plus;
        std::vector<CompensatedSum> marginal(radix[c]);
        for (std::size_t cell = 0; cell < cells; ++cell)
            marginal[(cell / stride[c]) % radix[c]].add(result.joint_law[cell]);
        for (std::size_t n = 0; n < radix[c]; ++n) {
            law.m_grid.push_back(static_cast<double>(2 * static_cast<int>(n) - law.count) / law.count);
            law.law.push_back(marginal[n].value());
        }
        law.argmax_m = argmax_of_law(law.m_grid, law.law);
        result.classes.push_back(std::move(law));
    }
    return result;
}

void check_agent_count(std::size_t N) {
    if (N < 1) throw InvalidParameter("enumeration needs at least one agent");
    if (N > static_cast<std::size_t>(kMaxAgents))
        throw TooLarge("exhaustive enumeration is limited to N <= " + std::to_string(kMaxAgents) +
                       ", got N = " + std::to_string(N));
}

}  // namespace

EnumerationResult enumerate_complete(const NoiseModel& noise, const GameParams& params, int N,
                                     double m_exp) {
    check_agent_count(static_cast<std::size_t>(std::max(N, 0)));
    if (!(std::abs(m_exp) <= 1.0)) throw DomainError("expectation m_e must lie in [-1, 1]");
    const LocalField field{params.H() + params.J() * m_exp};
    const double p_plus = choice_probability(noise, params, field, +1);
    const double p_minus = choice_probability(noise, params, field, -1);
    std::vector<Agent> agents(static_cast<std::size_t>(N),
                              Agent{0, std::log(p_plus), std::log(p_minus)});
    return enumerate(agents, {ClassSpec{std::nullopt, N, p_plus}});
}

EnumerationResult enumerate_random_small(const NoiseModel& noise, const GameParams& params,
                                         const DegreeDistribution& dist,
                                         std::span<const int> degree_labels,
                                         std::span<const double> m_k_exp) {
    check_agent_count(degree_labels.size());
    if (m_k_exp.size() != dist.size())
        throw LengthMismatch("expected " + std::to_string(dist.size()) +
                             " per-degree expectations, got " + std::to_string(m_k_exp.size()));

    // m_w straight from its definition, independent of the solver module.
    double numerator = 0.0;
    double denominator = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const double k = dist.degrees()[i];
        numerator += k * dist.probs()[i] * m_k_exp[i];
        denominator += k * dist.probs()[i];
    }
    const double m_w = numerator / denominator;

    std::map<int, int> class_sizes;
    for (int k : degree_labels) {
        if (dist.index_of(k) < 0)
            throw UnknownDegreeLabel("degree label " + std::to_string(k) +
                                     " is not in the support of the degree distribution");
        ++class_sizes[k];
    }

    std::vector<ClassSpec> specs;
    std::map<int, std::size_t> class_index;
    std::map<int, std::pair<double, double>> log_probs;
    for (const auto& [k, count] : class_sizes) {
        const LocalField field{params.H() + params.J() * k * m_w};
        const double p_plus = choice_probability(noise, params, field, +1);
        const double p_minus = choice_probability(noise, params, field, -1);
        class_index[k] = specs.size();
        log_probs[k] = {std::log(p_plus), std::log(p_minus)};
        specs.push_back(ClassSpec{k, count, p_plus});
    }

    std::vector<Agent> agents;
    for (int k : degree_labels)
        agents.push_back(Agent{class_index[k], log_probs[k].first, log_probs[k].second});
    return enumerate(agents, specs);
}

std::vector<double> binomial_mode(int N, double p) {
    if (N < 1) throw InvalidParameter("binomial_mode: N must be >= 1");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binomial_mode: p must lie in [0, 1]");
    auto grid = [N](long n) { return static_cast<double>(2 * n - N) / N; };
    if (p == 1.0) return {1.0};
    const double scaled = (N + 1.0) * p;
    const long n = static_cast<long>(std::floor(scaled));
    if (scaled == static_cast<double>(n) && n >= 1 && n <= N) return {grid(n - 1), grid(n)};
    return {grid(std::min<long>(n, N))};
}

std::vector<double> binomial_pmf(int N, double p) {
    if (N < 0 || N > 60) throw TooLarge("binomial_pmf: N must lie in 0..60");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binomial_pmf: p must lie in [0, 1]");
    std::vector<double> pmf(static_cast<std::size_t>(N) + 1);
    std::uint64_t coefficient = 1;
    for (int n = 0; n <= N; ++n) {
        pmf[static_cast<std::size_t>(n)] =
            static_cast<double>(coefficient) * std::pow(p, n) * std::pow(1.0 - p, N - n);
        // C(N, n+1) = C(N, n) (N - n) / (n + 1), exact in 64 bits for N <= 60
        coefficient = coefficient / static_cast<std::uint64_t>(n + 1) * static_cast<std::uint64_t>(N - n) +
                      coefficient % static_cast<std::uint64_t>(n + 1) * static_cast<std::uint64_t>(N - n) /
                          static_cast<std::uint64_t>(n + 1);
    }
    return pmf;
}

double total_variation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw LengthMismatch("total_variation: laws differ in support size");
    CompensatedSum acc;
    for (std::size_t i = 0; i < a.size(); ++i) acc.add(std::abs(a[i] - b[i]));
    return 0.5 * acc.value();
}

}  // namespace isingeq::oracle
