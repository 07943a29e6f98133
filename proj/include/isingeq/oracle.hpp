#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "isingeq/core_model.hpp"
#include "isingeq/random_graph.hpp"

namespace isingeq::oracle {

// Enumeration visits 2^N configurations.
inline constexpr int kMaxAgents = 24;
// Upper bound on the number of cells of the joint per-class law.
inline constexpr std::size_t kMaxJointCells = std::size_t{1} << 22;

// Law of the class-average choice m_k for the agents of one class.
struct ClassLaw {
    std::optional<int> degree;  // empty on the complete graph
    int count = 0;              // agents in the class
    double p_plus = 0.0;        // per-agent probability of +1
    std::vector<double> m_grid;  // -1 + 2n/count
    std::vector<double> law;
    std::vector<double> argmax_m;  // one value, two on a tie
};

struct EnumerationResult {
    std::vector<int> argmax_config;  // s_1..s_N, entries in {-1, +1}
    std::vector<ClassLaw> classes;   // ascending degree
    // Joint law over the per-class +1 counts, mixed radix with the first
    // class varying fastest. Equals the single class law on complete graphs.
    std::vector<double> joint_law;
    double total_mass = 0.0;
};

// Visits all 2^N configurations with per-agent probabilities from the core
// model at field H + J m_exp and aggregates their likelihood by m.
EnumerationResult enumerate_complete(const NoiseModel& noise, const GameParams& params, int N,
                                     double m_exp);

// Agent i sits on a vertex of degree degree_labels[i] and feels
// H + J k_i m_w, with m_w = sum_k k pi_k m_k / sum_k k pi_k computed from
// m_k_exp (aligned with dist.degrees()).
EnumerationResult enumerate_random_small(const NoiseModel& noise, const GameParams& params,
                                         const DegreeDistribution& dist,
                                         std::span<const int> degree_labels,
                                         std::span<const double> m_k_exp);

// m = 2 n/N - 1 at n = floor((N + 1) p); both n - 1 and n when (N + 1) p is
// an exact integer inside 1..N.
std::vector<double> binomial_mode(int N, double p);

// C(N, n) p^n (1 - p)^(N - n) with an exact integer coefficient, N <= 60.
std::vector<double> binomial_pmf(int N, double p);

double total_variation(std::span<const double> a, std::span<const double> b);

}  // namespace isingeq::oracle
