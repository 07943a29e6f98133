#pragma once

#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "isingeq/complete_graph.hpp"
#include "isingeq/core_model.hpp"
#include "isingeq/root_scan.hpp"

namespace isingeq {

// Finite-support vertex-degree law {pi_k} of a configuration-model graph.
//
// Unbounded laws (Poisson, power law) are truncated at kmax and renormalised;
// the discarded probability is kept in truncation_mass(). Degree 0 is
// allowed: such vertices carry no edge weight.
class DegreeDistribution {
public:
    static DegreeDistribution regular(int z);
    static DegreeDistribution poisson(double lambda, int kmax);
    // pi_k proportional to k^-gamma on kmin..kmax
    static DegreeDistribution powerlaw(double gamma, int kmin, int kmax);
    // (degree, weight) pairs; weights are renormalised.
    static DegreeDistribution from_pairs(std::vector<std::pair<int, double>> pairs);
    // {"degrees": [...], "probs": [...]}
    static DegreeDistribution from_json(const nlohmann::json& doc);
    static DegreeDistribution load(const std::filesystem::path& path);

    const std::vector<int>& degrees() const noexcept { return degrees_; }
    const std::vector<double>& probs() const noexcept { return probs_; }
    // w_k = k pi_k / E[k]
    const std::vector<double>& edge_weights() const noexcept { return weights_; }
    double mean_degree() const noexcept { return mean_; }
    double second_moment() const noexcept { return second_moment_; }
    double truncation_mass() const noexcept { return truncation_mass_; }
    int max_degree() const noexcept { return degrees_.back(); }
    std::size_t size() const noexcept { return degrees_.size(); }
    // Position of k in degrees(), or -1.
    std::ptrdiff_t index_of(int k) const;

    nlohmann::json to_json() const;

private:
    DegreeDistribution(std::vector<int> degrees, std::vector<double> probs, double truncation_mass);

    std::vector<int> degrees_;
    std::vector<double> probs_;
    std::vector<double> weights_;
    double mean_ = 0.0;
    double second_moment_ = 0.0;
    double truncation_mass_ = 0.0;
};

struct RandomGraphGame {
    GameParams params;
    NoiseModel noise;
    DegreeDistribution degrees;
};

// A self-consistent solution of the degree-weighted fixed point.
struct DegreeClassEquilibrium {
    double m_w = 0.0;
    std::vector<double> m_k;  // aligned with degrees().degrees()
    double residual = 0.0;    // |R(m_w)|
    Stability stability = Stability::NotClassified;
    double map_derivative = 0.0;  // d/dm_w of sum_k w_k m_k(m_w)
};

// One-shot likelihood equilibrium for given per-degree expectations.
struct DegreeClassResponse {
    double m_w_expectation = 0.0;
    std::vector<double> m_k;
};

// sum_k w_k m_k
double weighted_expectation(const DegreeDistribution& dist, std::span<const double> m_k);

// tanh(g(2 beta [H + J k m_w]) / 2)
double degree_class_response(const RandomGraphGame& game, int k, double m_w_exp);

std::vector<double> degree_class_responses(const RandomGraphGame& game, double m_w_exp);

// sum_k w_k degree_class_response(k, m_w)
double weighted_response(const RandomGraphGame& game, double m_w_exp);

// Derivative of weighted_response. Closed form for Gumbel noise, central
// finite difference (step 1e-6) otherwise.
double weighted_response_derivative(const RandomGraphGame& game, double m_w);

std::vector<DegreeClassEquilibrium> qre_fixed_point(const RandomGraphGame& game,
                                                    const ScanOptions& options = {});

DegreeClassResponse expectation_consistent_solve(const RandomGraphGame& game,
                                                 std::span<const double> m_k_exp);

}  // namespace isingeq
