#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "isingeq/core_model.hpp"
#include "isingeq/root_scan.hpp"

namespace isingeq {

struct CompleteGraphGame {
    GameParams params;
    NoiseModel noise;
};

enum class Stability { Stable, Unstable, Marginal, NotClassified };

const char* to_string(Stability s);

// |T'| < 1 - 1e-9 is stable, |T'| > 1 + 1e-9 unstable, otherwise marginal.
Stability classify_stability(double map_derivative);

inline constexpr double kStabilityBand = 1e-9;

struct EquilibriumRoot {
    double m = 0.0;
    double residual = 0.0;  // |T(m) - m|, or the first-order-condition residual
    Stability stability = Stability::NotClassified;
    double map_derivative = 0.0;  // T'(m)
};

// Two grid values whose log-weights differ by less than this (relative to
// max(1, |largest|)) are treated as tied modes.
inline constexpr double kModeTieTolerance = 1e-12;

// Indices of the largest entries of log_weights, ascending, with ties
// resolved by kModeTieTolerance.
std::vector<std::size_t> tied_argmax(std::span<const double> log_weights);

double log_sum_exp(std::span<const double> values);

// ln C(N, n)
double log_binomial(int N, int n);

// Exact law of m = (1/N) sum s_i on {-1 + 2n/N}, n = number of +1 choices.
class MeanChoiceDistribution {
public:
    MeanChoiceDistribution(int N, double m_expectation, double log_odds,
                           std::vector<double> log_weights);

    int N() const noexcept { return N_; }
    double m_expectation() const noexcept { return m_expectation_; }
    // g(2 beta [H + J m_e]); p(+1) = logistic(log_odds)
    double log_odds() const noexcept { return log_odds_; }
    double p_plus() const;
    const std::vector<double>& m_grid() const noexcept { return m_grid_; }
    const std::vector<double>& log_probs() const noexcept { return log_probs_; }
    // ln sum_n C(N,n) exp(N m_n g/2), the normaliser of log_probs.
    double log_normalizer() const noexcept { return log_normalizer_; }

    std::vector<double> probs() const;
    double total_mass() const;
    double mean() const;
    // One grid value, or two when the binomial mode is tied.
    std::vector<double> modes() const;

private:
    int N_;
    double m_expectation_;
    double log_odds_;
    std::vector<double> m_grid_;
    std::vector<double> log_weights_;
    std::vector<double> log_probs_;
    double log_normalizer_;
};

struct LikelihoodProfile {
    std::vector<double> m_grid;
    std::vector<double> v_values;
    double m_expectation = 0.0;

    // Largest second difference v[i-1] - 2 v[i] + v[i+1]; negative means
    // strictly concave on the grid.
    double max_second_difference() const;
    double argmax() const;
};

struct PartitionResult {
    double log_z = 0.0;  // ln sum_m N(m) exp(N m g/2)
    double dominant_m = 0.0;
    // N ln(2 cosh(g/2)); equals log_z analytically.
    double closed_form_log_z = 0.0;
};

inline constexpr double kGridEdge = 1e-9;
inline constexpr int kDefaultProfileSize = 2001;
inline constexpr double kFiniteDifferenceStep = 1e-6;

// H(m) = -(1-m)/2 ln((1-m)/2) - (1+m)/2 ln((1+m)/2), with 0 ln 0 = 0.
double bernoulli_entropy(double m);

// v(m | m_e) = m g(2 beta [H + J m_e]) / 2 + H(m)
double log_likelihood_density(const CompleteGraphGame& game, double m, double m_exp);

// T(m_e) = tanh(g(2 beta [H + J m_e]) / 2), the maximiser of v(. | m_e).
double best_response_mean(const CompleteGraphGame& game, double m_exp);

// T'(m). Closed form beta J (1 - T^2) for Gumbel noise, central finite
// difference (step 1e-6) otherwise.
double best_response_derivative(const CompleteGraphGame& game, double m);

MeanChoiceDistribution finite_N_distribution(const CompleteGraphGame& game, int N,
                                             double m_exp);

LikelihoodProfile likelihood_profile(const CompleteGraphGame& game, double m_exp,
                                     int grid_size = kDefaultProfileSize);

// Maximiser of v(. | m_exp) in closed form. The residual is
// |atanh(m) - g/2|. When grid_size >= 3 the closed form is also checked
// against the grid argmax of the likelihood profile (NumericalFailure if
// they are more than one grid spacing apart).
EquilibriumRoot likelihood_equilibrium(const CompleteGraphGame& game, double m_exp,
                                       int grid_size = kDefaultProfileSize);

// All self-consistent solutions of m = T(m) in [-1, 1], ascending.
std::vector<EquilibriumRoot> qre_roots(const CompleteGraphGame& game,
                                       const ScanOptions& options = {});

PartitionResult log_partition_function(const CompleteGraphGame& game, int N, double m_exp);

}  // namespace isingeq
