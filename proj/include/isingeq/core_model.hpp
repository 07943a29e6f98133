#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace isingeq {

// Coupling J, noise level beta and external field H of the Ising game.
class GameParams {
public:
    GameParams(double J, double beta, double H);

    double J() const noexcept { return J_; }
    double beta() const noexcept { return beta_; }
    double H() const noexcept { return H_; }

    GameParams with_J(double J) const { return {J, beta_, H_}; }
    GameParams with_beta(double beta) const { return {J_, beta, H_}; }
    GameParams with_H(double H) const { return {J_, beta_, H}; }

    friend bool operator==(const GameParams&, const GameParams&) = default;

private:
    double J_;
    double beta_;
    double H_;
};

// Deterministic utility argument h = H + J * (aggregate expectation). The
// log-odds of choosing +1 over -1 are g(2 beta h).
struct LocalField {
    double h = 0.0;
};

LocalField make_local_field(const GameParams& params, double aggregate_expectation);

enum class NoiseKind { Gumbel, Probit, Tabulated };

// Symmetric utility noise, represented by its odd log-odds function g:
// Prob[s beats -s] = 1 / (1 + exp(-g(2 beta h s))).
//
//   Gumbel    -> g(x) = x (logit choice)
//   Probit    -> g(x) = ln Phi(x) - ln Phi(-x)
//   Tabulated -> linear interpolation of samples on [0, x_max], odd extension
class NoiseModel {
public:
    static NoiseModel gumbel();
    static NoiseModel probit();
    // x must start at 0 and be strictly increasing, g must start at 0 and be
    // nondecreasing. Throws InvalidNoiseTable otherwise.
    static NoiseModel tabulated(std::vector<double> x, std::vector<double> g);
    // {"x": [...], "g": [...]}
    static NoiseModel from_json(const nlohmann::json& doc);
    static NoiseModel load_tabulated(const std::filesystem::path& path);

    NoiseKind kind() const noexcept { return kind_; }
    const std::vector<double>& table_x() const noexcept { return x_; }
    const std::vector<double>& table_g() const noexcept { return g_; }
    // Largest |x| accepted; +inf for the closed-form kinds.
    double max_abs_x() const noexcept;

    // Odd by construction: evaluated as sign(x) * g(|x|).
    double g(double x) const;

    std::string name() const;

private:
    explicit NoiseModel(NoiseKind kind) : kind_(kind) {}
    double g_positive(double x) const;

    NoiseKind kind_;
    std::vector<double> x_;
    std::vector<double> g_;
};

double g_eval(const NoiseModel& model, double x);

// Log-odds g(2 beta h). beta == 0 short-circuits to 0 without touching g.
double log_odds(const NoiseModel& model, const GameParams& params, LocalField field);

// p(s) = 1 / (1 + exp(-s g(2 beta h))), s in {-1, +1}.
double choice_probability(const NoiseModel& model, const GameParams& params,
                          LocalField field, int s);

// tanh(g(2 beta h) / 2) = p(+1) - p(-1).
double mean_choice(const NoiseModel& model, const GameParams& params, LocalField field);

// Numerically stable pieces shared by the other modules.
double logistic(double x);
// ln(1 / (1 + exp(-x)))
double log_logistic(double x);

}  // namespace isingeq
