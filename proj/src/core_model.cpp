#include "isingeq/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include <nlohmann/json.hpp>

#include "isingeq/errors.hpp"

namespace isingeq {

namespace {

// Beyond this point ln Phi(-x) comes from the Mills-ratio continued fraction
// instead of erfc, which loses relative accuracy and finally underflows.
constexpr double kProbitAsymptoticStart = 8.0;

// ln Phi(-x) for x >= kProbitAsymptoticStart.
// Phi(-x) = phi(x) * R(x), R(x) = 1/(x + 1/(x + 2/(x + 3/(x + ...)))).
double log_normal_upper_tail_asymptotic(double x) {
    // Modified Lentz evaluation of the continued fraction.
    constexpr double tiny = 1e-300;
    double f = x;
    double c = x;
    double d = 0.0;
    for (int n = 1; n < 500; ++n) {
        const double a = n;
        d = x + a * d;
        if (std::abs(d) < tiny) d = tiny;
        c = x + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    const double log_phi = -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi);
    return log_phi - std::log(f);
}

// ln Phi(-x) for x >= 0.
double log_normal_upper_tail(double x) {
    if (x >= kProbitAsymptoticStart) return log_normal_upper_tail_asymptotic(x);
    return std::log(0.5 * std::erfc(x / std::numbers::sqrt2));
}

double probit_log_odds(double x) {
    // x >= 0 here
    const double log_lower = log_normal_upper_tail(x);  // ln Phi(-x)
    const double log_upper = std::log1p(-std::exp(log_lower));  // ln Phi(x)
    return log_upper - log_lower;
}

}  // namespace

GameParams::GameParams(double J, double beta, double H) : J_(J), beta_(beta), H_(H) {
    if (!std::isfinite(J) || !(J > 0.0))
        throw InvalidParameter("coupling J must be finite and > 0");
    if (!std::isfinite(beta) || !(beta >= 0.0))
        throw InvalidParameter("noise level beta must be finite and >= 0");
    if (!std::isfinite(H)) throw InvalidParameter("external field H must be finite");
}

LocalField make_local_field(const GameParams& params, double aggregate_expectation) {
    return LocalField{params.H() + params.J() * aggregate_expectation};
}

NoiseModel NoiseModel::gumbel() { return NoiseModel(NoiseKind::Gumbel); }

NoiseModel NoiseModel::probit() { return NoiseModel(NoiseKind::Probit); }

NoiseModel NoiseModel::tabulated(std::vector<double> x, std::vector<double> g) {
    if (x.size() != g.size())
        throw InvalidNoiseTable("noise table: x and g must have the same length");
    if (x.size() < 2) throw InvalidNoiseTable("noise table: need at least two samples");
    if (x.front() != 0.0) throw InvalidNoiseTable("noise table: x must start at 0");
    if (g.front() != 0.0) throw InvalidNoiseTable("noise table: g must start at 0");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(g[i]))
            throw InvalidNoiseTable("noise table: non-finite entry");
        if (i > 0 && !(x[i] > x[i - 1]))
            throw InvalidNoiseTable("noise table: x must be strictly increasing");
        if (i > 0 && g[i] < g[i - 1])
            throw InvalidNoiseTable("noise table: g must be nondecreasing");
    }
    NoiseModel model(NoiseKind::Tabulated);
    model.x_ = std::move(x);
    model.g_ = std::move(g);
    return model;
}

NoiseModel NoiseModel::from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("x") || !doc.contains("g"))
        throw InvalidNoiseTable("noise table: expected an object with \"x\" and \"g\" arrays");
    try {
        return tabulated(doc.at("x").get<std::vector<double>>(),
                         doc.at("g").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
        throw InvalidNoiseTable(std::string("noise table: ") + e.what());
    }
}

NoiseModel NoiseModel::load_tabulated(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidNoiseTable("noise table: cannot open " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidNoiseTable("noise table: " + path.string() + ": " + e.what());
    }
    return from_json(doc);
}

double NoiseModel::max_abs_x() const noexcept {
    if (kind_ == NoiseKind::Tabulated) return x_.back();
    return std::numeric_limits<double>::infinity();
}

double NoiseModel::g_positive(double x) const {
    switch (kind_) {
        case NoiseKind::Gumbel:
            return x;
        case NoiseKind::Probit:
            return probit_log_odds(x);
        case NoiseKind::Tabulated: {
            if (x > x_.back())
                throw OutOfTabulatedRange("noise table: |x| = " + std::to_string(x) +
                                          " exceeds grid maximum " + std::to_string(x_.back()));
            const auto it = std::upper_bound(x_.begin(), x_.end(), x);
            if (it == x_.end()) return g_.back();
            const auto hi = static_cast<std::size_t>(it - x_.begin());
            const auto lo = hi - 1;
            const double t = (x - x_[lo]) / (x_[hi] - x_[lo]);
            return g_[lo] + t * (g_[hi] - g_[lo]);
        }
    }
    return 0.0;
}

double NoiseModel::g(double x) const {
    if (std::isnan(x)) throw DomainError("g: argument is NaN");
    if (x == 0.0) return 0.0;
    const double magnitude = g_positive(std::abs(x));
    return x < 0.0 ? -magnitude : magnitude;
}

std::string NoiseModel::name() const {
    switch (kind_) {
        case NoiseKind::Gumbel:
            return "gumbel";
        case NoiseKind::Probit:
            return "probit";
        case NoiseKind::Tabulated:
            return "tabulated";
    }
    return "unknown";
}

double g_eval(const NoiseModel& model, double x) { return model.g(x); }

double log_odds(const NoiseModel& model, const GameParams& params, LocalField field) {
    if (params.beta() == 0.0) return 0.0;
    return model.g(2.0 * params.beta() * field.h);
}

double logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double log_logistic(double x) {
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

double choice_probability(const NoiseModel& model, const GameParams& params,
                          LocalField field, int s) {
    if (s != 1 && s != -1) throw DomainError("choice must be -1 or +1");
    const double g = s * log_odds(model, params, field);
    // The minority probability is evaluated directly, the majority one as its
    // complement, so p(+1) + p(-1) == 1 up to one rounding.
    if (g <= 0.0) return logistic(g);
    return 1.0 - logistic(-g);
}

double mean_choice(const NoiseModel& model, const GameParams& params, LocalField field) {
    return std::tanh(0.5 * log_odds(model, params, field));
}

}  // namespace isingeq
