#include "isingeq/complete_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "isingeq/errors.hpp"
#include "isingeq/numeric.hpp"

namespace isingeq {

namespace {

void require_unit_interval(double m, const char* what) {
    if (!(std::abs(m) <= 1.0))
        throw DomainError(std::string(what) + " must lie in [-1, 1], got " + std::to_string(m));
}

double expectation_log_odds(const CompleteGraphGame& game, double m_exp) {
    return log_odds(game.noise, game.params, make_local_field(game.params, m_exp));
}

// ln C(N, n) + (2n - N) g/2 for n = 0..N; equals ln[N(m) exp(N m g/2)].
std::vector<double> unnormalised_log_weights(int N, double log_odds) {
    std::vector<double> w(static_cast<std::size_t>(N) + 1);
    const double half_g = 0.5 * log_odds;
    for (int n = 0; n <= N; ++n)
        w[static_cast<std::size_t>(n)] = log_binomial(N, n) + (2.0 * n - N) * half_g;
    return w;
}

std::vector<double> mean_choice_grid(int N) {
    std::vector<double> grid(static_cast<std::size_t>(N) + 1);
    for (int n = 0; n <= N; ++n)
        grid[static_cast<std::size_t>(n)] = static_cast<double>(2 * n - N) / N;
    return grid;
}

}  // namespace

const char* to_string(Stability s) {
    switch (s) {
        case Stability::Stable:
            return "stable";
        case Stability::Unstable:
            return "unstable";
        case Stability::Marginal:
            return "marginal";
        case Stability::NotClassified:
            return "not_classified";
    }
    return "unknown";
}

Stability classify_stability(double map_derivative) {
    const double a = std::abs(map_derivative);
    if (a < 1.0 - kStabilityBand) return Stability::Stable;
    if (a > 1.0 + kStabilityBand) return Stability::Unstable;
    return Stability::Marginal;
}

std::vector<std::size_t> tied_argmax(std::span<const double> log_weights) {
    if (log_weights.empty()) return {};
    const double best = *std::max_element(log_weights.begin(), log_weights.end());
    const double band = kModeTieTolerance * std::max(1.0, std::abs(best));
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < log_weights.size(); ++i)
        if (log_weights[i] >= best - band) idx.push_back(i);
    return idx;
}

double log_sum_exp(std::span<const double> values) {
    if (values.empty()) return -std::numeric_limits<double>::infinity();
    const double top = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(top)) return top;
    CompensatedSum acc;
    for (double v : values) acc.add(std::exp(v - top));
    return top + std::log(acc.value());
}

double log_binomial(int N, int n) {
    if (n < 0 || n > N) return -std::numeric_limits<double>::infinity();
    // The two lower terms are summed first so C(N, n) and C(N, N-n) agree
    // bit for bit.
    return std::lgamma(N + 1.0) - (std::lgamma(n + 1.0) + std::lgamma(N - n + 1.0));
}

MeanChoiceDistribution::MeanChoiceDistribution(int N, double m_expectation, double log_odds,
                                               std::vector<double> log_weights)
    : N_(N),
      m_expectation_(m_expectation),
      log_odds_(log_odds),
      m_grid_(mean_choice_grid(N)),
      log_weights_(std::move(log_weights)) {
    if (log_weights_.size() != m_grid_.size())
        throw LengthMismatch("mean-choice law needs N + 1 log-weights");
    log_normalizer_ = log_sum_exp(log_weights_);
    log_probs_.resize(log_weights_.size());
    for (std::size_t i = 0; i < log_weights_.size(); ++i)
        log_probs_[i] = log_weights_[i] - log_normalizer_;
}

double MeanChoiceDistribution::p_plus() const { return logistic(log_odds_); }

std::vector<double> MeanChoiceDistribution::probs() const {
    std::vector<double> p(log_probs_.size());
    std::transform(log_probs_.begin(), log_probs_.end(), p.begin(),
                   [](double lp) { return std::exp(lp); });
    return p;
}

double MeanChoiceDistribution::total_mass() const {
    CompensatedSum acc;
    for (double lp : log_probs_) acc.add(std::exp(lp));
    return acc.value();
}

double MeanChoiceDistribution::mean() const {
    CompensatedSum acc;
    for (std::size_t i = 0; i < log_probs_.size(); ++i) acc.add(m_grid_[i] * std::exp(log_probs_[i]));
    return acc.value();
}

std::vector<double> MeanChoiceDistribution::modes() const {
    std::vector<double> out;
    for (std::size_t i : tied_argmax(log_weights_)) out.push_back(m_grid_[i]);
    return out;
}

double LikelihoodProfile::max_second_difference() const {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < v_values.size(); ++i)
        worst = std::max(worst, v_values[i - 1] - 2.0 * v_values[i] + v_values[i + 1]);
    return worst;
}

double LikelihoodProfile::argmax() const {
    const auto it = std::max_element(v_values.begin(), v_values.end());
    return m_grid[static_cast<std::size_t>(it - v_values.begin())];
}

double bernoulli_entropy(double m) {
    require_unit_interval(m, "m");
    auto term = [](double q) { return q > 0.0 ? -q * std::log(q) : 0.0; };
    return term(0.5 * (1.0 - m)) + term(0.5 * (1.0 + m));
}

double log_likelihood_density(const CompleteGraphGame& game, double m, double m_exp) {
    require_unit_interval(m, "m");
    require_unit_interval(m_exp, "expectation m_e");
    return m * 0.5 * expectation_log_odds(game, m_exp) + bernoulli_entropy(m);
}

double best_response_mean(const CompleteGraphGame& game, double m_exp) {
    require_unit_interval(m_exp, "expectation m_e");
    return std::tanh(0.5 * expectation_log_odds(game, m_exp));
}

double best_response_derivative(const CompleteGraphGame& game, double m) {
    require_unit_interval(m, "m");
    if (game.noise.kind() == NoiseKind::Gumbel) {
        const double t = best_response_mean(game, m);
        return game.params.beta() * game.params.J() * (1.0 - t * t);
    }
    const double lo = std::max(-1.0, m - kFiniteDifferenceStep);
    const double hi = std::min(1.0, m + kFiniteDifferenceStep);
    return (best_response_mean(game, hi) - best_response_mean(game, lo)) / (hi - lo);
}

MeanChoiceDistribution finite_N_distribution(const CompleteGraphGame& game, int N,
                                             double m_exp) {
    if (N < 1) throw InvalidParameter("agent count N must be >= 1");
    require_unit_interval(m_exp, "expectation m_e");
    const double g = expectation_log_odds(game, m_exp);
    return MeanChoiceDistribution(N, m_exp, g, unnormalised_log_weights(N, g));
}

LikelihoodProfile likelihood_profile(const CompleteGraphGame& game, double m_exp,
                                     int grid_size) {
    if (grid_size < 3) throw InvalidParameter("likelihood profile needs at least 3 points");
    require_unit_interval(m_exp, "expectation m_e");
    LikelihoodProfile profile;
    profile.m_expectation = m_exp;
    profile.m_grid.resize(static_cast<std::size_t>(grid_size));
    profile.v_values.resize(static_cast<std::size_t>(grid_size));
    const double lo = -1.0 + kGridEdge;
    const double span = 2.0 * (1.0 - kGridEdge);
    for (int i = 0; i < grid_size; ++i) {
        const double m = lo + span * i / (grid_size - 1);
        profile.m_grid[static_cast<std::size_t>(i)] = m;
        profile.v_values[static_cast<std::size_t>(i)] = log_likelihood_density(game, m, m_exp);
    }
    return profile;
}

EquilibriumRoot likelihood_equilibrium(const CompleteGraphGame& game, double m_exp,
                                       int grid_size) {
    const double half_g = 0.5 * expectation_log_odds(game, m_exp);
    EquilibriumRoot root;
    root.m = best_response_mean(game, m_exp);
    root.residual = std::abs(root.m) < 1.0 ? std::abs(std::atanh(root.m) - half_g)
                                           : std::abs(std::tanh(half_g) - root.m);
    root.stability = Stability::NotClassified;
    root.map_derivative = best_response_derivative(game, m_exp);

    if (grid_size >= 3) {
        const LikelihoodProfile profile = likelihood_profile(game, m_exp, grid_size);
        const double spacing = 2.0 * (1.0 - kGridEdge) / (grid_size - 1);
        if (std::abs(profile.argmax() - root.m) > spacing * (1.0 + 1e-9))
            throw NumericalFailure("likelihood grid argmax " + std::to_string(profile.argmax()) +
                                   " disagrees with closed form " + std::to_string(root.m));
    }
    return root;
}

std::vector<EquilibriumRoot> qre_roots(const CompleteGraphGame& game, const ScanOptions& options) {
    auto residual = [&game](double m) { return best_response_mean(game, m) - m; };

    // With H = 0 the map is odd: solve on [0, 1] and mirror.
    const bool symmetric = game.params.H() == 0.0;
    std::vector<ScannedRoot> scanned = scan_roots(residual, symmetric ? 0.0 : -1.0, 1.0, options);
    if (symmetric) {
        const std::size_t positive = scanned.size();
        for (std::size_t i = 0; i < positive; ++i)
            if (scanned[i].x != 0.0) scanned.push_back({-scanned[i].x, scanned[i].residual});
    }
    std::sort(scanned.begin(), scanned.end(),
              [](const ScannedRoot& a, const ScannedRoot& b) { return a.x < b.x; });

    std::vector<EquilibriumRoot> roots;
    roots.reserve(scanned.size());
    for (const ScannedRoot& s : scanned) {
        EquilibriumRoot r;
        r.m = s.x;
        r.residual = s.residual;
        r.map_derivative = best_response_derivative(game, s.x);
        r.stability = classify_stability(r.map_derivative);
        roots.push_back(r);
    }
    return roots;
}

PartitionResult log_partition_function(const CompleteGraphGame& game, int N, double m_exp) {
    if (N < 1) throw InvalidParameter("agent count N must be >= 1");
    require_unit_interval(m_exp, "expectation m_e");
    const double g = expectation_log_odds(game, m_exp);
    const std::vector<double> w = unnormalised_log_weights(N, g);
    PartitionResult result;
    result.log_z = log_sum_exp(w);
    const std::size_t best = tied_argmax(w).front();
    result.dominant_m = static_cast<double>(2 * static_cast<int>(best) - N) / N;
    // ln(2 cosh(x)) = |x| + log1p(exp(-2|x|))
    const double a = std::abs(0.5 * g);
    result.closed_form_log_z = N * (a + std::log1p(std::exp(-2.0 * a)));
    return result;
}

}  // namespace isingeq
