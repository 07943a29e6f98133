#include "isingeq/random_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "isingeq/errors.hpp"
#include "isingeq/numeric.hpp"

namespace isingeq {

namespace {

double poisson_log_pmf(double lambda, int k) {
    return k * std::log(lambda) - lambda - std::lgamma(k + 1.0);
}

// sum_{k > kmax} Poisson(k; lambda)
double poisson_tail(double lambda, int kmax) {
    CompensatedSum tail;
    for (int k = kmax + 1;; ++k) {
        const double term = std::exp(poisson_log_pmf(lambda, k));
        tail.add(term);
        if (k > lambda && (term == 0.0 || term < 1e-18 * tail.value())) break;
    }
    return tail.value();
}

// sum_{k > kmax} k^-gamma by Euler-Maclaurin from kmax + 1.
double zeta_tail(double gamma, int kmax) {
    const double a = kmax + 1.0;
    return std::pow(a, 1.0 - gamma) / (gamma - 1.0) + 0.5 * std::pow(a, -gamma) +
           gamma * std::pow(a, -gamma - 1.0) / 12.0;
}

}  // namespace

DegreeDistribution::DegreeDistribution(std::vector<int> degrees, std::vector<double> probs,
                                       double truncation_mass)
    : degrees_(std::move(degrees)), probs_(std::move(probs)), truncation_mass_(truncation_mass) {
    if (degrees_.empty() || degrees_.size() != probs_.size())
        throw InvalidDistribution("degree distribution: need matching, non-empty degree and probability lists");
    CompensatedSum total;
    for (std::size_t i = 0; i < degrees_.size(); ++i) {
        if (degrees_[i] < 0) throw InvalidDistribution("degree distribution: negative degree");
        if (i > 0 && degrees_[i] <= degrees_[i - 1])
            throw InvalidDistribution("degree distribution: degrees must be distinct");
        if (!std::isfinite(probs_[i]) || probs_[i] < 0.0)
            throw InvalidDistribution("degree distribution: probabilities must be finite and >= 0");
        total.add(probs_[i]);
    }
    const double norm = total.value();
    if (!(norm > 0.0)) throw InvalidDistribution("degree distribution: total probability is zero");
    for (double& p : probs_) p /= norm;

    CompensatedSum first;
    CompensatedSum second;
    for (std::size_t i = 0; i < degrees_.size(); ++i) {
        const double k = degrees_[i];
        first.add(k * probs_[i]);
        second.add(k * k * probs_[i]);
    }
    mean_ = first.value();
    second_moment_ = second.value();
    if (!(mean_ > 0.0))
        throw InvalidDistribution("degree distribution: mean degree is zero (no edges)");
    weights_.resize(degrees_.size());
    for (std::size_t i = 0; i < degrees_.size(); ++i) weights_[i] = degrees_[i] * probs_[i] / mean_;
}

DegreeDistribution DegreeDistribution::regular(int z) {
    if (z < 1) throw InvalidDistribution("regular graph: degree z must be >= 1");
    return DegreeDistribution({z}, {1.0}, 0.0);
}

DegreeDistribution DegreeDistribution::poisson(double lambda, int kmax) {
    if (!std::isfinite(lambda) || !(lambda > 0.0))
        throw InvalidDistribution("poisson: lambda must be > 0");
    if (kmax < 1) throw InvalidDistribution("poisson: kmax must be >= 1");
    std::vector<int> k(static_cast<std::size_t>(kmax) + 1);
    std::vector<double> p(k.size());
    for (int i = 0; i <= kmax; ++i) {
        k[static_cast<std::size_t>(i)] = i;
        p[static_cast<std::size_t>(i)] = std::exp(poisson_log_pmf(lambda, i));
    }
    return DegreeDistribution(std::move(k), std::move(p), poisson_tail(lambda, kmax));
}

DegreeDistribution DegreeDistribution::powerlaw(double gamma, int kmin, int kmax) {
    if (!std::isfinite(gamma) || !(gamma > 1.0))
        throw InvalidDistribution("powerlaw: gamma must be > 1");
    if (kmin < 1) throw InvalidDistribution("powerlaw: kmin must be >= 1");
    if (kmax < kmin) throw InvalidDistribution("powerlaw: kmax must be >= kmin");
    std::vector<int> k;
    std::vector<double> p;
    CompensatedSum kept;
    for (int i = kmin; i <= kmax; ++i) {
        k.push_back(i);
        p.push_back(std::pow(static_cast<double>(i), -gamma));
        kept.add(p.back());
    }
    const double tail = zeta_tail(gamma, kmax);
    return DegreeDistribution(std::move(k), std::move(p), tail / (kept.value() + tail));
}

DegreeDistribution DegreeDistribution::from_pairs(std::vector<std::pair<int, double>> pairs) {
    if (pairs.empty()) throw InvalidDistribution("degree distribution: empty list");
    std::sort(pairs.begin(), pairs.end());
    std::vector<int> k;
    std::vector<double> p;
    for (const auto& [degree, prob] : pairs) {
        k.push_back(degree);
        p.push_back(prob);
    }
    return DegreeDistribution(std::move(k), std::move(p), 0.0);
}

DegreeDistribution DegreeDistribution::from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("degrees") || !doc.contains("probs"))
        throw InvalidDistribution("degree distribution: expected {\"degrees\": [...], \"probs\": [...]}");
    std::vector<int> k;
    std::vector<double> p;
    try {
        k = doc.at("degrees").get<std::vector<int>>();
        p = doc.at("probs").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidDistribution(std::string("degree distribution: ") + e.what());
    }
    if (k.size() != p.size())
        throw InvalidDistribution("degree distribution: degrees and probs differ in length");
    std::vector<std::pair<int, double>> pairs;
    for (std::size_t i = 0; i < k.size(); ++i) pairs.emplace_back(k[i], p[i]);
    return from_pairs(std::move(pairs));
}

DegreeDistribution DegreeDistribution::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidDistribution("degree distribution: cannot open " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidDistribution("degree distribution: " + path.string() + ": " + e.what());
    }
    return from_json(doc);
}

std::ptrdiff_t DegreeDistribution::index_of(int k) const {
    const auto it = std::lower_bound(degrees_.begin(), degrees_.end(), k);
    if (it == degrees_.end() || *it != k) return -1;
    return it - degrees_.begin();
}

nlohmann::json DegreeDistribution::to_json() const {
    return {{"degrees", degrees_}, {"probs", probs_}};
}

double weighted_expectation(const DegreeDistribution& dist, std::span<const double> m_k) {
    if (m_k.size() != dist.size())
        throw LengthMismatch("expected " + std::to_string(dist.size()) +
                             " per-degree values, got " + std::to_string(m_k.size()));
    CompensatedSum acc;
    for (std::size_t i = 0; i < m_k.size(); ++i) {
        if (!(std::abs(m_k[i]) <= 1.0))
            throw DomainError("per-degree expectation must lie in [-1, 1]");
        acc.add(dist.edge_weights()[i] * m_k[i]);
    }
    return std::clamp(acc.value(), -1.0, 1.0);
}

double degree_class_response(const RandomGraphGame& game, int k, double m_w_exp) {
    if (!(std::abs(m_w_exp) <= 1.0)) throw DomainError("m_w expectation must lie in [-1, 1]");
    // Same association as the complete graph with coupling J k, so a regular
    // graph reproduces it bit for bit.
    const double coupling = game.params.J() * k;
    const LocalField field{game.params.H() + coupling * m_w_exp};
    return mean_choice(game.noise, game.params, field);
}

std::vector<double> degree_class_responses(const RandomGraphGame& game, double m_w_exp) {
    std::vector<double> m_k;
    m_k.reserve(game.degrees.size());
    for (int k : game.degrees.degrees()) m_k.push_back(degree_class_response(game, k, m_w_exp));
    return m_k;
}

double weighted_response(const RandomGraphGame& game, double m_w_exp) {
    CompensatedSum acc;
    const auto& k = game.degrees.degrees();
    const auto& w = game.degrees.edge_weights();
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (w[i] == 0.0) continue;
        acc.add(w[i] * degree_class_response(game, k[i], m_w_exp));
    }
    return acc.value();
}

double weighted_response_derivative(const RandomGraphGame& game, double m_w) {
    if (!(std::abs(m_w) <= 1.0)) throw DomainError("m_w must lie in [-1, 1]");
    if (game.noise.kind() == NoiseKind::Gumbel) {
        CompensatedSum acc;
        const auto& k = game.degrees.degrees();
        const auto& w = game.degrees.edge_weights();
        for (std::size_t i = 0; i < k.size(); ++i) {
            if (w[i] == 0.0) continue;
            const double t = degree_class_response(game, k[i], m_w);
            acc.add(w[i] * game.params.beta() * (game.params.J() * k[i]) * (1.0 - t * t));
        }
        return acc.value();
    }
    const double lo = std::max(-1.0, m_w - kFiniteDifferenceStep);
    const double hi = std::min(1.0, m_w + kFiniteDifferenceStep);
    return (weighted_response(game, hi) - weighted_response(game, lo)) / (hi - lo);
}

std::vector<DegreeClassEquilibrium> qre_fixed_point(const RandomGraphGame& game,
                                                    const ScanOptions& options) {
    auto residual = [&game](double m_w) { return weighted_response(game, m_w) - m_w; };

    const bool symmetric = game.params.H() == 0.0;
    std::vector<ScannedRoot> scanned = scan_roots(residual, symmetric ? 0.0 : -1.0, 1.0, options);
    if (symmetric) {
        const std::size_t positive = scanned.size();
        for (std::size_t i = 0; i < positive; ++i)
            if (scanned[i].x != 0.0) scanned.push_back({-scanned[i].x, scanned[i].residual});
    }
    std::sort(scanned.begin(), scanned.end(),
              [](const ScannedRoot& a, const ScannedRoot& b) { return a.x < b.x; });

    std::vector<DegreeClassEquilibrium> out;
    out.reserve(scanned.size());
    for (const ScannedRoot& s : scanned) {
        DegreeClassEquilibrium eq;
        eq.m_w = s.x;
        eq.m_k = degree_class_responses(game, s.x);
        eq.residual = s.residual;
        eq.map_derivative = weighted_response_derivative(game, s.x);
        eq.stability = classify_stability(eq.map_derivative);
        out.push_back(std::move(eq));
    }
    return out;
}

DegreeClassResponse expectation_consistent_solve(const RandomGraphGame& game,
                                                 std::span<const double> m_k_exp) {
    DegreeClassResponse response;
    response.m_w_expectation = weighted_expectation(game.degrees, m_k_exp);
    response.m_k = degree_class_responses(game, response.m_w_expectation);
    return response;
}

}  // namespace isingeq
