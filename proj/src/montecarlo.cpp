#include "isingeq/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "isingeq/errors.hpp"

namespace isingeq::mc {

namespace {

// splitmix64 finaliser
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Number of +1 draws among n_samples Bernoulli(p_plus) trials on one stream.
std::uint64_t count_plus(const CounterRng& rng, std::uint64_t stream, double p_plus,
                         std::uint64_t n_samples, unsigned workers) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(1, n_samples / 4096)));
    std::vector<std::uint64_t> partial(workers, 0);
    auto run = [&](unsigned w) {
        const std::uint64_t begin = n_samples * w / workers;
        const std::uint64_t end = n_samples * (w + 1) / workers;
        std::uint64_t plus = 0;
        for (std::uint64_t i = begin; i < end; ++i)
            if (rng.uniform(stream, i) < p_plus) ++plus;
        partial[w] = plus;
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    }
    std::uint64_t total = 0;
    for (std::uint64_t c : partial) total += c;
    return total;
}

ClassSample sample_class(const CounterRng& rng, std::uint64_t stream, std::optional<int> degree,
                         const NoiseModel& noise, const GameParams& params, LocalField field,
                         std::uint64_t n_samples, unsigned workers) {
    ClassSample s;
    s.degree = degree;
    s.p_plus = choice_probability(noise, params, field, +1);
    s.target_mean = mean_choice(noise, params, field);
    const std::uint64_t plus = count_plus(rng, stream, s.p_plus, n_samples, workers);
    const double n = static_cast<double>(n_samples);
    s.empirical_mean = (2.0 * static_cast<double>(plus) - n) / n;
    s.standard_error = std::sqrt(std::max(0.0, 1.0 - s.empirical_mean * s.empirical_mean) / n);
    return s;
}

void check_samples(std::uint64_t n_samples) {
    if (n_samples < 1) throw InvalidParameter("n_samples must be >= 1");
}

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t stream, std::uint64_t counter) const noexcept {
    std::uint64_t h = mix64(seed_ + 0x9E3779B97F4A7C15ULL);
    h = mix64(h ^ (stream * 0xD1B54A32D192ED03ULL + 0x632BE59BD9B4E019ULL));
    return mix64(h ^ (counter * 0x8CB92BA72F3D8DD7ULL + 0x9E3779B97F4A7C15ULL));
}

double CounterRng::uniform(std::uint64_t stream, std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
}

SampleReport sample_mean_choice(const CompleteGraphGame& game, double m_exp,
                                std::uint64_t n_samples, std::uint64_t seed, unsigned workers) {
    check_samples(n_samples);
    if (!(std::abs(m_exp) <= 1.0)) throw DomainError("expectation m_e must lie in [-1, 1]");
    const CounterRng rng(seed);
    SampleReport report{n_samples, seed, {}};
    report.classes.push_back(sample_class(rng, 0, std::nullopt, game.noise, game.params,
                                          make_local_field(game.params, m_exp), n_samples,
                                          workers));
    return report;
}

SampleReport sample_mean_choice(const RandomGraphGame& game, std::span<const double> m_k_exp,
                                std::uint64_t n_samples, std::uint64_t seed, unsigned workers) {
    check_samples(n_samples);
    const double m_w = weighted_expectation(game.degrees, m_k_exp);
    const CounterRng rng(seed);
    SampleReport report{n_samples, seed, {}};
    const auto& degrees = game.degrees.degrees();
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        const int k = degrees[i];
        const LocalField field{game.params.H() + (game.params.J() * k) * m_w};
        report.classes.push_back(sample_class(rng, static_cast<std::uint64_t>(i), k, game.noise,
                                              game.params, field, n_samples, workers));
    }
    return report;
}

IterationTrace iterate_to_qre(const std::function<double(double)>& map, double m0,
                              const IterationOptions& options) {
    if (!(std::abs(m0) <= 1.0)) throw DomainError("initial value m0 must lie in [-1, 1]");
    if (!(options.damping > 0.0 && options.damping <= 1.0))
        throw InvalidParameter("damping must lie in (0, 1]");
    if (!(options.tol > 0.0)) throw InvalidParameter("tolerance must be > 0");
    if (options.max_iter < 1) throw InvalidParameter("max_iter must be >= 1");

    IterationTrace trace;
    trace.initial = m0;
    trace.damping = options.damping;
    double m = m0;
    double image = map(m);
    double residual = std::abs(image - m);
    for (int iter = 0; iter < options.max_iter && residual > options.tol; ++iter) {
        m = (1.0 - options.damping) * m + options.damping * image;
        trace.iterates.push_back(m);
        image = map(m);
        residual = std::abs(image - m);
    }
    trace.converged = residual <= options.tol;
    trace.final_residual = residual;
    return trace;
}

IterationTrace iterate_to_qre(const CompleteGraphGame& game, double m0,
                              const IterationOptions& options) {
    return iterate_to_qre([&game](double m) { return best_response_mean(game, m); }, m0, options);
}

IterationTrace iterate_to_qre(const RandomGraphGame& game, double m0,
                              const IterationOptions& options) {
    return iterate_to_qre([&game](double m) { return weighted_response(game, m); }, m0, options);
}

}  // namespace isingeq::mc
