#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "isingeq/complete_graph.hpp"
#include "isingeq/random_graph.hpp"

namespace isingeq::mc {

// Stateless generator: every (seed, stream, counter) triple maps to its own
// uniform variate, so results do not depend on how work is split.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const noexcept;
    // Uniform on [0, 1) with 53 random bits.
    double uniform(std::uint64_t stream, std::uint64_t counter) const noexcept;

private:
    std::uint64_t seed_;
};

struct ClassSample {
    std::optional<int> degree;  // empty on the complete graph
    double p_plus = 0.0;
    double target_mean = 0.0;  // p(+1) - p(-1)
    double empirical_mean = 0.0;
    double standard_error = 0.0;  // sqrt((1 - mean^2) / n)
};

struct SampleReport {
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
    std::vector<ClassSample> classes;
};

// workers == 0 picks the hardware concurrency. The result is identical for
// any worker count.
SampleReport sample_mean_choice(const CompleteGraphGame& game, double m_exp,
                                std::uint64_t n_samples, std::uint64_t seed,
                                unsigned workers = 0);

// One class per degree in the distribution; expectations aligned with it.
// Class i draws from stream i, the complete-graph overload from stream 0.
SampleReport sample_mean_choice(const RandomGraphGame& game, std::span<const double> m_k_exp,
                                std::uint64_t n_samples, std::uint64_t seed,
                                unsigned workers = 0);

struct IterationOptions {
    double damping = 0.5;
    double tol = 1e-12;
    int max_iter = 10'000;
};

struct IterationTrace {
    double initial = 0.0;
    std::vector<double> iterates;  // one entry per update, initial excluded
    double damping = 0.5;
    bool converged = false;  // false reports MaxIterExceeded
    double final_residual = 0.0;

    double final_value() const { return iterates.empty() ? initial : iterates.back(); }
};

// m <- (1 - a) m + a T(m) until |T(m) - m| <= tol or max_iter updates.
IterationTrace iterate_to_qre(const std::function<double(double)>& map, double m0,
                              const IterationOptions& options = {});
IterationTrace iterate_to_qre(const CompleteGraphGame& game, double m0,
                              const IterationOptions& options = {});
IterationTrace iterate_to_qre(const RandomGraphGame& game, double m0,
                              const IterationOptions& options = {});

}  // namespace isingeq::mc
