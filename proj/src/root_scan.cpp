#include "isingeq/root_scan.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isingeq/errors.hpp"

namespace isingeq {

ScannedRoot bisect(const std::function<double(double)>& f, double lo, double hi,
                   double f_lo, double f_hi, const ScanOptions& options) {
    if (f_lo == 0.0) return {lo, 0.0};
    if (f_hi == 0.0) return {hi, 0.0};
    if (std::signbit(f_lo) == std::signbit(f_hi))
        throw DomainError("bisect: interval does not bracket a sign change");

    bool done = false;
    for (int iter = 0; iter <= options.max_bisections; ++iter) {
        const double best = std::min(std::abs(f_lo), std::abs(f_hi));
        const double mid = lo + 0.5 * (hi - lo);
        if ((hi - lo <= options.tol && best <= options.tol) || mid <= lo || mid >= hi) {
            done = true;
            break;
        }
        if (iter == options.max_bisections) break;
        const double f_mid = f(mid);
        if (f_mid == 0.0) return {mid, 0.0};
        if (std::signbit(f_mid) == std::signbit(f_lo)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    if (!done)
        throw ToleranceNotReached("bisection did not converge in " +
                                  std::to_string(options.max_bisections) + " iterations");

    const ScannedRoot root = std::abs(f_lo) <= std::abs(f_hi)
                                 ? ScannedRoot{lo, std::abs(f_lo)}
                                 : ScannedRoot{hi, std::abs(f_hi)};
    if (root.residual > options.tol)
        throw ToleranceNotReached("bisection stalled with residual " +
                                  std::to_string(root.residual) + " near x = " +
                                  std::to_string(root.x));
    return root;
}

std::vector<ScannedRoot> scan_roots(const std::function<double(double)>& f, double lo,
                                    double hi, const ScanOptions& options) {
    if (!(options.step > 0.0)) throw InvalidParameter("scan step must be > 0");
    if (!(options.tol > 0.0)) throw InvalidParameter("tolerance must be > 0");
    if (!(hi > lo)) throw InvalidParameter("scan interval must have hi > lo");

    const auto intervals =
        std::max<long>(1, std::lround((hi - lo) / options.step));
    const double width = hi - lo;
    // Nodes are built as lo + width * i / n so symmetric intervals give
    // exactly symmetric nodes (including an exact 0 at the centre).
    auto node = [&](long i) {
        if (i == intervals) return hi;
        return lo + width * static_cast<double>(i) / static_cast<double>(intervals);
    };

    std::vector<ScannedRoot> roots;
    double x_prev = node(0);
    double f_prev = f(x_prev);
    if (f_prev == 0.0) roots.push_back({x_prev, 0.0});
    for (long i = 1; i <= intervals; ++i) {
        const double x = node(i);
        const double fx = f(x);
        if (fx == 0.0) {
            roots.push_back({x, 0.0});
        } else if (f_prev != 0.0 && std::signbit(fx) != std::signbit(f_prev)) {
            roots.push_back(bisect(f, x_prev, x, f_prev, fx, options));
        }
        x_prev = x;
        f_prev = fx;
    }
    return roots;
}

}  // namespace isingeq
