#pragma once

#include <functional>
#include <vector>

namespace isingeq {

struct ScannedRoot {
    double x = 0.0;
    double residual = 0.0;  // |f(x)|
};

struct ScanOptions {
    double step = 1e-3;
    double tol = 1e-12;
    int max_bisections = 200;
};

// Bisection on a bracket [lo, hi] with f(lo) * f(hi) < 0. Stops once the
// bracket is narrower than tol and the better endpoint has |f| <= tol, or
// when the bracket cannot shrink any further in double precision.
// Throws ToleranceNotReached if max_bisections runs out or the final
// residual exceeds tol.
ScannedRoot bisect(const std::function<double(double)>& f, double lo, double hi,
                   double f_lo, double f_hi, const ScanOptions& options);

// All roots of a continuous f on [lo, hi] visible at the scan resolution:
// exact zeros at grid nodes and sign changes between neighbouring nodes,
// each refined by bisection. The grid has round((hi - lo) / step) intervals
// and always contains both end points. Roots come back ascending. Tangential
// roots without a sign change are not detected.
std::vector<ScannedRoot> scan_roots(const std::function<double(double)>& f, double lo,
                                    double hi, const ScanOptions& options = {});

}  // namespace isingeq
