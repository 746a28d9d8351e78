// Simulates one oscillating Brownian path and prints both threshold
// estimators next to the exact local time they target.

#include <cstdio>

#include "skewloc/skewloc.hpp"

int main() {
    using namespace skewloc;
    const auto p = ProcessParams::oscillating(1.0, 2.0, 0.0);
    const std::int64_t n = 1 << 14;
    const auto path = simulate_path(p, 0.0, 1.0, n, 2024, 0);
    const auto N = static_cast<double>(n);

    const auto crossing = crossing_estimator(path.positions, 0.0, 1.0, N);
    const auto weighted = weighted_estimator(path.positions, 0.0, 1.0, N);
    const auto lt = local_time_path(path);
    const double c = closed_form_constants(EstimatorFormula::crossing_obm, p).limit_constant;

    std::printf("%6s %12s %12s %12s\n", "t", "c L_t", "crossing", "weighted");
    for (double t : {0.125, 0.25, 0.5, 0.75, 1.0}) {
        std::printf("%6.3f %12.6f %12.6f %12.6f\n", t, c * lt(t), crossing(t), weighted(t));
    }
    std::printf("weighted estimator targets L_t = %.6f\n", lt.back());
}
