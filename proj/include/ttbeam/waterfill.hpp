#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "ttbeam/common.hpp"

namespace ttbeam {

struct PowerAllocation {
    VectorXd powers;
    double water_level = 0.0;
};

// Exact active-set water-filling: maximize sum_m log(1 + p_m / n_m) subject
// to sum p = total_power, p >= 0. The optimal level w satisfies
// p_m = max(w - n_m, 0); scanning candidate active-set sizes from largest to
// smallest finds the unique w in closed form, no bisection or tolerance.
// Streams whose noise level ties the water level exactly get zero power.
inline PowerAllocation waterfill(const VectorXd& noise_levels, double total_power) {
    const Eigen::Index k_max = noise_levels.size();
    if (k_max == 0) throw std::invalid_argument("waterfill: empty noise vector");
    if (!(total_power >= 0.0) || !std::isfinite(total_power))
        throw std::invalid_argument("waterfill: total_power must be finite and >= 0");
    for (Eigen::Index i = 0; i < k_max; ++i)
        if (!(noise_levels(i) > 0.0) || !std::isfinite(noise_levels(i)))
            throw std::invalid_argument("waterfill: noise levels must be finite and > 0");

    std::vector<Eigen::Index> order(static_cast<size_t>(k_max));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return noise_levels(a) < noise_levels(b); });

    VectorXd prefix(k_max);  // prefix sums of sorted noise levels
    double acc = 0.0;
    for (Eigen::Index k = 0; k < k_max; ++k) {
        acc += noise_levels(order[static_cast<size_t>(k)]);
        prefix(k) = acc;
    }

    PowerAllocation res;
    res.powers = VectorXd::Zero(k_max);
    for (Eigen::Index k = k_max; k >= 1; --k) {
        double w = (total_power + prefix(k - 1)) / static_cast<double>(k);
        if (w > noise_levels(order[static_cast<size_t>(k - 1)])) {
            res.water_level = w;
            for (Eigen::Index i = 0; i < k; ++i) {
                Eigen::Index m = order[static_cast<size_t>(i)];
                res.powers(m) = w - noise_levels(m);
            }
            return res;
        }
    }
    // total_power == 0: everything sits at the floor.
    res.water_level = noise_levels(order[0]);
    return res;
}

}  // namespace ttbeam
