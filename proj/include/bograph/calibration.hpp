#pragma once

// Frozen regression constants. Each value was fitted once from the exact
// expectation tables at desk scale (the calibrate mode of the acceptance
// runner prints fresh fits), then frozen with a 1.25x margin. They turn
// order-of-magnitude guarantees into concrete gates.

namespace bograph::calibration {

// Cap on |r(d,t) - c(d) t| * d over k <= d <= kt. Fitted maxima over
// t in {50, 100, 200, 400} (stable in t; identical at t = 10^4):
// 0.666667 / 1.059104 / 0.600000.
inline constexpr double degree_dev_cap_a100_k1 = 0.84; // (a, k) = (1, 1)
inline constexpr double degree_dev_cap_a050_k2 = 1.33; // (a, k) = (0.5, 2)
inline constexpr double degree_dev_cap_a200_k1 = 0.75; // (a, k) = (2, 1)

// Scale for the covariance envelope |cov(R(d1,t), R(d2,t))| <=
// scale * ((d1^(-2-a) + d2^(-2-a)) t + 1/(d1 d2)). Fitted max ratio 2.447576
// on the exact covariance grid d1,d2 <= 20 at t = 100, (a,k) = (1,1).
inline constexpr double covariance_scale = 3.1;

// Cap on |EX(d1,d2,t) - c_X(d1,d2) t| over 10x10 degree grids, fitted over
// t = 20..150 for (a,k) in {(1,1), (0.5,2), (2,1)}: max 0.305662.
inline constexpr double edge_dev_cap = 0.39;

} // namespace bograph::calibration
