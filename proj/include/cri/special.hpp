#pragma once

namespace cri::special {

// log B(a, b) via log-gamma.
double log_beta(double a, double b);

// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
//
// Modified Lentz evaluation of the continued fraction, applied on whichever
// side of the mean (a + 1) / (a + b + 2) converges quickly; the other side is
// reached through I_x(a, b) = 1 - I_{1-x}(b, a). Relative error is around
// 1e-14 where the fraction is evaluated directly.
double incomplete_beta(double a, double b, double x);

// 1 - I_x(a, b), evaluated without cancellation when the result is small.
double incomplete_beta_complement(double a, double b, double x);

// P(Bin(trials, prob) >= k) for 0 <= k; equals I_prob(k, trials - k + 1) for 1 <= k <= trials.
double binomial_upper_tail(long trials, double prob, long k);

// P(Bin(trials, prob) <= k).
double binomial_lower_tail(long trials, double prob, long k);

// Standard normal quantile (Acklam's rational approximation refined by one Halley step).
double normal_quantile(double p);

}  // namespace cri::special
