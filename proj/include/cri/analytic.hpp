#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

// Closed-form densities, tails and constants of the sphere-column selection
// argument. Functions whose name starts with `claimed_` or ends in `_paper`
// transcribe a published expression as written; they are audited by the
// harness and never relied on by the selection code.
namespace cri::analytic {

// --- |<X_j, v>| for X_j uniform on S^{n-1} -------------------------------

// Density g(z) = Gamma(n/2) / (sqrt(pi) Gamma((n-1)/2)) (1 - z^2)^{(n-3)/2} on [0, 1].
double inner_density(double z, int n);

// G(z) = 2 int_0^z g = I_{z^2}(1/2, (n-1)/2).
double inner_cdf(double z, int n);

// 1 - G(z), accurate when small.
double inner_tail(double z, int n);

// --- order statistics ---------------------------------------------------

struct OrderStatSpec {
    int p = 1;  // sample count
    int r = 1;  // order index, 1-based
    int n = 2;  // ambient dimension
};

void validate(const OrderStatSpec& spec);

// P(Z_(r) <= z) = P(Bin(p, G(z)) >= r) = I_{G(z)}(r, p - r + 1).
double order_stat_cdf(double z, const OrderStatSpec& spec);

// Smallest z (bisection to 1e-12) with order_stat_cdf(z) >= 1 - alpha.
double order_stat_quantile(double alpha, const OrderStatSpec& spec);

// --- concentration ------------------------------------------------------

// exp(-eps^2 mean / 2), the lower-tail Chernoff bound.
double chernoff_lower(double eps, double mean);

// --- gamma ratio and the z0 window --------------------------------------

// Gamma(n/2) / Gamma((n-1)/2), n >= 2.
double gamma_ratio(int n);

struct RatioBounds {
    double lower;
    double upper;
};

// (e^{2 ln 2} / 2) (n-3)^{3/2} / (n-2)^{1/2} and (e^2 / 2) (n-3)^{3/2} / (n-2)^{1/2}, n >= 4.
RatioBounds gamma_ratio_claimed_bounds(int n);

// Largest n <= n_max for which the claimed bounds bracket the exact ratio.
std::optional<int> gamma_ratio_bounds_valid_up_to(int n_max = 200);

struct Z0Window {
    double z_lower;
    double z_upper;
    // z_lower <= z_upper.
    bool compatible;
    // kappa >= (4 / e^{2(ln 2 - 1)}) ((1-eps)/eps^2) (n/s) log p, the published sufficient condition.
    bool published_condition;
};

Z0Window z0_window(int n, double p, double eps, double kappa, double s);

// The published choice kappa = 4 / e^{2(ln 2 - 1)} (= e^2).
double kappa_order_stat_choice();

// eps = 1 - 1 / ((n/s) log p).
double epsilon_order_stat_choice(int n, double p, double s);

// 80 log(p) / p.
double claimed_gamma_bound(double p);

// (8 sqrt(pi) / e^{2 ln 2}) (n-2)^{1/2} / (n-3)^{3/2} (n/p) log p, before the n >= 6 simplification.
double claimed_outer_quantile_bound(int n, double p);

// --- spherical caps and coherence ----------------------------------------

// P(<v, w> >= h) for w uniform on S^{n-1}: (1/2) I_{1-h^2}((n-1)/2, 1/2).
double cap_probability(double h, int n);

// The published ratio int_0^{2h-h^2} t^{(n-1)/2}(1-t)^{1/2} dt / int_0^1 (same), i.e.
// I_{2h-h^2}((n+1)/2, 3/2).
double cap_probability_paper(double h, int n);

// h = (1/2) exp(-2 (log p + (log p - log 2) / (n + 1))), the value making
// (p^2/2)(2h)^{(n+1)/2} equal to p^{-n}.
double coherence_threshold_h(double p, int n);

// (1/2) p^{-2}.
double claimed_coherence_bound(double p);

// --- theorem constants ----------------------------------------------------

// (sqrt(2 pi) / 6) ((1 + C_k) log(1 + 2/eps) + C_k + log(C_k / 4)).
double k_epsilon(double eps, double c_kappa);

struct KappaBranches {
    double constant;  // 4 e^{-2(ln 2 - 1)}
    double growth;    // 4 e^3 / (1-rho)^2 ((1+K)(1+C_k) / (c (1-eps)^4))^2 log^2 p log(C_k n)
    double value() const { return constant > growth ? constant : growth; }
};

KappaBranches kappa_branches(double rho_minus, double eps, double c_kappa, double p, int n, double c_subgauss);
double kappa_theorem(double rho_minus, double eps, double c_kappa, double p, int n, double c_subgauss);

// c^2 (1-rho)^2 (1-eps)^8 / (4 e^3) * C_k / ((1+K)^2 (1+C_k)^2).
double c_s(double rho_minus, double eps, double c_kappa, double c_subgauss);

// floor(C_s n / (log^2 p log(C_k n))). DomainError if a logarithm argument is not above 1.
long s_max(int n, double p, double rho_minus, double eps, double c_kappa, double c_subgauss);

// (1 + K) / (c (1-eps)^4) (n + kappa_s) / n log p.
double norm_threshold_u(int n, double kappa_s, double eps, double c_subgauss, double k_eps, double p);

// 1 - 5 n / (p log(p)^{n-1}) - 9 p^{-n}.
double claimed_theorem_probability(int n, double p);

// ceil(e^{6 / sqrt(2 pi)}).
double theorem_min_p();

struct VFunction {
    double terms[3];
    double value;       // sum of the three terms
    double inv_bound;   // 3 kappa s V
    bool u_window_ok;   // kappa r'^2 / e >= u^2 >= ||M||^4 / kappa
    bool v_floor_ok;    // v^2 >= ||M||^2 / kappa
};

// (e u^2/(kappa r'^2))^{r'^2/v^2} + (e ||M||^4/(kappa u^2))^{u^2/||M||^2}
//   + (e ||M||^2/(kappa v^2))^{v^2/mu^2}.
VFunction v_function(double s, double r_prime, double u_norm, double v_split, double kappa, double norm_m,
                     double mu_m);

// The three terms after the published substitutions:
// (1/e^2)^{log(C_k n)}, (r'^2/(e^2 log^2(C_k n)))^{log(C_k n)}, (1/e^2)^{2 r'^2 p^2 / log(C_k n)}.
std::vector<double> probe_terms_paper(double r_prime, double c_kappa_n, double p);

// --- bundled constants and hypothesis ledger -------------------------------

struct BoundConstants {
    double rho_minus = 0.5;
    double epsilon = 0.5;
    double c_kappa = 1.0;
    double c_subgauss = 0.5;

    // Derived by derive(); never set by hand.
    double k_epsilon = 0.0;
    double kappa = 0.0;
    double c_s = 0.0;
    double c_v = 0.0;             // log(C_k n)
    double norm_threshold = 0.0;  // norm_threshold_u at kappa_s = kappa s
    double u_split = 0.0;         // sqrt(C_V) * norm_threshold
    double v_split = 0.0;         // r' / sqrt(log(C_k n))
    double r_prime = 0.0;
    double h_cap = 0.0;
    double z0 = 0.0;  // NaN when ceil(kappa s) > p

    static BoundConstants derive(double rho_minus, double epsilon, double c_kappa, double c_subgauss, int n,
                                 double p, double s);
};

struct ConstraintResult {
    std::string name;
    double lhs;
    double rhs;
    bool satisfied;
};

// Every hypothesis of the main bound evaluated at (n, p, s).
std::vector<ConstraintResult> constraint_check(int n, double p, double s, const BoundConstants& constants);

struct ParameterCandidate {
    int n;
    double p;
    long s;
};

// Scans n in n_grid, p in p_grid with s = s_max for a point meeting every hypothesis.
std::optional<ParameterCandidate> find_feasible_parameters(const std::vector<int>& n_grid,
                                                           const std::vector<double>& p_grid, double rho_minus,
                                                           double eps, double c_kappa, double c_subgauss);

}  // namespace cri::analytic
