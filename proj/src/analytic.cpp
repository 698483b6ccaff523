#include "cri/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cri/error.hpp"
#include "cri/special.hpp"

namespace cri::analytic {

namespace {

constexpr double kE = std::numbers::e;
constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;

void check_unit_interval(double z, const char* what) {
    if (!(z >= 0.0 && z <= 1.0)) throw DomainError(std::string(what) + ": argument must lie in [0, 1]");
}

void check_dimension(int n, int min_n, const char* what) {
    if (n < min_n) throw DomainError(std::string(what) + ": dimension too small");
}

void check_open_unit(double x, const char* what) {
    if (!(x > 0.0 && x < 1.0)) throw DomainError(std::string(what) + " must lie in (0, 1)");
}

double log_gamma_ratio(int n) {
    return std::lgamma(0.5 * n) - std::lgamma(0.5 * (n - 1));
}

// P(Z_(r) > z) = P(Bin(p, G(z)) < r) = I_{1-G(z)}(p - r + 1, r).
double order_stat_survival(double z, const OrderStatSpec& spec) {
    const double tail = inner_tail(z, spec.n);
    return special::incomplete_beta(static_cast<double>(spec.p - spec.r + 1), static_cast<double>(spec.r), tail);
}

}  // namespace

double inner_density(double z, int n) {
    check_unit_interval(z, "inner_density");
    check_dimension(n, 2, "inner_density");
    const double log_norm = log_gamma_ratio(n) - 0.5 * std::log(kPi);
    return std::exp(log_norm) * std::pow((1.0 - z) * (1.0 + z), 0.5 * (n - 3));
}

double inner_cdf(double z, int n) {
    check_unit_interval(z, "inner_cdf");
    check_dimension(n, 2, "inner_cdf");
    return special::incomplete_beta(0.5, 0.5 * (n - 1), z * z);
}

double inner_tail(double z, int n) {
    check_unit_interval(z, "inner_tail");
    check_dimension(n, 2, "inner_tail");
    return special::incomplete_beta(0.5 * (n - 1), 0.5, (1.0 - z) * (1.0 + z));
}

void validate(const OrderStatSpec& spec) {
    if (spec.n < 2) throw DomainError("OrderStatSpec: n must be >= 2");
    if (spec.r < 1 || spec.r > spec.p) throw DomainError("OrderStatSpec: need 1 <= r <= p");
}

double order_stat_cdf(double z, const OrderStatSpec& spec) {
    check_unit_interval(z, "order_stat_cdf");
    validate(spec);
    const double survival = order_stat_survival(z, spec);
    if (survival <= 0.5) return 1.0 - survival;
    return special::incomplete_beta(static_cast<double>(spec.r), static_cast<double>(spec.p - spec.r + 1),
                                    inner_cdf(z, spec.n));
}

double order_stat_quantile(double alpha, const OrderStatSpec& spec) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("order_stat_quantile: alpha must lie in (0, 1)");
    validate(spec);
    // Invariant: survival(lo) > alpha >= survival(hi).
    double lo = 0.0;
    double hi = 1.0;
    if (order_stat_survival(0.0, spec) <= alpha) return 0.0;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (order_stat_survival(mid, spec) <= alpha) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

double chernoff_lower(double eps, double mean) {
    return std::exp(-0.5 * eps * eps * mean);
}

double gamma_ratio(int n) {
    check_dimension(n, 2, "gamma_ratio");
    return std::exp(log_gamma_ratio(n));
}

RatioBounds gamma_ratio_claimed_bounds(int n) {
    check_dimension(n, 4, "gamma_ratio_claimed_bounds");
    const double shape = std::pow(n - 3.0, 1.5) / std::sqrt(n - 2.0);
    return {std::exp(2.0 * kLn2) / 2.0 * shape, kE * kE / 2.0 * shape};
}

std::optional<int> gamma_ratio_bounds_valid_up_to(int n_max) {
    std::optional<int> last;
    for (int n = 4; n <= n_max; ++n) {
        const double exact = gamma_ratio(n);
        const auto bounds = gamma_ratio_claimed_bounds(n);
        if (bounds.lower <= exact && exact <= bounds.upper) last = n;
    }
    return last;
}

Z0Window z0_window(int n, double p, double eps, double kappa, double s) {
    check_dimension(n, 4, "z0_window");
    const double shape = std::sqrt(n - 2.0) / std::pow(n - 3.0, 1.5);
    const double log_p = std::log(p);
    Z0Window w{};
    w.z_lower = 2.0 * std::sqrt(kPi) / std::exp(2.0 * kLn2) * shape / (0.5 * eps * eps) * (n / p) * log_p;
    w.z_upper = 2.0 * std::sqrt(kPi) / (kE * kE) * shape * kappa * s / ((1.0 - eps) * p);
    w.compatible = w.z_lower <= w.z_upper;
    w.published_condition =
        kappa >= 4.0 / std::exp(2.0 * (kLn2 - 1.0)) * (1.0 - eps) / (eps * eps) * (n / s) * log_p;
    return w;
}

double kappa_order_stat_choice() {
    return 4.0 / std::exp(2.0 * (kLn2 - 1.0));
}

double epsilon_order_stat_choice(int n, double p, double s) {
    return 1.0 - 1.0 / ((n / s) * std::log(p));
}

double claimed_gamma_bound(double p) {
    if (!(p >= 2.0)) throw DomainError("claimed_gamma_bound: p must be >= 2");
    return 80.0 * std::log(p) / p;
}

double claimed_outer_quantile_bound(int n, double p) {
    check_dimension(n, 4, "claimed_outer_quantile_bound");
    return 8.0 * std::sqrt(kPi) / std::exp(2.0 * kLn2) * std::sqrt(n - 2.0) / std::pow(n - 3.0, 1.5) * (n / p) *
           std::log(p);
}

double cap_probability(double h, int n) {
    check_unit_interval(h, "cap_probability");
    check_dimension(n, 2, "cap_probability");
    return 0.5 * inner_tail(h, n);
}

double cap_probability_paper(double h, int n) {
    check_unit_interval(h, "cap_probability_paper");
    check_dimension(n, 2, "cap_probability_paper");
    // int_0^x t^{(n-1)/2} (1-t)^{1/2} dt is B((n+1)/2, 3/2) I_x((n+1)/2, 3/2).
    const double upper = 2.0 * h - h * h;
    return special::incomplete_beta(0.5 * (n + 1), 1.5, upper);
}

double coherence_threshold_h(double p, int n) {
    if (!(p >= 2.0)) throw DomainError("coherence_threshold_h: p must be >= 2");
    check_dimension(n, 1, "coherence_threshold_h");
    const double log_p = std::log(p);
    return 0.5 * std::exp(-2.0 * (log_p + (log_p - kLn2) / (n + 1.0)));
}

double claimed_coherence_bound(double p) {
    return 0.5 / (p * p);
}

double k_epsilon(double eps, double c_kappa) {
    return std::sqrt(2.0 * kPi) / 6.0 *
           ((1.0 + c_kappa) * std::log(1.0 + 2.0 / eps) + c_kappa + std::log(c_kappa / 4.0));
}

KappaBranches kappa_branches(double rho_minus, double eps, double c_kappa, double p, int n, double c_subgauss) {
    const double k = k_epsilon(eps, c_kappa);
    const double inner = (1.0 + k) * (1.0 + c_kappa) / (c_subgauss * std::pow(1.0 - eps, 4));
    const double log_p = std::log(p);
    KappaBranches b{};
    b.constant = 4.0 * std::exp(-2.0 * (kLn2 - 1.0));
    b.growth = 4.0 * std::pow(kE, 3) / ((1.0 - rho_minus) * (1.0 - rho_minus)) * inner * inner * log_p * log_p *
               std::log(c_kappa * n);
    return b;
}

double kappa_theorem(double rho_minus, double eps, double c_kappa, double p, int n, double c_subgauss) {
    return kappa_branches(rho_minus, eps, c_kappa, p, n, c_subgauss).value();
}

double c_s(double rho_minus, double eps, double c_kappa, double c_subgauss) {
    const double k = k_epsilon(eps, c_kappa);
    return c_subgauss * c_subgauss * (1.0 - rho_minus) * (1.0 - rho_minus) * std::pow(1.0 - eps, 8) /
           (4.0 * std::pow(kE, 3)) * c_kappa / ((1.0 + k) * (1.0 + k) * (1.0 + c_kappa) * (1.0 + c_kappa));
}

long s_max(int n, double p, double rho_minus, double eps, double c_kappa, double c_subgauss) {
    if (!(p > 1.0)) throw DomainError("s_max: p must exceed 1");
    if (!(c_kappa * n > 1.0)) throw DomainError("s_max: C_kappa * n must exceed 1");
    const double log_p = std::log(p);
    const double value = c_s(rho_minus, eps, c_kappa, c_subgauss) * n / (log_p * log_p * std::log(c_kappa * n));
    return static_cast<long>(std::floor(value));
}

double norm_threshold_u(int n, double kappa_s, double eps, double c_subgauss, double k_eps, double p) {
    return (1.0 + k_eps) / (c_subgauss * std::pow(1.0 - eps, 4)) * (n + kappa_s) / n * std::log(p);
}

double claimed_theorem_probability(int n, double p) {
    const double log_p = std::log(p);
    return 1.0 - 5.0 * n / (p * std::pow(log_p, n - 1)) - 9.0 * std::pow(p, -n);
}

double theorem_min_p() {
    return std::ceil(std::exp(6.0 / std::sqrt(2.0 * kPi)));
}

VFunction v_function(double s, double r_prime, double u_norm, double v_split, double kappa, double norm_m,
                     double mu_m) {
    if (!(s > 0 && r_prime > 0 && u_norm > 0 && v_split > 0 && kappa > 0 && norm_m > 0 && mu_m > 0)) {
        throw DomainError("v_function: all inputs must be positive");
    }
    const double u2 = u_norm * u_norm;
    const double v2 = v_split * v_split;
    const double r2 = r_prime * r_prime;
    const double m2 = norm_m * norm_m;
    VFunction out{};
    out.terms[0] = std::pow(kE / kappa * u2 / r2, r2 / v2);
    out.terms[1] = std::pow(kE / kappa * m2 * m2 / u2, u2 / m2);
    out.terms[2] = std::pow(kE / kappa * m2 / v2, v2 / (mu_m * mu_m));
    out.value = out.terms[0] + out.terms[1] + out.terms[2];
    out.inv_bound = 3.0 * kappa * s * out.value;
    out.u_window_ok = kappa * r2 / kE >= u2 && u2 >= m2 * m2 / kappa;
    out.v_floor_ok = v2 >= m2 / kappa;
    return out;
}

std::vector<double> probe_terms_paper(double r_prime, double c_kappa_n, double p) {
    const double log_ckn = std::log(c_kappa_n);
    const double r2 = r_prime * r_prime;
    return {std::pow(1.0 / (kE * kE), log_ckn), std::pow(r2 / (kE * kE * log_ckn * log_ckn), log_ckn),
            std::pow(1.0 / (kE * kE), 2.0 * r2 * p * p / log_ckn)};
}

BoundConstants BoundConstants::derive(double rho_minus, double epsilon, double c_kappa, double c_subgauss, int n,
                                      double p, double s) {
    check_open_unit(rho_minus, "rho_minus");
    check_open_unit(epsilon, "epsilon");
    if (!(c_kappa > 0.0)) throw DomainError("C_kappa must be positive");
    if (!(c_subgauss > 0.0)) throw DomainError("c must be positive");
    if (n < 1) throw DomainError("n must be >= 1");
    if (!(p >= 2.0)) throw DomainError("p must be >= 2");

    BoundConstants c;
    c.rho_minus = rho_minus;
    c.epsilon = epsilon;
    c.c_kappa = c_kappa;
    c.c_subgauss = c_subgauss;
    c.k_epsilon = analytic::k_epsilon(epsilon, c_kappa);
    c.kappa = kappa_theorem(rho_minus, epsilon, c_kappa, p, n, c_subgauss);
    c.c_s = analytic::c_s(rho_minus, epsilon, c_kappa, c_subgauss);
    c.c_v = std::log(c_kappa * n);
    c.r_prime = (1.0 - rho_minus) / 2.0;
    c.norm_threshold = norm_threshold_u(n, c.kappa * s, epsilon, c_subgauss, c.k_epsilon, p);
    c.u_split = std::sqrt(std::max(c.c_v, 0.0)) * c.norm_threshold;
    c.v_split = c.c_v > 0.0 ? c.r_prime / std::sqrt(c.c_v) : std::numeric_limits<double>::quiet_NaN();
    c.h_cap = coherence_threshold_h(p, n);

    const double r = std::ceil(c.kappa * s);
    if (n >= 2 && r >= 1.0 && r <= p) {
        OrderStatSpec spec{static_cast<int>(p), static_cast<int>(r), n};
        const double alpha = std::max(std::pow(p, -n), std::numeric_limits<double>::min());
        c.z0 = order_stat_quantile(alpha, spec);
    } else {
        c.z0 = std::numeric_limits<double>::quiet_NaN();
    }
    return c;
}

std::vector<ConstraintResult> constraint_check(int n, double p, double s, const BoundConstants& k) {
    std::vector<ConstraintResult> out;
    const double nd = n;
    out.push_back({"p >= ceil(exp(6/sqrt(2 pi)))", p, theorem_min_p(), p >= theorem_min_p()});
    out.push_back({"n >= 6", nd, 6.0, n >= 6});
    out.push_back({"s >= 1", s, 1.0, s >= 1.0});

    const double lower_n = std::max({k.kappa * s, 2.0 * 36.0 * 3.0 * 3.0, std::exp((1.0 - k.rho_minus) / 2.0)}) /
                           k.c_kappa;
    out.push_back({"n >= max{kappa s, 648, exp((1-rho)/2)} / C_kappa", nd, lower_n, nd >= lower_n});

    const double log_p = std::log(p);
    const double upper_sq = (p / log_p) * (p / log_p);
    out.push_back({"n <= (p / log p)^2", nd, upper_sq, nd <= upper_sq});

    const double log_upper_exp = (1.0 - k.rho_minus) * p / std::numbers::sqrt2 - std::log(k.c_kappa);
    out.push_back({"n <= exp((1-rho) p / sqrt 2) / C_kappa", nd, std::exp(log_upper_exp),
                   std::log(nd) <= log_upper_exp});

    double smax = std::numeric_limits<double>::quiet_NaN();
    if (p > 1.0 && k.c_kappa * n > 1.0) {
        smax = static_cast<double>(s_max(n, p, k.rho_minus, k.epsilon, k.c_kappa, k.c_subgauss));
    }
    out.push_back({"s <= s_max", s, smax, s <= smax});

    const double claimed = claimed_theorem_probability(n, p);
    out.push_back({"claimed probability > 0", claimed, 0.0, claimed > 0.0});
    return out;
}

std::optional<ParameterCandidate> find_feasible_parameters(const std::vector<int>& n_grid,
                                                           const std::vector<double>& p_grid, double rho_minus,
                                                           double eps, double c_kappa, double c_subgauss) {
    for (int n : n_grid) {
        for (double p : p_grid) {
            if (!(p >= 2.0) || !(c_kappa * n > 1.0)) continue;
            const long s = s_max(n, p, rho_minus, eps, c_kappa, c_subgauss);
            if (s < 1) continue;
            const auto k = BoundConstants::derive(rho_minus, eps, c_kappa, c_subgauss, n, p, static_cast<double>(s));
            const auto ledger = constraint_check(n, p, static_cast<double>(s), k);
            if (std::all_of(ledger.begin(), ledger.end(), [](const ConstraintResult& c) { return c.satisfied; })) {
                return ParameterCandidate{n, p, s};
            }
        }
    }
    return std::nullopt;
}

}  // namespace cri::analytic
