#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numbers>

#include "cri/analytic.hpp"
#include "cri/error.hpp"
#include "second_transcription.hpp"

using namespace cri;
using namespace cri::analytic;
using namespace cri::oracle;

namespace {

constexpr double kE = std::numbers::e;
constexpr double kPi = std::numbers::pi;

double beta_quantile_by_bisection(double a, double b, double level) {
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (boost::math::ibeta(a, b, mid) >= level ? hi : lo) = mid;
    }
    return hi;
}


}  // namespace

TEST_SUITE("analytic") {

TEST_CASE("inner density") {
    for (double z : {0.01, 0.3, 0.5, 0.99}) CHECK(inner_density(z, 3) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(inner_density(1.5, 3), DomainError);
    CHECK_THROWS_AS(inner_density(-0.1, 3), DomainError);
    for (int n = 2; n <= 50; ++n) {
        // z = sin(t), single Gauss-Kronrod pass; nodes stay away from t = pi/2.
        using boost::math::quadrature::gauss_kronrod;
        const double total = 2.0 * gauss_kronrod<double, 61>::integrate(
                                       [n](double t) { return inner_density(std::sin(t), n) * std::cos(t); }, 0.0,
                                       kPi / 2, 0, 1e-14);
        CHECK(std::abs(total - 1.0) <= 1e-10);
    }
}

TEST_CASE("inner cdf against quadrature and closed forms") {
    for (int n : {2, 3, 4, 6, 20, 50}) {
        CHECK(inner_cdf(0.0, n) == 0.0);
        CHECK(inner_cdf(1.0, n) == 1.0);
    }
    for (int i = 0; i <= 1000; ++i) {
        const double z = i / 1000.0;
        CHECK(std::abs(inner_cdf(z, 3) - z) <= 1e-10);
    }
    boost::math::quadrature::tanh_sinh<double> quad;
    for (int n : {2, 4, 7, 12, 30}) {
        for (double z : {0.05, 0.2, 0.5, 0.8, 0.97}) {
            const double ref = 2.0 * quad.integrate([n](double t) { return inner_density(t, n); }, 0.0, z);
            CHECK(inner_cdf(z, n) == doctest::Approx(ref).epsilon(1e-10));
            CHECK(inner_tail(z, n) == doctest::Approx(1.0 - ref).epsilon(1e-9));
        }
    }
    for (int n : {3, 5, 10}) {
        for (double z = 0.05; z < 0.95; z += 0.05) {
            const double h = 1e-5;
            const double slope = (inner_cdf(z + h, n) - inner_cdf(z - h, n)) / (2 * h);
            CHECK(std::abs(slope - 2.0 * inner_density(z, n)) <= 1e-6);
        }
    }
}

TEST_CASE("order statistic law") {
    for (int r : {1, 5, 20}) {
        const OrderStatSpec spec{20, r, 3};
        for (double z = 0.0; z <= 1.0; z += 0.01) {
            CHECK(std::abs(order_stat_cdf(z, spec) - boost::math::ibeta(r, 20 - r + 1, z)) <= 1e-8);
        }
    }
    for (double z : {0.1, 0.4, 0.7}) {
        const double g = inner_cdf(z, 6);
        CHECK(order_stat_cdf(z, {15, 1, 6}) == doctest::Approx(1.0 - std::pow(1.0 - g, 15)).epsilon(1e-12));
        double previous = 1.0;
        for (int r = 1; r <= 15; ++r) {
            const double value = order_stat_cdf(z, {15, r, 6});
            CHECK(value <= previous + 1e-15);
            previous = value;
        }
    }
    for (int r : {1, 7, 15}) CHECK(order_stat_cdf(1.0, {15, r, 6}) == 1.0);
    CHECK_THROWS_AS(validate(OrderStatSpec{10, 11, 3}), DomainError);
    CHECK_THROWS_AS(validate(OrderStatSpec{10, 0, 3}), DomainError);
}

TEST_CASE("order statistic quantile") {
    const OrderStatSpec spec{10, 3, 3};
    CHECK(order_stat_quantile(0.1, spec) == doctest::Approx(beta_quantile_by_bisection(3, 8, 0.9)).epsilon(1e-10));
    CHECK(order_stat_quantile(1.0 - 1e-12, spec) < 1e-3);
    for (double alpha : {0.5, 0.1, 1e-3, 1e-8}) {
        for (const OrderStatSpec s : {OrderStatSpec{50, 12, 8}, OrderStatSpec{200, 8, 4}}) {
            const double z = order_stat_quantile(alpha, s);
            const double f = order_stat_cdf(z, s);
            CHECK(f >= 1.0 - alpha - 1e-12);
            CHECK(f <= 1.0 - alpha + 1e-9);
        }
    }
}

TEST_CASE("chernoff bound") {
    CHECK(chernoff_lower(0.3, 0.0) == 1.0);
    CHECK(chernoff_lower(0.5, 8.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(chernoff_lower(0.5, 8.0) > chernoff_lower(0.6, 8.0));
}

TEST_CASE("gamma ratio and its claimed bounds") {
    CHECK(gamma_ratio(4) == doctest::Approx(2.0 / std::sqrt(kPi)).epsilon(1e-14));
    CHECK(gamma_ratio(2) == doctest::Approx(1.0 / std::sqrt(kPi)).epsilon(1e-14));
    const auto b = gamma_ratio_claimed_bounds(4);
    CHECK(b.lower == doctest::Approx(2.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(b.upper == doctest::Approx(kE * kE / 2.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(gamma_ratio_claimed_bounds(3), DomainError);
    // The lower bound already exceeds the exact ratio at n = 4 and the gap widens with n.
    CHECK(b.lower > gamma_ratio(4));
    CHECK_FALSE(gamma_ratio_bounds_valid_up_to(200).has_value());
}

TEST_CASE("z0 window") {
    const int n = 20;
    const double p = 1000.0;
    const double s = 2.0;
    const double eps = epsilon_order_stat_choice(n, p, s);
    CHECK(eps == doctest::Approx(1.0 - 1.0 / (10.0 * std::log(1000.0))).epsilon(1e-15));
    const auto w = z0_window(n, p, eps, kappa_order_stat_choice(), s);
    CHECK(w.compatible);
    CHECK(w.compatible == (w.z_lower <= w.z_upper));

    const double shape = std::pow(n - 2.0, 0.5) * std::pow(n - 3.0, -1.5);
    const double lower = 2.0 * std::sqrt(kPi) / 4.0 * shape * 2.0 / (eps * eps) * n / p * std::log(p);
    const double upper = 2.0 * std::sqrt(kPi) * std::exp(-2.0) * shape * kappa_order_stat_choice() * s /
                         ((1.0 - eps) * p);
    CHECK(w.z_lower == doctest::Approx(lower).epsilon(1e-12));
    CHECK(w.z_upper == doctest::Approx(upper).epsilon(1e-12));

    for (int nn : {10, 50, 200}) {
        for (double pp : {50.0, 1e4}) {
            const double e = epsilon_order_stat_choice(nn, pp, 1.0);
            const auto ww = z0_window(nn, pp, e, kappa_order_stat_choice(), 1.0);
            CHECK(ww.compatible == (ww.z_lower <= ww.z_upper));
            CHECK(ww.compatible);
        }
    }
    const auto tight = z0_window(20, 1000.0, 0.5, 1.0, 1.0);
    CHECK_FALSE(tight.compatible);
}

TEST_CASE("claimed gamma bound") {
    CHECK(claimed_gamma_bound(kE) == doctest::Approx(80.0 / kE).epsilon(1e-15));
    CHECK(claimed_gamma_bound(1000.0) == doctest::Approx(0.5526204223).epsilon(1e-9));
    CHECK(claimed_gamma_bound(2000.0) == doctest::Approx(0.3040360).epsilon(1e-6));
    for (double p = 3.0; p < 1e5; p *= 1.7) CHECK(claimed_gamma_bound(p * 1.7) < claimed_gamma_bound(p));
}

TEST_CASE("cap probabilities") {
    for (int n : {2, 3, 5, 10, 30}) {
        CHECK(cap_probability(0.0, n) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(cap_probability(1.0, n) == 0.0);
    }
    CHECK(cap_probability(0.5, 3) == doctest::Approx(0.25).epsilon(1e-14));
    for (int n = 3; n <= 30; ++n) {
        for (double h = 0.0; h <= 1.0; h += 0.05) {
            CHECK(std::abs(2.0 * cap_probability(h, n) - (1.0 - inner_cdf(h, n))) <= 1e-10);
        }
    }
    // The published display is a different quantity; record one value for each.
    CHECK(cap_probability_paper(0.5, 3) == doctest::Approx(boost::math::ibeta(2.0, 1.5, 0.75)).epsilon(1e-12));
    CHECK(std::abs(cap_probability_paper(0.5, 3) - cap_probability(0.5, 3)) > 0.1);
}

TEST_CASE("coherence threshold") {
    for (double p : {10.0, 100.0}) {
        for (int n = 6; n <= 20; ++n) {
            const double h = coherence_threshold_h(p, n);
            const double lhs = p * p / 2.0 * std::pow(2.0 * h, (n + 1) / 2.0);
            CHECK(lhs <= std::pow(p, -n) * (1.0 + 1e-10));
        }
    }
    for (double p : {2.0, 3.0, 11.0, 1e3, 1e6}) {
        for (int n : {1, 6, 40}) CHECK(coherence_threshold_h(p, n) <= claimed_coherence_bound(p) * (1.0 + 1e-12));
    }
    CHECK(coherence_threshold_h(50.0, 6) < coherence_threshold_h(20.0, 6));
    CHECK(claimed_coherence_bound(50.0) == doctest::Approx(2e-4).epsilon(1e-14));
}

TEST_CASE("theorem constants against second transcriptions") {
    CHECK(k_epsilon(0.5, 1.0) == doctest::Approx(1.1833714645).epsilon(1e-9));
    for (double eps : {0.1, 0.5, 0.9}) {
        for (double ck : {0.2, 1.0, 3.0}) {
            CHECK(std::abs(k_epsilon(eps, ck) - k_eps_alt(eps, ck)) <= 1e-12 * std::max(1.0, std::abs(k_eps_alt(eps, ck))));
            for (double rho : {0.2, 0.5}) {
                const double cs = c_s(rho, eps, ck, 0.5);
                CHECK(std::abs(cs - c_s_alt(rho, eps, ck, 0.5)) <= 1e-12 * cs);
            }
        }
    }
    CHECK(k_epsilon(0.1, 1.0) > k_epsilon(0.5, 1.0));
    CHECK(k_epsilon(0.5, 1e-12) < -10.0);

    const auto br = kappa_branches(0.5, 0.5, 1.0, 1000.0, 100, 0.5);
    CHECK(std::abs(br.constant - 4.0 * std::exp(-2.0 * (std::log(2.0) - 1.0))) <= 1e-12);
    CHECK(std::abs(br.constant - kE * kE) <= 1e-12);
    CHECK(std::abs(br.growth - kappa_growth_alt(0.5, 0.5, 1.0, 1000.0, 100, 0.5)) <= 1e-12 * br.growth);
    CHECK(kappa_theorem(0.5, 0.5, 1.0, 1000.0, 100, 0.5) == std::max(br.constant, br.growth));
    const auto small = kappa_branches(0.5, 0.5, 0.011, 11.0, 100, 50.0);
    CHECK(kappa_theorem(0.5, 0.5, 0.011, 11.0, 100, 50.0) == std::max(small.constant, small.growth));
    CHECK(kappa_branches(0.5, 0.5, 1.0, 1e4, 100, 0.5).growth > br.growth);
}

TEST_CASE("s_max") {
    const double cs = c_s_alt(0.5, 0.5, 1.0, 0.5);
    const long expected = static_cast<long>(std::floor(cs * 100 / (std::pow(std::log(1000.0), 2) * std::log(100.0))));
    CHECK(s_max(100, 1000.0, 0.5, 0.5, 1.0, 0.5) == expected);
    CHECK(s_max(100, 1000.0, 0.5, 0.5, 1.0, 0.5) <= 1);
    long previous = 0;
    for (int n = 2; n < 1000000; n *= 3) {
        const long s = s_max(n, 1000.0, 0.5, 0.5, 1.0, 0.5);
        CHECK(s >= previous);
        previous = s;
    }
    CHECK_THROWS_AS(s_max(1, 1000.0, 0.5, 0.5, 1.0, 0.5), DomainError);
    CHECK_THROWS_AS(s_max(10, 1.0, 0.5, 0.5, 1.0, 0.5), DomainError);
}

TEST_CASE("norm threshold") {
    const double k = k_epsilon(0.5, 1.0);
    const double spot = (1.0 + k) / (0.5 * std::pow(0.5, 4)) * (10.0 + 12.0) / 10.0 * std::log(50.0);
    CHECK(norm_threshold_u(10, 12.0, 0.5, 0.5, k, 50.0) == doctest::Approx(spot).epsilon(1e-12));
    CHECK(norm_threshold_u(10, 0.0, 0.5, 0.5, k, 50.0) ==
          doctest::Approx((1.0 + k) / (0.5 * 0.0625) * std::log(50.0)).epsilon(1e-12));
    const double a = norm_threshold_u(10, 12.0, 0.5, 0.5, k, 50.0);
    const double b = norm_threshold_u(10, 12.0, 0.5, 0.5, k, 2500.0);
    CHECK(b == doctest::Approx(2.0 * a).epsilon(1e-12));
}

TEST_CASE("theorem probability and minimum p") {
    CHECK(theorem_min_p() == 11.0);
    CHECK(std::exp(6.0 / std::sqrt(2.0 * kPi)) == doctest::Approx(10.9546).epsilon(1e-4));
    CHECK(claimed_theorem_probability(6, 100.0) ==
          doctest::Approx(1.0 - 5.0 * 6 / (100.0 * std::pow(std::log(100.0), 5)) - 9.0 * std::pow(100.0, -6)));
    CHECK(claimed_theorem_probability(6, 3.0) < 0.0);
}

TEST_CASE("V function terms") {
    const double kappa = 50.0;
    const auto v = v_function(2.0, 0.25, 0.4, 0.3, kappa, 1.5, 0.2);
    CHECK(std::abs(v.terms[0] - std::pow(kE * (0.16 / 0.0625) / kappa, 0.0625 / 0.09)) <= 1e-14);
    CHECK(std::abs(v.terms[1] - std::pow(kE * std::pow(1.5, 4) / 0.16 / kappa, 0.16 / 2.25)) <= 1e-14);
    CHECK(std::abs(v.terms[2] - std::pow(kE * 2.25 / 0.09 / kappa, 0.09 / 0.04)) <= 1e-12);
    CHECK(v.value == doctest::Approx(v.terms[0] + v.terms[1] + v.terms[2]));
    CHECK(v.inv_bound == doctest::Approx(3.0 * kappa * 2.0 * v.value));
    const auto far = v_function(2.0, 0.25, 0.4, 0.3, 1e60, 1.5, 0.2);
    for (double t : far.terms) CHECK(t < 1e-3);
    CHECK_THROWS_AS(v_function(2.0, 0.0, 0.4, 0.3, kappa, 1.5, 0.2), DomainError);
}

TEST_CASE("V reduces to the published probe terms after substitution") {
    for (double ckn : {20.0, 200.0, 5000.0}) {
        for (double p : {11.0, 40.0}) {
            const double r_prime = 0.3;
            const double cv = std::log(ckn);
            const double t = 7.5;  // stands in for the norm threshold
            const double kappa = std::exp(3.0) * cv / (r_prime * r_prime) * t * t;
            const double v_split = r_prime / std::sqrt(cv);
            const double u = std::sqrt(cv) * t;
            const double mu = std::sqrt(0.5) / p;  // mu^2 = (1/2) p^{-2}
            const auto v = v_function(1.0, r_prime, u, v_split, kappa, t, mu);
            const auto published = probe_terms_paper(r_prime, ckn, p);
            REQUIRE(published.size() == 3);
            for (int i = 0; i < 3; ++i) {
                CHECK(v.terms[i] == doctest::Approx(published[static_cast<std::size_t>(i)]).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("constraint ledger") {
    auto find = [](const std::vector<ConstraintResult>& ledger, const std::string& prefix) {
        for (const auto& c : ledger) {
            if (c.name.rfind(prefix, 0) == 0) return c;
        }
        FAIL("missing constraint " << prefix);
        return ledger.front();
    };
    const auto k10 = BoundConstants::derive(0.5, 0.5, 1.0, 0.5, 20, 10.0, 1.0);
    CHECK_FALSE(find(constraint_check(20, 10.0, 1.0, k10), "p >=").satisfied);
    const auto k11 = BoundConstants::derive(0.5, 0.5, 1.0, 0.5, 20, 11.0, 1.0);
    CHECK(find(constraint_check(20, 11.0, 1.0, k11), "p >=").satisfied);
    const auto k5 = BoundConstants::derive(0.5, 0.5, 1.0, 0.5, 5, 100.0, 1.0);
    CHECK_FALSE(find(constraint_check(5, 100.0, 1.0, k5), "n >= 6").satisfied);

    std::vector<int> ns;
    for (int n = 6; n <= 10000000; n *= 2) ns.push_back(n);
    std::vector<double> ps;
    for (double p = 11.0; p <= 1e12; p *= 2.0) ps.push_back(p);
    CHECK_FALSE(find_feasible_parameters(ns, ps, 0.5, 0.5, 1.0, 0.5).has_value());
}

TEST_CASE("bound constants derive consistently") {
    const auto k = BoundConstants::derive(0.5, 0.5, 1.0, 0.5, 100, 1000.0, 1.0);
    CHECK(k.k_epsilon == k_epsilon(0.5, 1.0));
    CHECK(k.kappa == kappa_theorem(0.5, 0.5, 1.0, 1000.0, 100, 0.5));
    CHECK(k.c_v == doctest::Approx(std::log(100.0)));
    CHECK(k.r_prime == 0.25);
    CHECK(k.u_split == doctest::Approx(std::sqrt(k.c_v) * k.norm_threshold));
    CHECK(k.v_split == doctest::Approx(0.25 / std::sqrt(k.c_v)));
    CHECK(std::isnan(k.z0));  // kappa s exceeds p at these constants
    const auto small = BoundConstants::derive(0.5, 0.5, 0.011, 50.0, 100, 1000.0, 1.0);
    CHECK(std::isfinite(small.z0));
    CHECK_THROWS_AS(BoundConstants::derive(1.0, 0.5, 1.0, 0.5, 100, 1000.0, 1.0), DomainError);
}

}
