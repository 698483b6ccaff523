#include "cri/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cri/error.hpp"
#include "cri/parallel.hpp"

namespace cri::selection {

namespace {

// Floating-point slack on the sigma_min >= rho_minus acceptance test.
constexpr double kSigmaSlack = 1e-12;

bool well_conditioned(const ColumnMatrix& x, const std::vector<std::size_t>& columns, double rho_minus) {
    Matrix sub(x.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t k = 0; k < columns.size(); ++k) {
        sub.col(static_cast<Eigen::Index>(k)) = x.column(static_cast<Eigen::Index>(columns[k]));
    }
    return sigma_min(sub) >= rho_minus - kSigmaSlack;
}

// Column order by (|<X_j, v>|, j).
std::vector<std::size_t> sorted_order(const Vector& scores) {
    std::vector<std::size_t> order(static_cast<std::size_t>(scores.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores(a) < scores(b); });
    return order;
}

// Advances `combo` (strictly increasing values in [0, limit)) to the next combination.
bool next_combination(std::vector<std::size_t>& combo, std::size_t limit) {
    const std::size_t t = combo.size();
    for (std::size_t i = t; i-- > 0;) {
        if (combo[i] < limit - t + i) {
            ++combo[i];
            for (std::size_t j = i + 1; j < t; ++j) combo[j] = combo[j - 1] + 1;
            return true;
        }
    }
    return false;
}

}  // namespace

void validate(const SelectionConfig& cfg) {
    if (cfg.s < 1) throw InvalidInput("SelectionConfig: s must be >= 1");
    if (!(cfg.rho_minus > 0.0 && cfg.rho_minus <= 1.0)) throw InvalidInput("SelectionConfig: rho_minus must lie in (0, 1]");
    if (!(cfg.kappa >= 1.0)) throw InvalidInput("SelectionConfig: kappa must be >= 1");
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) throw InvalidInput("SelectionConfig: epsilon must lie in (0, 1)");
    if (cfg.max_attempts < 1) throw InvalidInput("SelectionConfig: max_attempts must be >= 1");
}

IndexSet greedy_outer(const ColumnMatrix& x, const Vector& v, std::size_t m) {
    const auto p = static_cast<std::size_t>(x.cols());
    if (m < 1 || m > p) throw InvalidInput("greedy_outer: need 1 <= m <= p");
    const Vector scores = abs_inner_products(x, v);
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), 0);
    auto by_score = [&](std::size_t a, std::size_t b) {
        return scores(a) < scores(b) || (scores(a) == scores(b) && a < b);
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m), order.end(), by_score);
    order.resize(m);
    return IndexSet::from_unsorted(std::move(order));
}

std::size_t outer_size(std::size_t p, const SelectionConfig& cfg) {
    const auto inflated = static_cast<std::size_t>(std::ceil(cfg.kappa * static_cast<double>(cfg.s)));
    return std::min(inflated, p / 2);
}

ExtractResult random_extract(const ColumnMatrix& x, const IndexSet& outer, std::size_t s, double rho_minus,
                             RngStream& rng, std::size_t max_attempts) {
    if (s < 1 || s > outer.size()) throw InvalidInput("random_extract: need 1 <= s <= |outer|");
    for (std::size_t j : outer) {
        if (j >= static_cast<std::size_t>(x.cols())) throw InvalidIndex("random_extract: outer index out of range");
    }
    ExtractResult result;
    std::vector<std::size_t> pool(outer.begin(), outer.end());
    std::vector<std::size_t> pick(s);
    const std::size_t size = pool.size();
    while (result.attempts < max_attempts) {
        ++result.attempts;
        for (std::size_t i = 0; i < s; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(size - i));
            std::swap(pool[i], pool[j]);
        }
        std::copy_n(pool.begin(), s, pick.begin());
        std::sort(pick.begin(), pick.end());
        Matrix sub(x.rows(), static_cast<Eigen::Index>(s));
        for (std::size_t k = 0; k < s; ++k) {
            sub.col(static_cast<Eigen::Index>(k)) = x.column(static_cast<Eigen::Index>(pick[k]));
        }
        const double sigma = sigma_min(sub);
        result.sigma_min = std::max(result.sigma_min, sigma);
        if (sigma >= rho_minus - kSigmaSlack) {
            result.sigma_min = sigma;
            result.subset = IndexSet(pick);
            return result;
        }
    }
    return result;
}

SelectionOutcome constrained_select(const ColumnMatrix& x, const Vector& v, const SelectionConfig& cfg,
                                    RngStream& rng) {
    validate(cfg);
    const auto p = static_cast<std::size_t>(x.cols());
    if (static_cast<std::size_t>(std::ceil(cfg.kappa * static_cast<double>(cfg.s))) > p) {
        throw InvalidInput("constrained_select: ceil(kappa s) exceeds the column count");
    }
    const std::size_t m = outer_size(p, cfg);
    if (m < cfg.s) {
        throw InvalidInput("constrained_select: outer size " + std::to_string(m) + " is below s");
    }
    SelectionOutcome out;
    out.outer_set = greedy_outer(x, v, m);
    auto extracted = random_extract(x, out.outer_set, cfg.s, cfg.rho_minus, rng, cfg.max_attempts);
    out.attempts_used = extracted.attempts;
    out.sigma_min_achieved = extracted.sigma_min;
    if (extracted.subset) {
        out.attained_value = inf_norm_against(x, *extracted.subset, v);
        out.inner_set = std::move(extracted.subset);
    }
    return out;
}

std::uint64_t binomial_count(std::uint64_t p, std::uint64_t s) {
    if (s > p) return 0;
    s = std::min(s, p - s);
    unsigned __int128 acc = 1;
    for (std::uint64_t i = 1; i <= s; ++i) {
        acc = acc * (p - s + i) / i;
        if (acc > UINT64_MAX) return UINT64_MAX;
    }
    return static_cast<std::uint64_t>(acc);
}

double brute_force_inf(const ColumnMatrix& x, const Vector& v, std::size_t s, double rho_minus,
                       std::uint64_t limit) {
    const auto p = static_cast<std::size_t>(x.cols());
    if (s < 1 || s > p) throw InvalidInput("brute_force_inf: need 1 <= s <= p");
    if (binomial_count(p, s) > limit) {
        throw BudgetExceeded("brute_force_inf: C(" + std::to_string(p) + ", " + std::to_string(s) +
                             ") exceeds the enumeration budget");
    }
    const Vector scores = abs_inner_products(x, v);
    const auto order = sorted_order(scores);

    // The optimum is scores[order[k]] for the smallest k such that some
    // feasible subset has order[k] as its largest-score member.
    std::vector<std::size_t> columns(s);
    for (std::size_t k = s - 1; k < p; ++k) {
        columns[s - 1] = order[k];
        if (s == 1) {
            if (well_conditioned(x, columns, rho_minus)) return scores(static_cast<Eigen::Index>(order[k]));
            continue;
        }
        std::vector<std::size_t> combo(s - 1);
        std::iota(combo.begin(), combo.end(), 0);
        do {
            for (std::size_t i = 0; i + 1 < s; ++i) columns[i] = order[combo[i]];
            if (well_conditioned(x, columns, rho_minus)) return scores(static_cast<Eigen::Index>(order[k]));
        } while (next_combination(combo, k));
    }
    return kInfeasible;
}

GammaEstimate estimate_gamma(const ColumnMatrix& x, const SelectionConfig& cfg, const sphere::EpsNet& net,
                             std::size_t probe_count, RngStream& rng, unsigned workers) {
    validate(cfg);
    if (net.dimension != x.rows()) throw InvalidInput("estimate_gamma: net dimension does not match n");
    if (net.size() == 0) throw InvalidInput("estimate_gamma: empty net");

    const std::uint64_t net_seed = rng.next_u64();
    const std::uint64_t probe_seed = rng.next_u64();
    const auto p = static_cast<std::size_t>(x.cols());
    const bool exact = binomial_count(p, cfg.s) <= cfg.brute_force_limit;

    std::vector<double> attained(net.size());
    std::vector<double> outer_max(net.size());
    parallel_for(
        net.size(),
        [&](std::size_t i) {
            RngStream stream(net_seed, i);
            const Vector v = net.point(i);
            const auto outcome = constrained_select(x, v, cfg, stream);
            attained[i] = outcome.attained_value;
            outer_max[i] = inf_norm_against(x, outcome.outer_set, v);
        },
        workers);

    std::vector<double> probe_values(probe_count);
    parallel_for(
        probe_count,
        [&](std::size_t i) {
            RngStream stream(probe_seed, i);
            const Vector v = sphere::sample_unit_vector(static_cast<int>(x.rows()), stream);
            if (exact) {
                probe_values[i] = brute_force_inf(x, v, cfg.s, cfg.rho_minus, cfg.brute_force_limit);
            } else {
                probe_values[i] = constrained_select(x, v, cfg, stream).attained_value;
            }
        },
        workers);

    GammaEstimate est;
    est.net = {net.dimension, net.epsilon, net.size(), net.mode};
    est.directions_tested = net.size() + probe_count;
    est.oracle_exact = exact;
    std::size_t feasible = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < net.size(); ++i) {
        worst = std::max(worst, attained[i]);
        est.net_max_outer = std::max(est.net_max_outer, outer_max[i]);
        if (attained[i] != kInfeasible) ++feasible;
    }
    est.net_max_attained = worst;
    est.certified_upper = worst + net.epsilon;
    est.feasibility_rate = static_cast<double>(feasible) / static_cast<double>(net.size());
    est.heuristic_lower = 0.0;
    for (double value : probe_values) est.heuristic_lower = std::max(est.heuristic_lower, value);
    return est;
}

CertificateAudit audit_certificate(const ColumnMatrix& x, const SelectionConfig& cfg, double certificate,
                                   std::size_t probes, RngStream& rng, bool use_oracle, unsigned workers) {
    validate(cfg);
    const std::uint64_t probe_seed = rng.next_u64();
    std::vector<double> pipeline(probes);
    std::vector<double> oracle(use_oracle ? probes : 0);
    parallel_for(
        probes,
        [&](std::size_t i) {
            RngStream stream(probe_seed, i);
            const Vector v = sphere::sample_unit_vector(static_cast<int>(x.rows()), stream);
            pipeline[i] = constrained_select(x, v, cfg, stream).attained_value;
            if (use_oracle) oracle[i] = brute_force_inf(x, v, cfg.s, cfg.rho_minus, cfg.brute_force_limit);
        },
        workers);

    CertificateAudit audit;
    audit.probes = probes;
    audit.oracle_used = use_oracle;
    for (double value : pipeline) {
        audit.max_pipeline = std::max(audit.max_pipeline, value);
        if (value > certificate) ++audit.pipeline_violations;
    }
    for (double value : oracle) {
        audit.max_oracle = std::max(audit.max_oracle, value);
        if (value > certificate) ++audit.oracle_violations;
    }
    return audit;
}

double exact_gamma_over(const ColumnMatrix& x, const std::vector<Vector>& directions, std::size_t s,
                        double rho_minus, std::uint64_t limit) {
    double gamma = 0.0;
    for (const auto& v : directions) gamma = std::max(gamma, brute_force_inf(x, v, s, rho_minus, limit));
    return gamma;
}

MonotonicityResult monotonicity_check(const ColumnMatrix& x, const ColumnMatrix& x_extra,
                                      const SelectionConfig& cfg, const std::vector<Vector>& directions) {
    if (x.rows() != x_extra.rows()) throw InvalidInput("monotonicity_check: row counts differ");
    Matrix joined(x.rows(), x.cols() + x_extra.cols());
    joined << x.matrix(), x_extra.matrix();
    const ColumnMatrix concat(std::move(joined));
    MonotonicityResult out;
    out.gamma_x = exact_gamma_over(x, directions, cfg.s, cfg.rho_minus, cfg.brute_force_limit);
    out.gamma_concat = exact_gamma_over(concat, directions, cfg.s, cfg.rho_minus, cfg.brute_force_limit);
    // inf over an empty family is +inf, so an infeasible X satisfies the inequality trivially.
    out.satisfied = out.gamma_concat <= out.gamma_x + 1e-12;
    return out;
}

}  // namespace cri::selection
