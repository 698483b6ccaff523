#include "cri/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cri/analytic.hpp"
#include "cri/error.hpp"
#include "cri/linalg.hpp"
#include "cri/matrix_io.hpp"
#include "cri/parallel.hpp"
#include "cri/rng.hpp"
#include "cri/selection.hpp"
#include "cri/special.hpp"
#include "cri/sphere.hpp"

namespace cri::harness {

namespace {

// Stream indices at or above this value are reserved for per-experiment
// randomness that is not tied to a trial (nets, bootstrap, fixed directions).
constexpr std::uint64_t kReservedStream = 1ULL << 62;

double quantile_of_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Json interval_json(const Interval& ci) {
    return Json::array({ci.lo, ci.hi});
}

ReportCell frequency_cell(std::string claim, Json params, ClaimKind kind, std::size_t events, std::size_t trials,
                          double claimed, double confidence) {
    ReportCell cell;
    cell.claim = std::move(claim);
    cell.params = std::move(params);
    cell.kind = kind;
    cell.trials = trials;
    cell.events = events;
    cell.frequency = trials ? static_cast<double>(events) / static_cast<double>(trials) : 0.0;
    cell.ci = wilson_interval(events, trials, confidence);
    cell.claimed = claimed;
    return cell;
}

TrialRecord make_record(std::size_t trial, const RngStream& stream) {
    TrialRecord rec;
    rec.trial_index = trial;
    rec.stream_seed = stream.key();
    return rec;
}

void require_trials(std::size_t trials, std::size_t minimum, const char* name) {
    if (trials < minimum) {
        throw InvalidInput(std::string(name) + ": needs at least " + std::to_string(minimum) + " trials");
    }
}

}  // namespace

std::string_view to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::supported: return "supported";
        case Verdict::violated: return "violated";
        case Verdict::untestable: return "untestable-at-scale";
    }
    return "untestable-at-scale";
}

std::string_view to_string(ClaimKind kind) {
    switch (kind) {
        case ClaimKind::upper_bound: return "upper_bound";
        case ClaimKind::point_value: return "point_value";
        case ClaimKind::statistic: return "statistic";
    }
    return "statistic";
}

Interval wilson_interval(std::size_t events, std::size_t trials, double confidence) {
    if (trials == 0) return {0.0, 1.0};
    const double z = special::normal_quantile(0.5 + 0.5 * confidence);
    const double nt = static_cast<double>(trials);
    const double phat = static_cast<double>(events) / nt;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nt;
    const double centre = (phat + z2 / (2.0 * nt)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / nt + z2 / (4.0 * nt * nt)) / denom;
    return {events == 0 ? 0.0 : std::max(0.0, centre - half), events == trials ? 1.0 : std::min(1.0, centre + half)};
}

Verdict judge(ClaimKind kind, const Interval& ci, double claimed, bool hypotheses_hold, bool vacuous_is_untestable) {
    if (!hypotheses_hold) return Verdict::untestable;
    switch (kind) {
        case ClaimKind::upper_bound:
            if (claimed >= 1.0) return vacuous_is_untestable ? Verdict::untestable : Verdict::supported;
            return ci.lo > claimed ? Verdict::violated : Verdict::supported;
        case ClaimKind::point_value:
            return (claimed < ci.lo || claimed > ci.hi) ? Verdict::violated : Verdict::supported;
        case ClaimKind::statistic:
            break;
    }
    throw InvalidInput("judge: statistic cells are judged by their experiment");
}

Verdict ExperimentReport::overall() const {
    bool any_untestable = false;
    for (const auto& cell : cells) {
        if (cell.verdict == Verdict::violated) return Verdict::violated;
        any_untestable = any_untestable || cell.verdict == Verdict::untestable;
    }
    return any_untestable ? Verdict::untestable : Verdict::supported;
}

Json ExperimentReport::to_json() const {
    Json out;
    out["schema_version"] = 1;
    out["experiment"] = name;
    out["master_seed"] = master_seed;
    out["confidence"] = confidence;
    out["grid"] = grid;
    Json cell_array = Json::array();
    for (const auto& cell : cells) {
        Json c;
        c["claim"] = cell.claim;
        c["params"] = cell.params;
        c["kind"] = std::string(to_string(cell.kind));
        if (cell.kind != ClaimKind::statistic) {
            c["trials"] = cell.trials;
            c["events"] = cell.events;
            c["frequency"] = cell.frequency;
            c["ci"] = interval_json(cell.ci);
        }
        c["claimed"] = cell.claimed;
        c["verdict"] = std::string(to_string(cell.verdict));
        if (!cell.note.empty()) c["note"] = cell.note;
        if (!cell.extra.empty()) c["extra"] = cell.extra;
        cell_array.push_back(std::move(c));
    }
    out["cells"] = std::move(cell_array);
    out["summary"] = summary;
    out["verdict"] = std::string(to_string(overall()));
    out["trial_count"] = trials.size();
    return out;
}

std::string ExperimentReport::trials_csv() const {
    std::ostringstream out;
    out << "# experiment=" << name << " seed=" << master_seed << '\n';
    out << "trial_index,stream_seed";
    if (!trials.empty()) {
        for (const auto& [key, value] : trials.front().values) out << ',' << key;
    }
    out << '\n';
    for (const auto& rec : trials) {
        out << rec.trial_index << ',' << rec.stream_seed;
        for (const auto& [key, value] : rec.values) out << ',' << io::format_decimal(value);
        out << '\n';
    }
    return out.str();
}

std::vector<std::string> validate_report(const Json& report) {
    std::vector<std::string> problems;
    auto require = [&](const Json& obj, const char* key, auto predicate, const std::string& where) {
        if (!obj.contains(key)) {
            problems.push_back(where + ": missing '" + key + "'");
            return false;
        }
        if (!predicate(obj.at(key))) {
            problems.push_back(where + ": bad type for '" + key + "'");
            return false;
        }
        return true;
    };
    auto is_string = [](const Json& j) { return j.is_string(); };
    auto is_number = [](const Json& j) { return j.is_number(); };
    auto is_number_or_null = [](const Json& j) { return j.is_number() || j.is_null(); };
    auto is_object = [](const Json& j) { return j.is_object(); };
    auto is_array = [](const Json& j) { return j.is_array(); };
    auto is_verdict = [](const Json& j) {
        return j.is_string() && (j == "supported" || j == "violated" || j == "untestable-at-scale");
    };

    if (!report.is_object()) return {"report: not an object"};
    require(report, "experiment", is_string, "report");
    require(report, "master_seed", is_number, "report");
    if (require(report, "confidence", is_number, "report")) {
        const double level = report["confidence"].get<double>();
        if (!(level > 0.0 && level < 1.0)) problems.push_back("report: confidence outside (0, 1)");
    }
    require(report, "grid", is_object, "report");
    require(report, "summary", is_object, "report");
    require(report, "verdict", is_verdict, "report");
    if (require(report, "cells", is_array, "report")) {
        std::size_t index = 0;
        for (const auto& cell : report["cells"]) {
            const std::string where = "cells[" + std::to_string(index++) + "]";
            require(cell, "claim", is_string, where);
            require(cell, "verdict", is_verdict, where);
            require(cell, "claimed", is_number_or_null, where);
            if (!require(cell, "kind", is_string, where)) continue;
            if (cell["kind"] == "statistic") continue;
            require(cell, "trials", is_number, where);
            require(cell, "events", is_number, where);
            if (require(cell, "frequency", is_number, where)) {
                const double f = cell["frequency"].get<double>();
                if (!(f >= 0.0 && f <= 1.0)) problems.push_back(where + ": frequency outside [0, 1]");
            }
            if (require(cell, "ci", is_array, where)) {
                const auto& ci = cell["ci"];
                if (ci.size() != 2 || !ci[0].is_number() || !ci[1].is_number()) {
                    problems.push_back(where + ": ci must be [lo, hi]");
                } else if (!(0.0 <= ci[0].get<double>() && ci[0].get<double>() <= ci[1].get<double>() &&
                             ci[1].get<double>() <= 1.0)) {
                    problems.push_back(where + ": ci not ordered within [0, 1]");
                }
            }
        }
    }
    return problems;
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) return 0.0;
    std::sort(samples.begin(), samples.end());
    const double count = static_cast<double>(samples.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        worst = std::max({worst, f - static_cast<double>(i) / count, static_cast<double>(i + 1) / count - f});
    }
    return worst;
}

// ---------------------------------------------------------------------------

ExperimentReport run_order_stat_audit(int n, int p, int r, std::size_t trials, std::uint64_t seed, unsigned workers) {
    require_trials(trials, 100, "order-stat");
    const analytic::OrderStatSpec spec{p, r, n};
    analytic::validate(spec);

    ExperimentReport report;
    report.name = "order-stat";
    report.master_seed = seed;
    report.grid = {{"n", n}, {"p", p}, {"r", r}, {"trials", trials}};

    Vector v = Vector::Zero(n);
    v(0) = 1.0;

    std::vector<double> values(trials);
    report.trials.resize(trials);
    parallel_for(
        trials,
        [&](std::size_t t) {
            RngStream stream(seed, t);
            const auto x = sphere::sample_sphere_matrix(n, p, stream);
            Vector scores = abs_inner_products(x, v);
            std::nth_element(scores.data(), scores.data() + (r - 1), scores.data() + p);
            values[t] = scores(r - 1);
            auto rec = make_record(t, RngStream(seed, t));
            rec.values = {{"z_r", values[t]}};
            report.trials[t] = std::move(rec);
        },
        workers);

    auto cdf = [&](double z) { return analytic::order_stat_cdf(std::clamp(z, 0.0, 1.0), spec); };
    const double ks = ks_distance(values, cdf);
    const double critical = 1.3581 / std::sqrt(static_cast<double>(trials));

    ReportCell ks_cell;
    ks_cell.claim = "Z_(r) has CDF P(Bin(p, G(z)) >= r)";
    ks_cell.params = {{"n", n}, {"p", p}, {"r", r}};
    ks_cell.kind = ClaimKind::statistic;
    ks_cell.claimed = critical;
    ks_cell.verdict = ks <= critical ? Verdict::supported : Verdict::violated;
    ks_cell.note = "KS distance against the analytic law; claimed is the 95% asymptotic critical value";
    ks_cell.extra = {{"ks_distance", ks}, {"ks_critical_95", critical}};
    report.cells.push_back(std::move(ks_cell));

    for (double level : {0.1, 0.5, 0.9}) {
        const double z = analytic::order_stat_quantile(1.0 - level, spec);
        const auto events = static_cast<std::size_t>(
            std::count_if(values.begin(), values.end(), [&](double value) { return value <= z; }));
        auto cell = frequency_cell("P(Z_(r) <= z_q) = q", {{"q", level}, {"z_q", z}}, ClaimKind::point_value, events,
                                   trials, analytic::order_stat_cdf(z, spec), report.confidence);
        cell.verdict = judge(cell.kind, cell.ci, cell.claimed);
        report.cells.push_back(std::move(cell));
    }

    report.summary = {{"ks_distance", ks}, {"ks_critical_95", critical}};
    return report;
}

ExperimentReport run_coherence_audit(int n, int p, std::size_t trials, std::uint64_t seed,
                                     const CoherenceOptions& options, unsigned workers) {
    require_trials(trials, 100, "coherence");
    if (p < 2) throw InvalidInput("coherence: p must be >= 2");

    ExperimentReport report;
    report.name = "coherence";
    report.master_seed = seed;
    report.grid = {{"n", n}, {"p", p}, {"trials", trials}, {"pair_threshold", options.pair_threshold}};

    std::vector<double> mu(trials);
    std::vector<double> pair(trials);
    report.trials.resize(trials);
    parallel_for(
        trials,
        [&](std::size_t t) {
            RngStream stream(seed, t);
            const auto x = sphere::sample_sphere_matrix(n, p, stream);
            mu[t] = coherence(x);
            pair[t] = std::abs(x.column(0).dot(x.column(1)));
            auto rec = make_record(t, RngStream(seed, t));
            rec.values = {{"coherence", mu[t]}, {"pair_abs_inner", pair[t]}};
            report.trials[t] = std::move(rec);
        },
        workers);

    const double claimed_mu = analytic::claimed_coherence_bound(p);
    const double claimed_prob = std::pow(static_cast<double>(p), -n);
    const auto above = static_cast<std::size_t>(
        std::count_if(mu.begin(), mu.end(), [&](double m) { return m > claimed_mu; }));
    auto cell = frequency_cell("mu(X) <= (1/2) p^-2 with probability >= 1 - p^-n",
                               {{"n", n}, {"p", p}, {"mu_bound", claimed_mu}}, ClaimKind::upper_bound, above,
                               trials, claimed_prob, report.confidence);
    cell.verdict = judge(cell.kind, cell.ci, cell.claimed);
    cell.note = "event is mu(X) > (1/2) p^-2; claimed is the allowed event probability p^-n";
    report.cells.push_back(std::move(cell));

    const double h = options.pair_threshold;
    const double predicted = 1.0 - analytic::inner_cdf(h, n);
    const auto hits = static_cast<std::size_t>(
        std::count_if(pair.begin(), pair.end(), [&](double value) { return value >= h; }));
    auto cap_cell = frequency_cell("P(|<X_1, X_2>| >= h) = 1 - G(h) = 2 cap(h)", {{"n", n}, {"h", h}},
                                   ClaimKind::point_value, hits, trials, predicted, report.confidence);
    cap_cell.verdict = judge(cap_cell.kind, cap_cell.ci, cap_cell.claimed);
    report.cells.push_back(std::move(cap_cell));

    std::vector<double> sorted = mu;
    std::sort(sorted.begin(), sorted.end());
    const double reference = std::sqrt(2.0 * std::log(static_cast<double>(p)) / n);
    const auto below_reference = static_cast<std::size_t>(
        std::count_if(mu.begin(), mu.end(), [&](double m) { return m <= reference; }));

    RngStream dup_stream(seed, kReservedStream);
    Matrix dup = sphere::sample_sphere_matrix(n, 2, dup_stream).matrix();
    dup.col(1) = dup.col(0);
    const double duplicate_mu = coherence(ColumnMatrix(dup));

    report.summary = {
        {"coherence_quantiles", {{"q05", quantile_of_sorted(sorted, 0.05)},
                                 {"median", quantile_of_sorted(sorted, 0.5)},
                                 {"q95", quantile_of_sorted(sorted, 0.95)}}},
        {"claimed_mu_bound", claimed_mu},
        {"frequency_mu_within_claim", 1.0 - static_cast<double>(above) / static_cast<double>(trials)},
        {"reference_sqrt_2logp_over_n", reference},
        {"frequency_mu_within_reference", static_cast<double>(below_reference) / static_cast<double>(trials)},
        {"cap_threshold_h", analytic::coherence_threshold_h(p, n)},
        {"duplicate_column_coherence", duplicate_mu},
    };
    return report;
}

ExperimentReport run_norm_audit(int n, int p, int kappa_s, double eps, std::size_t trials, std::uint64_t seed,
                                const NormOptions& options, unsigned workers) {
    require_trials(trials, 100, "norm");
    if (kappa_s < 1 || kappa_s > p) throw InvalidInput("norm: need 1 <= kappa_s <= p");
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("norm: epsilon must lie in (0, 1)");

    ExperimentReport report;
    report.name = "norm";
    report.master_seed = seed;
    report.grid = {{"n", n},
                   {"p", p},
                   {"kappa_s", kappa_s},
                   {"epsilon", eps},
                   {"c", options.c_subgauss},
                   {"c_kappa", options.c_kappa},
                   {"directions_per_trial", options.directions_per_trial},
                   {"trials", trials}};

    const double k_eps = analytic::k_epsilon(eps, options.c_kappa);
    const double threshold = analytic::norm_threshold_u(n, kappa_s, eps, options.c_subgauss, k_eps, p);

    std::vector<double> worst(trials);
    std::vector<int> sanity(trials);
    report.trials.resize(trials);
    parallel_for(
        trials,
        [&](std::size_t t) {
            RngStream stream(seed, t);
            const auto x = sphere::sample_sphere_matrix(n, p, stream);
            double w = 0.0;
            int bad = 0;
            for (std::size_t d = 0; d < options.directions_per_trial; ++d) {
                const Vector v = sphere::sample_unit_vector(n, stream);
                const auto outer = selection::greedy_outer(x, v, static_cast<std::size_t>(kappa_s));
                const double norm = operator_norm(submatrix(x, outer));
                if (norm < 1.0 - 1e-9 || norm > std::sqrt(static_cast<double>(kappa_s)) + 1e-9) ++bad;
                w = std::max(w, norm);
            }
            worst[t] = w;
            sanity[t] = bad;
            auto rec = make_record(t, RngStream(seed, t));
            rec.values = {{"worst_outer_norm", w}, {"sanity_violations", static_cast<double>(bad)}};
            report.trials[t] = std::move(rec);
        },
        workers);

    const auto exceed = static_cast<std::size_t>(
        std::count_if(worst.begin(), worst.end(), [&](double w) { return w >= threshold; }));
    const double claimed = 8.0 * std::pow(static_cast<double>(p), -n);
    auto cell = frequency_cell("P(||X_outer|| >= (1+K)/(c(1-eps)^4) (n+kappa s)/n log p) <= 8 p^-n",
                               {{"threshold", threshold}}, ClaimKind::upper_bound, exceed, trials, claimed,
                               report.confidence);
    cell.verdict = judge(cell.kind, cell.ci, cell.claimed);
    const double typical = 1.0 + std::sqrt(static_cast<double>(kappa_s) / n);
    std::vector<double> sorted = worst;
    std::sort(sorted.begin(), sorted.end());
    if (exceed == 0) {
        std::ostringstream note;
        note << "threshold is " << threshold / typical << "x the typical scale 1 + sqrt(kappa s / n)";
        cell.note = note.str();
    }
    report.cells.push_back(std::move(cell));

    report.summary = {{"threshold", threshold},
                      {"typical_scale", typical},
                      {"max_observed_norm", sorted.back()},
                      {"median_observed_norm", quantile_of_sorted(sorted, 0.5)},
                      {"sanity_violations", std::accumulate(sanity.begin(), sanity.end(), 0)}};
    return report;
}

ExperimentReport run_decoupling_audit(int n, int p, double kappa, int s, const std::vector<double>& r_grid,
                                      std::size_t trials, std::uint64_t seed, const DecouplingOptions& options,
                                      unsigned workers) {
    require_trials(trials, 100, "decoupling");
    if (!(kappa >= 1.0)) throw InvalidInput("decoupling: Bernoulli rate 1/kappa must lie in (0, 1]");
    const auto outer = static_cast<std::size_t>(std::llround(kappa * s));
    if (s < 1 || outer > static_cast<std::size_t>(p) || outer < static_cast<std::size_t>(s)) {
        throw InvalidInput("decoupling: need s <= kappa s <= p");
    }
    if (r_grid.empty()) throw InvalidInput("decoupling: empty r grid");

    ExperimentReport report;
    report.name = "decoupling";
    report.master_seed = seed;
    report.grid = {{"n", n},     {"p", p},           {"kappa", kappa},
                   {"s", s},     {"kappa_s", outer}, {"r_grid", r_grid},
                   {"trials", trials}, {"bootstrap_resamples", options.bootstrap_resamples}};

    const double rate = 1.0 / kappa;
    // Norms of the uniform restriction, Bernoulli restriction, and decoupled restriction.
    std::vector<std::array<double, 3>> norms(trials);
    report.trials.resize(trials);
    parallel_for(
        trials,
        [&](std::size_t t) {
            RngStream stream(seed, t);
            const auto x = sphere::sample_sphere_matrix(n, p, stream);
            const Vector v = sphere::sample_unit_vector(n, stream);
            const auto outer_set = selection::greedy_outer(x, v, outer);
            const auto xo = submatrix(x, outer_set);
            Matrix h = xo.matrix().transpose() * xo.matrix();
            h.diagonal().array() -= 1.0;

            auto restricted_norm = [&](const std::vector<Eigen::Index>& rows, const std::vector<Eigen::Index>& cols) {
                if (rows.empty() || cols.empty()) return 0.0;
                Matrix sub(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    for (std::size_t j = 0; j < cols.size(); ++j) {
                        sub(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = h(rows[i], cols[j]);
                    }
                }
                return operator_norm(sub);
            };

            std::vector<Eigen::Index> pool(outer);
            std::iota(pool.begin(), pool.end(), 0);
            for (int i = 0; i < s; ++i) {
                const auto j = static_cast<std::size_t>(i) + stream.below(outer - static_cast<std::size_t>(i));
                std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
            }
            std::vector<Eigen::Index> uniform(pool.begin(), pool.begin() + s);
            std::sort(uniform.begin(), uniform.end());

            std::vector<Eigen::Index> bern;
            std::vector<Eigen::Index> bern_copy;
            for (std::size_t i = 0; i < outer; ++i) {
                if (stream.uniform() < rate) bern.push_back(static_cast<Eigen::Index>(i));
            }
            for (std::size_t i = 0; i < outer; ++i) {
                if (stream.uniform() < rate) bern_copy.push_back(static_cast<Eigen::Index>(i));
            }
            norms[t] = {restricted_norm(uniform, uniform), restricted_norm(bern, bern),
                        restricted_norm(bern, bern_copy)};
            auto rec = make_record(t, RngStream(seed, t));
            rec.values = {{"norm_uniform", norms[t][0]},
                          {"norm_bernoulli", norms[t][1]},
                          {"norm_decoupled", norms[t][2]},
                          {"norm_h", operator_norm(h)}};
            report.trials[t] = std::move(rec);
        },
        workers);

    const std::size_t grid_size = r_grid.size();
    // Per r: counts of ||R_s H R_s|| >= r, ||R H R|| >= r, ||R H R'|| >= r/2.
    auto indicators = [&](std::size_t t, std::size_t k) {
        const double r = r_grid[k];
        return std::array<int, 3>{norms[t][0] >= r, norms[t][1] >= r, norms[t][2] >= r / 2.0};
    };
    std::vector<std::array<std::size_t, 3>> counts(grid_size, {0, 0, 0});
    for (std::size_t t = 0; t < trials; ++t) {
        for (std::size_t k = 0; k < grid_size; ++k) {
            const auto ind = indicators(t, k);
            for (int c = 0; c < 3; ++c) counts[k][c] += static_cast<std::size_t>(ind[c]);
        }
    }

    // Paired bootstrap of (2 P2 - P1) and (36 P3 - P2).
    const std::size_t resamples = options.bootstrap_resamples;
    std::vector<std::vector<double>> poisson_diff(grid_size, std::vector<double>(resamples));
    std::vector<std::vector<double>> decouple_diff(grid_size, std::vector<double>(resamples));
    RngStream boot(seed, kReservedStream + 1);
    std::vector<std::array<std::size_t, 3>> boot_counts(grid_size);
    const double nt = static_cast<double>(trials);
    for (std::size_t b = 0; b < resamples; ++b) {
        std::fill(boot_counts.begin(), boot_counts.end(), std::array<std::size_t, 3>{0, 0, 0});
        for (std::size_t i = 0; i < trials; ++i) {
            const auto t = static_cast<std::size_t>(boot.below(trials));
            for (std::size_t k = 0; k < grid_size; ++k) {
                const auto ind = indicators(t, k);
                for (int c = 0; c < 3; ++c) boot_counts[k][c] += static_cast<std::size_t>(ind[c]);
            }
        }
        for (std::size_t k = 0; k < grid_size; ++k) {
            const double p1 = static_cast<double>(boot_counts[k][0]) / nt;
            const double p2 = static_cast<double>(boot_counts[k][1]) / nt;
            const double p3 = static_cast<double>(boot_counts[k][2]) / nt;
            poisson_diff[k][b] = 2.0 * p2 - p1;
            decouple_diff[k][b] = 36.0 * p3 - p2;
        }
    }

    const double alpha = 1.0 - report.confidence;
    Json poisson_summary = Json::array();
    Json decouple_summary = Json::array();
    for (std::size_t k = 0; k < grid_size; ++k) {
        const double r = r_grid[k];
        const double p1 = static_cast<double>(counts[k][0]) / nt;
        const double p2 = static_cast<double>(counts[k][1]) / nt;
        const double p3 = static_cast<double>(counts[k][2]) / nt;
        std::sort(poisson_diff[k].begin(), poisson_diff[k].end());
        std::sort(decouple_diff[k].begin(), decouple_diff[k].end());
        const Interval poisson_ci{quantile_of_sorted(poisson_diff[k], alpha / 2),
                                  quantile_of_sorted(poisson_diff[k], 1 - alpha / 2)};
        const Interval decouple_ci{quantile_of_sorted(decouple_diff[k], alpha / 2),
                                   quantile_of_sorted(decouple_diff[k], 1 - alpha / 2)};

        ReportCell pc;
        pc.claim = "P(||R_s H R_s|| >= r) <= 2 P(||R H R|| >= r)";
        pc.params = {{"r", r}};
        pc.kind = ClaimKind::statistic;
        pc.claimed = 2.0 * p2;
        pc.verdict = poisson_ci.hi < 0.0 ? Verdict::violated : Verdict::supported;
        pc.extra = {{"lhs", p1},
                    {"rhs", 2.0 * p2},
                    {"lhs_ci", interval_json(wilson_interval(counts[k][0], trials, report.confidence))},
                    {"bernoulli_ci", interval_json(wilson_interval(counts[k][1], trials, report.confidence))},
                    {"margin_bootstrap_ci", interval_json(poisson_ci)}};
        report.cells.push_back(std::move(pc));

        ReportCell dc;
        dc.claim = "P(||R H R|| >= r) <= 36 P(||R H R'|| >= r/2)";
        dc.params = {{"r", r}};
        dc.kind = ClaimKind::statistic;
        dc.claimed = 36.0 * p3;
        dc.verdict = decouple_ci.hi < 0.0 ? Verdict::violated : Verdict::supported;
        dc.extra = {{"lhs", p2},
                    {"rhs", 36.0 * p3},
                    {"lhs_ci", interval_json(wilson_interval(counts[k][1], trials, report.confidence))},
                    {"decoupled_ci", interval_json(wilson_interval(counts[k][2], trials, report.confidence))},
                    {"margin_bootstrap_ci", interval_json(decouple_ci)}};
        report.cells.push_back(std::move(dc));

        poisson_summary.push_back({{"r", r}, {"holds", poisson_ci.hi >= 0.0}});
        decouple_summary.push_back({{"r", r}, {"holds", decouple_ci.hi >= 0.0}});
    }
    report.summary = {{"poissonization", poisson_summary}, {"decoupling", decouple_summary}};
    return report;
}

ExperimentReport run_theorem_audit(int n, int p, int s, double rho_minus, double net_eps, std::size_t trials,
                                   std::uint64_t seed, const TheoremOptions& options, unsigned workers) {
    require_trials(trials, 20, "theorem");
    if (!(net_eps > 0.0 && net_eps < 1.0)) throw DomainError("theorem: net epsilon must lie in (0, 1)");

    selection::SelectionConfig cfg;
    cfg.s = static_cast<std::size_t>(s);
    cfg.rho_minus = rho_minus;
    cfg.kappa = options.kappa;
    cfg.epsilon = net_eps;
    cfg.c_kappa = options.c_kappa;
    cfg.c_subgauss = options.c_subgauss;
    cfg.max_attempts = options.max_attempts;
    selection::validate(cfg);

    ExperimentReport report;
    report.name = "theorem";
    report.master_seed = seed;
    report.grid = {{"n", n},
                   {"p", p},
                   {"s", s},
                   {"rho_minus", rho_minus},
                   {"net_eps", net_eps},
                   {"kappa", options.kappa},
                   {"c_kappa", options.c_kappa},
                   {"c", options.c_subgauss},
                   {"probes", options.probes},
                   {"stall_budget", options.stall_budget},
                   {"trials", trials}};

    RngStream net_stream(seed, kReservedStream);
    const auto net = sphere::build_eps_net(n, net_eps, net_stream, options.stall_budget);
    const double bound = analytic::claimed_gamma_bound(p);

    std::vector<selection::GammaEstimate> estimates(trials);
    std::vector<selection::CertificateAudit> audits(trials);
    report.trials.resize(trials);
    const bool nested = worker_count() > 1 && trials > 1;
    parallel_for(
        trials,
        [&](std::size_t t) {
            RngStream stream(seed, t);
            const auto x = sphere::sample_sphere_matrix(n, p, stream);
            const unsigned inner_workers = nested ? 1 : 0;
            estimates[t] = selection::estimate_gamma(x, cfg, net, options.probes, stream, inner_workers);
            const bool exact = selection::binomial_count(p, s) <= cfg.brute_force_limit;
            audits[t] = selection::audit_certificate(x, cfg, estimates[t].certified_upper, options.probes, stream,
                                                     exact, inner_workers);
            auto rec = make_record(t, RngStream(seed, t));
            rec.values = {{"certified_upper", estimates[t].certified_upper},
                          {"heuristic_lower", estimates[t].heuristic_lower},
                          {"feasibility_rate", estimates[t].feasibility_rate},
                          {"net_max_outer", estimates[t].net_max_outer},
                          {"probe_pipeline_violations", static_cast<double>(audits[t].pipeline_violations)},
                          {"probe_oracle_violations", static_cast<double>(audits[t].oracle_violations)},
                          {"claimed_bound", bound}};
            report.trials[t] = std::move(rec);
        },
        nested ? workers : 1);

    const auto constants = analytic::BoundConstants::derive(rho_minus, net_eps, options.c_kappa, options.c_subgauss,
                                                            n, p, s);
    const auto ledger = analytic::constraint_check(n, p, s, constants);
    const bool hypotheses = std::all_of(ledger.begin(), ledger.end(), [](const auto& c) { return c.satisfied; });
    const double claimed_probability = analytic::claimed_theorem_probability(n, p);

    const auto failures = static_cast<std::size_t>(std::count_if(
        estimates.begin(), estimates.end(), [&](const auto& e) { return !(e.certified_upper <= bound); }));
    auto cell = frequency_cell("gamma(X) <= 80 log(p)/p with probability >= 1 - 5n/(p log(p)^(n-1)) - 9 p^-n",
                               {{"n", n}, {"p", p}, {"s", s}, {"bound", bound}}, ClaimKind::upper_bound, failures,
                               trials, 1.0 - claimed_probability, report.confidence);
    cell.verdict = judge(cell.kind, cell.ci, cell.claimed, hypotheses, true);
    cell.note = "event is certified_upper > bound; claimed is 1 - claimed probability";
    if (claimed_probability <= 0.0) cell.note += "; claimed probability is not positive at these (n, p)";
    if (!hypotheses) cell.note += "; hypotheses fail (see summary.constraints)";
    report.cells.push_back(std::move(cell));

    std::size_t pipeline_violations = 0;
    std::size_t oracle_violations = 0;
    std::size_t probes_total = 0;
    for (const auto& a : audits) {
        pipeline_violations += a.pipeline_violations;
        oracle_violations += a.oracle_violations;
        probes_total += a.oracle_used ? 2 * a.probes : a.probes;
    }
    auto validity = frequency_cell("fresh probe values never exceed the net certificate",
                                   {{"net_size", net.size()}, {"net_eps", net_eps}}, ClaimKind::upper_bound,
                                   pipeline_violations + oracle_violations, probes_total, 0.0,
                                   report.confidence);
    validity.verdict = (pipeline_violations + oracle_violations) == 0 ? Verdict::supported : Verdict::violated;
    report.cells.push_back(std::move(validity));

    Json constraint_json = Json::array();
    for (const auto& c : ledger) {
        constraint_json.push_back({{"constraint", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"satisfied", c.satisfied}});
    }
    std::vector<double> certs;
    for (const auto& e : estimates) certs.push_back(e.certified_upper);
    std::sort(certs.begin(), certs.end());
    report.summary = {{"claimed_bound", bound},
                      {"claimed_probability", claimed_probability},
                      {"hypotheses_hold", hypotheses},
                      {"constraints", constraint_json},
                      {"net_size", net.size()},
                      {"net_mode", std::string(sphere::to_string(net.mode))},
                      {"net_cardinality_bound", sphere::net_cardinality_bound(n, net_eps)},
                      {"certified_upper_median", quantile_of_sorted(certs, 0.5)},
                      {"certified_upper_max", certs.back()},
                      {"probe_pipeline_violations", pipeline_violations},
                      {"probe_oracle_violations", oracle_violations}};
    return report;
}

ExperimentReport run_chernoff_audit(long size, const std::vector<double>& p_success_grid,
                                    const std::vector<double>& eps_grid, std::size_t trials, std::uint64_t seed,
                                    unsigned workers) {
    require_trials(trials, 100, "chernoff");
    if (size < 1) throw InvalidInput("chernoff: binomial size must be >= 1");
    if (p_success_grid.empty() || eps_grid.empty()) throw InvalidInput("chernoff: grids must be nonempty");
    for (double q : p_success_grid) {
        if (!(q >= 0.0 && q <= 1.0)) throw DomainError("chernoff: success probability outside [0, 1]");
    }
    for (double e : eps_grid) {
        if (!(e > 0.0 && e < 1.0)) throw DomainError("chernoff: epsilon outside (0, 1)");
    }

    ExperimentReport report;
    report.name = "chernoff";
    report.master_seed = seed;
    report.grid = {{"size", size}, {"p_success", p_success_grid}, {"eps", eps_grid}, {"trials", trials}};

    // Inverse-CDF tables, one per success probability.
    std::vector<std::vector<double>> tables;
    for (double q : p_success_grid) {
        std::vector<double> cdf(static_cast<std::size_t>(size) + 1);
        double acc = 0.0;
        for (long k = 0; k <= size; ++k) {
            double pmf = 0.0;
            if (q == 0.0) {
                pmf = k == 0 ? 1.0 : 0.0;
            } else if (q == 1.0) {
                pmf = k == size ? 1.0 : 0.0;
            } else {
                pmf = std::exp(std::lgamma(size + 1.0) - std::lgamma(k + 1.0) - std::lgamma(size - k + 1.0) +
                               k * std::log(q) + (size - k) * std::log1p(-q));
            }
            acc += pmf;
            cdf[static_cast<std::size_t>(k)] = acc;
        }
        tables.push_back(std::move(cdf));
    }

    const std::size_t grid_q = p_success_grid.size();
    std::vector<std::vector<long>> draws(trials, std::vector<long>(grid_q));
    report.trials.resize(trials);
    parallel_for(
        trials,
        [&](std::size_t t) {
            RngStream stream(seed, t);
            auto rec = make_record(t, RngStream(seed, t));
            for (std::size_t qi = 0; qi < grid_q; ++qi) {
                const auto& cdf = tables[qi];
                const double u = stream.uniform() * cdf.back();
                const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
                const long b = std::min<long>(static_cast<long>(it - cdf.begin()), size);
                draws[t][qi] = b;
                rec.values.emplace_back("B_q" + std::to_string(qi), static_cast<double>(b));
            }
            report.trials[t] = std::move(rec);
        },
        workers);

    Json monotone = Json::array();
    for (std::size_t qi = 0; qi < grid_q; ++qi) {
        const double q = p_success_grid[qi];
        const double mean = static_cast<double>(size) * q;
        double previous_bound = 2.0;
        bool decreasing = true;
        for (double eps : eps_grid) {
            const double cutoff = (1.0 - eps) * mean;
            const auto events = static_cast<std::size_t>(std::count_if(
                draws.begin(), draws.end(), [&](const auto& row) { return static_cast<double>(row[qi]) <= cutoff; }));
            const double bound = analytic::chernoff_lower(eps, mean);
            const auto k = static_cast<long>(std::floor(cutoff + 1e-12));
            const double exact = special::binomial_lower_tail(size, q, k);
            auto cell = frequency_cell("P(B <= (1-eps) E[B]) <= exp(-eps^2 E[B] / 2)",
                                       {{"p_success", q}, {"eps", eps}, {"mean", mean}}, ClaimKind::upper_bound,
                                       events, trials, bound, report.confidence);
            cell.verdict = judge(cell.kind, cell.ci, cell.claimed);
            cell.extra = {{"exact_tail", exact},
                          {"log10_bound", std::log10(bound)},
                          {"log10_exact_tail", exact > 0.0 ? std::log10(exact) : -std::numeric_limits<double>::infinity()},
                          {"exact_within_bound", exact <= bound * (1.0 + 1e-12)}};
            if (bound >= 1.0) {
                cell.note = "bound is vacuous (>= 1)";
            } else if (bound * static_cast<double>(trials) < 1.0) {
                cell.note = "rare event: trials cannot resolve the bound; compare exact_tail in log space";
            }
            report.cells.push_back(std::move(cell));
            decreasing = decreasing && bound <= previous_bound;
            previous_bound = bound;
        }
        monotone.push_back({{"p_success", q}, {"bound_nonincreasing_in_eps", decreasing}});
    }
    report.summary = {{"monotonicity", monotone}};
    return report;
}

}  // namespace cri::harness
