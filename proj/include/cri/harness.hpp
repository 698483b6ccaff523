#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace cri::harness {

using Json = nlohmann::ordered_json;

enum class Verdict { supported, violated, untestable };
std::string_view to_string(Verdict verdict);

// How a cell's claim is judged against its measurement.
enum class ClaimKind {
    upper_bound,  // P(event) <= claimed
    point_value,  // P(event) == claimed
    statistic,    // measured statistic judged by the experiment (KS, bootstrap)
};
std::string_view to_string(ClaimKind kind);

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

inline constexpr double kDefaultConfidence = 0.95;

// Wilson score interval for events / trials.
Interval wilson_interval(std::size_t events, std::size_t trials, double confidence = kDefaultConfidence);

// Mechanical verdict for frequency claims.
//  - hypotheses fail                         -> untestable
//  - upper_bound with claimed >= 1           -> untestable if vacuous_is_untestable, else supported
//  - upper_bound and ci.lo > claimed         -> violated
//  - point_value and claimed outside the CI  -> violated
//  - otherwise                               -> supported
Verdict judge(ClaimKind kind, const Interval& ci, double claimed, bool hypotheses_hold = true,
              bool vacuous_is_untestable = false);

struct ReportCell {
    std::string claim;
    Json params = Json::object();
    ClaimKind kind = ClaimKind::upper_bound;
    std::size_t trials = 0;
    std::size_t events = 0;
    double frequency = std::numeric_limits<double>::quiet_NaN();
    Interval ci{};
    double claimed = std::numeric_limits<double>::quiet_NaN();
    Verdict verdict = Verdict::untestable;
    std::string note;
    Json extra = Json::object();
};

struct TrialRecord {
    std::size_t trial_index = 0;
    std::uint64_t stream_seed = 0;
    std::vector<std::pair<std::string, double>> values;
};

struct ExperimentReport {
    std::string name;
    Json grid = Json::object();
    std::uint64_t master_seed = 0;
    double confidence = kDefaultConfidence;
    std::vector<ReportCell> cells;
    Json summary = Json::object();
    std::vector<TrialRecord> trials;

    // violated if any cell is violated, else untestable if any cell is, else supported.
    Verdict overall() const;
    Json to_json() const;
    // "# experiment=<name> seed=<seed>" then a header row and one row per trial.
    std::string trials_csv() const;
};

// Structural problems of a serialized report; empty when it validates.
std::vector<std::string> validate_report(const Json& report);

// --- experiments ---------------------------------------------------------

// Empirical law of the r-th smallest |<X_j, v>| against order_stat_cdf.
ExperimentReport run_order_stat_audit(int n, int p, int r, std::size_t trials, std::uint64_t seed,
                                      unsigned workers = 0);

struct CoherenceOptions {
    double pair_threshold = 0.5;  // h for the single-pair cap check
};

// Coherence of sphere-uniform X against the (1/2) p^{-2} claim.
ExperimentReport run_coherence_audit(int n, int p, std::size_t trials, std::uint64_t seed,
                                     const CoherenceOptions& options = {}, unsigned workers = 0);

struct NormOptions {
    double c_subgauss = 0.5;
    double c_kappa = 1.0;
    std::size_t directions_per_trial = 8;
};

// Operator norm of greedy outer sets against the claimed tail threshold.
ExperimentReport run_norm_audit(int n, int p, int kappa_s, double eps, std::size_t trials, std::uint64_t seed,
                                const NormOptions& options = {}, unsigned workers = 0);

struct DecouplingOptions {
    std::size_t bootstrap_resamples = 2000;
};

// Poissonization and decoupling inequalities on H = X^t X - I of a kappa*s-column outer set.
ExperimentReport run_decoupling_audit(int n, int p, double kappa, int s, const std::vector<double>& r_grid,
                                      std::size_t trials, std::uint64_t seed, const DecouplingOptions& options = {},
                                      unsigned workers = 0);

struct TheoremOptions {
    double kappa = 4.0;        // selection inflation used by the pipeline
    double c_kappa = 1.0;
    double c_subgauss = 0.5;
    std::size_t probes = 200;  // fresh directions per trial for the lower estimate and validity probe
    std::size_t stall_budget = 20000;
    std::size_t max_attempts = 1000;
};

// Net certificate of gamma against 80 log(p) / p.
ExperimentReport run_theorem_audit(int n, int p, int s, double rho_minus, double net_eps, std::size_t trials,
                                   std::uint64_t seed, const TheoremOptions& options = {}, unsigned workers = 0);

// Binomial lower tail against exp(-eps^2 E[B] / 2); `size` is the number of Bernoulli trials.
ExperimentReport run_chernoff_audit(long size, const std::vector<double>& p_success_grid,
                                    const std::vector<double>& eps_grid, std::size_t trials, std::uint64_t seed,
                                    unsigned workers = 0);

// Kolmogorov-Smirnov distance between the empirical law of `samples` and `cdf`.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

}  // namespace cri::harness
