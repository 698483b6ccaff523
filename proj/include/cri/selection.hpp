#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "cri/linalg.hpp"
#include "cri/rng.hpp"
#include "cri/sphere.hpp"

namespace cri::selection {

inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

struct SelectionConfig {
    std::size_t s = 2;
    double rho_minus = 0.5;
    double kappa = 4.0;  // outer set inflation
    double epsilon = 0.25;
    double c_kappa = 1.0;
    double c_subgauss = 0.5;
    std::size_t max_attempts = 1000;
    std::uint64_t brute_force_limit = 2'000'000;  // max subsets enumerated by exact oracles
};

void validate(const SelectionConfig& cfg);

struct SelectionOutcome {
    IndexSet outer_set;
    std::optional<IndexSet> inner_set;
    double sigma_min_achieved = 0.0;       // best sigma_min seen over attempts
    double attained_value = kInfeasible;   // ||X_I^t v||_inf, or kInfeasible
    std::size_t attempts_used = 0;
};

struct ExtractResult {
    std::optional<IndexSet> subset;
    double sigma_min = 0.0;
    std::size_t attempts = 0;
};

struct NetDescriptor {
    int dimension = 0;
    double epsilon = 0.0;
    std::size_t size = 0;
    sphere::NetMode mode = sphere::NetMode::heuristic;
};

struct GammaEstimate {
    double certified_upper = kInfeasible;  // max over the net of attained values, plus net epsilon
    double heuristic_lower = 0.0;          // max over probe directions of the (exact when affordable) inf
    std::size_t directions_tested = 0;
    NetDescriptor net;
    double feasibility_rate = 0.0;         // fraction of net directions where a selection was found
    bool oracle_exact = false;             // heuristic_lower came from brute_force_inf
    double net_max_attained = kInfeasible;
    double net_max_outer = 0.0;            // max over the net of Z_(m)
};

struct MonotonicityResult {
    double gamma_x = 0.0;
    double gamma_concat = 0.0;
    bool satisfied = false;
};

// The m indices with smallest |<X_j, v>|, ties broken by smallest index.
IndexSet greedy_outer(const ColumnMatrix& x, const Vector& v, std::size_t m);

// Outer set size min{ceil(kappa s), floor(p / 2)}.
std::size_t outer_size(std::size_t p, const SelectionConfig& cfg);

// Uniform s-subsets of `outer` (partial Fisher-Yates) until one has
// sigma_min >= rho_minus or max_attempts draws are spent.
ExtractResult random_extract(const ColumnMatrix& x, const IndexSet& outer, std::size_t s, double rho_minus,
                             RngStream& rng, std::size_t max_attempts);

// Greedy outer approximation followed by random well-conditioned extraction.
SelectionOutcome constrained_select(const ColumnMatrix& x, const Vector& v, const SelectionConfig& cfg,
                                    RngStream& rng);

// Exact inf of ||X_I^t v||_inf over s-subsets with sigma_min >= rho_minus;
// kInfeasible when no subset qualifies. Throws BudgetExceeded if C(p, s) > limit.
double brute_force_inf(const ColumnMatrix& x, const Vector& v, std::size_t s, double rho_minus,
                       std::uint64_t limit);

// C(p, s), saturating at UINT64_MAX.
std::uint64_t binomial_count(std::uint64_t p, std::uint64_t s);

// Net-certified upper bound and probe-based lower estimate of gamma_{s, rho}(X).
GammaEstimate estimate_gamma(const ColumnMatrix& x, const SelectionConfig& cfg, const sphere::EpsNet& net,
                             std::size_t probe_count, RngStream& rng, unsigned workers = 0);

struct CertificateAudit {
    std::size_t probes = 0;
    std::size_t pipeline_violations = 0;  // probes whose pipeline value exceeds the certificate
    std::size_t oracle_violations = 0;    // probes whose exact inf exceeds the certificate
    double max_pipeline = 0.0;
    double max_oracle = 0.0;
    bool oracle_used = false;
};

// Checks `certificate` against fresh uniform directions: the pipeline's own
// attained value and, when `use_oracle`, the exact inf.
CertificateAudit audit_certificate(const ColumnMatrix& x, const SelectionConfig& cfg, double certificate,
                                   std::size_t probes, RngStream& rng, bool use_oracle, unsigned workers = 0);

// max over `directions` of brute_force_inf.
double exact_gamma_over(const ColumnMatrix& x, const std::vector<Vector>& directions, std::size_t s,
                        double rho_minus, std::uint64_t limit);

// Exact gamma over `directions` for X and [X, X_extra]; satisfied iff the
// concatenation is no larger (up to 1e-12).
MonotonicityResult monotonicity_check(const ColumnMatrix& x, const ColumnMatrix& x_extra,
                                      const SelectionConfig& cfg, const std::vector<Vector>& directions);

}  // namespace cri::selection
