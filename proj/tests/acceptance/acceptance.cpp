#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cri/analytic.hpp"
#include "cri/harness.hpp"
#include "cri/linalg.hpp"
#include "cri/rng.hpp"
#include "cri/selection.hpp"
#include "cri/sphere.hpp"
#include "second_transcription.hpp"

using namespace cri;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Detail {
public:
    template <typename T>
    Detail& add(const char* key, T value) {
        if (!first_) out_ << ", ";
        first_ = false;
        out_ << key << '=' << value;
        return *this;
    }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
    bool first_ = true;
};

// Criterion 1.
Outcome distribution_correctness() {
    double grid_err = 0.0;
    for (int i = 0; i <= 999; ++i) {
        const double z = i / 999.0;
        grid_err = std::max(grid_err, std::abs(analytic::inner_cdf(z, 3) - z));
    }
    double norm_err = 0.0;
    for (int n = 2; n <= 50; ++n) {
        using boost::math::quadrature::gauss_kronrod;
        const double total = 2.0 * gauss_kronrod<double, 61>::integrate(
                                       [n](double t) { return analytic::inner_density(std::sin(t), n) * std::cos(t); },
                                       0.0, kPi / 2, 0, 1e-14);
        norm_err = std::max(norm_err, std::abs(total - 1.0));
    }
    double ks = 0.0;
    for (int n : {3, 6, 20}) {
        RngStream rng(101, static_cast<std::uint64_t>(n));
        std::vector<double> samples(100000);
        for (auto& s : samples) s = std::abs(sphere::sample_unit_vector(n, rng)(0));
        ks = std::max(ks, harness::ks_distance(samples, [n](double z) { return analytic::inner_cdf(z, n); }));
    }
    Outcome o;
    o.pass = grid_err <= 1e-10 && norm_err <= 1e-10 && ks <= 0.005;
    o.detail = Detail().add("cdf_err", grid_err).add("norm_err", norm_err).add("max_ks", ks).str();
    return o;
}

// Criterion 2.
Outcome order_statistic_law() {
    double beta_err = 0.0;
    double ks = 0.0;
    for (int r : {1, 5, 20}) {
        const analytic::OrderStatSpec spec{20, r, 3};
        for (int i = 0; i <= 200; ++i) {
            const double z = i / 200.0;
            const double oracle = boost::math::ibeta(static_cast<double>(r), 21.0 - r, z);
            beta_err = std::max(beta_err, std::abs(analytic::order_stat_cdf(z, spec) - oracle));
        }
        const auto report = harness::run_order_stat_audit(3, 20, r, 10000, 200 + static_cast<std::uint64_t>(r));
        ks = std::max(ks, report.summary["ks_distance"].get<double>());
    }
    Outcome o;
    o.pass = beta_err <= 1e-8 && ks <= 0.02;
    o.detail = Detail().add("beta_err", beta_err).add("max_ks", ks).str();
    return o;
}

// Criterion 3.
Outcome cap_identity() {
    double identity_err = 0.0;
    for (int n = 3; n <= 30; ++n) {
        for (int i = 0; i <= 100; ++i) {
            const double h = i / 100.0;
            identity_err = std::max(identity_err,
                                    std::abs(2.0 * analytic::cap_probability(h, n) - (1.0 - analytic::inner_cdf(h, n))));
        }
    }
    const double archimedes = std::abs(analytic::cap_probability(0.5, 3) - 0.25);
    double worst_sigma = 0.0;
    const std::vector<std::pair<double, int>> cells{{0.2, 3}, {0.5, 6}, {0.1, 20}};
    for (const auto& [h, n] : cells) {
        RngStream rng(301, static_cast<std::uint64_t>(n));
        const int draws = 100000;
        int hits = 0;
        for (int t = 0; t < draws; ++t) hits += sphere::sample_unit_vector(n, rng)(0) >= h ? 1 : 0;
        const double q = analytic::cap_probability(h, n);
        const double sd = std::sqrt(q * (1.0 - q) / draws);
        worst_sigma = std::max(worst_sigma, std::abs(static_cast<double>(hits) / draws - q) / sd);
    }
    Outcome o;
    o.pass = identity_err <= 1e-10 && archimedes <= 1e-15 && worst_sigma <= 3.0;
    o.detail = Detail().add("identity_err", identity_err).add("archimedes_err", archimedes).add("max_sigma", worst_sigma).str();
    return o;
}

// Criterion 4.
Outcome spectral_oracles() {
    RngStream rng(401, 0);
    double angle_err = 0.0;
    for (int t = 0; t < 100; ++t) {
        const double theta = kPi * rng.uniform();
        Matrix m = Matrix::Zero(3, 2);
        m(0, 0) = 1.0;
        m(0, 1) = std::cos(theta);
        m(1, 1) = std::sin(theta);
        const double expected = std::sqrt(1.0 - std::abs(std::cos(theta)));
        angle_err = std::max(angle_err, std::abs(sigma_min(ColumnMatrix(m)) - expected));
    }
    int sandwich_violations = 0;
    const auto x = sphere::sample_sphere_matrix(8, 50, rng);
    std::vector<std::size_t> all(50);
    std::iota(all.begin(), all.end(), 0);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t size = 2 + static_cast<std::size_t>(rng.uniform() * 7.0) % 7;
        for (std::size_t i = 0; i < size; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.uniform() * static_cast<double>(50 - i)) % (50 - i);
            std::swap(all[i], all[j]);
        }
        const auto sub = submatrix(x, IndexSet::from_unsorted({all.begin(), all.begin() + static_cast<long>(size)}));
        const double smin = sigma_min(sub);
        if (std::abs(1.0 - smin * smin) > gram_deviation(sub) + 1e-12) ++sandwich_violations;
    }
    Outcome o;
    o.pass = angle_err <= 1e-10 && sandwich_violations == 0;
    o.detail = Detail().add("angle_err", angle_err).add("sandwich_violations", sandwich_violations).str();
    return o;
}

IndexSet sort_oracle(const ColumnMatrix& x, const Vector& v, std::size_t m) {
    std::vector<std::size_t> order(static_cast<std::size_t>(x.cols()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(x.column(static_cast<Eigen::Index>(a)).dot(v)) <
               std::abs(x.column(static_cast<Eigen::Index>(b)).dot(v));
    });
    order.resize(m);
    return IndexSet::from_unsorted(order);
}

// Criterion 5.
Outcome greedy_sandwich() {
    selection::SelectionConfig cfg;
    cfg.s = 2;
    cfg.rho_minus = 0.5;
    int greedy_mismatch = 0;
    int oracle_above = 0;
    int outer_below = 0;
    int infeasible = 0;
    for (std::uint64_t t = 0; t < 500; ++t) {
        RngStream rng(501, t);
        const auto x = sphere::sample_sphere_matrix(4, 12, rng);
        const Vector v = sphere::sample_unit_vector(4, rng);
        const std::size_t m = selection::outer_size(12, cfg);
        const auto outer = selection::greedy_outer(x, v, m);
        if (outer != sort_oracle(x, v, m)) ++greedy_mismatch;
        const auto sel = selection::constrained_select(x, v, cfg, rng);
        if (!sel.inner_set) {
            ++infeasible;
            continue;
        }
        const double exact = selection::brute_force_inf(x, v, 2, 0.5, 1000000);
        const double z_m = inf_norm_against(x, outer, v);
        if (exact > sel.attained_value + 1e-12) ++oracle_above;
        if (sel.attained_value > z_m + 1e-12) ++outer_below;
    }
    Outcome o;
    o.pass = greedy_mismatch == 0 && oracle_above == 0 && outer_below == 0 && infeasible == 0;
    o.detail = Detail()
                   .add("greedy_mismatch", greedy_mismatch)
                   .add("inf_above_attained", oracle_above)
                   .add("attained_above_outer", outer_below)
                   .add("infeasible", infeasible)
                   .str();
    return o;
}

// Criterion 6.
Outcome certificate_validity() {
    selection::SelectionConfig cfg;
    cfg.s = 2;
    RngStream net_rng(601, 0);
    const auto net = sphere::build_eps_net(4, 0.25, net_rng, 20000);
    std::size_t pipeline_violations = 0;
    std::size_t oracle_violations = 0;
    std::size_t probes = 0;
    double worst_slack = 1.0;
    for (int p : {200, 12}) {
        for (std::uint64_t t = 0; t < 20; ++t) {
            RngStream rng(602 + static_cast<std::uint64_t>(p), t);
            const auto x = sphere::sample_sphere_matrix(4, p, rng);
            const auto est = selection::estimate_gamma(x, cfg, net, 0, rng);
            const auto audit = selection::audit_certificate(x, cfg, est.certified_upper, 100000, rng, p == 12);
            pipeline_violations += audit.pipeline_violations;
            oracle_violations += audit.oracle_violations;
            probes += audit.probes;
            if (p == 12 && !audit.oracle_used) ++oracle_violations;
            worst_slack = std::min(worst_slack, est.certified_upper - audit.max_pipeline);
        }
    }
    Outcome o;
    o.pass = pipeline_violations == 0 && oracle_violations == 0 && probes == 4000000;
    o.detail = Detail()
                   .add("net_size", net.points.cols())
                   .add("probes", probes)
                   .add("pipeline_violations", pipeline_violations)
                   .add("oracle_violations", oracle_violations)
                   .add("min_slack", worst_slack)
                   .str();
    return o;
}

// Criterion 7.
Outcome monotonicity() {
    selection::SelectionConfig cfg;
    cfg.s = 2;
    RngStream dir_rng(701, 0);
    std::vector<Vector> directions;
    for (int i = 0; i < 50; ++i) directions.push_back(sphere::sample_unit_vector(4, dir_rng));
    int violations = 0;
    double worst = -1.0;
    for (std::uint64_t t = 0; t < 100; ++t) {
        RngStream rng(702, t);
        const auto x = sphere::sample_sphere_matrix(4, 8, rng);
        const auto extra = sphere::sample_sphere_matrix(4, 4, rng);
        const auto r = selection::monotonicity_check(x, extra, cfg, directions);
        worst = std::max(worst, r.gamma_concat - r.gamma_x);
        if (!r.satisfied || r.gamma_concat > r.gamma_x + 1e-12) ++violations;
    }
    Outcome o;
    o.pass = violations == 0;
    o.detail = Detail().add("violations", violations).add("max_increase", worst).str();
    return o;
}

// Criterion 8.
Outcome decoupling() {
    const std::vector<double> grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    const auto report = harness::run_decoupling_audit(8, 48, 4.0, 3, grid, 5000, 801);
    int failing = 0;
    double min_margin = 1e300;
    for (const auto& c : report.cells) {
        if (c.verdict != harness::Verdict::supported) ++failing;
        min_margin = std::min(min_margin, c.extra["margin_bootstrap_ci"][0].get<double>());
    }
    Outcome o;
    o.pass = failing == 0 && report.cells.size() == 2 * grid.size();
    o.detail = Detail().add("cells", report.cells.size()).add("not_supported", failing).add("min_margin_lo", min_margin).str();
    return o;
}

// Criterion 9.
Outcome constants_transcription() {
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
    double worst = 0.0;
    for (double eps : {0.1, 0.25, 0.5, 0.75}) {
        for (double ck : {0.5, 1.0, 2.0}) {
            worst = std::max(worst, rel(analytic::k_epsilon(eps, ck), oracle::k_eps_alt(eps, ck)));
            for (double rho : {0.25, 0.5}) {
                const double cs = analytic::c_s(rho, eps, ck, 0.5);
                worst = std::max(worst, std::abs(cs - oracle::c_s_alt(rho, eps, ck, 0.5)) / cs);
                for (double p : {100.0, 1e4}) {
                    const auto br = analytic::kappa_branches(rho, eps, ck, p, 50, 0.5);
                    const double g = oracle::kappa_growth_alt(rho, eps, ck, p, 50, 0.5);
                    worst = std::max(worst, std::abs(br.growth - g) / g);
                }
            }
        }
    }
    const double branch = analytic::kappa_branches(0.5, 0.5, 1.0, 1000.0, 100, 0.5).constant;
    worst = std::max(worst, rel(branch, 4.0 * std::exp(-2.0 * (std::log(2.0) - 1.0))));
    int s_mismatch = 0;
    for (int n : {10, 1000, 100000, 10000000}) {
        for (double p : {100.0, 1000.0, 1e6}) {
            const double cs = oracle::c_s_alt(0.5, 0.5, 1.0, 0.5);
            const long expected = static_cast<long>(std::floor(cs * n / (std::pow(std::log(p), 2) * std::log(1.0 * n))));
            if (analytic::s_max(n, p, 0.5, 0.5, 1.0, 0.5) != expected) ++s_mismatch;
        }
    }
    for (double p = 3.0; p < 1e8; p *= 3.7) worst = std::max(worst, rel(analytic::claimed_gamma_bound(p), 80.0 * std::log(p) / p));
    Outcome o;
    o.pass = worst <= 1e-12 && s_mismatch == 0;
    o.detail = Detail().add("max_rel_err", worst).add("s_max_mismatch", s_mismatch).add("K_eps(0.5,1)", analytic::k_epsilon(0.5, 1.0)).str();
    return o;
}

// Criterion 10.
Outcome claim_audit_honesty() {
    const auto report = harness::run_coherence_audit(6, 50, 1000, 1001);
    const auto json = report.to_json();
    const auto problems = harness::validate_report(json);
    const harness::ReportCell* mu = nullptr;
    for (const auto& c : report.cells) {
        if (c.claim.rfind("mu(X)", 0) == 0) mu = &c;
    }
    Outcome o;
    if (mu == nullptr) {
        o.pass = false;
        o.detail = "no coherence cell";
        return o;
    }
    const auto ci = harness::wilson_interval(mu->events, mu->trials);
    const bool ci_matches = std::abs(ci.lo - mu->ci.lo) <= 1e-15 && std::abs(ci.hi - mu->ci.hi) <= 1e-15;
    const bool mechanical = harness::judge(mu->kind, mu->ci, mu->claimed) == mu->verdict;
    o.pass = problems.empty() && ci_matches && mechanical && mu->verdict == harness::Verdict::violated &&
             mu->trials == 1000;
    o.detail = Detail()
                   .add("verdict", harness::to_string(mu->verdict))
                   .add("frequency", mu->frequency)
                   .add("ci_lo", mu->ci.lo)
                   .add("claimed", mu->claimed)
                   .add("schema_problems", problems.size())
                   .str();
    return o;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Criterion 11.
Outcome reproducibility() {
    Outcome o;
#ifndef CRI_CLI_PATH
    o.pass = false;
    o.detail = "cli not built";
    return o;
#else
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("cri_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::string cli = CRI_CLI_PATH;
    const std::string matrix = (dir / "matrix.csv").string();
    if (std::system((cli + " --seed 5 --n 4 --p 40 --out " + matrix + " gen").c_str()) != 0) {
        o.pass = false;
        o.detail = "gen failed";
        return o;
    }
    struct Command {
        std::string name;
        std::string args;
        bool with_trials = false;
    };
    const std::vector<Command> commands{
        {"gen", "--seed 9 --n 5 --p 30 gen"},
        {"select", "--seed 9 --s 2 --matrix " + matrix + " --v-random --oracle select"},
        {"gamma", "--seed 9 --s 2 --matrix " + matrix + " --net-eps 0.5 --probes 500 gamma"},
        {"constants", "--n 100 --p 1000 --s 1 constants"},
        {"order-stat", "--seed 9 experiment order-stat", true},
        {"coherence", "--seed 9 experiment coherence", true},
        {"norm", "--seed 9 --trials 300 experiment norm", true},
        {"decoupling", "--seed 9 --trials 1000 experiment decoupling", true},
        {"theorem", "--seed 9 experiment theorem", true},
        {"chernoff", "--seed 9 --trials 2000 experiment chernoff", true},
    };
    int mismatches = 0;
    int failures = 0;
    for (const auto& cmd : commands) {
        std::vector<std::string> outputs;
        const fs::path out = dir / (cmd.name + ".json");
        for (const char* threads : {"1", "8", "8"}) {
            fs::remove(out);
            fs::remove(fs::path(out).replace_extension(".trials.csv"));
            const std::string line =
                std::string("CRI_THREADS=") + threads + " " + cli + " --out " + out.string() + " " + cmd.args;
            if (std::system(line.c_str()) != 0) {
                ++failures;
                std::fprintf(stderr, "command failed: %s\n", line.c_str());
                continue;
            }
            std::string bytes = slurp(out);
            if (cmd.with_trials) bytes += slurp(fs::path(out).replace_extension(".trials.csv"));
            outputs.push_back(bytes);
        }
        for (std::size_t i = 1; i < outputs.size(); ++i) {
            if (outputs[i] != outputs[0] || outputs[i].empty()) {
                ++mismatches;
                std::fprintf(stderr, "output differs: %s\n", cmd.name.c_str());
            }
        }
    }
    fs::remove_all(dir);
    o.pass = mismatches == 0 && failures == 0;
    o.detail = Detail().add("commands", commands.size()).add("runs", 3 * commands.size()).add("mismatches", mismatches).add("failures", failures).str();
    return o;
#endif
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "distribution correctness", 30, distribution_correctness},
        {2, "order statistic law", 60, order_statistic_law},
        {3, "cap identity", 30, cap_identity},
        {4, "spectral oracles", 20, spectral_oracles},
        {5, "greedy and brute force sandwich", 60, greedy_sandwich},
        {6, "gamma certificate validity", 300, certificate_validity},
        {7, "monotonicity under concatenation", 120, monotonicity},
        {8, "decoupling and poissonization", 180, decoupling},
        {9, "constants transcription", 1, constants_transcription},
        {10, "claim audit honesty", 60, claim_audit_honesty},
        {11, "reproducibility", 120, reproducibility},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool pass = o.pass && seconds <= c.budget_seconds;
        if (!pass) ++failed;
        std::printf("%s [%d] %s: %s (%.2fs / %.0fs)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), seconds,
                    c.budget_seconds);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
