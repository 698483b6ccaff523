#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cri/analytic.hpp"
#include "cri/error.hpp"
#include "cri/harness.hpp"
#include "cri/linalg.hpp"
#include "cri/matrix_io.hpp"
#include "cri/rng.hpp"
#include "cri/selection.hpp"
#include "cri/sphere.hpp"

namespace {

using Json = nlohmann::ordered_json;
using namespace cri;

enum Exit { kOk = 0, kUsage = 2, kFormat = 3, kDomain = 4 };

const std::vector<std::string> kExperiments = {"order-stat", "coherence", "norm", "decoupling", "theorem", "chernoff"};

struct Options {
    int n = 0;
    int p = 0;
    int s = 2;
    int r = 5;
    double rho = 0.5;
    double kappa = 4.0;
    double epsilon = 0.5;
    double c_kappa = 1.0;
    double c = 0.5;
    double net_eps = 0.25;
    std::size_t probes = 200;
    std::size_t trials = 0;
    std::size_t max_attempts = 1000;
    std::size_t size = 1000;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "json";
    std::string matrix;
    std::string v_file;
    bool v_random = false;
    bool oracle = false;
    std::vector<double> r_grid;
    std::vector<double> q_grid;
    std::vector<double> eps_grid;
    std::string experiment;
};

class Cli {
public:
    Cli() : app_("Constrained restricted invertibility toolkit", "cri") { build(); }

    int run(int argc, char** argv) {
        try {
            app_.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            const int code = app_.exit(e);
            return code == 0 ? kOk : kUsage;
        }
        try {
            return dispatch();
        } catch (const UsageError& e) {
            return fail(kUsage, e.what());
        } catch (const InvalidInput& e) {
            return fail(kUsage, e.what());
        } catch (const InvalidIndex& e) {
            return fail(kUsage, e.what());
        } catch (const FormatError& e) {
            return fail(kFormat, e.what());
        } catch (const IoError& e) {
            return fail(kFormat, e.what());
        } catch (const DomainError& e) {
            return fail(kDomain, e.what());
        } catch (const BudgetExceeded& e) {
            return fail(kDomain, e.what());
        }
    }

private:
    CLI::App app_;
    Options o_;
    CLI::App* gen_ = nullptr;
    CLI::App* select_ = nullptr;
    CLI::App* gamma_ = nullptr;
    CLI::App* constants_ = nullptr;
    CLI::App* experiment_ = nullptr;

    void build() {
        app_.set_config("--config", "", "flat key = value file; flags override it");
        app_.require_subcommand(1);
        app_.add_option("--n", o_.n, "dimension");
        app_.add_option("--p", o_.p, "number of columns");
        app_.add_option("--s", o_.s, "selection size");
        app_.add_option("--r", o_.r, "order statistic rank");
        app_.add_option("--rho", o_.rho, "lower singular value target rho_-");
        app_.add_option("--kappa", o_.kappa, "outer set inflation (kappa s for the norm audit)");
        app_.add_option("--epsilon", o_.epsilon, "epsilon in the theorem constants");
        app_.add_option("--c-kappa", o_.c_kappa, "C_kappa");
        app_.add_option("--c", o_.c, "sub-Gaussian constant c");
        app_.add_option("--net-eps", o_.net_eps, "net radius");
        app_.add_option("--probes", o_.probes, "fresh probe directions");
        app_.add_option("--trials", o_.trials, "Monte Carlo trials");
        app_.add_option("--max-attempts", o_.max_attempts, "extraction attempts per direction");
        app_.add_option("--size", o_.size, "binomial size for the chernoff audit");
        app_.add_option("--seed", o_.seed, "master seed");
        app_.add_option("--out", o_.out, "output path (stdout when omitted)");
        app_.add_option("--format", o_.format, "output format")->check(CLI::IsMember({"json", "csv", "text"}));
        app_.add_option("--matrix", o_.matrix, "matrix CSV file");
        app_.add_option("--v", o_.v_file, "direction file");
        app_.add_flag("--v-random", o_.v_random, "draw the direction from the seed");
        app_.add_flag("--oracle", o_.oracle, "add the exact brute-force inf");
        app_.add_option("--r-grid", o_.r_grid, "r grid for the decoupling audit")->delimiter(',');
        app_.add_option("--q-grid", o_.q_grid, "success probabilities for the chernoff audit")->delimiter(',');
        app_.add_option("--eps-grid", o_.eps_grid, "epsilons for the chernoff audit")->delimiter(',');

        gen_ = app_.add_subcommand("gen", "sample a matrix with uniform unit columns")->fallthrough();
        select_ = app_.add_subcommand("select", "run the constrained selection pipeline")->fallthrough();
        gamma_ = app_.add_subcommand("gamma", "net certificate and probe estimate of gamma")->fallthrough();
        constants_ = app_.add_subcommand("constants", "theorem constants and hypothesis ledger")->fallthrough();
        experiment_ = app_.add_subcommand("experiment", "Monte Carlo claim audits")->fallthrough();
        experiment_->add_option("name", o_.experiment, "experiment name")->required();
    }

    bool given(const char* flag) const { return app_.get_option(flag)->count() > 0; }

    static int fail(int code, const std::string& message) {
        std::cerr << "error: " << message << '\n';
        return code;
    }

    int dispatch() {
        if (gen_->parsed()) return cmd_gen();
        if (select_->parsed()) return cmd_select();
        if (gamma_->parsed()) return cmd_gamma();
        if (constants_->parsed()) return cmd_constants();
        return cmd_experiment();
    }

    void emit(const std::string& contents) const {
        if (o_.out.empty()) {
            std::cout << contents;
        } else {
            io::write_file(o_.out, contents);
        }
    }

    static std::string dump(const Json& j) { return j.dump(2) + "\n"; }

    void require_positive(const char* flag, long value) const {
        if (value < 1) throw UsageError(std::string(flag) + " must be a positive integer");
    }

    selection::SelectionConfig selection_config() const {
        selection::SelectionConfig cfg;
        if (o_.s < 1) throw UsageError("--s must be a positive integer");
        cfg.s = static_cast<std::size_t>(o_.s);
        cfg.rho_minus = o_.rho;
        cfg.kappa = o_.kappa;
        cfg.epsilon = o_.net_eps;
        cfg.c_kappa = o_.c_kappa;
        cfg.c_subgauss = o_.c;
        cfg.max_attempts = o_.max_attempts;
        selection::validate(cfg);
        return cfg;
    }

    Json selection_config_json(const selection::SelectionConfig& cfg) const {
        return {{"s", cfg.s},         {"rho", cfg.rho_minus},         {"kappa", cfg.kappa},
                {"net_eps", cfg.epsilon}, {"c_kappa", cfg.c_kappa}, {"c", cfg.c_subgauss},
                {"max_attempts", cfg.max_attempts}, {"seed", o_.seed}};
    }

    int cmd_gen() {
        require_positive("--n", o_.n);
        require_positive("--p", o_.p);
        RngStream rng(o_.seed, 0);
        const auto x = sphere::sample_sphere_matrix(o_.n, o_.p, rng);
        emit(io::matrix_csv(x, o_.seed));
        return kOk;
    }

    int cmd_select() {
        if (o_.matrix.empty()) throw UsageError("select needs --matrix");
        if (o_.v_file.empty() == !o_.v_random) throw UsageError("select needs exactly one of --v, --v-random");
        const auto x = io::load_matrix(o_.matrix);
        auto cfg = selection_config();
        RngStream rng(o_.seed, 0);
        Vector v;
        if (o_.v_random) {
            v = sphere::sample_unit_vector(static_cast<int>(x.rows()), rng);
        } else {
            v = io::load_vector(o_.v_file);
            require_unit_vector(v, x.rows());
        }
        RngStream select_rng(o_.seed, 1);
        const auto outcome = selection::constrained_select(x, v, cfg, select_rng);

        Json config = selection_config_json(cfg);
        config["matrix"] = o_.matrix;
        config["v"] = o_.v_random ? Json("random") : Json(o_.v_file);
        config["oracle"] = o_.oracle;
        Json out;
        out["config"] = config;
        out["n"] = x.rows();
        out["p"] = x.cols();
        out["outer"] = outcome.outer_set.indices();
        out["inner"] = outcome.inner_set ? Json(outcome.inner_set->indices()) : Json(nullptr);
        out["sigma_min"] = outcome.sigma_min_achieved;
        out["attained"] = outcome.inner_set ? Json(outcome.attained_value) : Json(nullptr);
        out["attempts"] = outcome.attempts_used;
        if (o_.oracle) {
            const double exact = selection::brute_force_inf(x, v, cfg.s, cfg.rho_minus, cfg.brute_force_limit);
            if (outcome.inner_set && exact > outcome.attained_value + 1e-12) {
                throw DomainError("oracle inf exceeds the pipeline value");
            }
            out["oracle_inf"] = std::isinf(exact) ? Json(nullptr) : Json(exact);
        }
        if (o_.format == "text") {
            std::ostringstream text;
            for (const auto& [key, value] : out.items()) text << key << " = " << value.dump() << '\n';
            emit(text.str());
        } else {
            emit(dump(out));
        }
        return kOk;
    }

    int cmd_gamma() {
        if (o_.matrix.empty()) throw UsageError("gamma needs --matrix");
        if (!(o_.net_eps > 0.0 && o_.net_eps < 1.0)) throw UsageError("--net-eps must lie in (0, 1)");
        const auto x = io::load_matrix(o_.matrix);
        const auto cfg = selection_config();
        RngStream net_rng(o_.seed, 0);
        const auto net = sphere::build_eps_net(static_cast<int>(x.rows()), o_.net_eps, net_rng, 20000);
        RngStream rng(o_.seed, 1);
        const auto est = selection::estimate_gamma(x, cfg, net, o_.probes, rng);
        if (est.feasibility_rate > 0.0 && est.heuristic_lower > est.certified_upper) {
            throw DomainError("probe estimate exceeds the net certificate");
        }

        Json config = selection_config_json(cfg);
        config["matrix"] = o_.matrix;
        config["probes"] = o_.probes;
        auto finite = [](double value) { return std::isinf(value) ? Json(nullptr) : Json(value); };
        Json out;
        out["config"] = config;
        out["certified_upper"] = finite(est.certified_upper);
        out["heuristic_lower"] = finite(est.heuristic_lower);
        out["heuristic_lower_exact"] = est.oracle_exact;
        out["feasibility_rate"] = est.feasibility_rate;
        out["net_size"] = est.net.size;
        out["net_mode"] = std::string(sphere::to_string(est.net.mode));
        out["net_max_attained"] = finite(est.net_max_attained);
        out["net_max_outer"] = est.net_max_outer;
        out["outer_certificate"] = est.net_max_outer + o_.net_eps;
        out["directions_tested"] = est.directions_tested;
        out["claimed_bound"] = analytic::claimed_gamma_bound(static_cast<double>(x.cols()));
        emit(dump(out));
        if (est.feasibility_rate == 0.0) return fail(kDomain, "no net direction admitted a feasible selection");
        return kOk;
    }

    int cmd_constants() {
        require_positive("--n", o_.n);
        require_positive("--p", o_.p);
        require_positive("--s", o_.s);
        try {
            return constants_body();
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
    }

    int constants_body() {
        const double p = o_.p;
        const double eps = o_.epsilon;
        const auto constants = analytic::BoundConstants::derive(o_.rho, eps, o_.c_kappa, o_.c, o_.n, p, o_.s);
        const auto branches = analytic::kappa_branches(o_.rho, eps, o_.c_kappa, p, o_.n, o_.c);
        Json s_max_value = nullptr;
        try {
            s_max_value = analytic::s_max(o_.n, p, o_.rho, eps, o_.c_kappa, o_.c);
        } catch (const DomainError&) {
        }
        Json values;
        values["k_epsilon"] = constants.k_epsilon;
        values["kappa_constant"] = branches.constant;
        values["kappa_growth"] = branches.growth;
        values["kappa"] = branches.value();
        values["c_s"] = constants.c_s;
        values["s_max"] = s_max_value;
        values["claimed_gamma_bound"] = analytic::claimed_gamma_bound(p);
        values["claimed_probability"] = analytic::claimed_theorem_probability(o_.n, p);
        values["norm_threshold"] = constants.norm_threshold;
        values["theorem_min_p"] = analytic::theorem_min_p();
        Json ledger = Json::array();
        for (const auto& c : analytic::constraint_check(o_.n, p, o_.s, constants)) {
            ledger.push_back({{"constraint", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"satisfied", c.satisfied}});
        }
        Json config = {{"n", o_.n}, {"p", o_.p}, {"s", o_.s}, {"rho", o_.rho},
                       {"epsilon", eps}, {"c_kappa", o_.c_kappa}, {"c", o_.c}};

        if (o_.format == "json") {
            emit(dump({{"config", config}, {"constants", values}, {"constraints", ledger}}));
            return kOk;
        }
        std::ostringstream text;
        text << "# config " << config.dump() << '\n';
        for (const auto& [key, value] : values.items()) text << key << " = " << value.dump() << '\n';
        for (const auto& item : ledger) {
            text << "constraint " << item["constraint"].get<std::string>() << ": " << item["lhs"].dump()
                 << " vs " << item["rhs"].dump() << (item["satisfied"].get<bool>() ? " ok" : " FAILS") << '\n';
        }
        emit(text.str());
        return kOk;
    }

    // Per-experiment defaults for options the user did not give.
    void resolve_experiment_defaults() {
        const auto& name = o_.experiment;
        auto set = [this](const char* flag, auto& field, auto fallback) {
            if (!given(flag)) field = fallback;
        };
        if (name == "order-stat") {
            set("--n", o_.n, 3);
            set("--p", o_.p, 20);
            set("--r", o_.r, 5);
            set("--trials", o_.trials, std::size_t{10000});
        } else if (name == "coherence") {
            set("--n", o_.n, 6);
            set("--p", o_.p, 50);
            set("--trials", o_.trials, std::size_t{1000});
        } else if (name == "norm") {
            set("--n", o_.n, 8);
            set("--p", o_.p, 50);
            set("--kappa", o_.kappa, 12.0);
            set("--trials", o_.trials, std::size_t{1000});
        } else if (name == "decoupling") {
            set("--n", o_.n, 8);
            set("--s", o_.s, 3);
            set("--p", o_.p, 4 * static_cast<int>(std::lround(o_.kappa * o_.s)));
            set("--trials", o_.trials, std::size_t{5000});
            if (o_.r_grid.empty()) {
                for (int i = 1; i <= 9; ++i) o_.r_grid.push_back(i / 10.0);
            }
        } else if (name == "theorem") {
            set("--n", o_.n, 4);
            set("--p", o_.p, 200);
            set("--s", o_.s, 2);
            set("--trials", o_.trials, std::size_t{20});
        } else {
            set("--trials", o_.trials, std::size_t{10000});
            if (o_.q_grid.empty()) o_.q_grid = {0.0, 0.01, 0.1, 0.5};
            if (o_.eps_grid.empty()) o_.eps_grid = {0.1, 0.25, 0.5};
        }
    }

    int cmd_experiment() {
        const auto& name = o_.experiment;
        if (std::find(kExperiments.begin(), kExperiments.end(), name) == kExperiments.end()) {
            std::string list;
            for (const auto& e : kExperiments) list += (list.empty() ? "" : ", ") + e;
            throw UsageError("unknown experiment '" + name + "'; valid names: " + list);
        }
        resolve_experiment_defaults();
        harness::ExperimentReport report;
        if (name == "order-stat") {
            report = harness::run_order_stat_audit(o_.n, o_.p, o_.r, o_.trials, o_.seed);
        } else if (name == "coherence") {
            report = harness::run_coherence_audit(o_.n, o_.p, o_.trials, o_.seed);
        } else if (name == "norm") {
            harness::NormOptions opts;
            opts.c_subgauss = o_.c;
            opts.c_kappa = o_.c_kappa;
            const int kappa_s = static_cast<int>(std::lround(o_.kappa));
            report = harness::run_norm_audit(o_.n, o_.p, kappa_s, o_.epsilon, o_.trials, o_.seed, opts);
        } else if (name == "decoupling") {
            report = harness::run_decoupling_audit(o_.n, o_.p, o_.kappa, o_.s, o_.r_grid, o_.trials, o_.seed);
        } else if (name == "theorem") {
            harness::TheoremOptions opts;
            opts.kappa = o_.kappa;
            opts.c_kappa = o_.c_kappa;
            opts.c_subgauss = o_.c;
            opts.probes = o_.probes;
            opts.max_attempts = o_.max_attempts;
            report = harness::run_theorem_audit(o_.n, o_.p, o_.s, o_.rho, o_.net_eps, o_.trials, o_.seed, opts);
        } else {
            report = harness::run_chernoff_audit(static_cast<long>(o_.size), o_.q_grid, o_.eps_grid, o_.trials,
                                                 o_.seed);
        }

        Json j = report.to_json();
        j["config"] = effective_config();
        if (o_.format == "csv") {
            emit(trials_csv(report));
            return kOk;
        }
        emit(dump(j));
        if (!o_.out.empty()) {
            std::filesystem::path path(o_.out);
            path.replace_extension(".trials.csv");
            io::write_file(path.string(), trials_csv(report));
        }
        return kOk;
    }

    std::string trials_csv(const harness::ExperimentReport& report) const {
        std::string csv = report.trials_csv();
        const auto split = csv.find('\n') + 1;
        return csv.substr(0, split) + "# config " + effective_config().dump() + "\n" + csv.substr(split);
    }

    // Every option value, explicitly given or default, in a fixed order.
    Json effective_config() const {
        return {{"experiment", o_.experiment}, {"n", o_.n},
                {"p", o_.p},                   {"s", o_.s},
                {"r", o_.r},                   {"rho", o_.rho},
                {"kappa", o_.kappa},           {"epsilon", o_.epsilon},
                {"c_kappa", o_.c_kappa},       {"c", o_.c},
                {"net_eps", o_.net_eps},       {"probes", o_.probes},
                {"trials", o_.trials},         {"max_attempts", o_.max_attempts},
                {"size", o_.size},             {"seed", o_.seed},
                {"r_grid", o_.r_grid},         {"q_grid", o_.q_grid},
                {"eps_grid", o_.eps_grid}};
    }
};

}  // namespace

int main(int argc, char** argv) {
    Cli cli;
    return cli.run(argc, argv);
}
