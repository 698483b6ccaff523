#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cri/analytic.hpp"
#include "cri/error.hpp"
#include "cri/harness.hpp"
#include "cri/linalg.hpp"
#include "cri/rng.hpp"
#include "cri/selection.hpp"
#include "cri/sphere.hpp"

namespace py = pybind11;
using namespace cri;

namespace {

selection::SelectionConfig make_config(std::size_t s, double rho, double kappa, std::size_t max_attempts) {
    selection::SelectionConfig cfg;
    cfg.s = s;
    cfg.rho_minus = rho;
    cfg.kappa = kappa;
    cfg.max_attempts = max_attempts;
    selection::validate(cfg);
    return cfg;
}

std::string report_json(const harness::ExperimentReport& report) { return report.to_json().dump(); }

}  // namespace

PYBIND11_MODULE(_cri, m) {
    m.doc() = "Column selection, sphere sampling, analytic bounds and claim audits";

    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<InvalidIndex>(m, "InvalidIndex", PyExc_IndexError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);

    m.def(
        "sample_sphere_matrix",
        [](int n, int p, std::uint64_t seed, std::uint64_t index) {
            RngStream rng(seed, index);
            return sphere::sample_sphere_matrix(n, p, rng).matrix();
        },
        py::arg("n"), py::arg("p"), py::arg("seed"), py::arg("index") = 0);
    m.def("sigma_min", [](const Matrix& x) { return sigma_min(x); });
    m.def("operator_norm", [](const Matrix& x) { return operator_norm(x); });
    m.def("coherence", [](const Matrix& x) { return coherence(ColumnMatrix(x)); });
    m.def("gram_deviation", [](const Matrix& x) { return gram_deviation(ColumnMatrix(x)); });

    m.def("inner_cdf", &analytic::inner_cdf, py::arg("z"), py::arg("n"));
    m.def("inner_density", &analytic::inner_density, py::arg("z"), py::arg("n"));
    m.def(
        "order_stat_cdf", [](double z, int p, int r, int n) { return analytic::order_stat_cdf(z, {p, r, n}); },
        py::arg("z"), py::arg("p"), py::arg("r"), py::arg("n"));
    m.def(
        "order_stat_quantile",
        [](double alpha, int p, int r, int n) { return analytic::order_stat_quantile(alpha, {p, r, n}); },
        py::arg("alpha"), py::arg("p"), py::arg("r"), py::arg("n"));
    m.def("cap_probability", &analytic::cap_probability, py::arg("h"), py::arg("n"));
    m.def("k_epsilon", &analytic::k_epsilon, py::arg("eps"), py::arg("c_kappa"));
    m.def("claimed_gamma_bound", &analytic::claimed_gamma_bound, py::arg("p"));
    m.def("s_max", &analytic::s_max, py::arg("n"), py::arg("p"), py::arg("rho_minus"), py::arg("eps"),
          py::arg("c_kappa"), py::arg("c_subgauss"));

    m.def(
        "greedy_outer",
        [](const Matrix& x, const Vector& v, std::size_t count) {
            return selection::greedy_outer(ColumnMatrix(x), v, count).indices();
        },
        py::arg("x"), py::arg("v"), py::arg("m"));
    m.def(
        "constrained_select",
        [](const Matrix& x, const Vector& v, std::size_t s, double rho, double kappa, std::uint64_t seed,
           std::size_t max_attempts) {
            const ColumnMatrix cx(x);
            require_unit_vector(v, cx.rows());
            RngStream rng(seed, 0);
            const auto out = selection::constrained_select(cx, v, make_config(s, rho, kappa, max_attempts), rng);
            py::dict result;
            result["outer"] = out.outer_set.indices();
            result["inner"] = out.inner_set ? py::cast(out.inner_set->indices()) : py::none();
            result["sigma_min"] = out.sigma_min_achieved;
            result["attained"] = out.attained_value;
            result["attempts"] = out.attempts_used;
            return result;
        },
        py::arg("x"), py::arg("v"), py::arg("s") = 2, py::arg("rho") = 0.5, py::arg("kappa") = 4.0,
        py::arg("seed") = 0, py::arg("max_attempts") = 1000);
    m.def(
        "brute_force_inf",
        [](const Matrix& x, const Vector& v, std::size_t s, double rho) {
            return selection::brute_force_inf(ColumnMatrix(x), v, s, rho, 2'000'000);
        },
        py::arg("x"), py::arg("v"), py::arg("s") = 2, py::arg("rho") = 0.5);

    m.def(
        "_order_stat_audit",
        [](int n, int p, int r, std::size_t trials, std::uint64_t seed) {
            py::gil_scoped_release release;
            return report_json(harness::run_order_stat_audit(n, p, r, trials, seed));
        },
        py::arg("n"), py::arg("p"), py::arg("r"), py::arg("trials"), py::arg("seed"));
    m.def(
        "_coherence_audit",
        [](int n, int p, std::size_t trials, std::uint64_t seed) {
            py::gil_scoped_release release;
            return report_json(harness::run_coherence_audit(n, p, trials, seed));
        },
        py::arg("n"), py::arg("p"), py::arg("trials"), py::arg("seed"));
}
