#include "cri/sphere.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cri/error.hpp"

namespace cri::sphere {

Vector sample_unit_vector(int n, RngStream& rng) {
    if (n < 1) throw InvalidInput("sample_unit_vector: dimension must be >= 1");
    Vector v(n);
    double norm2 = 0.0;
    do {
        for (int i = 0; i < n; ++i) v(i) = rng.normal();
        norm2 = v.squaredNorm();
    } while (norm2 == 0.0);
    return v / std::sqrt(norm2);
}

ColumnMatrix sample_sphere_matrix(int n, int p, RngStream& rng) {
    if (n < 1 || p < 1) throw InvalidInput("sample_sphere_matrix: n and p must be >= 1");
    Matrix m(n, p);
    for (int j = 0; j < p; ++j) m.col(j) = sample_unit_vector(n, rng);
    return ColumnMatrix(std::move(m));
}

std::string_view to_string(NetMode mode) {
    return mode == NetMode::exact ? "exact" : "heuristic";
}

double net_cardinality_bound(int d, double epsilon) {
    return 2.0 * d * std::pow(1.0 + 2.0 / epsilon, d - 1);
}

EpsNet build_eps_net(int d, double epsilon, RngStream& rng, std::size_t stall_budget, int max_dimension) {
    if (d < 1) throw InvalidInput("build_eps_net: dimension must be >= 1");
    if (!(epsilon > 0.0 && epsilon <= 2.0)) throw InvalidInput("build_eps_net: epsilon must lie in (0, 2]");
    if (stall_budget < 1) throw InvalidInput("build_eps_net: stall budget must be >= 1");
    if (d > max_dimension) {
        throw InvalidInput("build_eps_net: dimension " + std::to_string(d) + " exceeds cap " +
                           std::to_string(max_dimension));
    }

    EpsNet net;
    net.dimension = d;
    net.epsilon = epsilon;
    if (d == 1) {
        net.points.resize(1, 2);
        net.points << -1.0, 1.0;
        net.mode = NetMode::exact;
        return net;
    }

    // For unit vectors |x - y| > eps  <=>  <x, y> < 1 - eps^2 / 2.
    const double max_dot = 1.0 - 0.5 * epsilon * epsilon;
    std::vector<double> flat;
    std::size_t count = 0;
    std::size_t stalls = 0;
    while (stalls < stall_budget) {
        const Vector candidate = sample_unit_vector(d, rng);
        bool separated = true;
        for (std::size_t k = 0; k < count; ++k) {
            const double* q = flat.data() + k * static_cast<std::size_t>(d);
            double dot = 0.0;
            for (int i = 0; i < d; ++i) dot += q[i] * candidate(i);
            if (dot >= max_dot) {
                separated = false;
                break;
            }
        }
        if (separated) {
            flat.insert(flat.end(), candidate.data(), candidate.data() + d);
            ++count;
            stalls = 0;
        } else {
            ++stalls;
        }
    }
    net.points = Eigen::Map<const Matrix>(flat.data(), d, static_cast<Eigen::Index>(count));
    net.mode = NetMode::heuristic;
    return net;
}

double min_separation(const EpsNet& net) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < net.points.cols(); ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            best = std::min(best, (net.points.col(i) - net.points.col(j)).norm());
        }
    }
    return best;
}

double probe_covering_radius(const EpsNet& net, std::size_t probes, RngStream& rng) {
    if (net.size() == 0) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (std::size_t t = 0; t < probes; ++t) {
        const Vector probe = sample_unit_vector(net.dimension, rng);
        const double best_dot = (net.points.transpose() * probe).maxCoeff();
        worst = std::max(worst, std::sqrt(std::max(0.0, 2.0 - 2.0 * best_dot)));
    }
    return worst;
}

double net_norm_estimate(const Matrix& a, const EpsNet& rows, const EpsNet& cols) {
    if (rows.dimension != a.rows() || cols.dimension != a.cols()) {
        throw InvalidInput("net_norm_estimate: net dimensions do not match the operator shape");
    }
    if (rows.size() == 0 || cols.size() == 0) throw InvalidInput("net_norm_estimate: empty net");
    const Matrix values = rows.points.transpose() * a * cols.points;
    const double sup = values.cwiseAbs().maxCoeff();
    return sup / ((1.0 - rows.epsilon) * (1.0 - cols.epsilon));
}

}  // namespace cri::sphere
