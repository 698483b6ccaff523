#pragma once

#include <cstddef>
#include <string_view>

#include "cri/linalg.hpp"
#include "cri/rng.hpp"

namespace cri::sphere {

// Uniform point on S^{n-1}: a normalized standard Gaussian vector.
Vector sample_unit_vector(int n, RngStream& rng);

// p i.i.d. columns uniform on S^{n-1}.
ColumnMatrix sample_sphere_matrix(int n, int p, RngStream& rng);

enum class NetMode { exact, heuristic };
std::string_view to_string(NetMode mode);

// Finite epsilon-separated set of unit vectors, stored one point per column.
struct EpsNet {
    int dimension = 0;
    double epsilon = 0.0;
    Matrix points;  // dimension x size
    NetMode mode = NetMode::heuristic;

    std::size_t size() const noexcept { return static_cast<std::size_t>(points.cols()); }
    auto point(std::size_t i) const { return points.col(static_cast<Eigen::Index>(i)); }
};

inline constexpr int kDefaultMaxNetDimension = 8;

// Existence bound 2d(1 + 2/eps)^{d-1} on the size of an eps-net of S^{d-1}.
double net_cardinality_bound(int d, double epsilon);

// Greedy maximal eps-separated set. Uniform candidates are accepted iff they
// are farther than eps from every accepted point; construction stops after
// `stall_budget` consecutive rejections. d = 1 gives the exact net {-1, +1}.
// Throws InvalidInput for d > max_dimension.
EpsNet build_eps_net(int d, double epsilon, RngStream& rng, std::size_t stall_budget,
                     int max_dimension = kDefaultMaxNetDimension);

// Smallest pairwise distance between net points (infinity for fewer than two).
double min_separation(const EpsNet& net);

// Largest distance from `probes` fresh uniform points to their nearest net point.
double probe_covering_radius(const EpsNet& net, std::size_t probes, RngStream& rng);

// sup over (v, w) in rows x cols of |v^t A w|, divided by (1 - eps)(1 - eps').
// `rows` lives in R^{A.rows()}, `cols` in R^{A.cols()}.
double net_norm_estimate(const Matrix& a, const EpsNet& rows, const EpsNet& cols);

}  // namespace cri::sphere
