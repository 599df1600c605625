// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <string>
#include <vector>

#include "kvwave/errors.hpp"
#include "kvwave/model.hpp"

namespace kvwave {

using SparseMat = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// Uniform grid on (0, L) with n interior nodes x_j = j*h, h = L/(n+1),
/// and staggered midpoints x_{j+1/2} = (j+1/2)*h, j = 0..n. Dirichlet
/// values at j = 0 and j = n+1 are implied and never stored.
struct Grid {
    int n = 0;
    double h = 0.0;
    std::vector<double> nodes;     ///< size n
    std::vector<double> midpoints; ///< size n+1
    std::vector<std::string> warnings; ///< under-resolved coefficient supports
};

/// Discrete state (u, v, y, z) at the interior nodes, stored as one flat
/// vector of length 4n in block order u | v | y | z. v = u_t, z = y_t.
struct StateVector {
    Vector data;
    Eigen::Index n = 0;

    StateVector() = default;
    explicit StateVector(Eigen::Index n_) : data(Vector::Zero(4 * n_)), n(n_) {}

    auto u() { return data.segment(0, n); }
    auto v() { return data.segment(n, n); }
    auto y() { return data.segment(2 * n, n); }
    auto z() { return data.segment(3 * n, n); }
    auto u() const { return data.segment(0, n); }
    auto v() const { return data.segment(n, n); }
    auto y() const { return data.segment(2 * n, n); }
    auto z() const { return data.segment(3 * n, n); }

    bool all_finite() const { return data.allFinite(); }
};

/// The assembled generator A, the energy matrix M defining the discrete
/// state-space inner product, and the forward-difference map D used by both.
///
/// M = blockdiag(a h D^T D, h I, h D^T D, h I), so (1/2) s^T M s is the
/// trapezoid-free discrete energy (1/2) Integral(|u_t|^2 + a|u_x|^2 +
/// |y_t|^2 + |y_x|^2). Flux-form differencing with midpoint coefficient
/// sampling makes M A + A^T M = -2 blockdiag(0, h D^T diag(b) D, 0,
/// h D^T diag(d) D) hold entrywise, i.e. the energy dissipation identity
/// is exact at the matrix level, discontinuous coefficients included.
struct DiscreteGenerator {
    SystemConfig cfg;
    Grid grid;
    SparseMat A; ///< 4n x 4n generator
    SparseMat M; ///< 4n x 4n SPD energy matrix
    SparseMat D; ///< (n+1) x n forward difference, implied zero boundary
    Vector b_mid; ///< b at midpoints, size n+1
    Vector d_mid; ///< d at midpoints, size n+1
    Vector c_node; ///< c at nodes, size n
};

/// Builds the uniform grid and checks that every nonzero coefficient
/// support is visible to the discretization (contains a midpoint).
inline Grid build_grid(const SystemConfig& cfg, int n) {
    if (n < 2) throw BadParameters("build_grid: n must be >= 2");
    Grid g;
    g.n = n;
    g.h = cfg.length / (n + 1);
    g.nodes.resize(n);
    for (int j = 0; j < n; ++j) g.nodes[j] = (j + 1) * g.h;
    g.midpoints.resize(n + 1);
    for (int m = 0; m <= n; ++m) g.midpoints[m] = (m + 0.5) * g.h;

    struct Named { const CoefficientProfile* p; const char* name; };
    const Named profiles[] = {{&cfg.profile_b, "b"}, {&cfg.profile_c, "c"},
                              {&cfg.profile_d, "d"}};
    for (const auto& [p, name] : profiles) {
        if (p->is_zero()) continue;
        int inside = 0;
        for (double xm : g.midpoints)
            if (p->left < xm && xm < p->right) ++inside;
        if (inside == 0)
            throw ResolutionTooCoarse(std::string("no midpoint falls in the support of ") +
                                      name + " [" + std::to_string(p->left) + ", " +
                                      std::to_string(p->right) + "]; increase n");
        if (inside < 4)
            g.warnings.push_back(std::string("support of ") + name + " contains only " +
                                 std::to_string(inside) + " midpoints (under-resolved)");
    }
    return g;
}

namespace detail {

// (n+1) x n forward difference with implied w_0 = w_{n+1} = 0.
inline SparseMat difference_map(int n, double h) {
    SparseMat D(n + 1, n);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(2 * n);
    for (int m = 0; m <= n; ++m) {
        if (m <= n - 1) t.emplace_back(m, m, 1.0 / h);
        if (m >= 1) t.emplace_back(m, m - 1, -1.0 / h);
    }
    D.setFromTriplets(t.begin(), t.end());
    return D;
}

// L_kappa = -D^T diag(kappa_mid) D, the flux-form (kappa w_x)_x.
inline SparseMat flux_laplacian(const SparseMat& D, const Vector& kappa_mid) {
    SparseMat K(kappa_mid.size(), kappa_mid.size());
    std::vector<Eigen::Triplet<double>> t;
    for (Eigen::Index m = 0; m < kappa_mid.size(); ++m)
        if (kappa_mid[m] != 0.0) t.emplace_back(m, m, kappa_mid[m]);
    K.setFromTriplets(t.begin(), t.end());
    return SparseMat(-(D.transpose() * K * D).pruned());
}

inline void set_block(std::vector<Eigen::Triplet<double>>& out, const SparseMat& blk,
                      int row0, int col0) {
    for (int k = 0; k < blk.outerSize(); ++k)
        for (SparseMat::InnerIterator it(blk, k); it; ++it)
            out.emplace_back(row0 + static_cast<int>(it.row()),
                             col0 + static_cast<int>(it.col()), it.value());
}

} // namespace detail

/// Assembles A and M for a validated config on its grid.
inline DiscreteGenerator assemble_generator(const SystemConfig& cfg, const Grid& grid) {
    const int n = grid.n;
    const double h = grid.h;

    DiscreteGenerator g;
    g.cfg = cfg;
    g.grid = grid;
    g.D = detail::difference_map(n, h);

    g.b_mid.resize(n + 1);
    g.d_mid.resize(n + 1);
    for (int m = 0; m <= n; ++m) {
        g.b_mid[m] = eval_coefficient(cfg.profile_b, grid.midpoints[m], cfg.length);
        g.d_mid[m] = eval_coefficient(cfg.profile_d, grid.midpoints[m], cfg.length);
    }
    g.c_node.resize(n);
    for (int j = 0; j < n; ++j)
        g.c_node[j] = eval_coefficient(cfg.profile_c, grid.nodes[j], cfg.length);

    const Vector a_mid = Vector::Constant(n + 1, cfg.wave_speed_sq);
    const Vector one_mid = Vector::Ones(n + 1);
    const SparseMat La = detail::flux_laplacian(g.D, a_mid);
    const SparseMat Lb = detail::flux_laplacian(g.D, g.b_mid);
    const SparseMat L1 = detail::flux_laplacian(g.D, one_mid);
    const SparseMat Ld = detail::flux_laplacian(g.D, g.d_mid);

    // Row blocks: u' = v; v' = La u + Lb v - C z; y' = z; z' = L1 y + Ld z + C v.
    std::vector<Eigen::Triplet<double>> t;
    for (int j = 0; j < n; ++j) t.emplace_back(j, n + j, 1.0);          // u' = v
    detail::set_block(t, La, n, 0);                                     // v' ...
    detail::set_block(t, Lb, n, n);
    for (int j = 0; j < n; ++j)
        if (g.c_node[j] != 0.0) t.emplace_back(n + j, 3 * n + j, -g.c_node[j]);
    for (int j = 0; j < n; ++j) t.emplace_back(2 * n + j, 3 * n + j, 1.0); // y' = z
    for (int j = 0; j < n; ++j)
        if (g.c_node[j] != 0.0) t.emplace_back(3 * n + j, n + j, g.c_node[j]);
    detail::set_block(t, L1, 3 * n, 2 * n);                             // z' ...
    detail::set_block(t, Ld, 3 * n, 3 * n);
    g.A.resize(4 * n, 4 * n);
    g.A.setFromTriplets(t.begin(), t.end());

    const SparseMat DtD = SparseMat((g.D.transpose() * g.D).pruned());
    std::vector<Eigen::Triplet<double>> tm;
    detail::set_block(tm, SparseMat(cfg.wave_speed_sq * h * DtD), 0, 0);
    for (int j = 0; j < n; ++j) tm.emplace_back(n + j, n + j, h);
    detail::set_block(tm, SparseMat(h * DtD), 2 * n, 2 * n);
    for (int j = 0; j < n; ++j) tm.emplace_back(3 * n + j, 3 * n + j, h);
    g.M.resize(4 * n, 4 * n);
    g.M.setFromTriplets(tm.begin(), tm.end());

    return g;
}

namespace detail {
inline void require_conformal(const DiscreteGenerator& g, const StateVector& s,
                              const char* where) {
    if (s.n != g.grid.n || s.data.size() != 4 * g.grid.n)
        throw DimensionMismatch(std::string(where) + ": state has n = " +
                                std::to_string(s.n) + ", generator has n = " +
                                std::to_string(g.grid.n));
}
} // namespace detail

/// Discrete energy (1/2) s^T M s >= 0.
inline double energy(const DiscreteGenerator& g, const StateVector& s) {
    detail::require_conformal(g, s, "energy");
    return 0.5 * s.data.dot(g.M * s.data);
}

/// Exact discrete dissipation -h sum b |Dv|^2 - h sum d |Dz|^2 <= 0.
/// Equals s^T ((MA + A^T M)/2) s for every state; tests assert this.
inline double dissipation_rate(const DiscreteGenerator& g, const StateVector& s) {
    detail::require_conformal(g, s, "dissipation_rate");
    const double h = g.grid.h;
    const Vector dv = g.D * s.v();
    const Vector dz = g.D * s.z();
    double total = 0.0;
    for (Eigen::Index m = 0; m < dv.size(); ++m)
        total += g.b_mid[m] * dv[m] * dv[m] + g.d_mid[m] * dz[m] * dz[m];
    return -h * total;
}

/// Applies the generator: s' = A s.
inline StateVector apply_generator(const DiscreteGenerator& g, const StateVector& s) {
    detail::require_conformal(g, s, "apply_generator");
    StateVector out(s.n);
    out.data = g.A * s.data;
    return out;
}

/// M-weighted norm sqrt(s^T M s).
inline double state_norm(const DiscreteGenerator& g, const StateVector& s) {
    detail::require_conformal(g, s, "state_norm");
    return std::sqrt(s.data.dot(g.M * s.data));
}

} // namespace kvwave
