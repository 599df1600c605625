// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <vector>

#include "kvwave/discretize.hpp"
#include "kvwave/errors.hpp"

namespace kvwave {

using Complex = std::complex<double>;
using SparseMatC = Eigen::SparseMatrix<Complex>;
using MatrixC = Eigen::MatrixXcd;
using VectorC = Eigen::VectorXcd;

/// Largest n for which dense eigen/SVD routines are used (4n <= 1600).
inline constexpr int kDenseThreshold = 400;

/// Largest |lambda| at which the finite-difference dispersion relation still
/// tracks the continuum; spectral claims above it are untrusted.
inline double resolution_limit(const DiscreteGenerator& g) {
    return 0.3 * std::sqrt(g.cfg.wave_speed_sq) / g.grid.h;
}

/// Full spectrum of the generator with axis diagnostics.
struct SpectrumReport {
    std::vector<Complex> eigenvalues; ///< all 4n, sorted by (Im, Re)
    double max_real_part = 0.0;
    double min_abs_real_part = 0.0;
    int on_axis_count = 0; ///< eigenvalues with Re > 1e-8 max(1, |Im|)
    int n = 0;
    CaseLabel case_label = CaseLabel::C1;
};

/// M-weighted resolvent norms along the positive imaginary axis.
struct ResolventProfile {
    enum class Flag { ok, singular, beyond_limit };
    struct Point {
        double lambda;
        double norm;
        Flag flag;
    };
    std::vector<Point> points;
    double resolution_limit = 0.0;
    double fit_lo = 0.0;
    double fit_hi = 0.0;
    double fitted_ell = std::numeric_limits<double>::quiet_NaN();
};

/// Dense spectrum of A. Eigenvalue locations are similarity-invariant, so
/// the plain Euclidean eigenproblem suffices; no M-weighting enters here.
inline SpectrumReport eigenvalues(const DiscreteGenerator& g) {
    if (g.grid.n > kDenseThreshold)
        throw TooLargeForDense("eigenvalues: n = " + std::to_string(g.grid.n) +
                               " exceeds the dense threshold " +
                               std::to_string(kDenseThreshold) +
                               "; use resolvent_sweep instead");
    Eigen::MatrixXd dense(g.A);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(dense, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw Error("eigenvalues: dense eigensolver did not converge");

    SpectrumReport report;
    report.n = g.grid.n;
    report.case_label = g.cfg.case_label;
    report.eigenvalues.assign(solver.eigenvalues().data(),
                              solver.eigenvalues().data() + solver.eigenvalues().size());
    std::sort(report.eigenvalues.begin(), report.eigenvalues.end(),
              [](const Complex& a, const Complex& b) {
                  if (a.imag() != b.imag()) return a.imag() < b.imag();
                  return a.real() < b.real();
              });

    report.max_real_part = -std::numeric_limits<double>::infinity();
    report.min_abs_real_part = std::numeric_limits<double>::infinity();
    for (const Complex& ev : report.eigenvalues) {
        report.max_real_part = std::max(report.max_real_part, ev.real());
        report.min_abs_real_part = std::min(report.min_abs_real_part, std::abs(ev.real()));
        if (ev.real() > 1e-8 * std::max(1.0, std::abs(ev.imag()))) ++report.on_axis_count;
    }
    return report;
}

namespace detail {

/// Unpermuted sparse Cholesky M = L L^T. M is block-diagonal with
/// tridiagonal blocks, so natural ordering is already fill-free.
inline SparseMat cholesky_lower(const SparseMat& M) {
    Eigen::SimplicialLLT<SparseMat, Eigen::Lower, Eigen::NaturalOrdering<int>> llt(M);
    if (llt.info() != Eigen::Success)
        throw Error("cholesky_lower: energy matrix is not positive definite");
    return llt.matrixL();
}

/// W = L^T (i lambda I - A) L^{-T} as a dense complex matrix. The M-operator
/// norm of the resolvent is 1 / sigma_min(W).
inline MatrixC weighted_shifted_dense(const SparseMat& A, const SparseMat& L, double lambda) {
    const Eigen::Index m = A.rows();
    SparseMatC B(m, m);
    {
        SparseMatC Ac = A.cast<Complex>();
        SparseMatC identity(m, m);
        identity.setIdentity();
        B = SparseMatC(Complex(0.0, lambda) * identity - Ac);
    }
    SparseMatC Lc = L.cast<Complex>();
    SparseMatC LcT = SparseMatC(Lc.adjoint());
    MatrixC Z = MatrixC::Identity(m, m);
    LcT.triangularView<Eigen::Upper>().solveInPlace(Z); // Z = L^{-T}
    MatrixC W = LcT * (B * Z).eval();
    return W;
}

/// Smallest/largest singular values via one dense SVD.
inline std::pair<double, double> extreme_singular_values(const MatrixC& W) {
    Eigen::BDCSVD<MatrixC> svd(W);
    const auto& sv = svd.singularValues();
    return {sv(sv.size() - 1), sv(0)};
}

struct ComplexShiftOp {
    // Applies W^{-1} = L^T B^{-1} L^{-T} and its adjoint with one sparse LU
    // of B = i lambda I - A (and one of B^H).
    SparseMatC Lc, LcT;
    Eigen::SparseLU<SparseMatC> lu, luH;
    bool singular = false;

    ComplexShiftOp(const SparseMat& A, const SparseMat& L, double lambda) {
        const Eigen::Index m = A.rows();
        SparseMatC Ac = A.cast<Complex>();
        SparseMatC identity(m, m);
        identity.setIdentity();
        SparseMatC B = SparseMatC(Complex(0.0, lambda) * identity - Ac);
        SparseMatC BH = SparseMatC(B.adjoint());
        Lc = L.cast<Complex>();
        LcT = SparseMatC(Lc.adjoint());
        lu.compute(B);
        luH.compute(BH);
        singular = lu.info() != Eigen::Success || luH.info() != Eigen::Success;
    }

    VectorC apply_inv(const VectorC& x) const {
        VectorC t = x;
        LcT.triangularView<Eigen::Upper>().solveInPlace(t);
        return LcT * lu.solve(t).eval();
    }

    VectorC apply_inv_adjoint(const VectorC& x) const {
        VectorC t = luH.solve(Lc * x);
        Lc.triangularView<Eigen::Lower>().solveInPlace(t);
        return t;
    }
};

} // namespace detail

/// Dense-SVD route: exact up to the SVD's backward error. n <= 400.
inline double resolvent_norm_svd(const DiscreteGenerator& g, double lambda) {
    if (g.grid.n > kDenseThreshold)
        throw TooLargeForDense("resolvent_norm_svd: n exceeds the dense threshold");
    const SparseMat L = detail::cholesky_lower(g.M);
    const MatrixC W = detail::weighted_shifted_dense(g.A, L, lambda);
    const auto [smin, smax] = detail::extreme_singular_values(W);
    if (!(smin > smax * 1e-14))
        throw NumericallySingular("resolvent_norm: i*lambda with lambda = " +
                                  std::to_string(lambda) +
                                  " is indistinguishable from an eigenvalue");
    return 1.0 / smin;
}

/// Iterative route: power iteration on (W^{-1})^H W^{-1} with the shifted
/// sparse factorization. Independent of the SVD path; also the production
/// route for n > 400. Deterministically seeded.
inline double resolvent_norm_inverse_iteration(const DiscreteGenerator& g, double lambda,
                                               int max_iters = 600, double tol = 1e-12) {
    const SparseMat L = detail::cholesky_lower(g.M);
    detail::ComplexShiftOp op(g.A, L, lambda);
    if (op.singular)
        throw NumericallySingular("resolvent_norm: factorization of (i lambda I - A) failed "
                                  "at lambda = " + std::to_string(lambda));

    const Eigen::Index m = g.A.rows();
    std::mt19937_64 rng(0x5eedULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double best = 0.0;
    for (int restart = 0; restart < 2; ++restart) {
        VectorC x(m);
        for (Eigen::Index i = 0; i < m; ++i) x[i] = Complex(gauss(rng), gauss(rng));
        x /= x.norm();
        double sigma_sq = 0.0, prev = 0.0;
        for (int it = 0; it < max_iters; ++it) {
            VectorC y = op.apply_inv(x);
            x = op.apply_inv_adjoint(y);
            sigma_sq = x.norm(); // = ||(W^-1)^H W^-1 x|| -> sigma_max(W^-1)^2
            x /= sigma_sq;
            if (it > 0 && std::abs(sigma_sq - prev) <= tol * sigma_sq) break;
            prev = sigma_sq;
        }
        best = std::max(best, std::sqrt(sigma_sq));
    }
    return best;
}

/// M-operator norm of (i lambda I - A)^{-1}; route picked by problem size.
inline double resolvent_norm(const DiscreteGenerator& g, double lambda) {
    if (g.grid.n <= kDenseThreshold) return resolvent_norm_svd(g, lambda);
    return resolvent_norm_inverse_iteration(g, lambda);
}

/// Sweeps the resolvent norm over an increasing grid of positive lambda.
/// Numerically singular points are recorded as +inf and never enter fits;
/// points beyond the resolution limit are kept but flagged.
inline ResolventProfile resolvent_sweep(const DiscreteGenerator& g,
                                        const std::vector<double>& lambdas) {
    if (lambdas.empty()) throw EmptyGrid("resolvent_sweep: no lambda values");
    for (size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] > 0.0))
            throw BadParameters("resolvent_sweep: lambda values must be positive");
        if (i > 0 && !(lambdas[i] > lambdas[i - 1]))
            throw BadParameters("resolvent_sweep: lambda values must be strictly increasing");
    }

    ResolventProfile profile;
    profile.resolution_limit = resolution_limit(g);
    for (double lam : lambdas) {
        ResolventProfile::Point p{lam, 0.0, ResolventProfile::Flag::ok};
        if (lam > profile.resolution_limit) p.flag = ResolventProfile::Flag::beyond_limit;
        try {
            p.norm = resolvent_norm(g, lam);
        } catch (const NumericallySingular&) {
            p.norm = std::numeric_limits<double>::infinity();
            p.flag = ResolventProfile::Flag::singular;
        }
        profile.points.push_back(p);
    }
    profile.fit_lo = lambdas.front();
    profile.fit_hi = std::min(lambdas.back(), profile.resolution_limit);
    return profile;
}

/// Fits the growth exponent ell in ||(i lambda - A)^{-1}|| ~ lambda^ell.
/// The fit ordinate is the running maximum of the norm over the grid: an
/// increasing envelope matching the limsup character of the growth bound,
/// robust to the oscillation of resolvent norms between eigenvalue shadows.
inline double fit_resolvent_exponent(const ResolventProfile& profile) {
    std::vector<double> lt, ln;
    double env = 0.0;
    for (const auto& p : profile.points) {
        if (p.flag != ResolventProfile::Flag::ok) continue;
        if (p.lambda < profile.fit_lo || p.lambda > profile.fit_hi) continue;
        if (!std::isfinite(p.norm)) continue;
        env = std::max(env, p.norm);
        lt.push_back(std::log(p.lambda));
        ln.push_back(std::log(env));
    }
    if (lt.size() < 10 || std::exp(lt.back() - lt.front()) < 10.0 * (1.0 - 1e-9))
        throw InsufficientSpan("fit_resolvent_exponent: need >= 10 finite points spanning "
                               ">= 1 decade inside the trusted window");

    const double m = static_cast<double>(lt.size());
    double st = 0, se = 0, stt = 0, ste = 0;
    for (size_t i = 0; i < lt.size(); ++i) {
        st += lt[i];
        se += ln[i];
        stt += lt[i] * lt[i];
        ste += lt[i] * ln[i];
    }
    return (m * ste - st * se) / (m * stt - st * st);
}

/// Log-spaced lambda grid, endpoints included.
inline std::vector<double> log_spaced(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi > lo) || count < 2)
        throw BadParameters("log_spaced: need 0 < lo < hi and count >= 2");
    std::vector<double> out(count);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < count; ++i)
        out[i] = std::exp(llo + (lhi - llo) * i / (count - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

} // namespace kvwave
