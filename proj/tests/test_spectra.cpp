// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "kvwave/discretize.hpp"
#include "kvwave/spectra.hpp"

using namespace kvwave;

namespace {

SystemConfig c1ref() {
    SystemConfig cfg;
    cfg.profile_b = {1.0, 0.1, 0.2};
    cfg.profile_c = {2.0, 0.4, 0.6};
    cfg.profile_d = {1.0, 0.7, 0.9};
    cfg.case_label = CaseLabel::C1;
    return validate_config(cfg);
}

SystemConfig c3ref() {
    SystemConfig cfg;
    cfg.profile_b = {1.0, 0.1, 0.2};
    cfg.profile_c = {2.0, 0.4, 0.6};
    cfg.case_label = CaseLabel::C3;
    return validate_config(cfg);
}

SystemConfig skew_config() { // b = c = d = 0
    SystemConfig cfg;
    cfg.case_label = CaseLabel::C1;
    return validate_config(cfg);
}

std::vector<double> closed_form_frequencies(int n, double h, double a) {
    std::vector<double> w(n);
    for (int k = 1; k <= n; ++k)
        w[k - 1] = std::sqrt(a) * (2.0 / h) * std::sin(k * M_PI * h / 2.0);
    return w;
}

// Resolvent norm at lambda = Im of every near-axis eigenvalue in
// [2, 0.15 sqrt(a) / h]: the peak-resolved frequency response.
ResolventProfile peak_profile(const DiscreteGenerator& g) {
    const SpectrumReport rep = eigenvalues(g);
    const double lim = 0.5 * resolution_limit(g);
    std::vector<double> lams;
    for (const auto& ev : rep.eigenvalues) {
        if (ev.imag() < 2.0 || ev.imag() > lim) continue;
        if (!lams.empty() && ev.imag() <= lams.back() * (1.0 + 1e-9)) continue;
        lams.push_back(ev.imag());
    }
    return resolvent_sweep(g, lams);
}

} // namespace

TEST_CASE("reference C1 spectrum is strictly stable at n = 100") {
    const SystemConfig cfg = c1ref();
    const auto g = assemble_generator(cfg, build_grid(cfg, 100));
    const SpectrumReport rep = eigenvalues(g);
    REQUIRE(rep.eigenvalues.size() == 400);
    CHECK(rep.max_real_part < -1e-12);
    CHECK(rep.on_axis_count == 0);

    // resolvent stays finite at the heights of the 10 least-damped modes
    std::vector<std::complex<double>> sorted(rep.eigenvalues);
    std::sort(sorted.begin(), sorted.end(),
              [](auto a, auto b) { return a.real() > b.real(); });
    int checked = 0;
    for (const auto& ev : sorted) {
        if (checked == 10) break;
        if (ev.imag() <= 0.0) continue;
        const double norm = resolvent_norm(g, ev.imag());
        CHECK(std::isfinite(norm));
        CHECK(norm > 0.0);
        ++checked;
    }
    CHECK(checked == 10);
}

TEST_CASE("spectra are closed under conjugation") {
    const SystemConfig cfg = c1ref();
    const auto g = assemble_generator(cfg, build_grid(cfg, 40));
    const SpectrumReport rep = eigenvalues(g);
    // pair each eigenvalue with its conjugate: the multiset is invariant
    std::vector<std::complex<double>> conj(rep.eigenvalues);
    for (auto& ev : conj) ev = std::conj(ev);
    std::sort(conj.begin(), conj.end(), [](auto a, auto b) {
        if (a.imag() != b.imag()) return a.imag() < b.imag();
        return a.real() < b.real();
    });
    for (size_t i = 0; i < conj.size(); ++i)
        CHECK(std::abs(conj[i] - rep.eigenvalues[i]) < 1e-9);
}

TEST_CASE("spectral dissipativity holds across cases and resolutions") {
    for (const SystemConfig& cfg : {c1ref(), c3ref(), skew_config()}) {
        for (int n : {33, 64}) {
            const auto g = assemble_generator(cfg, build_grid(cfg, n));
            CHECK(eigenvalues(g).max_real_part <= 1e-10);
        }
    }
}

TEST_CASE("dense eigensolves refuse oversized problems") {
    const SystemConfig cfg = c1ref();
    const auto g = assemble_generator(cfg, build_grid(cfg, 401));
    CHECK_THROWS_AS(eigenvalues(g), TooLargeForDense);
}

TEST_CASE("resolvent norm at lambda = 0 is finite (the generator is invertible)") {
    for (const SystemConfig& cfg : {c1ref(), c3ref()}) {
        const auto g = assemble_generator(cfg, build_grid(cfg, 80));
        const double r = resolvent_norm(g, 0.0);
        CHECK(std::isfinite(r));
        CHECK(r > 0.0);
    }
}

TEST_CASE("skew case: resolvent norm is the reciprocal distance to the spectrum") {
    const SystemConfig cfg = skew_config();
    const auto g = assemble_generator(cfg, build_grid(cfg, 40));
    const auto w = closed_form_frequencies(40, g.grid.h, 1.0);
    for (double lambda : {0.5, 1.7, 4.4, 9.0, 25.0}) {
        // spectrum is {+-i w_k}; distance from i*lambda reduces to |lambda -+ w_k|
        double dist = std::numeric_limits<double>::infinity();
        for (double wk : w) {
            dist = std::min(dist, std::abs(lambda - wk));
            dist = std::min(dist, std::abs(lambda + wk));
        }
        const double r = resolvent_norm(g, lambda);
        CHECK(r * dist == Catch::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("M-skew case with coupling: normal-operator identity from computed spectrum") {
    SystemConfig cfg;
    cfg.profile_c = {2.0, 0.4, 0.6};
    cfg.case_label = CaseLabel::C3;
    cfg = validate_config(cfg);
    const auto g = assemble_generator(cfg, build_grid(cfg, 40));
    const SpectrumReport rep = eigenvalues(g);
    for (double lambda : {1.3, 5.2, 11.0}) {
        double dist = std::numeric_limits<double>::infinity();
        for (const auto& ev : rep.eigenvalues)
            dist = std::min(dist, std::abs(std::complex<double>(0.0, lambda) - ev));
        const double r = resolvent_norm(g, lambda);
        CHECK(r * dist == Catch::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("dense SVD and inverse iteration agree") {
    const SystemConfig cfg = c1ref();
    const auto g = assemble_generator(cfg, build_grid(cfg, 200));
    const double dense = resolvent_norm_svd(g, 20.0);
    const double iterative = resolvent_norm_inverse_iteration(g, 20.0);
    CHECK(std::abs(dense - iterative) <= 1e-6 * dense);
}

TEST_CASE("weighted norm equals brute-force maximization over random states") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 3; ++trial) {
        const int m = 24 + 8 * trial; // <= 40
        Eigen::MatrixXd R(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) R(i, j) = gauss(rng);
        const Eigen::MatrixXd Md = R * R.transpose() + m * Eigen::MatrixXd::Identity(m, m);
        Eigen::MatrixXd Ad(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) Ad(i, j) = 2.0 * gauss(rng);

        const SparseMat Ms = Md.sparseView();
        const SparseMat As = Ad.sparseView();
        const SparseMat L = detail::cholesky_lower(Ms);
        const double anorm = Ad.operatorNorm();

        for (double factor : {3.0, 30.0}) {
            const double lambda = factor * anorm;
            const MatrixC W = detail::weighted_shifted_dense(As, L, lambda);
            const auto [smin, smax] = detail::extreme_singular_values(W);
            const double exact = 1.0 / smin;

            const MatrixC resolvent =
                (Complex(0, lambda) * MatrixC::Identity(m, m) - Ad.cast<Complex>())
                    .partialPivLu()
                    .inverse();
            double brute = 0.0;
            for (int k = 0; k < 10000; ++k) {
                VectorC x(m);
                for (int i = 0; i < m; ++i) x[i] = Complex(gauss(rng), gauss(rng));
                const VectorC y = resolvent * x;
                const double num = std::sqrt(std::real(y.dot(Md * y)));
                const double den = std::sqrt(std::real(x.dot(Md * x)));
                brute = std::max(brute, num / den);
            }
            CHECK(exact >= brute * (1.0 - 1e-10)); // SVD dominates every sample
            if (factor == 30.0)                    // concentrated regime: tight to 2%
                CHECK((exact - brute) / exact < 0.02);
        }
    }
}

TEST_CASE("resolvent_sweep") {
    const SystemConfig cfg = c1ref();
    const auto g = assemble_generator(cfg, build_grid(cfg, 60));

    SECTION("singleton sweep matches the pointwise norm") {
        const ResolventProfile p = resolvent_sweep(g, {7.5});
        REQUIRE(p.points.size() == 1);
        CHECK(p.points[0].norm == Catch::Approx(resolvent_norm(g, 7.5)).epsilon(1e-12));
        CHECK(p.points[0].flag == ResolventProfile::Flag::ok);
    }
    SECTION("points beyond the resolution limit are flagged") {
        const double lim = resolution_limit(g);
        const ResolventProfile p = resolvent_sweep(g, {lim * 0.5, lim * 1.5});
        CHECK(p.points[0].flag == ResolventProfile::Flag::ok);
        CHECK(p.points[1].flag == ResolventProfile::Flag::beyond_limit);
    }
    SECTION("input validation") {
        CHECK_THROWS_AS(resolvent_sweep(g, {}), EmptyGrid);
        CHECK_THROWS_AS(resolvent_sweep(g, {2.0, 1.0}), BadParameters);
        CHECK_THROWS_AS(resolvent_sweep(g, {-1.0, 1.0}), BadParameters);
    }
    SECTION("an exact skew eigenvalue is flagged singular, not fatal") {
        const SystemConfig undamped = skew_config();
        const auto gu = assemble_generator(undamped, build_grid(undamped, 40));
        const double w1 = closed_form_frequencies(40, gu.grid.h, 1.0)[0];
        const ResolventProfile p = resolvent_sweep(gu, {w1});
        REQUIRE(p.points.size() == 1);
        const bool singular_or_huge =
            p.points[0].flag == ResolventProfile::Flag::singular || p.points[0].norm > 1e10;
        CHECK(singular_or_huge);
    }
}

TEST_CASE("fit_resolvent_exponent") {
    auto synthetic = [](int count, double lo, double hi, auto fn) {
        ResolventProfile p;
        p.resolution_limit = std::numeric_limits<double>::infinity();
        p.fit_lo = lo;
        p.fit_hi = hi;
        const double llo = std::log(lo), lhi = std::log(hi);
        for (int i = 0; i < count; ++i) {
            const double lam = std::exp(llo + (lhi - llo) * i / (count - 1));
            p.points.push_back({lam, fn(lam), ResolventProfile::Flag::ok});
        }
        return p;
    };
    SECTION("quadratic growth") {
        const auto p = synthetic(40, 1.0, 100.0, [](double l) { return l * l; });
        CHECK(fit_resolvent_exponent(p) == Catch::Approx(2.0).epsilon(1e-10));
    }
    SECTION("bounded norms give exponent zero") {
        const auto p = synthetic(40, 1.0, 100.0, [](double) { return 3.7; });
        CHECK(fit_resolvent_exponent(p) == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("oscillating square-root growth fits through the envelope") {
        const auto p = synthetic(80, 1.0, 1e4, [](double l) {
            return std::sqrt(l) * (2.0 + std::cos(std::log(l)));
        });
        const double ell = fit_resolvent_exponent(p);
        CHECK(std::abs(ell - 0.5) <= 0.15);
    }
    SECTION("insufficient span") {
        const auto few = synthetic(9, 1.0, 100.0, [](double l) { return l; });
        CHECK_THROWS_AS(fit_resolvent_exponent(few), InsufficientSpan);
        const auto narrow = synthetic(40, 1.0, 9.0, [](double l) { return l; });
        CHECK_THROWS_AS(fit_resolvent_exponent(narrow), InsufficientSpan);
    }
}

TEST_CASE("frequency response orders the damped and undamped-second-wave cases") {
    // Desk-scale shadow of the growth-exponent ordering: the peak-resolved
    // response of the C3 system dwarfs the fully damped C1 response.
    const auto g1 = assemble_generator(c1ref(), build_grid(c1ref(), 150));
    const auto g3 = assemble_generator(c3ref(), build_grid(c3ref(), 150));
    const ResolventProfile p1 = peak_profile(g1);
    const ResolventProfile p3 = peak_profile(g3);
    double max1 = 0.0, max3 = 0.0;
    for (const auto& p : p1.points)
        if (std::isfinite(p.norm)) max1 = std::max(max1, p.norm);
    for (const auto& p : p3.points)
        if (std::isfinite(p.norm)) max3 = std::max(max3, p.norm);
    CHECK(max3 > 5.0 * max1);
}
