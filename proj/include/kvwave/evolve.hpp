// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kvwave/discretize.hpp"
#include "kvwave/errors.hpp"

namespace kvwave {

/// Sampled run of the semigroup: strictly increasing times t, energies E,
/// and dE, the exact per-step dissipation rate at the Crank-Nicolson
/// midpoint state of the step ending at t (instantaneous rate at t = 0).
/// With sample_every = 1 the rows satisfy E_k - E_{k-1} = dt * dE_k up to
/// roundoff on the energy scale.
struct EnergyTrace {
    struct Sample {
        double t;
        double E;
        double dE;
    };
    std::vector<Sample> samples;
    std::string cfg_digest;      ///< run description: case, n, dt, T, sampling
    double dt = 0.0;
    double domain_norm_sq = 0.0; ///< ||U0||_M^2 + ||A U0||_M^2
};

/// Result of a log-log least-squares fit of the energy tail.
struct DecayFit {
    double alpha = 0.0;     ///< fitted exponent in E ~ t^(-alpha)
    double intercept = 0.0; ///< natural-log intercept
    double t_lo = 0.0;
    double t_hi = 0.0;
    double residual = 0.0;  ///< RMS of log E about the fit line
    double domain_norm_sq = 0.0;
};

/// One Crank-Nicolson (implicit midpoint) step:
///
///   (I - dt/2 A) s' = (I + dt/2 A) s.
///
/// The scheme is A-stable and reproduces the quadratic energy balance of
/// the generator exactly, so energies are non-increasing for every dt > 0.
/// The left-hand factorization is computed once per (generator, dt) pair.
class CnStepper {
  public:
    CnStepper(const DiscreteGenerator& g, double dt) : gen_(&g), dt_(dt) {
        if (!(dt != 0.0) || !std::isfinite(dt))
            throw BadParameters("CnStepper: dt must be nonzero and finite");
        const Eigen::Index m = g.A.rows();
        SparseMat identity(m, m);
        identity.setIdentity();
        SparseMat lhs = identity - (dt / 2.0) * g.A;
        rhs_ = identity + (dt / 2.0) * g.A;
        solver_.compute(lhs);
        if (solver_.info() != Eigen::Success)
            throw SingularSystem("CnStepper: (I - dt/2 A) factorization failed; "
                                 "the assembled generator cannot be dissipative");
    }

    double dt() const { return dt_; }

    StateVector step(const StateVector& s) const {
        detail::require_conformal(*gen_, s, "cn_step");
        StateVector out(s.n);
        out.data = solver_.solve(rhs_ * s.data);
        if (solver_.info() != Eigen::Success)
            throw SingularSystem("cn_step: solve failed");
        return out;
    }

  private:
    const DiscreteGenerator* gen_;
    double dt_;
    SparseMat rhs_;
    Eigen::SparseLU<SparseMat> solver_;
};

/// Convenience wrapper when only a handful of steps are needed.
inline StateVector cn_step(const DiscreteGenerator& g, const StateVector& s, double dt) {
    return CnStepper(g, dt).step(s);
}

struct SimulationResult {
    EnergyTrace trace;
    StateVector final_state;
};

/// Integrates U' = A U from s0 over [0, T], sampling every sample_every
/// steps (the t = 0 row and the last step are always recorded).
inline SimulationResult simulate(const DiscreteGenerator& g, const StateVector& s0,
                                 double dt, double T, int sample_every = 1) {
    if (!(T > 0.0)) throw BadParameters("simulate: T must be positive");
    if (!(dt > 0.0)) throw BadParameters("simulate: dt must be positive");
    if (sample_every < 1) throw BadParameters("simulate: sample_every must be >= 1");
    detail::require_conformal(g, s0, "simulate");
    if (!s0.all_finite()) throw NonFiniteState("simulate: initial state is not finite");

    const long nsteps = std::lround(T / dt);
    if (nsteps < 1) throw BadParameters("simulate: T shorter than one step");

    CnStepper stepper(g, dt);

    SimulationResult result;
    EnergyTrace& trace = result.trace;
    trace.dt = dt;
    {
        const StateVector as = apply_generator(g, s0);
        const double n0 = state_norm(g, s0);
        const double na = state_norm(g, as);
        trace.domain_norm_sq = n0 * n0 + na * na;
    }
    {
        std::ostringstream digest;
        digest << "case=" << to_string(g.cfg.case_label) << " n=" << g.grid.n
               << " dt=" << dt << " T=" << T << " sample_every=" << sample_every;
        trace.cfg_digest = digest.str();
    }

    StateVector s = s0;
    trace.samples.push_back({0.0, energy(g, s), dissipation_rate(g, s)});
    for (long k = 1; k <= nsteps; ++k) {
        StateVector next = stepper.step(s);
        if (k % sample_every == 0 || k == nsteps) {
            if (!next.all_finite())
                throw NonFiniteState("simulate: state became non-finite at step " +
                                     std::to_string(k));
            StateVector mid(s.n);
            mid.data = 0.5 * (s.data + next.data);
            trace.samples.push_back({k * dt, energy(g, next), dissipation_rate(g, mid)});
        }
        s = std::move(next);
    }
    result.final_state = std::move(s);
    return result;
}

/// Fits E ~ t^(-alpha) on the tail window [window_fraction * T, T] of the
/// trace by least squares in log-log coordinates.
inline DecayFit fit_decay_exponent(const EnergyTrace& trace, double window_fraction) {
    if (!(window_fraction > 0.0 && window_fraction < 1.0))
        throw BadParameters("fit_decay_exponent: window_fraction must lie in (0, 1)");
    if (trace.samples.size() < 3)
        throw WindowTooShort("fit_decay_exponent: trace has fewer than 3 samples");

    double t_first = 0.0;
    for (const auto& s : trace.samples)
        if (s.t > 0.0) { t_first = s.t; break; }
    const double t_last = trace.samples.back().t;
    if (t_first <= 0.0 || t_last / t_first < 100.0 * (1.0 - 1e-9))
        throw WindowTooShort("fit_decay_exponent: trace spans fewer than two decades of t");

    const double t_lo = window_fraction * t_last;
    std::vector<double> lt, le;
    for (const auto& s : trace.samples) {
        if (s.t < t_lo || s.t <= 0.0) continue;
        if (!(s.E > 0.0))
            throw NonPositiveEnergy("fit_decay_exponent: E(t) <= 0 at t = " +
                                    std::to_string(s.t));
        lt.push_back(std::log(s.t));
        le.push_back(std::log(s.E));
    }
    if (lt.size() < 5)
        throw WindowTooShort("fit_decay_exponent: fewer than 5 samples in the fit window");

    const double m = static_cast<double>(lt.size());
    double st = 0, se = 0, stt = 0, ste = 0;
    for (size_t i = 0; i < lt.size(); ++i) {
        st += lt[i];
        se += le[i];
        stt += lt[i] * lt[i];
        ste += lt[i] * le[i];
    }
    const double denom = m * stt - st * st;
    if (denom == 0.0) throw WindowTooShort("fit_decay_exponent: degenerate fit window");
    const double slope = (m * ste - st * se) / denom;
    const double intercept = (se - slope * st) / m;

    double ss = 0.0;
    for (size_t i = 0; i < lt.size(); ++i) {
        const double r = le[i] - (intercept + slope * lt[i]);
        ss += r * r;
    }

    DecayFit fit;
    fit.alpha = -slope;
    fit.intercept = intercept;
    fit.t_lo = t_lo;
    fit.t_hi = t_last;
    fit.residual = std::sqrt(ss / m);
    fit.domain_norm_sq = trace.domain_norm_sq;
    return fit;
}

/// Initial-data recipes. Sine modes and the Gaussian bump produce smooth
/// discrete data whose graph norm ||U0||_M^2 + ||A U0||_M^2 stays bounded
/// under refinement, mimicking U0 in the generator domain.
struct InitialData {
    enum class Kind { SineMode, Gaussian, File };
    Kind kind = Kind::SineMode;
    int k_u = 1;             ///< sine mode for the u block (0 = zero block)
    int k_y = 0;             ///< sine mode for the y block (0 = zero block)
    double center = 0.5;     ///< Gaussian center
    double width = 0.1;      ///< Gaussian width: exp(-((x-c)/w)^2)
    std::string path;        ///< CSV path for Kind::File
};

/// Builds initial data of the requested kind, normalized to ||U0||_M = 1.
inline StateVector make_initial_data(const DiscreteGenerator& g, const InitialData& init) {
    const int n = g.grid.n;
    StateVector s(n);

    switch (init.kind) {
        case InitialData::Kind::SineMode: {
            if (init.k_u < 0 || init.k_u > n || init.k_y < 0 || init.k_y > n)
                throw BadParameters("make_initial_data: sine modes must satisfy 0 <= k <= n");
            if (init.k_u == 0 && init.k_y == 0)
                throw BadParameters("make_initial_data: at least one sine mode required");
            for (int j = 0; j < n; ++j) {
                const double x = g.grid.nodes[j];
                if (init.k_u > 0) s.u()[j] = std::sin(init.k_u * M_PI * x / g.cfg.length);
                if (init.k_y > 0) s.y()[j] = std::sin(init.k_y * M_PI * x / g.cfg.length);
            }
            break;
        }
        case InitialData::Kind::Gaussian: {
            if (!(init.width > 0.0))
                throw BadParameters("make_initial_data: gaussian width must be positive");
            if (!(init.center > 0.0 && init.center < g.cfg.length))
                throw BadParameters("make_initial_data: gaussian center must lie in (0, L)");
            for (int j = 0; j < n; ++j) {
                const double r = (g.grid.nodes[j] - init.center) / init.width;
                s.u()[j] = std::exp(-r * r);
            }
            break;
        }
        case InitialData::Kind::File: {
            std::ifstream in(init.path);
            if (!in)
                throw BadParameters("make_initial_data: cannot open " + init.path);
            std::string line;
            if (!std::getline(in, line) || line.rfind("u,v,y,z", 0) != 0)
                throw BadParameters("make_initial_data: " + init.path +
                                    " must start with header u,v,y,z");
            int j = 0;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                if (j >= n)
                    throw BadParameters("make_initial_data: " + init.path +
                                        " has more rows than grid nodes");
                std::istringstream row(line);
                char comma;
                double uu, vv, yy, zz;
                if (!(row >> uu >> comma >> vv >> comma >> yy >> comma >> zz))
                    throw BadParameters("make_initial_data: malformed row in " + init.path);
                s.u()[j] = uu;
                s.v()[j] = vv;
                s.y()[j] = yy;
                s.z()[j] = zz;
                ++j;
            }
            if (j != n)
                throw BadParameters("make_initial_data: " + init.path + " has " +
                                    std::to_string(j) + " rows, grid needs " +
                                    std::to_string(n));
            break;
        }
    }

    const double norm = state_norm(g, s);
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw BadParameters("make_initial_data: data has zero or non-finite M-norm");
    s.data /= norm;
    return s;
}

} // namespace kvwave
