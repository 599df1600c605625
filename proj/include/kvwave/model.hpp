// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "kvwave/errors.hpp"

namespace kvwave {

/// Piecewise-constant coefficient value * indicator((left,right)) on [0,L].
///
/// A profile with value == 0 is the zero profile; its interval is ignored.
/// The indicator is open: eval_coefficient returns 0 at x == left and
/// x == right. Operators sample coefficients at staggered midpoints only,
/// so the endpoint convention never reaches an assembled matrix.
struct CoefficientProfile {
    double value = 0.0;
    double left = 0.0;
    double right = 0.0;

    bool is_zero() const { return value == 0.0; }
};

/// Support-geometry cases for the damping/coupling coefficients.
///
/// C1: damping b, then coupling c, then damping d (disjoint, ordered).
/// C2: damping b, then damping d, then coupling c.
/// C3: damping b, then coupling c; the second equation is undamped (d = 0).
enum class CaseLabel { C1, C2, C3 };

inline const char* to_string(CaseLabel c) {
    switch (c) {
        case CaseLabel::C1: return "C1";
        case CaseLabel::C2: return "C2";
        case CaseLabel::C3: return "C3";
    }
    return "?";
}

/// One problem instance of the coupled wave system on (0, length):
///
///   u_tt = (a u_x + b u_tx)_x - c y_t
///   y_tt = (y_x + d y_tx)_x + c u_t
///
/// with homogeneous Dirichlet conditions on both components.
struct SystemConfig {
    double length = 1.0;        ///< domain length L
    double wave_speed_sq = 1.0; ///< coefficient a of u_xx
    CoefficientProfile profile_b; ///< Kelvin-Voigt damping on the first wave
    CoefficientProfile profile_c; ///< coupling between the two waves
    CoefficientProfile profile_d; ///< Kelvin-Voigt damping on the second wave
    CaseLabel case_label = CaseLabel::C1;
};

/// Result of the smallness check on the coupling amplitude.
struct SscReport {
    CaseLabel case_label = CaseLabel::C1;
    double threshold = 0.0; ///< admissible bound on |c0| (+inf for C2)
    double actual = 0.0;    ///< |c0|
    bool satisfied = false; ///< actual < threshold
    double margin = 0.0;    ///< threshold - actual
};

/// Indicator-profile evaluation; open interval, zero profile everywhere 0.
inline double eval_coefficient(const CoefficientProfile& p, double x, double length) {
    if (!(x >= 0.0 && x <= length))
        throw OutOfDomain("eval_coefficient: x = " + std::to_string(x) +
                          " outside [0, " + std::to_string(length) + "]");
    if (p.is_zero()) return 0.0;
    return (p.left < x && x < p.right) ? p.value : 0.0;
}

namespace detail {

inline void check_profile_interval(const CoefficientProfile& p, const char* name,
                                   double length) {
    if (p.is_zero()) return;
    if (p.left < 0.0 || p.right > length)
        throw OutOfDomain(std::string("profile ") + name + ": support [" +
                          std::to_string(p.left) + ", " + std::to_string(p.right) +
                          "] not contained in [0, " + std::to_string(length) + "]");
    if (!(p.left < p.right))
        throw IntervalOrderViolation(std::string("profile ") + name +
                                     ": requires left < right, got left = " +
                                     std::to_string(p.left) + ", right = " +
                                     std::to_string(p.right));
}

// Enforces 0 < p1 < p2 < ... < L over the nonzero profiles, in case order.
// Ordering checks are strict; configs are user inputs, not computed values.
inline void check_chain(const CoefficientProfile* const profiles[],
                        const char* const names[], int count, double length) {
    double lower = 0.0;
    const char* lower_name = "0";
    for (int i = 0; i < count; ++i) {
        const CoefficientProfile& p = *profiles[i];
        if (p.is_zero()) continue;
        if (!(lower < p.left))
            throw IntervalOrderViolation(std::string("case ordering requires ") +
                                         lower_name + " < " + names[i] + "1 (" +
                                         std::to_string(lower) + " vs " +
                                         std::to_string(p.left) + ")");
        lower = p.right;
        lower_name = names[i];
    }
    if (!(lower < length))
        throw IntervalOrderViolation(std::string("case ordering requires ") +
                                     lower_name + "2 < L (" + std::to_string(lower) +
                                     " vs " + std::to_string(length) + ")");
}

} // namespace detail

/// Validates a SystemConfig against the geometry of its case label and
/// returns it unchanged. Zero profiles are treated as absent and skip the
/// ordering chain; this admits degenerate (e.g. fully undamped) instances,
/// which the spectral tools use as negative controls.
inline SystemConfig validate_config(const SystemConfig& cfg) {
    if (!(cfg.length > 0.0))
        throw BadParameters("length must be positive");
    if (!(cfg.wave_speed_sq > 0.0))
        throw BadParameters("wave_speed_sq must be positive");

    if (cfg.profile_b.value < 0.0)
        throw NegativeDamping("damping profile b has negative value " +
                              std::to_string(cfg.profile_b.value));
    if (cfg.profile_d.value < 0.0)
        throw NegativeDamping("damping profile d has negative value " +
                              std::to_string(cfg.profile_d.value));
    // A coupling profile with declared support but zero amplitude is a
    // config mistake, not a zero profile.
    if (cfg.profile_c.is_zero() && cfg.profile_c.left < cfg.profile_c.right)
        throw ZeroCoupling("coupling profile declares support [" +
                           std::to_string(cfg.profile_c.left) + ", " +
                           std::to_string(cfg.profile_c.right) +
                           "] but has zero amplitude");

    detail::check_profile_interval(cfg.profile_b, "b", cfg.length);
    detail::check_profile_interval(cfg.profile_c, "c", cfg.length);
    detail::check_profile_interval(cfg.profile_d, "d", cfg.length);

    const CoefficientProfile* chain_c1[] = {&cfg.profile_b, &cfg.profile_c, &cfg.profile_d};
    const char* names_c1[] = {"b", "c", "d"};
    const CoefficientProfile* chain_c2[] = {&cfg.profile_b, &cfg.profile_d, &cfg.profile_c};
    const char* names_c2[] = {"b", "d", "c"};

    switch (cfg.case_label) {
        case CaseLabel::C1:
            detail::check_chain(chain_c1, names_c1, 3, cfg.length);
            break;
        case CaseLabel::C2:
            detail::check_chain(chain_c2, names_c2, 3, cfg.length);
            break;
        case CaseLabel::C3:
            if (!cfg.profile_d.is_zero())
                throw IntervalOrderViolation("case C3 requires the d profile to be zero");
            detail::check_chain(chain_c1, names_c1, 2, cfg.length);
            break;
    }
    return cfg;
}

/// Evaluates the strong-stability smallness condition on |c0|.
///
///   C1: |c0| < min(sqrt(a), 1) / (c2 - c1)
///   C2: no condition (threshold +inf)
///   C3: requires a = 1, |c0| < 1 / (c2 - c1)
inline SscReport check_ssc(const SystemConfig& cfg) {
    SscReport r;
    r.case_label = cfg.case_label;
    r.actual = std::abs(cfg.profile_c.value);

    const double inf = std::numeric_limits<double>::infinity();
    switch (cfg.case_label) {
        case CaseLabel::C1: {
            const double width = cfg.profile_c.right - cfg.profile_c.left;
            r.threshold = width > 0.0
                              ? std::min(std::sqrt(cfg.wave_speed_sq), 1.0) / width
                              : inf;
            break;
        }
        case CaseLabel::C2:
            r.threshold = inf;
            break;
        case CaseLabel::C3: {
            if (cfg.wave_speed_sq != 1.0)
                throw SscInapplicable("the C3 smallness condition fixes a = 1; got a = " +
                                      std::to_string(cfg.wave_speed_sq));
            const double width = cfg.profile_c.right - cfg.profile_c.left;
            r.threshold = width > 0.0 ? 1.0 / width : inf;
            break;
        }
    }
    r.satisfied = r.actual < r.threshold;
    r.margin = r.threshold - r.actual;
    return r;
}

} // namespace kvwave
