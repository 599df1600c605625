// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <fstream>
#include <string>

#include "kvwave/errors.hpp"
#include "kvwave/evolve.hpp"
#include "kvwave/spectra.hpp"

namespace kvwave {

/// Shortest round-trip decimal form (17 significant digits, '.' separator).
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {
inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary); // binary: byte-identical across runs
    if (!out) throw Error("cannot open output file: " + path);
    return out;
}
} // namespace detail

inline void write_energy_csv(const EnergyTrace& trace, const std::string& path) {
    auto out = detail::open_out(path);
    out << "t,E,dE\n";
    for (const auto& s : trace.samples)
        out << format_number(s.t) << ',' << format_number(s.E) << ','
            << format_number(s.dE) << '\n';
}

inline void write_spectrum_csv(const SpectrumReport& report, const std::string& path) {
    auto out = detail::open_out(path);
    out << "re,im\n";
    for (const auto& ev : report.eigenvalues)
        out << format_number(ev.real()) << ',' << format_number(ev.imag()) << '\n';
}

inline void write_resolvent_csv(const ResolventProfile& profile, const std::string& path) {
    auto out = detail::open_out(path);
    out << "lambda,norm,flag\n";
    for (const auto& p : profile.points) {
        const char* flag = p.flag == ResolventProfile::Flag::ok          ? "ok"
                           : p.flag == ResolventProfile::Flag::singular ? "singular"
                                                                        : "beyond_limit";
        out << format_number(p.lambda) << ',' << format_number(p.norm) << ',' << flag << '\n';
    }
}

inline void write_decay_fit(const DecayFit& fit, const std::string& path) {
    auto out = detail::open_out(path);
    out << "alpha = " << format_number(fit.alpha) << '\n'
        << "intercept = " << format_number(fit.intercept) << '\n'
        << "residual = " << format_number(fit.residual) << '\n'
        << "window = [" << format_number(fit.t_lo) << ", " << format_number(fit.t_hi) << "]\n"
        << "domain_norm_sq = " << format_number(fit.domain_norm_sq) << '\n';
}

} // namespace kvwave
