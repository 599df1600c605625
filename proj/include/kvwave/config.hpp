// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kvwave/errors.hpp"
#include "kvwave/evolve.hpp"
#include "kvwave/model.hpp"

namespace kvwave {

struct NumericsParams {
    int n = 100;
    double dt = 0.0; ///< 0 = auto: min(h, 0.02)
    double T = 100.0;
    int sample_every = 1;
    double window_fraction = 0.5;
};

struct ResolventParams {
    double lambda_lo = 1.0;
    double lambda_hi = 0.0; ///< 0 = auto: resolution limit of the grid
    int points = 40;
};

struct SweepParams {
    enum class Parameter { c0, b0, d0, n };
    enum class Metric { none, alpha, ell };
    Parameter parameter = Parameter::c0;
    Metric metric = Metric::none;
    std::vector<double> values;
};

struct OutputParams {
    std::string dir = ".";
};

/// Full experiment description parsed from an INI config file.
struct ExperimentConfig {
    SystemConfig system;
    NumericsParams numerics;
    ResolventParams resolvent;
    InitialData initial;
    OutputParams output;
    std::optional<SweepParams> sweep;
};

namespace detail {

struct IniValue {
    std::string text;
    int line = 0;
    mutable bool used = false;
};

struct IniSection {
    std::map<std::string, IniValue> entries;
    int line = 0;
};

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

inline std::map<std::string, IniSection> parse_ini(const std::string& text) {
    std::map<std::string, IniSection> sections;
    std::istringstream in(text);
    std::string line, current;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ParseError("line " + std::to_string(lineno) + ": unterminated section header");
            current = trim(t.substr(1, t.size() - 2));
            if (current.empty())
                throw ParseError("line " + std::to_string(lineno) + ": empty section name");
            if (sections.count(current))
                throw ParseError("line " + std::to_string(lineno) + ": duplicate section [" +
                                 current + "]");
            sections[current].line = lineno;
            continue;
        }
        const size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(lineno) + ": expected key = value");
        if (current.empty())
            throw ParseError("line " + std::to_string(lineno) + ": key outside any section");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ParseError("line " + std::to_string(lineno) + ": empty key");
        auto [it, inserted] = sections[current].entries.insert({key, {value, lineno, false}});
        if (!inserted)
            throw ParseError("line " + std::to_string(lineno) + ": duplicate key '" + key +
                             "' in section [" + current + "]");
    }
    return sections;
}

class SectionReader {
  public:
    SectionReader(const std::map<std::string, IniSection>& sections, const std::string& name)
        : name_(name) {
        auto it = sections.find(name);
        section_ = it == sections.end() ? nullptr : &it->second;
    }

    bool present() const { return section_ != nullptr; }

    std::optional<std::string> raw(const std::string& key) const {
        if (!section_) return std::nullopt;
        auto it = section_->entries.find(key);
        if (it == section_->entries.end()) return std::nullopt;
        it->second.used = true;
        return it->second.text;
    }

    double number(const std::string& key, double fallback) const {
        auto r = raw(key);
        if (!r) return fallback;
        try {
            size_t pos = 0;
            double v = std::stod(*r, &pos);
            if (pos != r->size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw ParseError("section [" + name_ + "], key '" + key + "': not a number: " + *r);
        }
    }

    int integer(const std::string& key, int fallback) const {
        const double v = number(key, fallback);
        if (v != static_cast<long long>(v))
            throw ParseError("section [" + name_ + "], key '" + key + "': not an integer");
        return static_cast<int>(v);
    }

    std::string text(const std::string& key, const std::string& fallback) const {
        auto r = raw(key);
        return r ? *r : fallback;
    }

    void check_all_used(const std::map<std::string, IniSection>& sections) const {
        if (!section_) return;
        for (const auto& [key, val] : section_->entries)
            if (!val.used)
                throw ParseError("line " + std::to_string(val.line) + ": unknown key '" + key +
                                 "' in section [" + name_ + "]");
        (void)sections;
    }

  private:
    std::string name_;
    const IniSection* section_ = nullptr;
};

inline CoefficientProfile parse_profile(const SectionReader& sec) {
    CoefficientProfile p;
    p.value = sec.number("value", 0.0);
    p.left = sec.number("left", 0.0);
    p.right = sec.number("right", 0.0);
    return p;
}

inline std::vector<double> parse_list(const std::string& text, const std::string& where) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw ParseError(where + ": not a number: " + item);
        }
    }
    if (out.empty()) throw ParseError(where + ": empty list");
    return out;
}

} // namespace detail

/// Parses an INI-style experiment config. Sections: [system] (required),
/// [damping_b] / [coupling_c] / [damping_d] (absent = zero profile),
/// [numerics], [resolvent], [initial], [output], [sweep]. Unknown sections
/// or keys are errors; system validation errors are forwarded.
inline ExperimentConfig parse_config(const std::string& text) {
    const auto sections = detail::parse_ini(text);

    static const std::set<std::string> known = {"system",   "damping_b", "coupling_c",
                                                "damping_d", "numerics",  "resolvent",
                                                "initial",  "output",    "sweep"};
    for (const auto& [name, sec] : sections)
        if (!known.count(name))
            throw ParseError("line " + std::to_string(sec.line) + ": unknown section [" +
                             name + "]");

    ExperimentConfig cfg;

    detail::SectionReader system(sections, "system");
    if (!system.present()) throw ParseError("missing required section [system]");
    cfg.system.length = system.number("length", 1.0);
    cfg.system.wave_speed_sq = system.number("wave_speed_sq", 1.0);
    {
        const std::string label = system.text("case", "");
        if (label == "C1") cfg.system.case_label = CaseLabel::C1;
        else if (label == "C2") cfg.system.case_label = CaseLabel::C2;
        else if (label == "C3") cfg.system.case_label = CaseLabel::C3;
        else throw ParseError("section [system]: case must be C1, C2 or C3; got '" + label + "'");
    }

    detail::SectionReader b(sections, "damping_b"), c(sections, "coupling_c"),
        d(sections, "damping_d");
    cfg.system.profile_b = detail::parse_profile(b);
    cfg.system.profile_c = detail::parse_profile(c);
    cfg.system.profile_d = detail::parse_profile(d);

    detail::SectionReader numerics(sections, "numerics");
    cfg.numerics.n = numerics.integer("n", cfg.numerics.n);
    cfg.numerics.dt = numerics.number("dt", cfg.numerics.dt);
    cfg.numerics.T = numerics.number("T", cfg.numerics.T);
    cfg.numerics.sample_every = numerics.integer("sample_every", cfg.numerics.sample_every);
    cfg.numerics.window_fraction = numerics.number("window_fraction", cfg.numerics.window_fraction);
    if (cfg.numerics.n < 2) throw ParseError("section [numerics]: n must be >= 2");
    if (cfg.numerics.dt < 0.0) throw ParseError("section [numerics]: dt must be positive (or omitted)");
    if (!(cfg.numerics.T > 0.0)) throw ParseError("section [numerics]: T must be positive");
    if (cfg.numerics.sample_every < 1)
        throw ParseError("section [numerics]: sample_every must be >= 1");
    if (!(cfg.numerics.window_fraction > 0.0 && cfg.numerics.window_fraction < 1.0))
        throw ParseError("section [numerics]: window_fraction must lie in (0, 1)");

    detail::SectionReader resolvent(sections, "resolvent");
    cfg.resolvent.lambda_lo = resolvent.number("lambda_lo", cfg.resolvent.lambda_lo);
    cfg.resolvent.lambda_hi = resolvent.number("lambda_hi", cfg.resolvent.lambda_hi);
    cfg.resolvent.points = resolvent.integer("points", cfg.resolvent.points);
    if (!(cfg.resolvent.lambda_lo > 0.0))
        throw ParseError("section [resolvent]: lambda_lo must be positive");
    if (cfg.resolvent.lambda_hi != 0.0 && cfg.resolvent.lambda_hi <= cfg.resolvent.lambda_lo)
        throw ParseError("section [resolvent]: lambda_hi must exceed lambda_lo");
    if (cfg.resolvent.points < 2) throw ParseError("section [resolvent]: points must be >= 2");

    detail::SectionReader initial(sections, "initial");
    {
        const std::string kind = initial.text("kind", "sine_mode");
        if (kind == "sine_mode") {
            cfg.initial.kind = InitialData::Kind::SineMode;
            cfg.initial.k_u = initial.integer("k_u", 1);
            cfg.initial.k_y = initial.integer("k_y", 0);
        } else if (kind == "gaussian") {
            cfg.initial.kind = InitialData::Kind::Gaussian;
            cfg.initial.center = initial.number("center", 0.5);
            cfg.initial.width = initial.number("width", 0.1);
        } else if (kind == "file") {
            cfg.initial.kind = InitialData::Kind::File;
            cfg.initial.path = initial.text("path", "");
            if (cfg.initial.path.empty())
                throw ParseError("section [initial]: kind=file requires a path");
        } else {
            throw ParseError("section [initial]: kind must be sine_mode, gaussian or file");
        }
    }

    detail::SectionReader output(sections, "output");
    cfg.output.dir = output.text("dir", cfg.output.dir);

    detail::SectionReader sweep(sections, "sweep");
    if (sweep.present()) {
        SweepParams sp;
        const std::string par = sweep.text("parameter", "");
        if (par == "c0") sp.parameter = SweepParams::Parameter::c0;
        else if (par == "b0") sp.parameter = SweepParams::Parameter::b0;
        else if (par == "d0") sp.parameter = SweepParams::Parameter::d0;
        else if (par == "n") sp.parameter = SweepParams::Parameter::n;
        else throw ParseError("section [sweep]: parameter must be c0, b0, d0 or n");
        sp.values = detail::parse_list(sweep.text("values", ""), "section [sweep], key 'values'");
        const std::string metric = sweep.text("metric", "none");
        if (metric == "none") sp.metric = SweepParams::Metric::none;
        else if (metric == "alpha") sp.metric = SweepParams::Metric::alpha;
        else if (metric == "ell") sp.metric = SweepParams::Metric::ell;
        else throw ParseError("section [sweep]: metric must be none, alpha or ell");
        cfg.sweep = sp;
    }

    system.check_all_used(sections);
    b.check_all_used(sections);
    c.check_all_used(sections);
    d.check_all_used(sections);
    numerics.check_all_used(sections);
    resolvent.check_all_used(sections);
    initial.check_all_used(sections);
    output.check_all_used(sections);
    sweep.check_all_used(sections);

    try {
        cfg.system = validate_config(cfg.system);
    } catch (const Error& e) {
        throw ValidationError(std::string("invalid system config: ") + e.what());
    }
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

} // namespace kvwave
