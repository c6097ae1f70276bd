#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "fedwarn/errors.hpp"

namespace fedwarn::epi {

struct EpidemicParams {
    double beta = 0.5;  // transmission rate, 1/day
    double sigma = 0.2; // incubation exit rate, 1/day
    double gamma = 0.1; // recovery rate, 1/day
    double dt = 0.25;   // integration step, days
    bool sir_mode = false;

    void validate(const std::string& path) const {
        if (beta < 0.0 || sigma < 0.0 || gamma < 0.0) {
            throw ConfigError(path, "rates beta, sigma, gamma must be >= 0");
        }
        if (!(dt > 0.0) || dt > 1.0) {
            throw ConfigError(path + ".dt", "integration step must satisfy 0 < dt <= 1");
        }
        // Stability guard: keeps every Euler flux below its source compartment.
        if (dt * std::max({beta, sigma, gamma}) >= 1.0) {
            throw ConfigError(path + ".dt", "dt * max(beta, sigma, gamma) must be < 1");
        }
    }
};

struct RegionCompartments {
    std::string region_id;
    double S = 0.0;
    double E = 0.0;
    double I = 0.0;
    double R = 0.0;

    double population() const { return S + E + I + R; }
};

// m[i][j]: per-day fraction of region i's population moving to region j.
struct MobilityMatrix {
    std::vector<std::vector<double>> m;

    std::size_t size() const { return m.size(); }

    static MobilityMatrix zero(std::size_t n) {
        MobilityMatrix mm;
        mm.m.assign(n, std::vector<double>(n, 0.0));
        return mm;
    }

    void validate(const std::string& path, double dt) const {
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i].size() != m.size()) {
                throw ConfigError(path, "mobility matrix must be square");
            }
            double row_sum = 0.0;
            for (std::size_t j = 0; j < m[i].size(); ++j) {
                if (m[i][j] < 0.0) {
                    throw ConfigError(path, "mobility rates must be >= 0");
                }
                if (i == j && m[i][j] != 0.0) {
                    throw ConfigError(path, "mobility matrix diagonal must be zero");
                }
                row_sum += m[i][j];
            }
            // Cannot move more people out of a region than it holds in one step.
            if (row_sum * dt > 1.0) {
                throw ConfigError(path, "row " + std::to_string(i) +
                                            ": sum of outgoing rates exceeds 1/dt");
            }
        }
    }
};

struct MetapopulationState {
    double t = 0.0; // days
    std::vector<RegionCompartments> regions;
    MobilityMatrix mobility;
};

/// One forward-Euler SEIR step for a single region. Fluxes are capped at
/// their source compartment so counts stay nonnegative and the region total
/// is preserved exactly; the dt stability guard keeps the caps inactive in
/// valid configurations. A zero-population region is returned unchanged.
[[nodiscard]] inline RegionCompartments seir_step(const RegionCompartments& c,
                                                  const EpidemicParams& p) {
    const double n = c.population();
    if (n == 0.0) {
        return c; // DegenerateRegion: nothing to integrate
    }
    const double new_infections = std::min(p.dt * p.beta * c.S * c.I / n, c.S);
    const double recoveries = std::min(p.dt * p.gamma * c.I, c.I);
    RegionCompartments out = c;
    if (p.sir_mode) {
        // E is bypassed: new infections enter I directly.
        out.S = c.S - new_infections;
        out.I = c.I + new_infections - recoveries;
        out.R = c.R + recoveries;
        return out;
    }
    const double incubations = std::min(p.dt * p.sigma * c.E, c.E);
    out.S = c.S - new_infections;
    out.E = c.E + new_infections - incubations;
    out.I = c.I + incubations - recoveries;
    out.R = c.R + recoveries;
    return out;
}

/// Proportional mobility flux applied to every compartment equally:
/// X_i' = X_i - dt * sum_j m[i][j] * X_i + dt * sum_j m[j][i] * X_j.
/// Compartment totals over all regions are preserved.
[[nodiscard]] inline MetapopulationState apply_mobility(const MetapopulationState& state,
                                                        double dt) {
    const std::size_t n = state.regions.size();
    if (state.mobility.size() != n) {
        throw ConfigError("mobility", "matrix size does not match region count");
    }
    MetapopulationState out = state;
    auto flux = [&](auto getter, auto setter) {
        for (std::size_t i = 0; i < n; ++i) {
            double x = getter(state.regions[i]);
            double delta = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                delta -= state.mobility.m[i][j] * x;
                delta += state.mobility.m[j][i] * getter(state.regions[j]);
            }
            setter(out.regions[i], x + dt * delta);
        }
    };
    flux([](const RegionCompartments& r) { return r.S; },
         [](RegionCompartments& r, double v) { r.S = v; });
    flux([](const RegionCompartments& r) { return r.E; },
         [](RegionCompartments& r, double v) { r.E = v; });
    flux([](const RegionCompartments& r) { return r.I; },
         [](RegionCompartments& r, double v) { r.I = v; });
    flux([](const RegionCompartments& r) { return r.R; },
         [](RegionCompartments& r, double v) { r.R = v; });
    return out;
}

/// Infectious fraction I/N.
inline double prevalence(const RegionCompartments& c) {
    const double n = c.population();
    if (n <= 0.0) {
        throw DegenerateRegion("prevalence of region '" + c.region_id +
                               "' with zero population");
    }
    return c.I / n;
}

/// Full metapopulation step: mobility exchange, then per-region SEIR.
[[nodiscard]] inline MetapopulationState step(const MetapopulationState& state,
                                              const EpidemicParams& p) {
    MetapopulationState out = apply_mobility(state, p.dt);
    for (auto& region : out.regions) {
        region = seir_step(region, p);
    }
    out.t = state.t + p.dt;
    return out;
}

inline double total_population(const MetapopulationState& state) {
    double total = 0.0;
    for (const auto& r : state.regions) {
        total += r.population();
    }
    return total;
}

} // namespace fedwarn::epi
