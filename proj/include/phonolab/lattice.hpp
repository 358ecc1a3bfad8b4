// Finite-volume microscopic model: scalar displacement field on the periodic
// cube, Hamiltonian with harmonic coupling plus weak cubic on-site potential,
// forces and velocity-Verlet evolution.
#pragma once

#include <cmath>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "phonolab/dispersion.hpp"
#include "phonolab/grid.hpp"
#include "phonolab/stencil.hpp"

namespace phonolab {

// V(u) = sqrt(eps) * lambda/3 * u^3 [+ eps * lambda^2/(18 omega0^2) * u^4].
// The quartic stabilizer keeps H >= 0 and is off by default.
struct PotentialSpec {
    double lambda = 0.0;
    double epsilon = 1.0;  // kinetic scale, 0 < eps <= 1
    double omega0 = 1.0;
    bool quartic_stabilizer = false;

    double quartic_coeff() const {
        return epsilon * lambda * lambda / (18.0 * omega0 * omega0);
    }
    double cubic_coeff() const { return std::sqrt(epsilon) * lambda / 3.0; }
    void validate() const;
};

struct FieldState {
    int L = 0;
    RField q, p;
    double t = 0.0;

    static FieldState zero(int L);
    void check_finite() const;  // throws BlowUpError on NaN/inf
};

enum class ForceRoute { Stencil, Spectral };

double energy(const FieldState& s, const CouplingStencil& stencil, const PotentialSpec& pot);

RField forces(const FieldState& s, const CouplingStencil& stencil, const PotentialSpec& pot,
              ForceRoute route = ForceRoute::Stencil);

struct EvolveOptions {
    double amplitude_ceiling = 0.0;  // 0 -> default 10/sqrt(eps)
    ForceRoute route = ForceRoute::Stencil;
    int observer_stride = 0;  // 0 -> never
    std::function<void(const FieldState&, std::int64_t step)> observer;
};

FieldState verlet_step(const FieldState& s, double h, const CouplingStencil& stencil,
                       const PotentialSpec& pot, const EvolveOptions& opts = {});

FieldState evolve(FieldState s, double T, double h, const CouplingStencil& stencil,
                  const PotentialSpec& pot, const EvolveOptions& opts = {});

// Default step from the grid-exact top of the spectrum.
double default_timestep(const DispersionModel& model, const Grid3& g);

// Flat binary snapshot: header (magic, version, L, t, eps, lambda, omega0),
// then q and p row-major x-fastest as little-endian 64-bit floats.
void write_snapshot(std::ostream& os, const FieldState& s, const PotentialSpec& pot);
FieldState read_snapshot(std::istream& is, PotentialSpec* pot_out = nullptr);
void write_snapshot_csv(std::ostream& os, const FieldState& s);

}  // namespace phonolab
