// Complex spectral field a(k) diagonalizing the harmonic flow:
//   a(k) = (sqrt(omega) qhat(k) + i phat(k)/sqrt(omega)) / sqrt(2),
// with a(k,-) = a(k) and a(k,+) = a(k)^*. The map (q,p) <-> a is a
// bijection between real phase points and unconstrained complex fields.
#pragma once

#include "phonolab/dispersion.hpp"
#include "phonolab/fft.hpp"
#include "phonolab/grid.hpp"
#include "phonolab/lattice.hpp"

namespace phonolab {

struct AField {
    int L = 0;
    CField a;

    static AField zero(int L);
};

AField to_afield(const FieldState& s, const DispersionModel& model);
AField to_afield(const Grid3& g, const CField& qhat, const CField& phat,
                 const DispersionModel& model);
FieldState from_afield(const AField& a, const DispersionModel& model, double t = 0.0);

// Exact harmonic flow: a(k) -> exp(-i omega(k) t) a(k).
void harmonic_propagate(AField& a, double t, const DispersionModel& model);

// Phonon number N = L^-3 sum |a|^2 and harmonic energy E = L^-3 sum omega |a|^2
// (E equals the lambda=0 lattice Hamiltonian identically).
struct Totals {
    double phonon_number = 0.0;
    double energy = 0.0;
};
Totals conserved_totals(const AField& a, const DispersionModel& model);

}  // namespace phonolab
