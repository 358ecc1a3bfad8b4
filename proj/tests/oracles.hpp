// Independent oracles used by the test suites. Everything here recomputes
// results through a different route than the library (naive double sums,
// finite differences, direct iteration of the Duhamel identity, from-scratch
// combinatorics) and must stay decoupled from the implementation paths it
// checks.
#pragma once

#include <complex>
#include <string>
#include <vector>

#include "phonolab/dispersion.hpp"
#include "phonolab/fft.hpp"
#include "phonolab/grid.hpp"
#include "phonolab/lattice.hpp"

namespace phonolab::testing {

// O(L^6) definition-level DFT.
CField dft_direct(const Grid3& g, const CField& f);

// O(L^6) Hamiltonian with the interaction as an explicit double sum over
// site pairs (periodic wrap by coordinates).
double energy_direct(const FieldState& s, const CouplingStencil& st, const PotentialSpec& pot);

// Central-difference gradient of energy() with respect to q.
RField energy_gradient_fd(const FieldState& s, const CouplingStencil& st,
                          const PotentialSpec& pot, double step);

// From-scratch diagram generator: substitution sequences on bond ids plus
// exhaustive matching filters; returns canonical keys (sorted).
std::vector<std::string> brute_force_diagram_keys(int order);

// Number of perfect matchings of `points` labeled endpoints, counted by
// explicit recursion.
long long brute_force_matching_count(int points);

// Direct numerical iteration of the time-dependent perturbation identity,
// truncated at second order: the order-eps term of <a(q,-) a(q,+)> at
// microscopic time t_kinetic/eps, i.e. W_1^eps(q, t_kinetic) on the grid.
RField duhamel_w1(const Grid3& g, const DispersionModel& model, const RField& W,
                  double lambda, double eps, double t_kinetic);

// Closed-form nested time integral used by duhamel_w1:
//   int_0^tau ds int_0^s ds' exp(i s phi_mid) exp(i s' (phi_bot - phi_mid))
// and an adaptive-Simpson evaluation of the same object for cross-checks.
std::complex<double> time_double_integral(double tau, double phi_mid, double phi_bot);
std::complex<double> time_double_integral_quad(double tau, double phi_mid, double phi_bot);

}  // namespace phonolab::testing
