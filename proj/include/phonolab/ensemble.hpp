// Gaussian phonon ensembles and Wigner-function estimation.
//
// Sampling: a(k) independent circularly-symmetric complex Gaussians with
// E|a(k)|^2 = L^3 W(k), E[a(k)^2] = 0, mean zero. An optional nonnegative
// site envelope g(x) produces a locally-stationary modulated ensemble
// (a -> dft(sqrt(g) idft(a))), which leaves the homogeneous case (g == 1)
// untouched.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "phonolab/afield.hpp"
#include "phonolab/grid.hpp"

namespace phonolab {

struct GaussianEnsembleSpec {
    int L = 0;
    RField W;  // target covariance density on the k-grid, >= 0
    std::uint64_t seed = 0;
    std::optional<RField> envelope;  // g(x) over sites, >= 0

    void validate() const;
};

// Stream id is (sample_index); identical (seed, index) gives bit-identical
// fields regardless of how samples are scheduled.
AField draw_sample(const GaussianEnsembleSpec& spec, std::uint64_t sample_index);

struct HomogeneousWigner {
    int L = 0;
    int samples = 0;
    RField mean;    // West(k) = L^-3 <|a(k)|^2>
    RField stderr_; // jackknife standard error per k
};

HomogeneousWigner wigner_homogeneous(const std::vector<AField>& samples);

// Discrete inhomogeneous estimator
//   W(x,k) = L^-3 sum_u exp(i 2pi x.u) <a(k - h1(u))^* a(k + h2(u))>,
// u on the k-grid with signed components in (-L/2, L/2], split h1 + h2 = u,
// h1 = trunc(u/2) (round toward zero), h2 = u - h1. Requires 1/eps and
// eps*L integers; y = eps*x is the macroscopic position.
struct InhomogeneousWigner {
    int L = 0;
    double eps = 0.0;
    int samples = 0;
    std::vector<std::int64_t> sites;  // window (flat site indices)
    RField values;                    // [site][k] row-major, size sites*L^3
    double max_imag_residue = 0.0;    // tracked, not an error
};

struct WindowBox {
    IVec3 lo = {0, 0, 0};
    IVec3 hi = {-1, -1, -1};  // inclusive; negative -> full box
};

InhomogeneousWigner wigner_inhomogeneous(const std::vector<AField>& samples, double eps,
                                         const WindowBox& window = {});

// Sample-set totals: N and E averaged over samples.
Totals mean_totals(const std::vector<AField>& samples, const DispersionModel& model);

// Totals of an estimated homogeneous table: N = L^-3 sum W, E = L^-3 sum omega W.
Totals table_totals(const Grid3& g, const RField& W, const DispersionModel& model);

}  // namespace phonolab
