// Harmonic coupling stencils alpha(x): finite, even, zero-sum, mechanically
// stable. The stencil enters the Hamiltonian as 1/2 sum alpha(x-y) q_x q_y
// and the dispersion as omega(k)^2 = omega0^2 + alphahat(k).
#pragma once

#include <string>
#include <vector>

#include "phonolab/grid.hpp"

namespace phonolab {

class CouplingStencil {
public:
    // Offsets must come in +-x pairs with equal values (alpha(x)=alpha(-x));
    // the zero offset stands alone. Zero sum is checked exactly, stability
    // (alphahat > 0 away from k=0) on a probe grid.
    CouplingStencil(std::vector<IVec3> offsets, std::vector<double> values,
                    double alpha0 = 0.0, double gamma = 0.0);

    const std::vector<IVec3>& offsets() const { return offsets_; }
    const std::vector<double>& values() const { return values_; }
    double alpha0() const { return alpha0_; }
    double gamma() const { return gamma_; }

    // alphahat(k) = sum_x alpha(x) cos(2 pi k.x); exact for any torus point.
    double fourier(const Vec3& k) const;
    std::array<double, 3> fourier_gradient(const Vec3& k) const;

    double value_sum() const;
    int max_extent() const;  // largest |offset component|

    // Wrap offsets into a box of side L, merging aliased offsets. Returns the
    // folded stencil and sets `folded` when any merge happened.
    CouplingStencil fold_to_box(int L, bool* folded = nullptr) const;

    // alpha(0)=6, alpha(e)=-1 for the six unit offsets.
    static CouplingStencil nearest_neighbor();

    // Nearest plus next-nearest couplings whose sqrt-form dispersion equals
    // omega0 + sum_a (1 - cos(2 pi k^a)) exactly:
    //   alphahat(k) = 2*omega0*s(k) + s(k)^2, s(k) = sum_a (1 - cos(2 pi k^a)).
    static CouplingStencil nn_nnn_for_cosine(double omega0);

private:
    struct Unchecked {};
    CouplingStencil(Unchecked, std::vector<IVec3> offsets, std::vector<double> values,
                    double alpha0, double gamma)
        : offsets_(std::move(offsets)), values_(std::move(values)), alpha0_(alpha0), gamma_(gamma) {}

    std::vector<IVec3> offsets_;
    std::vector<double> values_;
    double alpha0_ = 0.0, gamma_ = 0.0;
};

}  // namespace phonolab
