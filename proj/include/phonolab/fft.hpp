// Discrete Fourier transforms on the periodic cube.
//
// Conventions: fhat(k) = sum_x exp(-i 2pi k.x) f_x and
// f_x = L^-3 sum_k exp(+i 2pi k.x) fhat(k). Torus integrals map to
// L^-3 sums. FFTW is only the engine; these sums are the contract.
#pragma once

#include <complex>
#include <vector>

#include "phonolab/grid.hpp"

namespace phonolab {

CField dft(const Grid3& g, const RField& f);
CField dft(const Grid3& g, const CField& f);
CField idft(const Grid3& g, const CField& fhat);

// Inverse transform of a spectrum known to come from a real field.
// Returns the real part; the imaginary residue is the caller's check.
RField idft_real(const Grid3& g, const CField& fhat);

}  // namespace phonolab
