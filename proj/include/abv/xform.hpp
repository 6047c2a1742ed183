#pragma once

// Internal centered-transform helpers shared by the 1D and composite code.
// Index pairing after the parity pre-multiply: FFT bin s holds p = (s - n/2)*dp,
// no shuffling required:
//
//   phi_s = dy/sqrt(2 pi hbar) * C_n * (-1)^s * FFT_fwd[ (-1)^j psi_j ]_s
//   psi_j = dp/sqrt(2 pi hbar) * C_n * (-1)^j * FFT_bwd[ (-1)^s phi_s ]_j
//
// with C_n = (-1)^(n/2). For a transform-mask-transform round trip every phase
// except the mask cancels and the only constant left is 1/n.

#include <functional>

#include "abv/fft.hpp"
#include "abv/grid.hpp"

namespace abv::detail {

inline double parity(int i) { return (i & 1) ? -1.0 : 1.0; }

/// In-place centered forward transform of one line (position -> momentum
/// amplitudes, including measure factors).
void line_to_momentum(cplx* a, const Grid& g);
/// Inverse of line_to_momentum.
void line_to_position(cplx* a, const Grid& g);

/// Multiply a position-space line by mask(p) in the momentum representation:
/// parity, FFT, *mask(p_s)/n, IFFT, parity. The mask must be unit-modulus for
/// unitarity; nothing checks that here.
void apply_momentum_mask(cplx* a, const Grid& g, const std::function<cplx(double)>& mask);

}  // namespace abv::detail
