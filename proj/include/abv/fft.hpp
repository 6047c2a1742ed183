#pragma once

#include <complex>

namespace abv::detail {

using cplx = std::complex<double>;

// Thin deterministic wrapper over FFTW (plans cached, FFTW_ESTIMATE only, so
// results do not depend on planner timing). sign = -1 forward, +1 backward,
// both unnormalized: X_s = sum_j x_j exp(-2 pi i s j / n) and its conjugate.
//
// `howmany` transforms of length n, laid out with index j at data[k*dist + j*stride]
// for transform k. In-place.
void fft_many(cplx* data, int n, int howmany, int stride, int dist, int sign);

inline void fft(cplx* data, int n, int sign) { fft_many(data, n, 1, 1, 0, sign); }

}  // namespace abv::detail
