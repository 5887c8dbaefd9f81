#pragma once

#include "uavmd/types.hpp"

#include <span>

// Thin FFTW front end. Plans are cached per length and shared across threads.
namespace uavmd::fft {

// out[k] = sum_n in[n] exp(-2 pi i k n / N). in and out may alias.
void forward(std::span<const cplx> in, std::span<cplx> out);

// out[n] = sum_k in[k] exp(+2 pi i k n / N), unnormalized. in and out may alias.
void backward(std::span<const cplx> in, std::span<cplx> out);

} // namespace uavmd::fft

namespace uavmd::fft {

// Unnormalized inverse transform of every column of m, in place.
void backward_columns(ComplexMatrix& m);

// Forward transform of every row of m, in place.
void forward_rows(ComplexMatrix& m);

} // namespace uavmd::fft
