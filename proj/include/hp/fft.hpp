#pragma once

#include "hp/grid.hpp"
#include "hp/types.hpp"

#include <vector>

namespace hp {

/// In-place multi-dimensional complex FFT applied to `howmany` contiguous
/// blocks of prod(shape) entries. Backed by FFTW; plans are cached and safe
/// to execute concurrently on distinct buffers.
///
/// forward:  c_k = sum_j v_j exp(-2 pi i jk/N)   (unnormalized)
/// backward: v_j = sum_k c_k exp(+2 pi i jk/N)   (unnormalized)
void fft_forward(Complex* data, const std::vector<int>& shape, int howmany = 1);
void fft_backward(Complex* data, const std::vector<int>& shape, int howmany = 1);

/// Fourier coefficients -> samples on the torus grid (each column).
void to_space(CMatrix& values, const TangentialGrid& grid);
/// Samples -> Fourier coefficients g_k with g(x) = sum_k g_k exp(i xi_k x).
void to_frequency(CMatrix& values, const TangentialGrid& grid);

GridFunction to_space(const GridFunction& f, const TangentialGrid& grid);
GridFunction to_frequency(const GridFunction& f, const TangentialGrid& grid);

} // namespace hp
