#pragma once

#include "qslab/grid.hpp"

namespace qslab::fourier {

enum class Direction { forward, inverse };

// Unnormalized in-place DFT batch; sign -1 forward, +1 backward.
void dft(cplx* data, int n, int stride, int howmany, int dist, int sign);

// Continuum-normalized transform along one axis of a centered lattice with sample
// spacing `spacing`: F(k) = spacing/sqrt(2 pi) sum_n f(n) e^{-i y_n k}.
void centered_axis(cplx* data, int n, int stride, int howmany, int dist, double spacing, Direction dir);

// Convenience for the two axes of a row-major [nx][nt] array.
void along_x(cplx* data, const PhaseGrid& g, Direction dir);
void along_t(cplx* data, const PhaseGrid& g, Direction dir);

}  // namespace qslab::fourier
