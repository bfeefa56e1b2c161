#pragma once

#include <complex>
#include <vector>

#include "rpl/torus.hpp"

namespace rpl {

using cplx = std::complex<double>;

// In-place separable DFT over the torus:
//   out(k) = sum_x in(x) exp(sign * i k.x),
// with k enumerated in reciprocal_grid order. O(N * L * d).
void torus_dft(const TorusSpec& torus, std::vector<cplx>& data, int sign = +1);

// Real-input convenience wrapper.
std::vector<cplx> torus_dft(const TorusSpec& torus, const std::vector<double>& data, int sign = +1);

}  // namespace rpl
