#include "rpl/fourier.hpp"

#include <cmath>
#include <numbers>

#include "rpl/errors.hpp"

namespace rpl {

void torus_dft(const TorusSpec& torus, std::vector<cplx>& data, int sign) {
  require(data.size() == torus.N(), "dft input size does not match torus");
  const int L = torus.L();
  const int d = torus.d();
  std::vector<cplx> tw(static_cast<std::size_t>(L));
  for (int m = 0; m < L; ++m) {
    const double a = sign * 2.0 * std::numbers::pi * m / L;
    tw[m] = {std::cos(a), std::sin(a)};
  }
  std::vector<cplx> line(L), out(L);
  std::size_t stride = torus.N();
  for (int axis = 0; axis < d; ++axis) {
    stride /= static_cast<std::size_t>(L);
    const std::size_t block = stride * static_cast<std::size_t>(L);
    for (std::size_t base = 0; base < torus.N(); base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        for (int x = 0; x < L; ++x) line[x] = data[base + off + x * stride];
        for (int k = 0; k < L; ++k) {
          cplx acc = 0.0;
          for (int x = 0; x < L; ++x) acc += line[x] * tw[(static_cast<long>(k) * x) % L];
          out[k] = acc;
        }
        for (int k = 0; k < L; ++k) data[base + off + k * stride] = out[k];
      }
    }
  }
}

std::vector<cplx> torus_dft(const TorusSpec& torus, const std::vector<double>& data, int sign) {
  std::vector<cplx> c(data.begin(), data.end());
  torus_dft(torus, c, sign);
  return c;
}

}  // namespace rpl
