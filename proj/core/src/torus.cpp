#include "rpl/torus.hpp"

#include <cmath>
#include <numbers>

#include "rpl/errors.hpp"

namespace rpl {

TorusSpec::TorusSpec(int d, int L) : d_(d), L_(L), N_(1) {
  require(d >= 1, "torus dimension must be positive");
  require(L >= 2 && L % 2 == 0, "torus side length must be even and >= 2");
  stride_.assign(d, 1);
  for (int a = d - 1; a >= 0; --a) {
    stride_[a] = N_;
    N_ *= static_cast<std::size_t>(L);
  }
}

std::size_t TorusSpec::index(const Site& x) const {
  require(static_cast<int>(x.size()) == d_, "site has wrong dimension");
  std::size_t i = 0;
  for (int a = 0; a < d_; ++a) {
    long c = ((x[a] % L_) + L_) % L_;
    i += static_cast<std::size_t>(c) * stride_[a];
  }
  return i;
}

Site TorusSpec::coords(std::size_t i) const {
  Site x(d_);
  for (int a = 0; a < d_; ++a) {
    x[a] = static_cast<long>(i / stride_[a]);
    i %= stride_[a];
  }
  return x;
}

std::size_t TorusSpec::shift(std::size_t i, int axis, long step) const {
  const auto s = stride_[axis];
  const long c = static_cast<long>((i / s) % L_);
  const long nc = ((c + step) % L_ + L_) % L_;
  return i + static_cast<std::size_t>(nc) * s - static_cast<std::size_t>(c) * s;
}

Site wrap(const Site& x, const TorusSpec& torus) {
  require(static_cast<int>(x.size()) == torus.d(), "site has wrong dimension");
  Site out(x.size());
  const long L = torus.L();
  for (std::size_t a = 0; a < x.size(); ++a) out[a] = ((x[a] % L) + L) % L;
  return out;
}

Site torus_displacement(const Site& x, const Site& y, const TorusSpec& torus) {
  require(x.size() == y.size(), "sites differ in dimension");
  Site v(x.size());
  for (std::size_t a = 0; a < x.size(); ++a) v[a] = y[a] - x[a];
  return wrap(v, torus);
}

std::vector<ReciprocalVector> reciprocal_grid(const TorusSpec& torus) {
  const double step = 2.0 * std::numbers::pi / torus.L();
  std::vector<ReciprocalVector> grid;
  grid.reserve(torus.N());
  for (std::size_t i = 0; i < torus.N(); ++i) {
    Site n = torus.coords(i);
    ReciprocalVector k(n.size());
    for (std::size_t a = 0; a < n.size(); ++a) k[a] = step * static_cast<double>(n[a]);
    grid.push_back(std::move(k));
  }
  return grid;
}

double to_centered(double k) {
  constexpr double pi = std::numbers::pi;
  double c = std::fmod(k, 2.0 * pi);
  if (c > pi) c -= 2.0 * pi;
  if (c <= -pi) c += 2.0 * pi;
  return c;
}

}  // namespace rpl
