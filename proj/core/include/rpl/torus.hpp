#pragma once

#include <cstddef>
#include <vector>

namespace rpl {

using Site = std::vector<long>;
using ReciprocalVector = std::vector<double>;

// Periodic box (Z/LZ)^d with even L. Sites are linearized row-major,
// first coordinate slowest.
class TorusSpec {
 public:
  TorusSpec(int d, int L);

  int d() const { return d_; }
  int L() const { return L_; }
  std::size_t N() const { return N_; }

  std::size_t index(const Site& x) const;
  Site coords(std::size_t i) const;
  // Index of i shifted by `step` along `axis`, with wraparound.
  std::size_t shift(std::size_t i, int axis, long step) const;

  bool operator==(const TorusSpec& o) const { return d_ == o.d_ && L_ == o.L_; }

 private:
  int d_;
  int L_;
  std::size_t N_;
  std::vector<std::size_t> stride_;
};

Site wrap(const Site& x, const TorusSpec& torus);
Site torus_displacement(const Site& x, const Site& y, const TorusSpec& torus);

// All L^d wave vectors 2*pi*n/L, n_j in [0, L), zero mode first.
std::vector<ReciprocalVector> reciprocal_grid(const TorusSpec& torus);

// Map an angle in [0, 2pi) to (-pi, pi].
double to_centered(double k);

}  // namespace rpl
