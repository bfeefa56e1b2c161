#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rpl/quadrature.hpp"
#include "rpl/torus.hpp"

namespace rpl {

// Translation-invariant coupling J_{0,x} on Z^d with J_{00} = 0 and
// sum_x J_{0,x} = 1. Yukawa and power-law kernels use the l1 distance.
struct KernelSpec {
  enum class Kind { NearestNeighbor, Yukawa, PowerLaw, Mixture };

  Kind kind = Kind::NearestNeighbor;
  int d = 1;
  double mu = 0.0;  // Yukawa decay rate
  double s = 0.0;   // power-law exponent, s > d
  double C = 0.0;   // normalizing prefactor (derived)
  std::vector<std::pair<double, KernelSpec>> parts;

  static KernelSpec nearest_neighbor(int d);
  static KernelSpec yukawa(int d, double mu);
  static KernelSpec power_law(int d, double s);
  static KernelSpec mixture(std::vector<std::pair<double, KernelSpec>> parts);

  double coupling(const Site& x) const;  // J_{0,x}, x in Z^d
  std::string describe() const;
  // Smallest length scale of the kernel's transform; drives quadrature refinement.
  double fourier_scale() const;
};

// J-hat(k) = sum_x J_{0,x} exp(i k.x), evaluated in closed form
// (nearest neighbour, Yukawa) or by a one-dimensional Mellin integral (power law).
double fourier_transform(const KernelSpec& kernel, const double* k);
double fourier_transform(const KernelSpec& kernel, const std::vector<double>& k);

// Periodized couplings J^{(L)}_{0,v} = sum_{|z|_inf <= cutoff} J_{0, v + Lz}.
struct CouplingMatrix {
  TorusSpec torus;
  KernelSpec kernel;
  std::vector<double> values;  // indexed by displacement v (row-major)
  int tail_cutoff = 0;
  double truncation_bound = 0.0;  // 1 - sum_v values[v]

  double at(std::size_t v) const { return values[v]; }
  double between(std::size_t x, std::size_t y) const;
  // J-hat^{(L)}(k) on reciprocal_grid order (discrete transform of values).
  std::vector<double> transform() const;
};

// cutoff <= 0 picks the smallest cutoff meeting tail_tol.
CouplingMatrix periodize(const KernelSpec& kernel, const TorusSpec& torus, int cutoff = 0,
                         double tail_tol = 1e-12);

// Quadrature defaults suited to the kernel (refined grid for slowly decaying kernels).
QuadratureSpec default_quadrature(const KernelSpec& kernel);

struct IntegralResult {
  bool finite = true;  // false: divergent by the refinement criterion
  double value = 0.0;
  double error = 0.0;
  LadderResult ladder;
};

// Integral of 1 / (1 - J-hat) over the zone with measure dk/(2pi)^d.
IntegralResult transience_integral(const KernelSpec& kernel, const QuadratureSpec& quad);
IntegralResult transience_integral(const KernelSpec& kernel);

// I_d = integral of J-hat^2 / (1 - J-hat).
IntegralResult mean_field_error_integral(const KernelSpec& kernel, const QuadratureSpec& quad);
IntegralResult mean_field_error_integral(const KernelSpec& kernel);

// G_L(0, v) for every displacement v (zero mode removed).
std::vector<double> torus_green_function(const CouplingMatrix& couplings);
double torus_greens(const TorusSpec& torus, const KernelSpec& kernel, const Site& x, const Site& y);

struct HarmonicProfile {
  int d = 0;
  int R = 0;
  double alpha = 0.0;
  std::vector<double> phi;        // over the box [-R, R]^d, row-major
  double dirichlet_form = 0.0;    // alpha * sum_y J_{0y} (alpha - phi_y)
  double quadratic_form = 0.0;    // 1/2 sum_{x,y} J_{xy} (phi_x - phi_y)^2
  double at(const Site& x) const;  // x in [-R, R]^d, zero outside
};

HarmonicProfile harmonic_escape_profile(const KernelSpec& kernel, int R, double alpha);

struct WalkEstimate {
  double mean = 0.0;  // expected visits to 0 within the step budget, time 0 included
  double se = 0.0;
  std::int64_t steps = 0;
  std::int64_t walks = 0;
};

WalkEstimate simulate_walk_returns(const KernelSpec& kernel, std::int64_t steps, std::int64_t walks,
                                   std::uint64_t seed);

}  // namespace rpl
