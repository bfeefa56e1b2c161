#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rpl/quadrature.hpp"

namespace rpl {

// Argument of the logarithm in the spin-wave free energy at orientation theta.
struct SpinWaveIntegrand {
  enum class Family { Compass2D, OneTwenty3D, AFM2D };
  Family family = Family::Compass2D;
  double theta = 0.0;
  double gamma = 0.0;  // AFM only, |gamma| < 2

  static SpinWaveIntegrand compass(double theta);
  static SpinWaveIntegrand one_twenty(double theta);
  static SpinWaveIntegrand afm(double gamma, double theta);

  int dimension() const;
  double operator()(const double* k) const;
  std::string name() const;
};

// D_k(theta) = |1-e^{i(k1+k2)}|^2 + |1-e^{i(k1-k2)}|^2 + gamma cos(theta) (|1-e^{ik1}|^2 - |1-e^{ik2}|^2)
double afm_D(double gamma, double theta, double k1, double k2);

struct SpinWaveValue {
  double F = 0.0;
  double error = 0.0;
  LadderResult ladder;
};

// F(theta) = 1/2 * average of log(integrand) over the zone, by the refinement
// ladder. Throws ToleranceError when error > rel_tol * max(1, |F|).
SpinWaveValue sw_free_energy(const SpinWaveIntegrand& integrand, const QuadratureSpec& quad = {});

// Same quantity on a single n^d grid.
double sw_free_energy_fixed(const SpinWaveIntegrand& integrand, int n);

struct ThetaMinimization {
  SpinWaveIntegrand::Family family = SpinWaveIntegrand::Family::Compass2D;
  double gamma = 0.0;
  int resolution = 0;  // scan points on [0, 2 pi)
  int points = 0;      // quadrature points per axis
  std::vector<double> theta, F;
  std::vector<double> minima;    // global minimizers in [0, 2 pi), ascending
  std::vector<double> minima_F;
  double min_F = 0.0;
  // Smallest excess over min_F among the other local minima, or the lowest
  // barrier between global minima when every local minimum is global.
  double margin = 0.0;
  bool degenerate = false;  // profile flat within tolerance
};

// Grid scan (resolution >= 360) with golden-section refinement of each local minimum.
// points = 0 picks 64 per axis in d = 2 and 32 in d = 3.
ThetaMinimization minimize_over_theta(SpinWaveIntegrand::Family family, double gamma = 0.0, int resolution = 360,
                                      int points = 0);

// max |D_k(theta) - alpha D_k(0) - (1 - alpha) D_k(pi)|, alpha = (1 + cos theta)/2.
double afm_linearity_check(double gamma, const std::vector<std::pair<double, double>>& k_samples,
                           const std::vector<double>& theta_samples);
double afm_linearity_check(double gamma, int samples, std::uint64_t seed);

}  // namespace rpl
