#pragma once

#include <functional>
#include <string>
#include <vector>

namespace rpl {

// Brillouin-zone quadrature on [-pi, pi]^d. Nodes sit at half-cell offsets,
// so no node ever lands on k = 0 (or k = pi).
struct QuadratureSpec {
  enum class Scheme { Midpoint, RefinedNearOrigin };
  Scheme scheme = Scheme::Midpoint;
  int points = 0;        // points per axis at the coarsest level; 0 = by dimension
  double scale = 1.0;    // circle-map concentration for RefinedNearOrigin, in (0, 1]
  double rel_tol = 1e-3;
  double divergence_factor = 1.1;

  int base_points(int d) const;
};

std::string to_string(QuadratureSpec::Scheme s);

// f receives a pointer to d wave-vector components.
using BzIntegrand = std::function<double(const double* k)>;

// Mean of f over the zone on an n^d grid (i.e. the integral dk/(2pi)^d).
double bz_average(int d, int n, const BzIntegrand& f, const QuadratureSpec& spec);

struct LadderResult {
  std::vector<int> points;
  std::vector<double> values;
  double estimate = 0.0;
  double error = 0.0;
  bool divergent = false;
};

// Three grid doublings. Divergent when each doubling grows the estimate by
// more than spec.divergence_factor; otherwise the last three levels are
// extrapolated (Aitken) and the error is the change against the extrapolant
// of the first three levels.
LadderResult integrate_ladder(int d, const BzIntegrand& f, const QuadratureSpec& spec);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace rpl
