#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rpl/certificate.hpp"
#include "rpl/kernels.hpp"
#include "rpl/models.hpp"

namespace rpl {

// A priori single-spin distribution: atoms (Ising, Potts as tetrahedral
// vectors) or the uniform law on S^{n-1}, integrated over the polar angle with
// Gauss-Legendre nodes.
struct SingleSpinMeasure {
  enum class Kind { Ising, Potts, Sphere };
  Kind kind = Kind::Ising;
  int q = 2;
  int n = 1;
  int degree = 0;  // sphere quadrature nodes
  std::vector<std::vector<double>> atoms;

  static SingleSpinMeasure ising();
  static SingleSpinMeasure potts(int q);
  static SingleSpinMeasure sphere(int n, int degree = 96);
  static SingleSpinMeasure for_model(const ModelSpec& model);

  int nu() const;
  // Largest |h| the sphere quadrature is trusted for.
  double max_field() const;
  // Unit vector of the distinguished axis (e1, or the first Potts vector).
  std::vector<double> axis() const;
  // Range of t such that t * axis() lies in the convex hull.
  std::pair<double, double> axis_range() const;
  std::string name() const;
};

struct Cumulant {
  double G = 0.0;
  std::vector<double> grad;
  Eigen::MatrixXd hess;
};

// G(h) = log E exp(h.S), with gradient and Hessian (covariance of the tilted law).
Cumulant cumulant_generating(const SingleSpinMeasure& measure, const std::vector<double>& h);

// S(m) = inf_h [G(h) - h.m]; -infinity outside the convex hull of the spins.
double entropy(const SingleSpinMeasure& measure, const std::vector<double>& m);

// Phi_beta(m) = -beta/2 |m|^2 - S(m), beta in the dot normalization.
double free_energy(const SingleSpinMeasure& measure, double beta, const std::vector<double>& m);

struct MeanFieldSolution {
  std::vector<double> m;
  double phi = 0.0;
  double residual = 0.0;  // |m - grad G(beta m)|
  bool stable = false;    // beta Hess G(beta m) < 1, i.e. a local minimum of Phi
};

struct MeanFieldReport {
  double beta = 0.0;
  std::vector<MeanFieldSolution> solutions;  // sorted by Phi, then lexicographically
  std::vector<int> unconverged_starts;
};

// Ten starts spread along axis() over its admissible range.
std::vector<std::vector<double>> default_starts(const SingleSpinMeasure& measure);

// Fixed points of m = grad G(beta m): damped iteration (factor 0.5) from each
// start, bisection along each start's ray for the unstable branches, Newton
// polish and deduplication at 1e-9.
MeanFieldReport solve_mean_field(const SingleSpinMeasure& measure, double beta,
                                 const std::vector<std::vector<double>>& starts = {});

// Smallest beta (dot normalization) with t > axis.grad G(beta t axis) for some
// t on a geometric grid down to 1e-6; found by bisection.
double bifurcation_beta(const SingleSpinMeasure& measure, double tol = 1e-10);

struct FreeEnergyProfile {
  std::string normalization;  // "dot" or "delta"
  double beta = 0.0;
  std::vector<double> grid;
  std::vector<double> phi;
  std::vector<bool> is_min, is_max;
  std::size_t global_min = 0;
  std::vector<std::size_t> minima() const;
  std::vector<std::size_t> maxima() const;
};

// Phi along t * axis(), dot normalization.
FreeEnergyProfile mean_field_profile(const SingleSpinMeasure& measure, double beta, const std::vector<double>& grid);

// Mole-fraction profile: Phi = sum_k (-beta_delta x_k^2 / 2 + x_k log x_k),
// x_1 = (1 + (q-1) m)/q, x_k = (1 - m)/q.
FreeEnergyProfile potts_on_axis_profile(int q, double beta_delta, const std::vector<double>& grid);

// Evenly spaced grid over [lo, hi].
std::vector<double> linear_grid(double lo, double hi, int points);

double beta_dot_from_delta(double beta_delta, int q);

struct PottsTransition {
  int q = 0;
  double beta0 = 0.0;   // spinodal, delta normalization
  double beta_t = 0.0;  // degenerate minima, delta normalization
  double m_plus = 0.0;  // ordered minimizer at beta_t
};

PottsTransition locate_transition(int q);

struct AdmissibleBand {
  double beta = 0.0;  // normalization as in profile
  double I_d = 0.0;
  double band = 0.0;  // nu * beta_dot * I_d / 2
  FreeEnergyProfile profile;
  std::vector<bool> in_band;
  std::vector<std::pair<double, double>> components;  // maximal runs of in_band grid points
  double max_gap() const;
};

// Throws ValidationError for recurrent kernels (I_d infinite).
AdmissibleBand admissible_band(const SingleSpinMeasure& measure, const KernelSpec& kernel, double beta_dot,
                               const std::vector<double>& grid);
AdmissibleBand admissible_band_from_profile(FreeEnergyProfile profile, int nu, double beta_dot, double I_d);

struct DiscontinuityOptions {
  double resolution = 1e-3;  // smallest gap counted as a jump
  int grid_points = 4001;    // over m in [0, 1]
  int beta_points = 64;
};

// Scans beta_delta around the mean-field transition on the m >= 0 axis.
// PASS iff some beta yields two admissible components separated by at least
// the resolution.
Certificate forced_discontinuity_check(int q, const KernelSpec& kernel, const DiscontinuityOptions& opt = {});

}  // namespace rpl
