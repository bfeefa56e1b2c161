#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rpl/certificate.hpp"
#include "rpl/quadrature.hpp"
#include "rpl/torus.hpp"

namespace rpl {

// ---- Gaussian double-well: sign patterns on a plaquette ----

// Signs at (0,0), (1,0), (0,1), (1,1); disseminated as sigma_x = s[x1 mod 2, x2 mod 2].
struct PlaquettePattern {
  enum class Class { Good, Diagonal, Stripe, ThreeOne };
  std::array<int, 4> s{1, 1, 1, 1};

  static PlaquettePattern parse(const std::string& signs);  // e.g. "+--+"
  int at(int x1, int x2) const { return s[(x1 & 1) + 2 * (x2 & 1)]; }
  Class klass() const;
  std::string str() const;
};

const char* to_string(PlaquettePattern::Class c);
std::vector<PlaquettePattern> all_plaquette_patterns();  // the 16 patterns

// Closed-form z-value bounds: diagonal e^{-4bk/(8b+k)}, stripe e^{-2bk/(4b+k)},
// three-one e^{-2bk/(8b+k)}, good 1.
double pattern_zvalue(PlaquettePattern::Class c, double beta, double kappa);
double pattern_zvalue(const PlaquettePattern& p, double beta, double kappa);

// |1/2 k^2 (1/k - 1/(8b+k)) - 4bk/(8b+k)|
double variance_identity_residual(double beta, double kappa);

// (E e^{-k sum phi_x sigma_x} / E e^{-k sum phi_x})^{1/N} under the massive GFF
// with covariance (beta Delta + kappa)^{-1} on the L x L torus (dense solve).
double gaussian_pattern_ratio(const PlaquettePattern& p, double beta, double kappa, int L);

// 2 z_diag + 4 z_stripe + 8 z_threeone.
double bad_event_bound(double beta, double kappa);

// PASS iff c z(B) < 1/2 and 2c z(B) <= 1/4.
Certificate peierls_certificate(double beta, double kappa, double c = 12.0);

// Z(h) = sum_sigma int prod dphi exp(-beta sum_x sum_j (phi_x - phi_{x+e_j} + h_x - h_{x+e_j})^2
//        - kappa/2 sum_x (phi_x - sigma_x)^2)
// on a ring (d = 1, L <= 8) or the 2 x 2 torus, by Gauss-Legendre on [-range, range].
struct DominationOptions {
  int nodes = 96;  // >= 64
  double range = 4.0;
  double tolerance = 1e-9;
};

double double_well_partition(const TorusSpec& torus, double beta, double kappa, const std::vector<double>& h,
                             const DominationOptions& opt = {});

std::vector<std::vector<double>> random_fields(const TorusSpec& torus, int count, std::uint64_t seed,
                                               double amplitude = 1.0);

// PASS iff Z(h) <= Z(0) (1 + tolerance) for every sample and Z(const) = Z(0).
Certificate gaussian_domination_bruteforce(const TorusSpec& torus, double beta, double kappa,
                                           const std::vector<std::vector<double>>& h_samples,
                                           const DominationOptions& opt = {});

struct ConditionalStats {
  std::vector<double> mean;
  std::vector<double> variance;
};

// phi given sigma under exp(-beta sum_x sum_j (phi_x - phi_{x+e_j})^2 - kappa/2 sum (phi_x - sigma_x)^2):
// precision 2 beta Delta_Q + kappa. Fourier diagonalization.
ConditionalStats conditional_gaussian_stats(const std::vector<int>& sigma, double beta, double kappa,
                                            const TorusSpec& torus);
// Dense Eigen solve of the same system.
ConditionalStats conditional_gaussian_stats_dense(const std::vector<int>& sigma, double beta, double kappa,
                                                  const TorusSpec& torus);
// Quadratic-form matrix of sum_x sum_j (phi_x - phi_{x+e_j})^2.
Eigen::MatrixXd torus_laplacian(const TorusSpec& torus);

// ---- Two-kappa gradient model ----

// Bond types on the disseminated plaquette: horizontal bonds depend on the
// row parity, vertical bonds on the column parity. true = kappa_D.
struct GradientPattern {
  enum class Class { AllO, AllD, ThreeOneD, OneOThreeD, ParallelPair, CornerPair };
  bool h_even = false, h_odd = false, v_even = false, v_odd = false;

  Class klass() const;
  int d_bonds() const;
  std::string str() const;  // "h:OD v:OO" style
  static GradientPattern representative(Class c);
};

const char* to_string(GradientPattern::Class c);
std::vector<GradientPattern> all_gradient_patterns();  // 16

// The displayed 2x2 block for three kappa_O bonds and one kappa_D bond
// (kappa_D on every other vertical line), coupling k and k + pi e1.
Eigen::Matrix2d gradient_block(double k1, double k2, double kappa_O, double kappa_D);
double gradient_block_determinant(double k1, double k2, double kappa_O, double kappa_D);

// Precision block of a general pattern over modes k, k+pi e1, k+pi e2, k+pi(e1+e2).
Eigen::Matrix4d gradient_pattern_block(const GradientPattern& p, double k1, double k2, double kappa_O,
                                       double kappa_D);

struct PatternFreeEnergy {
  double F = 0.0;
  double error = 0.0;
};

// 1/8 * zone average of log det of the 4x4 block (the Gaussian part only).
PatternFreeEnergy gradient_pattern_free_energy(const GradientPattern& p, double kappa_O, double kappa_D,
                                               const QuadratureSpec& quad = {});
// 1/4 * zone average of log det Pi (three-one pattern cross-check).
PatternFreeEnergy three_one_free_energy_block(double kappa_O, double kappa_D, const QuadratureSpec& quad = {});

// Gaussian part minus the a priori bond weights: each site owns two bonds,
// weighted p sqrt(kappa_O) or (1 - p) sqrt(kappa_D).
double gradient_bond_weight(const GradientPattern& pat, double kappa_O, double kappa_D, double p);
PatternFreeEnergy weighted_pattern_free_energy(const GradientPattern& pat, double kappa_O, double kappa_D, double p,
                                               const QuadratureSpec& quad = {});

// p_t / (1 - p_t) = (kappa_D / kappa_O)^{1/4}
double duality_pt(double kappa_O, double kappa_D);

// Weighted free energies of every class at p (default p_t); PASS iff every
// bad class exceeds the better homogeneous class.
Certificate gradient_pattern_certificate(double kappa_O, double kappa_D, double p = -1.0,
                                         const QuadratureSpec& quad = {});

}  // namespace rpl
