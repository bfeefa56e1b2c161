#pragma once

#include <string>
#include <vector>

#include "rpl/kernels.hpp"
#include "rpl/torus.hpp"

namespace rpl {

struct ModelSpec {
  enum class Family {
    Ising,
    Potts,
    On,
    LiquidCrystal,
    GFF,
    GaussianDoubleWell,
    GradientTwoKappa,
    OrbitalCompass,
    OneTwenty,
    NNNAntiferromagnet
  };

  Family family = Family::Ising;
  int q = 0;             // Potts states
  int n = 0;             // O(n) / liquid-crystal / compass component count
  double kappa = 0.0;    // GFF mass, double-well stiffness
  double kappa_O = 0.0;  // gradient model
  double kappa_D = 0.0;
  double p = 0.0;
  double gamma = 0.0;  // n.n. antiferromagnet strength

  static ModelSpec ising();
  static ModelSpec potts(int q);
  static ModelSpec o_n(int n);
  static ModelSpec liquid_crystal(int n);
  static ModelSpec gff(double kappa);
  static ModelSpec double_well(double kappa);
  static ModelSpec gradient_two_kappa(double kappa_O, double kappa_D, double p);
  static ModelSpec orbital_compass(int d);
  static ModelSpec one_twenty();
  static ModelSpec nnn_antiferromagnet(double gamma);

  int nu() const;          // dimension of the spin vectors entering the infrared bound
  int components() const;  // stored reals per site
  bool unit_spins() const;
  bool discrete() const;   // Ising or Potts
  bool pair_interaction() const;  // Hamiltonian built from a coupling matrix
  std::string name() const;
};

// Per-site values; discrete models also keep labels (Ising: +1/-1, Potts: 1..q).
struct SpinConfiguration {
  TorusSpec torus;
  int comps = 1;
  std::vector<double> values;
  std::vector<int> labels;

  SpinConfiguration(const TorusSpec& t, int c) : torus(t), comps(c), values(t.N() * c, 0.0) {}
  double* spin(std::size_t x) { return values.data() + x * comps; }
  const double* spin(std::size_t x) const { return values.data() + x * comps; }

  // Every site equal to `s` (length comps).
  static SpinConfiguration uniform(const ModelSpec& m, const TorusSpec& t, const std::vector<double>& s);
  static SpinConfiguration from_labels(const ModelSpec& m, const TorusSpec& t, const std::vector<int>& labels);
};

// Throws ValidationError unless config is a valid state of the model on its torus.
void validate(const ModelSpec& model, const SpinConfiguration& config);

// q unit vectors in R^{q-1} with pairwise dot products -1/(q-1), built inductively.
std::vector<std::vector<double>> tetrahedral_vectors(int q);
const std::vector<std::vector<double>>& cached_tetrahedral_vectors(int q);

double potts_dot(int a, int b, int q);  // labels in 1..q
// Tr(Q Q~) from the explicit traceless matrices Q = S S^T - I/n.
double qmatrix_trace(const std::vector<double>& S, const std::vector<double>& St);

enum class EnergyForm { Dot, Gradient };

// Pair-interaction families on the torus (ordered pairs):
//   Dot:      -1/2 sum_{x,y} J_{xy} S_x.S_y
//   Gradient: +1/2 sum_{x,y} J_{xy} |S_x - S_y|^2
// Liquid crystals use Tr(Q_x Q_y) for S_x.S_y and the Frobenius distance of Q's.
// GFF adds kappa/2 sum phi^2 to either form.
double torus_hamiltonian(const ModelSpec& model, const CouplingMatrix& couplings, const SpinConfiguration& config,
                         EnergyForm form = EnergyForm::Dot);

// Potts in label form: -1/2 sum_{x,y} J_{xy} delta(s_x, s_y). Equals (q-1)/q times
// the tetrahedral dot form plus a constant, hence beta_dot = beta_delta (q-1)/q.
double potts_label_hamiltonian(const CouplingMatrix& couplings, const SpinConfiguration& config);

// V(phi) = -log(exp(-kappa (phi-1)^2 / 2) + exp(-kappa (phi+1)^2 / 2))
double double_well_potential(double phi, double kappa);

// Compass, 120-degree and n.n./n.n.n. antiferromagnet energies (nearest-neighbour torus sums).
double specialized_hamiltonian(const ModelSpec& model, const SpinConfiguration& config);

// Double-well in the form beta * sum_<xy> (phi_x - phi_y)^2 + sum_x V(phi_x).
double double_well_energy(const SpinConfiguration& config, double beta, double kappa);

// Gradient model: sum_<xy> U(phi_y - phi_x), exp(-U) = p e^{-kO eta^2/2} + (1-p) e^{-kD eta^2/2}.
double gradient_model_energy(const ModelSpec& model, const SpinConfiguration& config);

}  // namespace rpl
