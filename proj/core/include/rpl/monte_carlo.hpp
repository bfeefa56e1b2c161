#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rpl/certificate.hpp"
#include "rpl/kernels.hpp"
#include "rpl/models.hpp"

namespace rpl {

// Which Hamiltonian beta multiplies for pair-interaction models.
//   Gradient: exp(-beta * 1/2 sum J |S_x - S_y|^2)   (infrared-bound convention)
//   Dot:      exp(+beta * 1/2 sum J S_x . S_y)
// For unit spins the two describe the same measure when beta_dot = 2 beta_grad.
enum class BetaConvention { Gradient, Dot };

const char* to_string(BetaConvention c);

struct SamplerSpec {
  enum class Update { Auto, Metropolis, HeatBath };
  enum class Start { Ordered, Random };

  double beta = 0.0;
  long sweeps = 1000;   // total, burn-in included
  long burn_in = 100;
  long thinning = 1;
  std::uint64_t seed = 1;
  Update update = Update::Auto;
  int chains = 1;
  BetaConvention convention = BetaConvention::Gradient;
  Start start = Start::Ordered;
  double proposal_width = 1.0;  // initial Metropolis width
  bool adapt = true;            // tune the width toward 0.4 acceptance during burn-in

  void validate() const;
  long retained_per_chain() const { return (sweeps - burn_in) / thinning; }
};

// beta in the exp(+beta/2 sum J S.S) normalization.
double dot_beta(double beta, BetaConvention c);

struct ChainStats {
  double acceptance = 1.0;
  double proposal_width = 0.0;
  long retained = 0;
};

using SampleObserver = std::function<void(const SpinConfiguration&)>;

// Runs chain number `chain` (seed derived from spec.seed and chain). Pair
// models read their couplings from `couplings`; specialized and double-well
// models only use its torus. Double-well samples carry sigma in `labels`.
ChainStats run_chain(const ModelSpec& model, const CouplingMatrix& couplings, const SamplerSpec& spec, int chain,
                     const SampleObserver& observe);

// All retained samples of all chains, chain-major. Small systems only.
std::vector<SpinConfiguration> collect_samples(const ModelSpec& model, const CouplingMatrix& couplings,
                                               const SamplerSpec& spec);

// Per-site vector entering correlations: the spin itself, or the flattened
// Q-matrix for liquid crystals.
std::vector<double> observable_components(const ModelSpec& model, const SpinConfiguration& config);

struct CorrelationEstimate {
  TorusSpec torus{1, 2};
  long samples = 0;
  int batches = 0;
  std::vector<double> c, c_se;        // E(S_0 . S_x), by displacement index
  std::vector<double> chat, chat_se;  // c-hat(k) = E|S-hat_k|^2 / N, reciprocal_grid order
  std::vector<double> magnetization;  // empirical mean spin m*
  double s0 = 0.0, s0_se = 0.0;       // E|N^{-1} S-hat_0|^2
  double parseval_residual = 0.0;     // max over samples of |sum_k |S-hat_k|^2 - N sum_x |S_x|^2| / N^2
  double mean_norm2 = 0.0;            // mean of |S_x|^2
  bool has_local_field = false;
  double local_field_var = 0.0;       // E|sum_x J_{0x} S_x - m*|^2, translation averaged
  double local_field_var_se = 0.0;
  double local_energy = 0.0;          // sum_x J_{0x} E(S_0 . S_x)
  double local_energy_se = 0.0;
};

// Streaming estimator: one per chain, merged in chain order.
class CorrelationAccumulator {
 public:
  // couplings may be null; then the local-field variance is not tracked.
  CorrelationAccumulator(const ModelSpec& model, const TorusSpec& torus, long expected_samples,
                         const CouplingMatrix* couplings = nullptr, int batches = 32);
  void add(const SpinConfiguration& config);
  void merge(const CorrelationAccumulator& other);
  CorrelationEstimate finish() const;

 private:
  ModelSpec model_;
  TorusSpec torus_;
  long expected_;
  int nbatch_;
  long count_ = 0;
  std::vector<double> jhat_;
  // Per batch: power spectrum sums, |S0/N|^2 sum, local-field |M|^2 sum, magnetization sums, counts.
  struct Batch {
    std::vector<double> power;
    std::vector<double> mag;
    double s0 = 0.0;
    double m2 = 0.0;
    double norm2 = 0.0;
    long n = 0;
  };
  std::vector<Batch> batches_;
  double parseval_ = 0.0;
  int comps_ = 0;
};

CorrelationEstimate estimate_two_point(const ModelSpec& model, const std::vector<SpinConfiguration>& samples,
                                       const CouplingMatrix* couplings = nullptr);

struct McRun {
  CorrelationEstimate estimate;
  std::vector<ChainStats> chains;
};

// Runs every chain (concurrently) through a CorrelationAccumulator.
McRun sample_correlations(const ModelSpec& model, const CouplingMatrix& couplings, const SamplerSpec& spec);

// c-hat(k) <= nu / (2 beta_grad) / (1 - J-hat^{(L)}(k)) + 3 SE on all k != 0.
Certificate check_infrared_bound(const CorrelationEstimate& est, const CouplingMatrix& couplings, double beta, int nu,
                                 BetaConvention convention = BetaConvention::Gradient, double z = 3.0);

struct SpinWaveStat {
  double statistic = 0.0;  // E|N^{-1} S-hat_0|^2
  double se = 0.0;
  double lower_bound = 0.0;  // 1 - nu / (2 beta_grad) G_L(0,0)
  double greens00 = 0.0;
  double parseval_residual = 0.0;
  bool holds = false;  // statistic >= lower_bound - 3 SE
};

SpinWaveStat spin_wave_condensation_stat(const ModelSpec& model, const CorrelationEstimate& est,
                                         const CouplingMatrix& couplings, double beta,
                                         BetaConvention convention = BetaConvention::Gradient);

// E|sum_x J_{0x} S_x - m*|^2 <= nu / (2 beta_grad) I_d + 3 SE.
Certificate check_key_estimate(const CorrelationEstimate& est, double beta, int nu, double I_d,
                               BetaConvention convention = BetaConvention::Gradient, double z = 3.0);

// sum_x J_{0x} E(S_0 . S_x) >= |m*|^2 - 3 SE.
Certificate check_energy_bound(const CorrelationEstimate& est, const CouplingMatrix& couplings, double z = 3.0);

}  // namespace rpl
