#include "rpl/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rpl/errors.hpp"
#include "rpl/fourier.hpp"
#include "rpl/parallel.hpp"
#include "rpl/rng.hpp"

namespace rpl {

using Fam = ModelSpec::Family;

const char* to_string(BetaConvention c) { return c == BetaConvention::Gradient ? "gradient" : "dot"; }

double dot_beta(double beta, BetaConvention c) { return c == BetaConvention::Gradient ? 2.0 * beta : beta; }

void SamplerSpec::validate() const {
  require(beta >= 0.0 && std::isfinite(beta), "beta must be finite and >= 0");
  require(sweeps >= 1, "sweeps must be positive");
  require(burn_in >= 0 && burn_in < sweeps, "burn_in must satisfy 0 <= burn_in < sweeps");
  require(thinning >= 1, "thinning must be >= 1");
  require(chains >= 1, "chains must be >= 1");
  require(proposal_width >= 0.0, "proposal width must be >= 0");
}

namespace {

double gaussian(Rng& rng) {
  // Box-Muller on the platform-independent uniform01.
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void random_unit(Rng& rng, double* out, int n) {
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (int a = 0; a < n; ++a) {
      out[a] = gaussian(rng);
      norm2 += out[a] * out[a];
    }
  } while (norm2 < 1e-20);
  const double inv = 1.0 / std::sqrt(norm2);
  for (int a = 0; a < n; ++a) out[a] *= inv;
}

// Off-diagonal couplings of the periodized matrix as per-site neighbour lists.
struct NeighbourTable {
  int m = 0;
  std::vector<std::size_t> idx;  // N * m
  std::vector<double> J;         // m, shared by all sites
  double self = 0.0;             // J^{(L)}_{00}

  NeighbourTable(const CouplingMatrix& cm) {
    const auto& t = cm.torus;
    std::vector<std::size_t> disp;
    for (std::size_t v = 1; v < t.N(); ++v)
      if (cm.values[v] != 0.0) {
        disp.push_back(v);
        J.push_back(cm.values[v]);
      }
    self = cm.values[0];
    m = static_cast<int>(disp.size());
    idx.resize(t.N() * m);
    std::vector<Site> dc;
    for (auto v : disp) dc.push_back(t.coords(v));
    for (std::size_t x = 0; x < t.N(); ++x) {
      const Site xs = t.coords(x);
      for (int j = 0; j < m; ++j) {
        Site y = xs;
        for (int a = 0; a < t.d(); ++a) y[a] += dc[j][a];
        idx[x * m + j] = t.index(y);
      }
    }
  }
  double row_sum() const {
    double s = 0.0;
    for (double v : J) s += v;
    return s;
  }
};

// Energy terms of the specialized models that involve site x.
double site_energy(const ModelSpec& model, const SpinConfiguration& c, std::size_t x) {
  const auto& t = c.torus;
  double h = 0.0;
  switch (model.family) {
    case Fam::OrbitalCompass:
      for (int a = 0; a < t.d(); ++a) {
        const double up = c.spin(x)[a] - c.spin(t.shift(x, a, 1))[a];
        const double dn = c.spin(t.shift(x, a, -1))[a] - c.spin(x)[a];
        h += up * up + dn * dn;
      }
      return h;
    case Fam::OneTwenty: {
      constexpr double r = std::numbers::sqrt3 / 2.0;
      const double b[3][2] = {{1.0, 0.0}, {-0.5, r}, {-0.5, -r}};
      for (int a = 0; a < 3; ++a) {
        const double* s = c.spin(x);
        const double* u = c.spin(t.shift(x, a, 1));
        const double* w = c.spin(t.shift(x, a, -1));
        const double up = (s[0] - u[0]) * b[a][0] + (s[1] - u[1]) * b[a][1];
        const double dn = (w[0] - s[0]) * b[a][0] + (w[1] - s[1]) * b[a][1];
        h += up * up + dn * dn;
      }
      return h;
    }
    case Fam::NNNAntiferromagnet: {
      const double* s = c.spin(x);
      auto dot = [&](std::size_t y) { return s[0] * c.spin(y)[0] + s[1] * c.spin(y)[1]; };
      double nn = 0.0, nnn = 0.0;
      for (int a = 0; a < 2; ++a) nn += dot(t.shift(x, a, 1)) + dot(t.shift(x, a, -1));
      for (int s1 : {-1, 1})
        for (int s2 : {-1, 1}) nnn += dot(t.shift(t.shift(x, 0, s1), 1, s2));
      return model.gamma * nn + nnn;
    }
    default:
      return 0.0;
  }
}

class Chain {
 public:
  Chain(const ModelSpec& model, const CouplingMatrix& cm, const SamplerSpec& spec, int chain)
      : model_(model),
        spec_(spec),
        torus_(cm.torus),
        nb_(cm),
        rng_(derive_seed(spec.seed, static_cast<std::uint64_t>(chain))),
        config_(cm.torus, model.components()),
        width_(spec.proposal_width) {
    beta_dot_ = dot_beta(spec.beta, spec.convention);
    beta_grad_ = 0.5 * beta_dot_;
    if (model.family == Fam::Potts) tetra_ = cached_tetrahedral_vectors(model.q);
    heat_bath_ = spec.update != SamplerSpec::Update::Metropolis &&
                 (model.discrete() || model.family == Fam::GFF || model.family == Fam::GaussianDoubleWell);
    require(!(spec.update == SamplerSpec::Update::HeatBath && !heat_bath_),
            "heat-bath updates are available for Ising, Potts, GFF and double-well models");
    require(model.family != Fam::GradientTwoKappa, "the two-kappa gradient model is not sampled");
    if (model.family == Fam::GFF) require(model.kappa > 0.0, "massless GFF is not normalizable; use kappa > 0");
    if (model.family == Fam::OrbitalCompass || model.family == Fam::OneTwenty ||
        model.family == Fam::NNNAntiferromagnet) {
      validate(model, SpinConfiguration::uniform(model, torus_, unit_e1()));
    }
    initialize();
  }

  ChainStats run(const SampleObserver& observe) {
    long accepted = 0, proposed = 0;
    long window_acc = 0, window_prop = 0;
    ChainStats stats;
    for (long sweep = 0; sweep < spec_.sweeps; ++sweep) {
      const bool burning = sweep < spec_.burn_in;
      long acc = 0, prop = 0;
      this->sweep(acc, prop);
      if (burning) {
        window_acc += acc;
        window_prop += prop;
        if (spec_.adapt && (sweep + 1) % 10 == 0 && window_prop > 0) {
          const double rate = static_cast<double>(window_acc) / window_prop;
          width_ = std::clamp(width_ * std::exp(2.0 * (rate - 0.4)), 1e-4, 1e3);
          window_acc = window_prop = 0;
        }
        continue;
      }
      accepted += acc;
      proposed += prop;
      if ((sweep - spec_.burn_in + 1) % spec_.thinning == 0) {
        observe(config_);
        ++stats.retained;
      }
    }
    stats.acceptance = proposed > 0 ? static_cast<double>(accepted) / proposed : 1.0;
    stats.proposal_width = width_;
    return stats;
  }

 private:
  std::vector<double> unit_e1() const {
    std::vector<double> e(model_.components(), 0.0);
    e[0] = 1.0;
    return e;
  }

  void initialize() {
    const int c = config_.comps;
    const bool ordered = spec_.start == SamplerSpec::Start::Ordered;
    switch (model_.family) {
      case Fam::Ising:
      case Fam::Potts: {
        std::vector<int> labels(torus_.N(), 1);
        if (!ordered) {
          for (auto& l : labels)
            l = model_.family == Fam::Ising ? (uniform01(rng_) < 0.5 ? 1 : -1)
                                            : 1 + static_cast<int>(uniform01(rng_) * model_.q);
        }
        config_ = SpinConfiguration::from_labels(model_, torus_, labels);
        break;
      }
      case Fam::GFF:
        break;
      case Fam::GaussianDoubleWell:
        config_.labels.assign(torus_.N(), 1);
        for (std::size_t x = 0; x < torus_.N(); ++x) {
          if (!ordered && uniform01(rng_) < 0.5) config_.labels[x] = -1;
          config_.values[x] = config_.labels[x];
        }
        break;
      default:
        for (std::size_t x = 0; x < torus_.N(); ++x) {
          if (ordered) {
            config_.spin(x)[0] = 1.0;
          } else {
            random_unit(rng_, config_.spin(x), c);
          }
        }
    }
  }

  void local_field(std::size_t x, double* h) {
    const int c = config_.comps;
    std::fill(h, h + c, 0.0);
    const std::size_t* ys = &nb_.idx[x * nb_.m];
    for (int j = 0; j < nb_.m; ++j) {
      const double* s = config_.spin(ys[j]);
      for (int a = 0; a < c; ++a) h[a] += nb_.J[j] * s[a];
    }
  }

  void sweep(long& acc, long& prop) {
    const std::size_t N = torus_.N();
    switch (model_.family) {
      case Fam::Ising:
      case Fam::Potts:
        if (heat_bath_) {
          for (std::size_t x = 0; x < N; ++x) discrete_heat_bath(x);
        } else {
          for (std::size_t x = 0; x < N; ++x) discrete_metropolis(x, acc, prop);
        }
        return;
      case Fam::GFF:
        for (std::size_t x = 0; x < N; ++x) heat_bath_ ? gff_heat_bath(x) : gff_metropolis(x, acc, prop);
        return;
      case Fam::GaussianDoubleWell:
        for (std::size_t x = 0; x < N; ++x) double_well_phi(x);
        for (std::size_t x = 0; x < N; ++x) double_well_sigma(x);
        return;
      case Fam::On:
      case Fam::LiquidCrystal:
        for (std::size_t x = 0; x < N; ++x) vector_metropolis(x, acc, prop);
        return;
      default:
        for (std::size_t x = 0; x < N; ++x) specialized_metropolis(x, acc, prop);
        return;
    }
  }

  void set_label(std::size_t x, int label) {
    config_.labels[x] = label;
    if (model_.family == Fam::Ising) {
      config_.values[x] = label;
    } else {
      const auto& v = tetra_[label - 1];
      std::copy(v.begin(), v.end(), config_.spin(x));
    }
  }

  // Log-weight of label a at site x given the local field h (dot normalization).
  double label_logw(int label, const double* h) const {
    if (model_.family == Fam::Ising) return beta_dot_ * label * h[0];
    const auto& v = tetra_[label - 1];
    double s = 0.0;
    for (std::size_t a = 0; a < v.size(); ++a) s += v[a] * h[a];
    return beta_dot_ * s;
  }

  void discrete_heat_bath(std::size_t x) {
    double h[64];
    local_field(x, h);
    if (model_.family == Fam::Ising) {
      const double p_up = 1.0 / (1.0 + std::exp(-2.0 * beta_dot_ * h[0]));
      set_label(x, uniform01(rng_) < p_up ? 1 : -1);
      return;
    }
    const int q = model_.q;
    std::vector<double> w(q);
    double mx = -INFINITY;
    for (int a = 0; a < q; ++a) mx = std::max(mx, w[a] = label_logw(a + 1, h));
    double total = 0.0;
    for (auto& v : w) total += v = std::exp(v - mx);
    double u = uniform01(rng_) * total;
    int pick = q;
    for (int a = 0; a < q; ++a) {
      if (u < w[a]) {
        pick = a + 1;
        break;
      }
      u -= w[a];
    }
    set_label(x, pick);
  }

  void discrete_metropolis(std::size_t x, long& acc, long& prop) {
    double h[64];
    local_field(x, h);
    const int cur = config_.labels[x];
    // The proposal includes the current label: a deterministic flip makes the
    // sequential sweep periodic when the local field vanishes.
    int next;
    if (model_.family == Fam::Ising) {
      next = uniform01(rng_) < 0.5 ? 1 : -1;
    } else {
      next = 1 + static_cast<int>(uniform01(rng_) * model_.q);
    }
    ++prop;
    if (next == cur) {
      ++acc;
      return;
    }
    const double dlog = label_logw(next, h) - label_logw(cur, h);
    if (dlog >= 0.0 || uniform01(rng_) < std::exp(dlog)) {
      set_label(x, next);
      ++acc;
    }
  }

  // Conditional of phi_x under exp(-beta_grad/2 sum J (phi_x - phi_y)^2 - kappa/2 sum phi^2).
  void gff_conditional(std::size_t x, double& mean, double& prec) {
    double h = 0.0;
    local_field(x, &h);
    const double r = nb_.row_sum();
    prec = 2.0 * beta_grad_ * r + model_.kappa;
    mean = 2.0 * beta_grad_ * h / prec;
  }

  void gff_heat_bath(std::size_t x) {
    double mean, prec;
    gff_conditional(x, mean, prec);
    config_.values[x] = mean + gaussian(rng_) / std::sqrt(prec);
  }

  void gff_metropolis(std::size_t x, long& acc, long& prop) {
    double mean, prec;
    gff_conditional(x, mean, prec);
    const double old = config_.values[x];
    const double nw = old + width_ * gaussian(rng_);
    ++prop;
    const double dlog = -0.5 * prec * ((nw - mean) * (nw - mean) - (old - mean) * (old - mean));
    if (dlog >= 0.0 || uniform01(rng_) < std::exp(dlog)) {
      config_.values[x] = nw;
      ++acc;
    }
  }

  // Extended weight exp(-beta sum_<xy> (phi_x - phi_y)^2 - kappa/2 sum (phi_x - sigma_x)^2).
  void double_well_phi(std::size_t x) {
    const int d = torus_.d();
    double s = 0.0;
    for (int a = 0; a < d; ++a) s += config_.values[torus_.shift(x, a, 1)] + config_.values[torus_.shift(x, a, -1)];
    const double beta = spec_.beta;
    const double prec = 4.0 * d * beta + model_.kappa;
    const double mean = (2.0 * beta * s + model_.kappa * config_.labels[x]) / prec;
    config_.values[x] = mean + gaussian(rng_) / std::sqrt(prec);
  }

  void double_well_sigma(std::size_t x) {
    const double p_up = 1.0 / (1.0 + std::exp(-2.0 * model_.kappa * config_.values[x]));
    config_.labels[x] = uniform01(rng_) < p_up ? 1 : -1;
  }

  double pair_term(const double* a, const double* b, int c) const {
    double dot = 0.0;
    for (int i = 0; i < c; ++i) dot += a[i] * b[i];
    return model_.family == Fam::LiquidCrystal ? dot * dot : dot;
  }

  void propose_unit(const double* cur, double* out, int c) {
    double norm2 = 0.0;
    for (int a = 0; a < c; ++a) {
      out[a] = cur[a] + width_ * gaussian(rng_);
      norm2 += out[a] * out[a];
    }
    if (norm2 < 1e-24) {
      std::copy(cur, cur + c, out);
      return;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (int a = 0; a < c; ++a) out[a] *= inv;
  }

  void vector_metropolis(std::size_t x, long& acc, long& prop) {
    const int c = config_.comps;
    double nw[64];
    double* cur = config_.spin(x);
    propose_unit(cur, nw, c);
    ++prop;
    double dlog = 0.0;
    const std::size_t* ys = &nb_.idx[x * nb_.m];
    if (model_.family == Fam::On) {
      double h[64];
      local_field(x, h);
      for (int a = 0; a < c; ++a) dlog += (nw[a] - cur[a]) * h[a];
    } else {
      for (int j = 0; j < nb_.m; ++j) {
        const double* s = config_.spin(ys[j]);
        dlog += nb_.J[j] * (pair_term(nw, s, c) - pair_term(cur, s, c));
      }
    }
    dlog *= beta_dot_;
    if (dlog >= 0.0 || uniform01(rng_) < std::exp(dlog)) {
      std::copy(nw, nw + c, cur);
      ++acc;
    }
  }

  void specialized_metropolis(std::size_t x, long& acc, long& prop) {
    const int c = config_.comps;
    double old[8], nw[8];
    double* cur = config_.spin(x);
    std::copy(cur, cur + c, old);
    propose_unit(old, nw, c);
    ++prop;
    const double e0 = site_energy(model_, config_, x);
    std::copy(nw, nw + c, cur);
    const double e1 = site_energy(model_, config_, x);
    const double dlog = -spec_.beta * (e1 - e0);
    if (dlog >= 0.0 || uniform01(rng_) < std::exp(dlog)) {
      ++acc;
    } else {
      std::copy(old, old + c, cur);
    }
  }

  ModelSpec model_;
  SamplerSpec spec_;
  TorusSpec torus_;
  NeighbourTable nb_;
  Rng rng_;
  SpinConfiguration config_;
  double width_;
  double beta_dot_ = 0.0;
  double beta_grad_ = 0.0;
  bool heat_bath_ = false;
  std::vector<std::vector<double>> tetra_;
};

}  // namespace

ChainStats run_chain(const ModelSpec& model, const CouplingMatrix& couplings, const SamplerSpec& spec, int chain,
                     const SampleObserver& observe) {
  spec.validate();
  require(model.components() <= 64, "at most 64 spin components are supported");
  Chain c(model, couplings, spec, chain);
  return c.run(observe);
}

std::vector<SpinConfiguration> collect_samples(const ModelSpec& model, const CouplingMatrix& couplings,
                                               const SamplerSpec& spec) {
  std::vector<std::vector<SpinConfiguration>> per(spec.chains);
  parallel_for(static_cast<std::size_t>(spec.chains), [&](std::size_t i) {
    run_chain(model, couplings, spec, static_cast<int>(i), [&](const SpinConfiguration& s) { per[i].push_back(s); });
  });
  std::vector<SpinConfiguration> out;
  for (auto& v : per)
    for (auto& s : v) out.push_back(std::move(s));
  return out;
}

std::vector<double> observable_components(const ModelSpec& model, const SpinConfiguration& config) {
  if (model.family != Fam::LiquidCrystal) return config.values;
  const int n = model.n;
  std::vector<double> out(config.torus.N() * n * n);
  for (std::size_t x = 0; x < config.torus.N(); ++x) {
    const double* s = config.spin(x);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) out[(x * n + a) * n + b] = s[a] * s[b] - (a == b ? 1.0 / n : 0.0);
  }
  return out;
}

CorrelationAccumulator::CorrelationAccumulator(const ModelSpec& model, const TorusSpec& torus, long expected_samples,
                                               const CouplingMatrix* couplings, int batches)
    : model_(model), torus_(torus), expected_(std::max(1L, expected_samples)) {
  nbatch_ = static_cast<int>(std::min<long>(batches, expected_));
  comps_ = model.family == Fam::LiquidCrystal ? model.n * model.n : model.components();
  if (couplings) {
    require(couplings->torus == torus, "couplings live on a different torus");
    jhat_ = couplings->transform();
  }
  batches_.resize(nbatch_);
  for (auto& b : batches_) {
    b.power.assign(torus.N(), 0.0);
    b.mag.assign(comps_, 0.0);
  }
}

void CorrelationAccumulator::add(const SpinConfiguration& config) {
  const std::size_t N = torus_.N();
  const auto comp = observable_components(model_, config);
  const int c = comps_;
  auto b = static_cast<std::size_t>(std::min<long>(nbatch_ - 1, count_ * nbatch_ / expected_));
  Batch& B = batches_[b];
  std::vector<double> power(N, 0.0);
  std::vector<cplx> f(N);
  double norm2 = 0.0;
  for (int a = 0; a < c; ++a) {
    for (std::size_t x = 0; x < N; ++x) {
      f[x] = comp[x * c + a];
      norm2 += comp[x * c + a] * comp[x * c + a];
    }
    torus_dft(torus_, f, +1);
    for (std::size_t k = 0; k < N; ++k) power[k] += std::norm(f[k]);
    B.mag[a] += f[0].real() / static_cast<double>(N);
  }
  const double n = static_cast<double>(N);
  double total = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    total += power[k];
    B.power[k] += power[k] / n;
    if (!jhat_.empty()) m2 += jhat_[k] * jhat_[k] * power[k];
  }
  parseval_ = std::max(parseval_, std::abs(total - n * norm2) / (n * n));
  B.s0 += power[0] / (n * n);
  B.m2 += m2 / (n * n);
  B.norm2 += norm2 / n;
  ++B.n;
  ++count_;
}

void CorrelationAccumulator::merge(const CorrelationAccumulator& other) {
  require(other.torus_ == torus_ && other.comps_ == comps_, "cannot merge accumulators of different shapes");
  batches_.insert(batches_.end(), other.batches_.begin(), other.batches_.end());
  parseval_ = std::max(parseval_, other.parseval_);
  count_ += other.count_;
  nbatch_ += other.nbatch_;
}

namespace {

// Mean over all samples and batch-means standard error.
struct BatchSummary {
  double mean = 0.0;
  double se = 0.0;
};

template <class Get>
BatchSummary summarize(const std::vector<long>& counts, Get get, double pooled_mean) {
  std::vector<double> means;
  for (std::size_t b = 0; b < counts.size(); ++b)
    if (counts[b] > 0) means.push_back(get(b) / static_cast<double>(counts[b]));
  BatchSummary s;
  s.mean = pooled_mean;
  const auto B = static_cast<double>(means.size());
  if (means.size() >= 2) {
    double avg = 0.0;
    for (double m : means) avg += m;
    avg /= B;
    double v = 0.0;
    for (double m : means) v += (m - avg) * (m - avg);
    s.se = std::sqrt(v / (B * (B - 1.0)));
  }
  return s;
}

}  // namespace

CorrelationEstimate CorrelationAccumulator::finish() const {
  require(count_ >= 2, "at least two retained samples are needed for error estimates");
  const std::size_t N = torus_.N();
  const double n = static_cast<double>(N);
  CorrelationEstimate e;
  e.torus = torus_;
  e.samples = count_;
  std::vector<long> counts;
  for (const auto& b : batches_) counts.push_back(b.n);
  e.batches = static_cast<int>(std::count_if(counts.begin(), counts.end(), [](long c) { return c > 0; }));
  const double total = static_cast<double>(count_);

  auto pooled = [&](auto get) {
    double s = 0.0;
    for (std::size_t b = 0; b < batches_.size(); ++b) s += get(b);
    return s / total;
  };

  e.chat.resize(N);
  e.chat_se.resize(N);
  for (std::size_t k = 0; k < N; ++k) {
    auto get = [&](std::size_t b) { return batches_[b].power[k]; };
    const auto s = summarize(counts, get, pooled(get));
    e.chat[k] = s.mean;
    e.chat_se[k] = s.se;
  }

  // c(x) = N^{-1} sum_k c-hat(k) e^{-ik.x}; per batch for the error bars.
  auto to_real_space = [&](const std::vector<double>& ch) {
    std::vector<cplx> f(ch.begin(), ch.end());
    torus_dft(torus_, f, -1);
    std::vector<double> out(N);
    for (std::size_t x = 0; x < N; ++x) out[x] = f[x].real() / n;
    return out;
  };
  e.c = to_real_space(e.chat);
  std::vector<std::vector<double>> cb;
  for (const auto& b : batches_) {
    if (b.n == 0) continue;
    std::vector<double> m(N);
    for (std::size_t k = 0; k < N; ++k) m[k] = b.power[k] / static_cast<double>(b.n);
    cb.push_back(to_real_space(m));
  }
  e.c_se.assign(N, 0.0);
  if (cb.size() >= 2) {
    const double B = static_cast<double>(cb.size());
    for (std::size_t x = 0; x < N; ++x) {
      double avg = 0.0;
      for (const auto& v : cb) avg += v[x];
      avg /= B;
      double var = 0.0;
      for (const auto& v : cb) var += (v[x] - avg) * (v[x] - avg);
      e.c_se[x] = std::sqrt(var / (B * (B - 1.0)));
    }
  }

  e.magnetization.assign(comps_, 0.0);
  for (int a = 0; a < comps_; ++a) e.magnetization[a] = pooled([&](std::size_t b) { return batches_[b].mag[a]; });
  {
    auto get = [&](std::size_t b) { return batches_[b].s0; };
    const auto s = summarize(counts, get, pooled(get));
    e.s0 = s.mean;
    e.s0_se = s.se;
  }
  e.mean_norm2 = pooled([&](std::size_t b) { return batches_[b].norm2; });
  e.parseval_residual = parseval_;

  if (!jhat_.empty()) {
    e.has_local_field = true;
    const auto& m = e.magnetization;
    double mm = 0.0;
    for (double v : m) mm += v * v;
    // Per-sample value |M|^2 - 2 m*.mag + |m*|^2, summed per batch.
    auto get = [&](std::size_t b) {
      double dot = 0.0;
      for (int a = 0; a < comps_; ++a) dot += m[a] * batches_[b].mag[a];
      return batches_[b].m2 - 2.0 * dot + mm * static_cast<double>(batches_[b].n);
    };
    const auto s = summarize(counts, get, pooled(get));
    e.local_field_var = s.mean;
    e.local_field_var_se = s.se;
    auto energy = [&](std::size_t b) {
      double acc = 0.0;
      for (std::size_t k = 0; k < N; ++k) acc += jhat_[k] * batches_[b].power[k];
      return acc / n;
    };
    const auto es = summarize(counts, energy, pooled(energy));
    e.local_energy = es.mean;
    e.local_energy_se = es.se;
  }
  return e;
}

CorrelationEstimate estimate_two_point(const ModelSpec& model, const std::vector<SpinConfiguration>& samples,
                                       const CouplingMatrix* couplings) {
  require(samples.size() >= 2, "at least two retained samples are needed for error estimates");
  CorrelationAccumulator acc(model, samples.front().torus, static_cast<long>(samples.size()), couplings);
  for (const auto& s : samples) acc.add(s);
  return acc.finish();
}

McRun sample_correlations(const ModelSpec& model, const CouplingMatrix& couplings, const SamplerSpec& spec) {
  spec.validate();
  const bool pair = model.pair_interaction();
  std::vector<CorrelationAccumulator> accs;
  accs.reserve(spec.chains);
  for (int i = 0; i < spec.chains; ++i)
    accs.emplace_back(model, couplings.torus, spec.retained_per_chain(), pair ? &couplings : nullptr);
  std::vector<ChainStats> stats(spec.chains);
  parallel_for(static_cast<std::size_t>(spec.chains), [&](std::size_t i) {
    stats[i] = run_chain(model, couplings, spec, static_cast<int>(i), [&](const SpinConfiguration& s) { accs[i].add(s); });
  });
  for (int i = 1; i < spec.chains; ++i) accs[0].merge(accs[i]);
  return {accs[0].finish(), stats};
}

Certificate check_infrared_bound(const CorrelationEstimate& est, const CouplingMatrix& couplings, double beta, int nu,
                                 BetaConvention convention, double z) {
  require(beta > 0.0, "infrared bound needs beta > 0");
  require(couplings.torus == est.torus, "estimate and couplings live on different tori");
  const double bg = 0.5 * dot_beta(beta, convention);
  const auto jhat = couplings.transform();
  Certificate cert;
  cert.name = "infrared_bound";
  cert.param("beta", beta);
  cert.param("beta_grad", bg);
  cert.param("nu", nu);
  cert.param("z", z);
  cert.param("samples", static_cast<double>(est.samples));
  double worst_se = INFINITY, worst_ratio = 0.0;
  std::size_t worst_k = 0;
  bool ok = true;
  for (std::size_t k = 1; k < jhat.size(); ++k) {
    const double gap = 1.0 - jhat[k];
    if (!(gap > 0.0)) continue;
    const double bound = nu / (2.0 * bg) / gap;
    const double allowed = bound + z * est.chat_se[k];
    const bool pass = est.chat[k] <= allowed;
    ok = ok && pass;
    const double se = est.chat_se[k] > 0.0 ? est.chat_se[k] : 1e-300;
    const double margin_se = (bound - est.chat[k]) / se;
    if (margin_se < worst_se) {
      worst_se = margin_se;
      worst_k = k;
    }
    worst_ratio = std::max(worst_ratio, est.chat[k] / bound);
    if (!pass) cert.checks.push_back({"chat(k=" + std::to_string(k) + ") <= bound + z*se", est.chat[k], allowed, false});
  }
  const double gap = 1.0 - jhat[worst_k];
  cert.check("worst mode chat <= bound + z*se", est.chat[worst_k], nu / (2.0 * bg) / gap + z * est.chat_se[worst_k]);
  cert.quantity("worst_mode_index", static_cast<double>(worst_k));
  cert.quantity("worst_margin_se", worst_se);
  cert.quantity("max_ratio_to_bound", worst_ratio);
  cert.note = "zero mode excluded";
  cert.pass = ok;
  return cert;
}

SpinWaveStat spin_wave_condensation_stat(const ModelSpec& model, const CorrelationEstimate& est,
                                         const CouplingMatrix& couplings, double beta, BetaConvention convention) {
  require(model.unit_spins() && model.family != Fam::LiquidCrystal, "spin-wave condensation needs unit spins");
  require(beta > 0.0, "spin-wave condensation needs beta > 0");
  const double bg = 0.5 * dot_beta(beta, convention);
  SpinWaveStat s;
  s.greens00 = torus_green_function(couplings)[0];
  s.lower_bound = 1.0 - model.nu() / (2.0 * bg) * s.greens00;
  s.statistic = est.s0;
  s.se = est.s0_se;
  s.parseval_residual = est.parseval_residual;
  s.holds = s.statistic >= s.lower_bound - 3.0 * s.se;
  return s;
}

Certificate check_key_estimate(const CorrelationEstimate& est, double beta, int nu, double I_d,
                               BetaConvention convention, double z) {
  require(est.has_local_field, "key estimate needs an estimate built with couplings");
  require(std::isfinite(I_d), "key estimate needs a transient kernel (finite I_d)");
  require(beta > 0.0, "key estimate needs beta > 0");
  const double bg = 0.5 * dot_beta(beta, convention);
  Certificate cert;
  cert.name = "key_estimate";
  cert.param("beta", beta);
  cert.param("beta_grad", bg);
  cert.param("nu", nu);
  cert.param("I_d", I_d);
  const double bound = nu / (2.0 * bg) * I_d;
  cert.quantity("variance", est.local_field_var);
  cert.quantity("variance_se", est.local_field_var_se);
  cert.quantity("bound", bound);
  cert.pass = cert.check("E|M0 - m*|^2 <= nu/(2 beta) I_d + z*se", est.local_field_var,
                         bound + z * est.local_field_var_se);
  return cert;
}

Certificate check_energy_bound(const CorrelationEstimate& est, const CouplingMatrix& couplings, double z) {
  require(est.has_local_field, "energy bound needs an estimate built with couplings");
  require(couplings.torus == est.torus, "estimate and couplings live on different tori");
  double mm = 0.0;
  for (double v : est.magnetization) mm += v * v;
  Certificate cert;
  cert.name = "energy_bound";
  cert.quantity("energy", est.local_energy);
  cert.quantity("energy_se", est.local_energy_se);
  cert.quantity("m_star_sq", mm);
  cert.pass = cert.check("|m*|^2 <= sum_x J_0x E(S0.Sx) + z*se", mm, est.local_energy + z * est.local_energy_se);
  return cert;
}

}  // namespace rpl
