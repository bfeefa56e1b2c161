#include "rpl/models.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "rpl/errors.hpp"

namespace rpl {

using F = ModelSpec::Family;

ModelSpec ModelSpec::ising() { return ModelSpec{}; }

ModelSpec ModelSpec::potts(int q) {
  require(q >= 2, "Potts model needs q >= 2");
  ModelSpec m;
  m.family = F::Potts;
  m.q = q;
  return m;
}

ModelSpec ModelSpec::o_n(int n) {
  require(n >= 1, "O(n) model needs n >= 1");
  ModelSpec m;
  m.family = F::On;
  m.n = n;
  return m;
}

ModelSpec ModelSpec::liquid_crystal(int n) {
  require(n >= 2, "liquid-crystal model needs n >= 2");
  ModelSpec m;
  m.family = F::LiquidCrystal;
  m.n = n;
  return m;
}

ModelSpec ModelSpec::gff(double kappa) {
  require(kappa >= 0.0 && std::isfinite(kappa), "GFF mass must be finite and >= 0");
  ModelSpec m;
  m.family = F::GFF;
  m.kappa = kappa;
  return m;
}

ModelSpec ModelSpec::double_well(double kappa) {
  require(kappa > 0.0 && std::isfinite(kappa), "double-well stiffness must be positive");
  ModelSpec m;
  m.family = F::GaussianDoubleWell;
  m.kappa = kappa;
  return m;
}

ModelSpec ModelSpec::gradient_two_kappa(double kappa_O, double kappa_D, double p) {
  require(kappa_O > 0.0 && kappa_D > 0.0, "gradient-model stiffnesses must be positive");
  require(p >= 0.0 && p <= 1.0, "gradient-model weight p must lie in [0, 1]");
  ModelSpec m;
  m.family = F::GradientTwoKappa;
  m.kappa_O = kappa_O;
  m.kappa_D = kappa_D;
  m.p = p;
  return m;
}

ModelSpec ModelSpec::orbital_compass(int d) {
  require(d == 2 || d == 3, "orbital compass model is defined for d = 2 or 3");
  ModelSpec m;
  m.family = F::OrbitalCompass;
  m.n = d;
  return m;
}

ModelSpec ModelSpec::one_twenty() {
  ModelSpec m;
  m.family = F::OneTwenty;
  m.n = 2;
  return m;
}

ModelSpec ModelSpec::nnn_antiferromagnet(double gamma) {
  require(std::abs(gamma) < 2.0, "antiferromagnet requires |gamma| < 2");
  ModelSpec m;
  m.family = F::NNNAntiferromagnet;
  m.n = 2;
  m.gamma = gamma;
  return m;
}

int ModelSpec::nu() const {
  switch (family) {
    case F::Ising:
      return 1;
    case F::Potts:
      return q - 1;
    case F::On:
    case F::OrbitalCompass:
    case F::OneTwenty:
    case F::NNNAntiferromagnet:
      return n;
    case F::LiquidCrystal:
      return n * (n + 1) / 2 - 1;
    default:
      return 1;
  }
}

int ModelSpec::components() const {
  switch (family) {
    case F::Potts:
      return q - 1;
    case F::On:
    case F::LiquidCrystal:
    case F::OrbitalCompass:
    case F::OneTwenty:
    case F::NNNAntiferromagnet:
      return n;
    default:
      return 1;
  }
}

bool ModelSpec::unit_spins() const {
  return family != F::GFF && family != F::GaussianDoubleWell && family != F::GradientTwoKappa;
}

bool ModelSpec::discrete() const { return family == F::Ising || family == F::Potts; }

bool ModelSpec::pair_interaction() const {
  return family == F::Ising || family == F::Potts || family == F::On || family == F::LiquidCrystal ||
         family == F::GFF;
}

std::string ModelSpec::name() const {
  switch (family) {
    case F::Ising:
      return "ising";
    case F::Potts:
      return "potts(q=" + std::to_string(q) + ")";
    case F::On:
      return "o(" + std::to_string(n) + ")";
    case F::LiquidCrystal:
      return "liquid-crystal(n=" + std::to_string(n) + ")";
    case F::GFF:
      return "gff";
    case F::GaussianDoubleWell:
      return "double-well";
    case F::GradientTwoKappa:
      return "gradient-two-kappa";
    case F::OrbitalCompass:
      return "compass(d=" + std::to_string(n) + ")";
    case F::OneTwenty:
      return "120-degree";
    case F::NNNAntiferromagnet:
      return "nnn-antiferromagnet";
  }
  return "?";
}

SpinConfiguration SpinConfiguration::uniform(const ModelSpec& m, const TorusSpec& t, const std::vector<double>& s) {
  require(static_cast<int>(s.size()) == m.components(), "uniform spin has wrong length");
  SpinConfiguration c(t, m.components());
  for (std::size_t x = 0; x < t.N(); ++x)
    for (int a = 0; a < c.comps; ++a) c.values[x * c.comps + a] = s[a];
  return c;
}

SpinConfiguration SpinConfiguration::from_labels(const ModelSpec& m, const TorusSpec& t,
                                                 const std::vector<int>& labels) {
  require(m.discrete(), "labels only apply to Ising and Potts models");
  require(labels.size() == t.N(), "label count does not match torus");
  SpinConfiguration c(t, m.components());
  c.labels = labels;
  for (std::size_t x = 0; x < t.N(); ++x) {
    if (m.family == F::Ising) {
      require(labels[x] == 1 || labels[x] == -1, "Ising labels must be +1 or -1");
      c.values[x] = labels[x];
    } else {
      require(labels[x] >= 1 && labels[x] <= m.q, "Potts labels must lie in 1..q");
      const auto& v = cached_tetrahedral_vectors(m.q)[labels[x] - 1];
      for (int a = 0; a < c.comps; ++a) c.values[x * c.comps + a] = v[a];
    }
  }
  return c;
}

void validate(const ModelSpec& model, const SpinConfiguration& config) {
  require(config.comps == model.components(), "configuration layout does not match model " + model.name());
  require(config.values.size() == config.torus.N() * config.comps, "configuration size does not match torus");
  for (double v : config.values) require(std::isfinite(v), "configuration has non-finite values");
  if (model.unit_spins()) {
    for (std::size_t x = 0; x < config.torus.N(); ++x) {
      double n2 = 0.0;
      for (int a = 0; a < config.comps; ++a) n2 += config.spin(x)[a] * config.spin(x)[a];
      require(std::abs(std::sqrt(n2) - 1.0) <= 1e-12, "spin at site " + std::to_string(x) + " is not a unit vector");
    }
  }
  if (model.family == F::Potts && !config.labels.empty()) {
    for (int l : config.labels) require(l >= 1 && l <= model.q, "Potts labels must lie in 1..q");
  }
  const int d = config.torus.d();
  if (model.family == F::OrbitalCompass) require(d == model.n, "compass spins must have d components");
  if (model.family == F::OneTwenty) require(d == 3, "120-degree model lives on a 3-dimensional torus");
  if (model.family == F::NNNAntiferromagnet) require(d == 2, "antiferromagnet lives on a 2-dimensional torus");
}

std::vector<std::vector<double>> tetrahedral_vectors(int q) {
  require(q >= 2, "tetrahedral representation needs q >= 2");
  std::vector<std::vector<double>> v{{1.0}, {-1.0}};
  for (int m = 3; m <= q; ++m) {
    const double a = -1.0 / (m - 1);
    const double c = std::sqrt(1.0 - a * a);
    std::vector<std::vector<double>> next;
    std::vector<double> first(m - 1, 0.0);
    first[0] = 1.0;
    next.push_back(first);
    for (const auto& u : v) {
      std::vector<double> w(m - 1);
      w[0] = a;
      for (int j = 0; j < m - 2; ++j) w[j + 1] = c * u[j];
      next.push_back(w);
    }
    v = std::move(next);
  }
  return v;
}

const std::vector<std::vector<double>>& cached_tetrahedral_vectors(int q) {
  static std::mutex mu;
  static std::map<int, std::vector<std::vector<double>>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(q);
  if (it == cache.end()) it = cache.emplace(q, tetrahedral_vectors(q)).first;
  return it->second;
}

double potts_dot(int a, int b, int q) {
  require(q >= 2, "Potts model needs q >= 2");
  require(a >= 1 && a <= q && b >= 1 && b <= q, "Potts labels must lie in 1..q");
  return (a == b ? static_cast<double>(q) / (q - 1) : 0.0) - 1.0 / (q - 1);
}

double qmatrix_trace(const std::vector<double>& S, const std::vector<double>& St) {
  require(S.size() == St.size() && S.size() >= 2, "Q-matrix spins need equal length >= 2");
  const auto n = static_cast<Eigen::Index>(S.size());
  Eigen::Map<const Eigen::VectorXd> s(S.data(), n), t(St.data(), n);
  require(std::abs(s.norm() - 1.0) <= 1e-12 && std::abs(t.norm() - 1.0) <= 1e-12, "Q-matrix spins must be unit vectors");
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n) / static_cast<double>(n);
  const Eigen::MatrixXd Q = s * s.transpose() - I;
  const Eigen::MatrixXd Qt = t * t.transpose() - I;
  return (Q * Qt).trace();
}

namespace {

double pair_product(const ModelSpec& m, const double* a, const double* b, int comps) {
  double dot = 0.0;
  for (int i = 0; i < comps; ++i) dot += a[i] * b[i];
  if (m.family == F::LiquidCrystal) return dot * dot - 1.0 / m.n;
  return dot;
}

double self_product(const ModelSpec& m, const double* a, int comps) { return pair_product(m, a, a, comps); }

}  // namespace

double torus_hamiltonian(const ModelSpec& model, const CouplingMatrix& couplings, const SpinConfiguration& config,
                         EnergyForm form) {
  require(model.pair_interaction(), "torus_hamiltonian covers pair-interaction families; use the specialized energies");
  require(couplings.torus == config.torus, "couplings and configuration live on different tori");
  validate(model, config);
  const auto& t = config.torus;
  const int c = config.comps;
  double h = 0.0;
  for (std::size_t x = 0; x < t.N(); ++x) {
    const Site xs = t.coords(x);
    for (std::size_t y = 0; y < t.N(); ++y) {
      const double J = couplings.at(t.index(torus_displacement(xs, t.coords(y), t)));
      if (J == 0.0) continue;
      const double* a = config.spin(x);
      const double* b = config.spin(y);
      const double ab = pair_product(model, a, b, c);
      if (form == EnergyForm::Dot) {
        h -= 0.5 * J * ab;
      } else {
        h += 0.5 * J * (self_product(model, a, c) + self_product(model, b, c) - 2.0 * ab);
      }
    }
  }
  if (model.family == F::GFF) {
    for (double v : config.values) h += 0.5 * model.kappa * v * v;
  }
  return h;
}

double potts_label_hamiltonian(const CouplingMatrix& couplings, const SpinConfiguration& config) {
  require(config.labels.size() == config.torus.N(), "Potts label form needs labels");
  const auto& t = config.torus;
  double h = 0.0;
  for (std::size_t x = 0; x < t.N(); ++x)
    for (std::size_t y = 0; y < t.N(); ++y)
      if (config.labels[x] == config.labels[y])
        h -= 0.5 * couplings.at(t.index(torus_displacement(t.coords(x), t.coords(y), t)));
  return h;
}

double double_well_potential(double phi, double kappa) {
  require(kappa > 0.0, "double-well stiffness must be positive");
  const double a = -0.5 * kappa * (phi - 1.0) * (phi - 1.0);
  const double b = -0.5 * kappa * (phi + 1.0) * (phi + 1.0);
  const double m = std::max(a, b);
  return -(m + std::log(std::exp(a - m) + std::exp(b - m)));
}

double specialized_hamiltonian(const ModelSpec& model, const SpinConfiguration& config) {
  validate(model, config);
  const auto& t = config.torus;
  double h = 0.0;
  switch (model.family) {
    case F::OrbitalCompass:
      for (std::size_t x = 0; x < t.N(); ++x)
        for (int a = 0; a < t.d(); ++a) {
          const double diff = config.spin(x)[a] - config.spin(t.shift(x, a, 1))[a];
          h += diff * diff;
        }
      return h;
    case F::OneTwenty: {
      constexpr double r = std::numbers::sqrt3 / 2.0;
      const double b[3][2] = {{1.0, 0.0}, {-0.5, r}, {-0.5, -r}};
      for (std::size_t x = 0; x < t.N(); ++x)
        for (int a = 0; a < 3; ++a) {
          const double* s = config.spin(x);
          const double* u = config.spin(t.shift(x, a, 1));
          const double diff = (s[0] - u[0]) * b[a][0] + (s[1] - u[1]) * b[a][1];
          h += diff * diff;
        }
      return h;
    }
    case F::NNNAntiferromagnet: {
      auto dot = [&](std::size_t x, std::size_t y) {
        return config.spin(x)[0] * config.spin(y)[0] + config.spin(x)[1] * config.spin(y)[1];
      };
      for (std::size_t x = 0; x < t.N(); ++x) {
        const std::size_t e1 = t.shift(x, 0, 1);
        const std::size_t e2 = t.shift(x, 1, 1);
        h += model.gamma * (dot(x, e1) + dot(x, e2));
        h += dot(x, t.shift(e1, 1, 1)) + dot(x, t.shift(e1, 1, -1));
      }
      return h;
    }
    default:
      throw ValidationError("specialized_hamiltonian covers compass, 120-degree and antiferromagnet models");
  }
}

double double_well_energy(const SpinConfiguration& config, double beta, double kappa) {
  require(config.comps == 1, "double-well heights are scalar");
  const auto& t = config.torus;
  double h = 0.0;
  for (std::size_t x = 0; x < t.N(); ++x) {
    const double phi = config.values[x];
    h += double_well_potential(phi, kappa);
    for (int a = 0; a < t.d(); ++a) {
      const double diff = phi - config.values[t.shift(x, a, 1)];
      h += beta * diff * diff;
    }
  }
  return h;
}

double gradient_model_energy(const ModelSpec& model, const SpinConfiguration& config) {
  require(model.family == F::GradientTwoKappa, "gradient_model_energy needs the two-kappa model");
  require(config.comps == 1, "gradient-model heights are scalar");
  const auto& t = config.torus;
  double h = 0.0;
  for (std::size_t x = 0; x < t.N(); ++x)
    for (int a = 0; a < t.d(); ++a) {
      const double eta = config.values[t.shift(x, a, 1)] - config.values[x];
      const double lo = model.p > 0.0 ? std::log(model.p) - 0.5 * model.kappa_O * eta * eta : -INFINITY;
      const double ld = model.p < 1.0 ? std::log1p(-model.p) - 0.5 * model.kappa_D * eta * eta : -INFINITY;
      const double m = std::max(lo, ld);
      h -= m + std::log(std::exp(lo - m) + std::exp(ld - m));
    }
  return h;
}

}  // namespace rpl
