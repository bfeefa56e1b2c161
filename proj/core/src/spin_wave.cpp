#include "rpl/spin_wave.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rpl/errors.hpp"
#include "rpl/parallel.hpp"
#include "rpl/rng.hpp"

namespace rpl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double a(double k) { return 2.0 - 2.0 * std::cos(k); }  // |1 - e^{ik}|^2

double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - r * (hi - lo), d = lo + r * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > tol) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - r * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + r * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

double wrap_angle(double t) {
  t = std::fmod(t, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (kTwoPi - t < 1e-12) t = 0.0;
  return t;
}

double angular_distance(double a, double b) {
  const double d = std::abs(wrap_angle(a - b));
  return std::min(d, kTwoPi - d);
}

}  // namespace

SpinWaveIntegrand SpinWaveIntegrand::compass(double theta) { return {Family::Compass2D, theta, 0.0}; }

SpinWaveIntegrand SpinWaveIntegrand::one_twenty(double theta) { return {Family::OneTwenty3D, theta, 0.0}; }

SpinWaveIntegrand SpinWaveIntegrand::afm(double gamma, double theta) {
  require(std::abs(gamma) < 2.0, "AFM spin waves need |gamma| < 2");
  return {Family::AFM2D, theta, gamma};
}

int SpinWaveIntegrand::dimension() const { return family == Family::OneTwenty3D ? 3 : 2; }

double afm_D(double gamma, double theta, double k1, double k2) {
  return a(k1 + k2) + a(k1 - k2) + gamma * std::cos(theta) * (a(k1) - a(k2));
}

double SpinWaveIntegrand::operator()(const double* k) const {
  switch (family) {
    case Family::Compass2D: {
      const double s = std::sin(theta), c = std::cos(theta);
      return s * s * a(k[0]) + c * c * a(k[1]);
    }
    case Family::OneTwenty3D: {
      const double third = kTwoPi / 3.0;
      const double q1 = std::pow(std::sin(theta), 2);
      const double q2 = std::pow(std::sin(theta - third), 2);
      const double q3 = std::pow(std::sin(theta + third), 2);
      return q1 * a(k[0]) + q2 * a(k[1]) + q3 * a(k[2]);
    }
    default:
      return afm_D(gamma, theta, k[0], k[1]);
  }
}

std::string SpinWaveIntegrand::name() const {
  switch (family) {
    case Family::Compass2D:
      return "compass";
    case Family::OneTwenty3D:
      return "one-twenty";
    default:
      return "afm";
  }
}

SpinWaveValue sw_free_energy(const SpinWaveIntegrand& integrand, const QuadratureSpec& quad) {
  require(std::isfinite(integrand.theta), "theta must be finite");
  if (integrand.family == SpinWaveIntegrand::Family::AFM2D)
    require(std::abs(integrand.gamma) < 2.0, "AFM spin waves need |gamma| < 2");
  const auto f = [&](const double* k) { return 0.5 * std::log(integrand(k)); };
  SpinWaveValue v;
  v.ladder = integrate_ladder(integrand.dimension(), f, quad);
  v.F = v.ladder.estimate;
  v.error = v.ladder.error;
  if (!std::isfinite(v.F) || v.error > quad.rel_tol * std::max(1.0, std::abs(v.F)))
    throw ToleranceError("spin-wave quadrature did not converge for " + integrand.name() + " at theta = " +
                         std::to_string(integrand.theta));
  return v;
}

double sw_free_energy_fixed(const SpinWaveIntegrand& integrand, int n) {
  require(n >= 2, "quadrature needs at least two points per axis");
  const auto f = [&](const double* k) { return 0.5 * std::log(integrand(k)); };
  return bz_average(integrand.dimension(), n, f, QuadratureSpec{});
}

ThetaMinimization minimize_over_theta(SpinWaveIntegrand::Family family, double gamma, int resolution, int points) {
  require(resolution >= 360, "theta scans need at least 360 points per period");
  if (family == SpinWaveIntegrand::Family::AFM2D) require(std::abs(gamma) < 2.0, "AFM spin waves need |gamma| < 2");
  ThetaMinimization r;
  r.family = family;
  r.gamma = gamma;
  r.resolution = resolution;
  const int d = family == SpinWaveIntegrand::Family::OneTwenty3D ? 3 : 2;
  r.points = points > 0 ? points : (d == 2 ? 64 : 32);

  // Each F evaluation is already a parallel quadrature; keep the scan serial.
  auto F = [&](double theta) {
    return sw_free_energy_fixed(SpinWaveIntegrand{family, theta, gamma}, r.points);
  };
  const double h = kTwoPi / resolution;
  r.theta.resize(resolution);
  r.F.resize(resolution);
  for (int i = 0; i < resolution; ++i) {
    r.theta[i] = i * h;
    r.F[i] = F(r.theta[i]);
  }
  const auto [lo_it, hi_it] = std::minmax_element(r.F.begin(), r.F.end());
  const double scale = std::max(1.0, std::abs(*lo_it));
  const double flat_tol = 1e-12 * scale;
  if (*hi_it - *lo_it <= flat_tol) {
    r.degenerate = true;
    r.min_F = *lo_it;
    r.minima = r.theta;
    r.minima_F = r.F;
    return r;
  }

  struct Local {
    double theta, F;
  };
  std::vector<Local> mins, maxs;
  for (int i = 0; i < resolution; ++i) {
    const double l = r.F[(i + resolution - 1) % resolution], c = r.F[i], rr = r.F[(i + 1) % resolution];
    if (c < l && c <= rr) {
      const double t = golden_min(F, r.theta[i] - h, r.theta[i] + h, 1e-9);
      const double ft = F(t);
      // The refined point never loses to the grid point.
      mins.push_back(ft <= c ? Local{wrap_angle(t), ft} : Local{r.theta[i], c});
    }
    if (c > l && c >= rr) maxs.push_back({r.theta[i], c});
  }
  double best = r.F[lo_it - r.F.begin()];
  for (const auto& m : mins) best = std::min(best, m.F);
  const double tie = 1e-7 * scale;
  std::vector<Local> global, other;
  for (const auto& m : mins) (m.F <= best + tie ? global : other).push_back(m);
  std::sort(global.begin(), global.end(), [](const Local& a, const Local& b) { return a.theta < b.theta; });
  for (const auto& g : global) {
    bool dup = false;
    for (double t : r.minima) dup = dup || angular_distance(t, g.theta) < 1e-6;
    if (dup) continue;
    r.minima.push_back(g.theta);
    r.minima_F.push_back(g.F);
  }
  r.min_F = best;
  double margin = INFINITY;
  if (!other.empty()) {
    for (const auto& o : other) margin = std::min(margin, o.F - best);
  } else {
    for (const auto& m : maxs) margin = std::min(margin, m.F - best);
  }
  r.margin = std::isfinite(margin) ? margin : 0.0;
  return r;
}

double afm_linearity_check(double gamma, const std::vector<std::pair<double, double>>& k_samples,
                           const std::vector<double>& theta_samples) {
  require(std::abs(gamma) < 2.0, "AFM spin waves need |gamma| < 2");
  double worst = 0.0;
  for (const auto& [k1, k2] : k_samples)
    for (double t : theta_samples) {
      const double alpha = 0.5 * (1.0 + std::cos(t));
      const double lhs = afm_D(gamma, t, k1, k2);
      const double rhs = alpha * afm_D(gamma, 0.0, k1, k2) + (1.0 - alpha) * afm_D(gamma, kPi, k1, k2);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  return worst;
}

double afm_linearity_check(double gamma, int samples, std::uint64_t seed) {
  require(samples >= 1, "need at least one sample");
  Rng rng(seed);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double k1 = -kPi + kTwoPi * uniform01(rng);
    const double k2 = -kPi + kTwoPi * uniform01(rng);
    const double t = kTwoPi * uniform01(rng);
    worst = std::max(worst, afm_linearity_check(gamma, {{k1, k2}}, {t}));
  }
  return worst;
}

}  // namespace rpl
