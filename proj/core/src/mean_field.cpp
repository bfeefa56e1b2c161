#include "rpl/mean_field.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "rpl/errors.hpp"
#include "rpl/parallel.hpp"
#include "rpl/quadrature.hpp"

namespace rpl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> scaled(const std::vector<double>& v, double t) {
  std::vector<double> out(v);
  for (auto& x : out) x *= t;
  return out;
}

// Polar-angle rule for the sphere: nodes phi_j in (0, pi), weights
// proportional to sin^{n-2}(phi_j), normalized to 1.
struct SphereRule {
  std::vector<double> c, w;
};

SphereRule sphere_rule(int n, int degree) {
  std::vector<double> x, w;
  gauss_legendre(degree, x, w);
  SphereRule r;
  double total = 0.0;
  for (int j = 0; j < degree; ++j) {
    const double phi = 0.5 * std::numbers::pi * (x[j] + 1.0);
    const double wt = w[j] * std::pow(std::sin(phi), n - 2);
    r.c.push_back(std::cos(phi));
    r.w.push_back(wt);
    total += wt;
  }
  for (auto& v : r.w) v /= total;
  return r;
}

// Barycentric coordinates of m with respect to the Potts vectors.
std::vector<double> barycentric(const SingleSpinMeasure& mu, const std::vector<double>& m) {
  std::vector<double> x(mu.q);
  for (int k = 0; k < mu.q; ++k) x[k] = (1.0 + (mu.q - 1) * dot(mu.atoms[k], m)) / mu.q;
  return x;
}

}  // namespace

SingleSpinMeasure SingleSpinMeasure::ising() {
  SingleSpinMeasure m;
  m.kind = Kind::Ising;
  m.q = 2;
  m.n = 1;
  m.atoms = {{1.0}, {-1.0}};
  return m;
}

SingleSpinMeasure SingleSpinMeasure::potts(int q) {
  require(q >= 2, "Potts measure needs q >= 2");
  SingleSpinMeasure m;
  m.kind = Kind::Potts;
  m.q = q;
  m.n = q - 1;
  m.atoms = tetrahedral_vectors(q);
  return m;
}

SingleSpinMeasure SingleSpinMeasure::sphere(int n, int degree) {
  require(n >= 2, "sphere measure needs n >= 2");
  require(degree >= 8, "sphere quadrature degree must be >= 8");
  SingleSpinMeasure m;
  m.kind = Kind::Sphere;
  m.n = n;
  m.degree = degree;
  return m;
}

SingleSpinMeasure SingleSpinMeasure::for_model(const ModelSpec& model) {
  switch (model.family) {
    case ModelSpec::Family::Ising:
      return ising();
    case ModelSpec::Family::Potts:
      return potts(model.q);
    case ModelSpec::Family::On:
      return sphere(model.n);
    default:
      throw ValidationError("mean-field measures exist for Ising, Potts and O(n) only, not " + model.name());
  }
}

int SingleSpinMeasure::nu() const { return kind == Kind::Potts ? q - 1 : n; }

double SingleSpinMeasure::max_field() const { return kind == Kind::Sphere ? 0.5 * degree : kInf; }

std::vector<double> SingleSpinMeasure::axis() const {
  if (kind == Kind::Potts) return atoms[0];
  std::vector<double> e(nu(), 0.0);
  e[0] = 1.0;
  return e;
}

std::pair<double, double> SingleSpinMeasure::axis_range() const {
  if (kind == Kind::Potts) return {-1.0 / (q - 1), 1.0};
  return {-1.0, 1.0};
}

std::string SingleSpinMeasure::name() const {
  switch (kind) {
    case Kind::Ising:
      return "ising";
    case Kind::Potts:
      return "potts(q=" + std::to_string(q) + ")";
    default:
      return "sphere(n=" + std::to_string(n) + ")";
  }
}

Cumulant cumulant_generating(const SingleSpinMeasure& mu, const std::vector<double>& h) {
  const int nu = mu.nu();
  require(static_cast<int>(h.size()) == nu, "field has the wrong dimension");
  for (double v : h) require(std::isfinite(v), "field must be finite");
  Cumulant c;
  c.grad.assign(nu, 0.0);
  c.hess = Eigen::MatrixXd::Zero(nu, nu);
  if (mu.kind != SingleSpinMeasure::Kind::Sphere) {
    const std::size_t K = mu.atoms.size();
    std::vector<double> e(K);
    double mx = -kInf;
    for (std::size_t k = 0; k < K; ++k) mx = std::max(mx, e[k] = dot(h, mu.atoms[k]));
    double Z = 0.0;
    for (auto& v : e) Z += v = std::exp(v - mx);
    c.G = mx + std::log(Z / static_cast<double>(K));
    for (std::size_t k = 0; k < K; ++k) {
      const double p = e[k] / Z;
      for (int a = 0; a < nu; ++a) c.grad[a] += p * mu.atoms[k][a];
    }
    for (std::size_t k = 0; k < K; ++k) {
      const double p = e[k] / Z;
      for (int a = 0; a < nu; ++a)
        for (int b = 0; b < nu; ++b)
          c.hess(a, b) += p * (mu.atoms[k][a] - c.grad[a]) * (mu.atoms[k][b] - c.grad[b]);
    }
    return c;
  }
  const double r = norm(h);
  if (r == 0.0) {
    c.hess = Eigen::MatrixXd::Identity(nu, nu) / nu;
    return c;
  }
  if (r > mu.max_field())
    throw ToleranceError("sphere quadrature of degree " + std::to_string(mu.degree) + " is not trusted for |h| = " +
                         std::to_string(r));
  static thread_local std::pair<int, int> cached_key{0, 0};
  static thread_local SphereRule rule;
  if (cached_key != std::make_pair(mu.n, mu.degree)) {
    rule = sphere_rule(mu.n, mu.degree);
    cached_key = {mu.n, mu.degree};
  }
  double Z = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t j = 0; j < rule.c.size(); ++j) {
    const double e = rule.w[j] * std::exp(r * (rule.c[j] - 1.0));
    Z += e;
    m1 += e * rule.c[j];
    m2 += e * rule.c[j] * rule.c[j];
  }
  m1 /= Z;
  m2 /= Z;
  c.G = r + std::log(Z);
  Eigen::VectorXd u(nu);
  for (int a = 0; a < nu; ++a) u[a] = h[a] / r;
  for (int a = 0; a < nu; ++a) c.grad[a] = m1 * u[a];
  const double perp = (1.0 - m2) / (nu - 1);
  c.hess = (m2 - m1 * m1) * u * u.transpose() + perp * (Eigen::MatrixXd::Identity(nu, nu) - u * u.transpose());
  return c;
}

double entropy(const SingleSpinMeasure& mu, const std::vector<double>& m) {
  const int nu = mu.nu();
  require(static_cast<int>(m.size()) == nu, "magnetization has the wrong dimension");
  if (mu.kind == SingleSpinMeasure::Kind::Potts) {
    const auto x = barycentric(mu, m);
    const double lo = *std::min_element(x.begin(), x.end());
    if (lo < -1e-14) return -kInf;
    if (lo < 1e-12) {
      // Closed-form limit on the faces of the simplex.
      double s = 0.0;
      for (double v : x)
        if (v > 0.0) s -= v * std::log(mu.q * v);
      return s;
    }
  } else {
    const double r = norm(m);
    if (r > 1.0 + 1e-14) return -kInf;
    if (mu.kind == SingleSpinMeasure::Kind::Ising && 1.0 - r < 1e-12) return -std::log(2.0);
    if (mu.kind == SingleSpinMeasure::Kind::Sphere && r >= 1.0) return -kInf;
  }
  if (norm(m) == 0.0) return 0.0;

  // Newton on the convex function f(h) = G(h) - h.m with backtracking.
  std::vector<double> h(nu, 0.0);
  auto f = [&](const std::vector<double>& v) { return cumulant_generating(mu, v).G - dot(v, m); };
  double fh = 0.0;
  for (int it = 0; it < 200; ++it) {
    const auto c = cumulant_generating(mu, h);
    Eigen::VectorXd g(nu);
    for (int a = 0; a < nu; ++a) g[a] = c.grad[a] - m[a];
    if (g.norm() < 1e-14) break;
    Eigen::VectorXd step = c.hess.ldlt().solve(-g);
    if (!step.allFinite() || step.dot(g) >= 0.0) step = -g;
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      std::vector<double> trial(h);
      for (int a = 0; a < nu; ++a) trial[a] += t * step[a];
      if (norm(trial) > mu.max_field()) continue;
      const double ft = f(trial);
      if (ft <= fh + 1e-4 * t * step.dot(g)) {
        h = trial;
        fh = ft;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  return f(h);
}

double free_energy(const SingleSpinMeasure& mu, double beta, const std::vector<double>& m) {
  const double s = entropy(mu, m);
  if (!std::isfinite(s)) return kInf;
  return -0.5 * beta * dot(m, m) - s;
}

std::vector<std::vector<double>> default_starts(const SingleSpinMeasure& mu) {
  const auto [lo, hi] = mu.axis_range();
  const auto u = mu.axis();
  std::vector<std::vector<double>> out;
  for (int i = 0; i < 10; ++i) {
    const double t = lo + (hi - lo) * (0.025 + 0.95 * i / 9.0);
    out.push_back(scaled(u, t));
  }
  return out;
}

namespace {

std::vector<double> mf_map(const SingleSpinMeasure& mu, double beta, const std::vector<double>& m) {
  return cumulant_generating(mu, scaled(m, beta)).grad;
}

double mf_residual(const SingleSpinMeasure& mu, double beta, const std::vector<double>& m) {
  const auto g = mf_map(mu, beta, m);
  double s = 0.0;
  for (std::size_t a = 0; a < m.size(); ++a) s += (m[a] - g[a]) * (m[a] - g[a]);
  return std::sqrt(s);
}

// Newton on F(m) = m - grad G(beta m); returns false when it leaves the hull.
bool newton_polish(const SingleSpinMeasure& mu, double beta, std::vector<double>& m) {
  const int nu = mu.nu();
  for (int it = 0; it < 50; ++it) {
    const auto c = cumulant_generating(mu, scaled(m, beta));
    Eigen::VectorXd F(nu);
    for (int a = 0; a < nu; ++a) F[a] = m[a] - c.grad[a];
    if (F.norm() < 1e-15) return true;
    const Eigen::MatrixXd Jm = Eigen::MatrixXd::Identity(nu, nu) - beta * c.hess;
    const Eigen::VectorXd step = Jm.fullPivLu().solve(-F);
    if (!step.allFinite()) return false;
    for (int a = 0; a < nu; ++a) m[a] += step[a];
    if (beta * norm(m) > mu.max_field()) return false;
    if (step.norm() < 1e-16) return true;
  }
  return true;
}

}  // namespace

MeanFieldReport solve_mean_field(const SingleSpinMeasure& mu, double beta,
                                 const std::vector<std::vector<double>>& starts_in) {
  require(beta >= 0.0 && std::isfinite(beta), "beta must be finite and >= 0");
  const auto starts = starts_in.empty() ? default_starts(mu) : starts_in;
  const int nu = mu.nu();
  MeanFieldReport rep;
  rep.beta = beta;
  std::vector<std::vector<double>> candidates{std::vector<double>(nu, 0.0)};

  for (std::size_t s = 0; s < starts.size(); ++s) {
    require(static_cast<int>(starts[s].size()) == nu, "start has the wrong dimension");
    // Damped iteration m <- (m + grad G(beta m)) / 2.
    std::vector<double> m = starts[s];
    bool converged = false;
    for (int it = 0; it < 20000; ++it) {
      const auto g = mf_map(mu, beta, m);
      double change = 0.0;
      for (int a = 0; a < nu; ++a) {
        const double nm = 0.5 * m[a] + 0.5 * g[a];
        change = std::max(change, std::abs(nm - m[a]));
        m[a] = nm;
      }
      if (change < 1e-14) {
        converged = true;
        break;
      }
    }
    if (converged || mf_residual(mu, beta, m) < 1e-8) {
      candidates.push_back(m);
    } else {
      rep.unconverged_starts.push_back(static_cast<int>(s));
    }

    // Sign changes of t -> u.grad G(beta t u) - t along the start's ray.
    const double len = norm(starts[s]);
    if (len == 0.0) continue;
    const auto u = scaled(starts[s], 1.0 / len);
    double tmax = 1.0;
    if (mu.kind == SingleSpinMeasure::Kind::Potts) {
      for (int k = 0; k < mu.q; ++k) {
        const double c = dot(mu.atoms[k], u);
        if (c < 0.0) tmax = std::min(tmax, 1.0 / ((mu.q - 1) * -c));
      }
    }
    if (beta > 0.0) tmax = std::min(tmax, 0.999 * mu.max_field() / beta);
    auto g = [&](double t) { return dot(u, mf_map(mu, beta, scaled(u, t))) - t; };
    constexpr int kSteps = 2000;
    double t0 = tmax * 1e-6, g0 = g(t0);
    for (int i = 1; i <= kSteps; ++i) {
      const double t1 = tmax * (1e-6 + (1.0 - 2e-6) * i / kSteps);
      const double g1 = g(t1);
      if ((g0 < 0.0) != (g1 < 0.0)) {
        double a = t0, b = t1, ga = g0;
        for (int k = 0; k < 200 && b - a > 1e-16; ++k) {
          const double c = 0.5 * (a + b);
          const double gc = g(c);
          if ((gc < 0.0) == (ga < 0.0)) {
            a = c;
            ga = gc;
          } else {
            b = c;
          }
        }
        candidates.push_back(scaled(u, 0.5 * (a + b)));
      }
      t0 = t1;
      g0 = g1;
    }
  }

  for (auto m : candidates) {
    if (!newton_polish(mu, beta, m)) continue;
    const double res = mf_residual(mu, beta, m);
    if (!(res < 1e-10)) continue;
    bool dup = false;
    for (const auto& s : rep.solutions) {
      double dist = 0.0;
      for (int a = 0; a < nu; ++a) dist = std::max(dist, std::abs(s.m[a] - m[a]));
      dup = dup || dist < 1e-9;
    }
    if (dup) continue;
    MeanFieldSolution sol;
    sol.m = m;
    sol.residual = res;
    sol.phi = free_energy(mu, beta, m);
    const auto c = cumulant_generating(mu, scaled(m, beta));
    const Eigen::MatrixXd A = Eigen::MatrixXd::Identity(nu, nu) - beta * c.hess;
    sol.stable = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A).eigenvalues().minCoeff() > 0.0;
    rep.solutions.push_back(sol);
  }
  std::sort(rep.solutions.begin(), rep.solutions.end(), [](const auto& a, const auto& b) {
    if (a.phi != b.phi) return a.phi < b.phi;
    return a.m < b.m;
  });
  return rep;
}

double bifurcation_beta(const SingleSpinMeasure& mu, double tol) {
  const auto u = mu.axis();
  auto has_branch = [&](double beta) {
    for (double t = 0.5; t >= 1e-6; t *= 0.8)
      if (t - dot(u, mf_map(mu, beta, scaled(u, t))) < 0.0) return true;
    return false;
  };
  double lo = 0.0, hi = 1.0;
  while (!has_branch(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw ToleranceError("no bifurcation found below beta = 1e6");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (has_branch(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<std::size_t> FreeEnergyProfile::minima() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < is_min.size(); ++i)
    if (is_min[i]) out.push_back(i);
  return out;
}

std::vector<std::size_t> FreeEnergyProfile::maxima() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < is_max.size(); ++i)
    if (is_max[i]) out.push_back(i);
  return out;
}

namespace {

void check_grid(const std::vector<double>& grid, double lo, double hi) {
  require(grid.size() >= 3, "profile grid needs at least three points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(grid[i] >= lo - 1e-12 && grid[i] <= hi + 1e-12, "profile grid leaves the admissible range");
    if (i > 0) require(grid[i] > grid[i - 1], "profile grid must be strictly increasing");
  }
}

void classify(FreeEnergyProfile& p) {
  const std::size_t n = p.grid.size();
  p.is_min.assign(n, false);
  p.is_max.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const double left = i > 0 ? p.phi[i - 1] : kInf;
    const double right = i + 1 < n ? p.phi[i + 1] : kInf;
    p.is_min[i] = p.phi[i] < left && p.phi[i] <= right;
    if (i > 0 && i + 1 < n) p.is_max[i] = p.phi[i] > left && p.phi[i] >= right;
  }
  p.global_min = static_cast<std::size_t>(std::min_element(p.phi.begin(), p.phi.end()) - p.phi.begin());
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

double potts_phi(int q, double beta, double m) {
  const double x1 = (1.0 + (q - 1) * m) / q;
  const double xk = (1.0 - m) / q;
  return -0.5 * beta * (x1 * x1 + (q - 1) * xk * xk) + xlogx(x1) + (q - 1) * xlogx(xk);
}

// L(m) - beta m, proportional to the on-axis derivative of the Potts profile.
double potts_slope(int q, double beta, double m) { return std::log((1.0 + (q - 1) * m) / (1.0 - m)) - beta * m; }

double golden_min(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

FreeEnergyProfile mean_field_profile(const SingleSpinMeasure& mu, double beta, const std::vector<double>& grid) {
  const auto [lo, hi] = mu.axis_range();
  check_grid(grid, lo, hi);
  FreeEnergyProfile p;
  p.normalization = "dot";
  p.beta = beta;
  p.grid = grid;
  p.phi.resize(grid.size());
  const auto u = mu.axis();
  parallel_for(grid.size(), [&](std::size_t i) { p.phi[i] = free_energy(mu, beta, scaled(u, grid[i])); });
  classify(p);
  return p;
}

FreeEnergyProfile potts_on_axis_profile(int q, double beta_delta, const std::vector<double>& grid) {
  require(q >= 2, "Potts profile needs q >= 2");
  require(beta_delta >= 0.0, "beta must be >= 0");
  check_grid(grid, -1.0 / (q - 1), 1.0);
  FreeEnergyProfile p;
  p.normalization = "delta";
  p.beta = beta_delta;
  p.grid = grid;
  p.phi.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) p.phi[i] = potts_phi(q, beta_delta, grid[i]);
  classify(p);
  return p;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  require(points >= 2 && hi > lo, "grid needs points >= 2 and hi > lo");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = lo + (hi - lo) * i / (points - 1);
  g.back() = hi;
  return g;
}

double beta_dot_from_delta(double beta_delta, int q) { return beta_delta * (q - 1) / q; }

PottsTransition locate_transition(int q) {
  require(q >= 2, "transition needs q >= 2");
  PottsTransition t;
  t.q = q;
  if (q == 2) {
    // Continuous: both points sit at the bifurcation of the tanh map.
    t.beta0 = t.beta_t = bifurcation_beta(SingleSpinMeasure::potts(2)) * 2.0;
    return t;
  }
  // Nonzero local minimum of the profile exists iff L(m) - beta m < 0 somewhere in (0, 1).
  auto min_slope = [&](double beta) {
    const auto f = [&](double m) { return potts_slope(q, beta, m); };
    double best = kInf, arg = 0.5;
    for (int i = 1; i < 4000; ++i) {
      const double m = i / 4000.0;
      if (f(m) < best) {
        best = f(m);
        arg = m;
      }
    }
    const double m = golden_min(f, std::max(1e-12, arg - 2.5e-4), std::min(1.0 - 1e-12, arg + 2.5e-4));
    return std::make_pair(f(m), m);
  };
  double lo = 0.0, hi = q;
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (min_slope(mid).first < 0.0 ? hi : lo) = mid;
  }
  t.beta0 = 0.5 * (lo + hi);

  // Ordered local minimum: largest root of L(m) = beta m.
  auto m_plus = [&](double beta) {
    double a = min_slope(beta).second, b = 1.0 - 1e-15;
    if (potts_slope(q, beta, a) >= 0.0) return a;
    for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
      const double c = 0.5 * (a + b);
      (potts_slope(q, beta, c) < 0.0 ? a : b) = c;
    }
    return 0.5 * (a + b);
  };
  auto delta = [&](double beta) { return potts_phi(q, beta, 0.0) - potts_phi(q, beta, m_plus(beta)); };
  lo = t.beta0;
  hi = q;
  if (!(delta(lo) <= 0.0 && delta(hi) > 0.0)) throw ToleranceError("transition bracket [beta0, q] does not bracket");
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (delta(mid) > 0.0 ? hi : lo) = mid;
  }
  t.beta_t = 0.5 * (lo + hi);
  t.m_plus = m_plus(t.beta_t);
  if (!(t.beta_t > t.beta0)) throw ToleranceError("located beta_t does not exceed beta0");
  return t;
}

double AdmissibleBand::max_gap() const {
  double g = 0.0;
  for (std::size_t i = 1; i < components.size(); ++i) g = std::max(g, components[i].first - components[i - 1].second);
  return g;
}

AdmissibleBand admissible_band_from_profile(FreeEnergyProfile profile, int nu, double beta_dot, double I_d) {
  require(std::isfinite(I_d) && I_d >= 0.0, "admissible band needs a transient kernel (finite I_d)");
  AdmissibleBand b;
  b.beta = profile.beta;
  b.I_d = I_d;
  b.band = 0.5 * nu * beta_dot * I_d;
  const double floor = profile.phi[profile.global_min];
  const std::size_t n = profile.grid.size();
  b.in_band.resize(n);
  for (std::size_t i = 0; i < n; ++i) b.in_band[i] = profile.phi[i] <= floor + b.band;
  for (std::size_t i = 0; i < n;) {
    if (!b.in_band[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && b.in_band[j + 1]) ++j;
    b.components.emplace_back(profile.grid[i], profile.grid[j]);
    i = j + 1;
  }
  b.profile = std::move(profile);
  return b;
}

AdmissibleBand admissible_band(const SingleSpinMeasure& mu, const KernelSpec& kernel, double beta_dot,
                               const std::vector<double>& grid) {
  const auto I = mean_field_error_integral(kernel);
  require(I.finite, "admissible band is not applicable to recurrent kernels");
  return admissible_band_from_profile(mean_field_profile(mu, beta_dot, grid), mu.nu(), beta_dot, I.value);
}

Certificate forced_discontinuity_check(int q, const KernelSpec& kernel, const DiscontinuityOptions& opt) {
  require(q >= 2, "forced discontinuity check needs q >= 2");
  require(opt.resolution > 0.0 && opt.grid_points >= 3 && opt.beta_points >= 2, "invalid discontinuity options");
  Certificate cert;
  cert.name = "forced_discontinuity";
  cert.param("q", q);
  cert.param("resolution", opt.resolution);
  const auto I = mean_field_error_integral(kernel);
  if (!I.finite) {
    cert.note = "recurrent kernel: I_d infinite, band unbounded";
    cert.pass = cert.check("resolution <= max admissible gap", opt.resolution, 0.0);
    return cert;
  }
  const auto tr = locate_transition(q);
  cert.quantity("I_d", I.value);
  cert.quantity("beta0_delta", tr.beta0);
  cert.quantity("beta_t_delta", tr.beta_t);

  const auto grid = linear_grid(0.0, 1.0, opt.grid_points);
  const double lo = q == 2 ? 0.5 * tr.beta_t : tr.beta0;
  const double hi = q == 2 ? 1.5 * tr.beta_t : 2.0 * tr.beta_t - tr.beta0;
  auto betas = linear_grid(lo, hi, opt.beta_points);
  betas.push_back(tr.beta_t);
  std::vector<double> gaps(betas.size());
  parallel_for(betas.size(), [&](std::size_t i) {
    const double bd = beta_dot_from_delta(betas[i], q);
    gaps[i] = admissible_band_from_profile(potts_on_axis_profile(q, betas[i], grid), q - 1, bd, I.value).max_gap();
  });
  const auto best = static_cast<std::size_t>(std::max_element(gaps.begin(), gaps.end()) - gaps.begin());

  // Band against the barrier separating the two minima at beta_t.
  const double bt_dot = beta_dot_from_delta(tr.beta_t, q);
  const double band = 0.5 * (q - 1) * bt_dot * I.value;
  double hump = 0.0;
  if (q > 2) {
    const double phi0 = potts_phi(q, tr.beta_t, 0.0);
    for (double m : grid)
      if (m < tr.m_plus) hump = std::max(hump, potts_phi(q, tr.beta_t, m) - phi0);
  }
  cert.quantity("band_at_beta_t", band);
  cert.quantity("hump_at_beta_t", hump);
  cert.quantity("band_to_hump_ratio", hump > 0.0 ? band / hump : kInf);
  cert.quantity("best_beta_delta", betas[best]);
  cert.quantity("max_gap", gaps[best]);
  cert.pass = cert.check("resolution <= max admissible gap", opt.resolution, gaps[best]);
  cert.note = "scan over m >= 0; beta in delta normalization";
  return cert;
}

}  // namespace rpl
