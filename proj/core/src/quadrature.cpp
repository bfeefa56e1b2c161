#include "rpl/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "rpl/errors.hpp"
#include "rpl/parallel.hpp"

namespace rpl {

namespace {

constexpr double kPi = std::numbers::pi;

// Per-axis nodes and weights (weights average to 1 for the plain grid).
void axis_rule(int n, const QuadratureSpec& spec, std::vector<double>& k, std::vector<double>& w) {
  k.resize(n);
  w.resize(n);
  const double h = 2.0 * kPi / n;
  for (int j = 0; j < n; ++j) {
    const double u = -kPi + (j + 0.5) * h;
    if (spec.scheme == QuadratureSpec::Scheme::Midpoint || spec.scale == 1.0) {
      k[j] = u;
      w[j] = 1.0;
    } else {
      // Moebius map of the circle; fixes 0 and pi, compresses nodes toward 0.
      const double s = spec.scale;
      const double t = std::tan(0.5 * u);
      k[j] = 2.0 * std::atan(s * t);
      w[j] = s * (1.0 + t * t) / (1.0 + s * s * t * t);
    }
  }
}

double aitken(double a, double b, double c) {
  const double d1 = b - a, d2 = c - b;
  if (d1 == 0.0) return c;
  const double rho = d2 / d1;
  if (!(rho > 0.0 && rho < 1.0)) return c;
  return c + d2 * rho / (1.0 - rho);
}

}  // namespace

int QuadratureSpec::base_points(int d) const {
  if (points > 0) return points;
  if (d <= 2) return 64;
  if (d == 3) return 32;
  if (d == 4) return 8;
  return 4;
}

std::string to_string(QuadratureSpec::Scheme s) {
  return s == QuadratureSpec::Scheme::Midpoint ? "midpoint" : "refined-near-origin";
}

double bz_average(int d, int n, const BzIntegrand& f, const QuadratureSpec& spec) {
  require(d >= 1 && n >= 1, "quadrature needs d >= 1 and n >= 1");
  require(spec.scale > 0.0 && spec.scale <= 1.0, "quadrature scale must lie in (0, 1]");
  std::vector<double> nodes, weights;
  axis_rule(n, spec, nodes, weights);
  std::size_t inner = 1;
  for (int a = 1; a < d; ++a) inner *= static_cast<std::size_t>(n);
  const double total = ordered_sum(static_cast<std::size_t>(n), [&](std::size_t i0) {
    std::vector<double> k(d);
    std::vector<int> idx(d, 0);
    k[0] = nodes[i0];
    double s = 0.0;
    for (std::size_t r = 0; r < inner; ++r) {
      double w = weights[i0];
      std::size_t rem = r;
      for (int a = d - 1; a >= 1; --a) {
        idx[a] = static_cast<int>(rem % n);
        rem /= n;
        k[a] = nodes[idx[a]];
        w *= weights[idx[a]];
      }
      s += w * f(k.data());
    }
    return s;
  });
  return total / std::pow(static_cast<double>(n), d);
}

LadderResult integrate_ladder(int d, const BzIntegrand& f, const QuadratureSpec& spec) {
  LadderResult r;
  int n = spec.base_points(d);
  for (int level = 0; level < 4; ++level, n *= 2) {
    r.points.push_back(n);
    r.values.push_back(bz_average(d, n, f, spec));
  }
  const auto& v = r.values;
  bool grows = true;
  for (int i = 1; i < 4; ++i) grows = grows && v[i - 1] > 0.0 && v[i] > spec.divergence_factor * v[i - 1];
  if (grows) {
    r.divergent = true;
    r.estimate = v.back();
    r.error = std::abs(v[3] - v[2]);
    return r;
  }
  r.estimate = aitken(v[1], v[2], v[3]);
  const double coarse = aitken(v[0], v[1], v[2]);
  r.error = std::max(std::abs(r.estimate - coarse), 1e-15 * std::abs(r.estimate));
  return r;
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  require(n >= 1, "Gauss-Legendre degree must be positive");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace rpl
