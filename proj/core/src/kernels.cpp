#include "rpl/kernels.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rpl/errors.hpp"
#include "rpl/fourier.hpp"
#include "rpl/parallel.hpp"
#include "rpl/rng.hpp"

namespace rpl {

namespace {

long l1_norm(const Site& x) {
  long r = 0;
  for (long c : x) r += std::labs(c);
  return r;
}

// log f_t(k), where f_t(k) = sinh t / (cosh t - cos k) = sum_n e^{-t|n|} e^{ikn}.
// Written in q = e^{-t} so it stays accurate for large t.
double log_poisson(double t, double k) {
  const double q = std::exp(-t);
  const double den = (1.0 - q) * (1.0 - q) + 2.0 * q * (1.0 - std::cos(k));
  return std::log1p(2.0 * q * (std::cos(k) - q) / den);
}

// sum_{x != 0} exp(-t|x|_1) e^{ik.x} = prod_j f_t(k_j) - 1
double yukawa_sum(double t, const double* k, int d) {
  double acc = 0.0;
  for (int j = 0; j < d; ++j) acc += log_poisson(t, k[j]);
  return std::expm1(acc);
}

// sum_{x != 0} exp(-t|x|_1) = coth(t/2)^d - 1
double yukawa_mass(double t, int d) { return std::expm1(d * std::log1p(2.0 / std::expm1(t))); }

// (1/Gamma(s)) int_0^inf t^{s-1} g(t) dt, which turns exp(-t r) into r^{-s}.
template <class G>
double mellin(double s, G g) {
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [&](double t) {
    if (t <= 0.0) return 0.0;
    const double v = std::pow(t, s - 1.0) * g(t);
    return std::isfinite(v) ? v : 0.0;
  };
  double err = 0.0;
  const double val = integrator.integrate(f, 1e-13, &err);
  return val / std::tgamma(s);
}

}  // namespace

KernelSpec KernelSpec::nearest_neighbor(int d) {
  require(d >= 1, "kernel dimension must be positive");
  KernelSpec k;
  k.kind = Kind::NearestNeighbor;
  k.d = d;
  k.C = 1.0 / (2.0 * d);
  return k;
}

KernelSpec KernelSpec::yukawa(int d, double mu) {
  require(d >= 1, "kernel dimension must be positive");
  require(mu > 0.0 && std::isfinite(mu), "Yukawa decay rate must be positive");
  KernelSpec k;
  k.kind = Kind::Yukawa;
  k.d = d;
  k.mu = mu;
  k.C = 1.0 / yukawa_mass(mu, d);
  return k;
}

KernelSpec KernelSpec::power_law(int d, double s) {
  require(d >= 1, "kernel dimension must be positive");
  require(s > d && std::isfinite(s), "power-law exponent must exceed the dimension");
  KernelSpec k;
  k.kind = Kind::PowerLaw;
  k.d = d;
  k.s = s;
  k.C = 1.0 / mellin(s, [d](double t) { return yukawa_mass(t, d); });
  return k;
}

KernelSpec KernelSpec::mixture(std::vector<std::pair<double, KernelSpec>> parts) {
  require(!parts.empty(), "mixture needs at least one component");
  double total = 0.0;
  const int d = parts.front().second.d;
  for (const auto& [w, p] : parts) {
    require(w > 0.0, "mixture weights must be positive");
    require(p.d == d, "mixture components must share a dimension");
    total += w;
  }
  require(std::abs(total - 1.0) < 1e-12, "mixture weights must sum to 1");
  KernelSpec k;
  k.kind = Kind::Mixture;
  k.d = d;
  k.parts = std::move(parts);
  return k;
}

double KernelSpec::coupling(const Site& x) const {
  const long r = l1_norm(x);
  if (r == 0) return 0.0;
  switch (kind) {
    case Kind::NearestNeighbor:
      return r == 1 ? C : 0.0;
    case Kind::Yukawa:
      return C * std::exp(-mu * static_cast<double>(r));
    case Kind::PowerLaw:
      return C * std::pow(static_cast<double>(r), -s);
    case Kind::Mixture: {
      double v = 0.0;
      for (const auto& [w, p] : parts) v += w * p.coupling(x);
      return v;
    }
  }
  return 0.0;
}

std::string KernelSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::NearestNeighbor:
      os << "nn(d=" << d << ")";
      break;
    case Kind::Yukawa:
      os << "yukawa(d=" << d << ",mu=" << mu << ")";
      break;
    case Kind::PowerLaw:
      os << "power(d=" << d << ",s=" << s << ")";
      break;
    case Kind::Mixture:
      os << "mixture(";
      for (std::size_t i = 0; i < parts.size(); ++i)
        os << (i ? "," : "") << parts[i].first << "*" << parts[i].second.describe();
      os << ")";
      break;
  }
  return os.str();
}

double KernelSpec::fourier_scale() const {
  switch (kind) {
    case Kind::Yukawa:
      return std::tanh(0.5 * mu);
    case Kind::Mixture: {
      double m = 1.0;
      for (const auto& p : parts) m = std::min(m, p.second.fourier_scale());
      return m;
    }
    default:
      return 1.0;
  }
}

double fourier_transform(const KernelSpec& kernel, const double* k) {
  const int d = kernel.d;
  switch (kernel.kind) {
    case KernelSpec::Kind::NearestNeighbor: {
      double s = 0.0;
      for (int j = 0; j < d; ++j) s += std::cos(k[j]);
      return s / d;
    }
    case KernelSpec::Kind::Yukawa:
      return kernel.C * yukawa_sum(kernel.mu, k, d);
    case KernelSpec::Kind::PowerLaw: {
      bool zero = true;
      for (int j = 0; j < d; ++j) zero = zero && std::cos(k[j]) == 1.0;
      if (zero) return 1.0;
      return kernel.C * mellin(kernel.s, [&](double t) { return yukawa_sum(t, k, d); });
    }
    case KernelSpec::Kind::Mixture: {
      double v = 0.0;
      for (const auto& [w, p] : kernel.parts) v += w * fourier_transform(p, k);
      return v;
    }
  }
  return 0.0;
}

double fourier_transform(const KernelSpec& kernel, const std::vector<double>& k) {
  require(static_cast<int>(k.size()) == kernel.d, "wave vector has wrong dimension");
  return fourier_transform(kernel, k.data());
}

double CouplingMatrix::between(std::size_t x, std::size_t y) const {
  return values[torus.index(torus_displacement(torus.coords(x), torus.coords(y), torus))];
}

std::vector<double> CouplingMatrix::transform() const {
  auto c = torus_dft(torus, values, +1);
  std::vector<double> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
  return out;
}

CouplingMatrix periodize(const KernelSpec& kernel, const TorusSpec& torus, int cutoff, double tail_tol) {
  require(kernel.d == torus.d(), "kernel and torus dimensions differ");
  const bool automatic = cutoff <= 0;
  int c = automatic ? 1 : cutoff;
  const int d = torus.d();
  const long L = torus.L();
  for (;;) {
    double work = static_cast<double>(torus.N()) * std::pow(2.0 * c + 1.0, d);
    if (work > 4e8) {
      throw ToleranceError("periodization tail above " + std::to_string(tail_tol) + " at cutoff " +
                           std::to_string(c - 1) + " for " + kernel.describe());
    }
    CouplingMatrix m{torus, kernel, std::vector<double>(torus.N(), 0.0), c, 0.0};
    std::size_t zcount = 1;
    for (int a = 0; a < d; ++a) zcount *= static_cast<std::size_t>(2 * c + 1);
    for (std::size_t v = 0; v < torus.N(); ++v) {
      const Site base = torus.coords(v);
      Site x(d);
      double acc = 0.0;
      for (std::size_t zi = 0; zi < zcount; ++zi) {
        std::size_t rem = zi;
        for (int a = 0; a < d; ++a) {
          const long z = static_cast<long>(rem % (2 * c + 1)) - c;
          rem /= (2 * c + 1);
          x[a] = base[a] + L * z;
        }
        acc += kernel.coupling(x);
      }
      m.values[v] = acc;
    }
    // Summation order differs between v and -v; average so J_{xy} = J_{yx} exactly.
    std::vector<double> sym(torus.N());
    for (std::size_t v = 0; v < torus.N(); ++v) {
      Site neg = torus.coords(v);
      for (auto& a : neg) a = -a;
      sym[v] = 0.5 * (m.values[v] + m.values[torus.index(wrap(neg, torus))]);
    }
    m.values = std::move(sym);
    double total = 0.0;
    for (double v : m.values) total += v;
    m.truncation_bound = std::max(0.0, 1.0 - total);
    if (m.truncation_bound <= tail_tol) return m;
    if (!automatic) {
      throw ToleranceError("periodization cutoff " + std::to_string(cutoff) + " leaves tail mass " +
                           std::to_string(m.truncation_bound) + " above tolerance");
    }
    ++c;
  }
}

QuadratureSpec default_quadrature(const KernelSpec& kernel) {
  QuadratureSpec q;
  const double scale = kernel.fourier_scale();
  if (scale < 0.5) {
    q.scheme = QuadratureSpec::Scheme::RefinedNearOrigin;
    q.scale = scale;
  }
  return q;
}

namespace {

IntegralResult integrate_kernel(const KernelSpec& kernel, const QuadratureSpec& quad, bool squared) {
  auto f = [&](const double* k) {
    const double j = fourier_transform(kernel, k);
    const double gap = 1.0 - j;
    return squared ? j * j / gap : 1.0 / gap;
  };
  IntegralResult r;
  r.ladder = integrate_ladder(kernel.d, f, quad);
  r.finite = !r.ladder.divergent;
  r.value = r.ladder.estimate;
  r.error = r.ladder.error;
  if (r.finite && r.error > quad.rel_tol * std::abs(r.value)) {
    std::ostringstream os;
    os << "quadrature for " << kernel.describe() << " did not converge: estimate " << r.value << " +- "
       << r.error;
    throw ToleranceError(os.str());
  }
  return r;
}

}  // namespace

IntegralResult transience_integral(const KernelSpec& kernel, const QuadratureSpec& quad) {
  return integrate_kernel(kernel, quad, false);
}

IntegralResult transience_integral(const KernelSpec& kernel) {
  return transience_integral(kernel, default_quadrature(kernel));
}

IntegralResult mean_field_error_integral(const KernelSpec& kernel, const QuadratureSpec& quad) {
  return integrate_kernel(kernel, quad, true);
}

IntegralResult mean_field_error_integral(const KernelSpec& kernel) {
  return mean_field_error_integral(kernel, default_quadrature(kernel));
}

std::vector<double> torus_green_function(const CouplingMatrix& couplings) {
  const auto jhat = couplings.transform();
  std::vector<cplx> g(jhat.size(), 0.0);
  for (std::size_t i = 1; i < jhat.size(); ++i) {
    const double gap = 1.0 - jhat[i];
    if (!(gap > 1e-12)) {
      throw ValidationError("degenerate kernel: periodized transform reaches 1 at a nonzero mode");
    }
    g[i] = 1.0 / gap;
  }
  torus_dft(couplings.torus, g, +1);
  std::vector<double> out(g.size());
  const double n = static_cast<double>(couplings.torus.N());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i].real() / n;
  return out;
}

double torus_greens(const TorusSpec& torus, const KernelSpec& kernel, const Site& x, const Site& y) {
  const auto g = torus_green_function(periodize(kernel, torus));
  return g[torus.index(torus_displacement(x, y, torus))];
}

double HarmonicProfile::at(const Site& x) const {
  const long n = 2L * R + 1;
  std::size_t i = 0;
  for (long c : x) {
    if (c < -R || c > R) return 0.0;
    i = i * static_cast<std::size_t>(n) + static_cast<std::size_t>(c + R);
  }
  return phi[i];
}

HarmonicProfile harmonic_escape_profile(const KernelSpec& kernel, int R, double alpha) {
  require(R >= 1, "box radius must be at least 1");
  const int d = kernel.d;
  const long n = 2L * R + 1;
  std::size_t M = 1;
  for (int a = 0; a < d; ++a) M *= static_cast<std::size_t>(n);
  auto coords = [&](std::size_t i) {
    Site x(d);
    for (int a = d - 1; a >= 0; --a) {
      x[a] = static_cast<long>(i % n) - R;
      i /= n;
    }
    return x;
  };
  std::size_t origin = 0;
  for (int a = 0; a < d; ++a) origin = origin * n + R;

  // Unknowns: every box site except the origin, packed in order.
  auto unk = [&](std::size_t i) { return i < origin ? i : i - 1; };
  const std::size_t U = M - 1;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(U));
  Eigen::VectorXd sol;

  if (kernel.kind == KernelSpec::Kind::NearestNeighbor) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(U * (2 * d + 1));
    const double J = kernel.C;
    std::vector<long> stride(d, 1);
    for (int a = d - 2; a >= 0; --a) stride[a] = stride[a + 1] * n;
    for (std::size_t i = 0; i < M; ++i) {
      if (i == origin) continue;
      const Site x = coords(i);
      const auto r = static_cast<Eigen::Index>(unk(i));
      trip.emplace_back(r, r, 1.0);
      for (int a = 0; a < d; ++a) {
        for (int sgn : {-1, 1}) {
          const long c = x[a] + sgn;
          if (c < -R || c > R) continue;
          const std::size_t j = i + sgn * stride[a];
          if (j == origin) {
            b[r] += J * alpha;
          } else {
            trip.emplace_back(r, static_cast<Eigen::Index>(unk(j)), -J);
          }
        }
      }
    }
    Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(U), static_cast<Eigen::Index>(U));
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(1e-14);
    cg.setMaxIterations(100000);
    cg.compute(A);
    sol = cg.solve(b);
    if (cg.info() != Eigen::Success) throw ToleranceError("harmonic profile solve did not converge");
  } else {
    require(U <= 6000, "dense harmonic profile limited to 6000 unknowns for long-range kernels");
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(U), static_cast<Eigen::Index>(U));
    for (std::size_t i = 0; i < M; ++i) {
      if (i == origin) continue;
      const Site x = coords(i);
      const auto r = static_cast<Eigen::Index>(unk(i));
      for (std::size_t j = 0; j < M; ++j) {
        if (j == i) continue;
        const Site y = coords(j);
        Site v(d);
        for (int a = 0; a < d; ++a) v[a] = y[a] - x[a];
        const double J = kernel.coupling(v);
        if (j == origin) {
          b[r] += J * alpha;
        } else {
          A(r, static_cast<Eigen::Index>(unk(j))) -= J;
        }
      }
    }
    sol = A.ldlt().solve(b);
  }

  HarmonicProfile p;
  p.d = d;
  p.R = R;
  p.alpha = alpha;
  p.phi.assign(M, 0.0);
  for (std::size_t i = 0; i < M; ++i) p.phi[i] = i == origin ? alpha : sol[static_cast<Eigen::Index>(unk(i))];

  // Boundary identity and full quadratic form. Pairs leaving the box see phi = 0
  // outside; their total weight follows from the row normalization.
  double inside0 = 0.0;
  double half_sum = 0.0;
  double escape = 0.0;
  const bool nn = kernel.kind == KernelSpec::Kind::NearestNeighbor;
  for (std::size_t i = 0; i < M; ++i) {
    const Site x = coords(i);
    double row_inside = 0.0;
    auto visit = [&](std::size_t j, double J) {
      row_inside += J;
      const double diff = p.phi[i] - p.phi[j];
      half_sum += 0.5 * J * diff * diff;
      if (i == origin) inside0 += J * p.phi[j];
    };
    if (nn) {
      for (int a = 0; a < d; ++a)
        for (int sgn : {-1, 1}) {
          Site y = x;
          y[a] += sgn;
          if (y[a] < -R || y[a] > R) continue;
          std::size_t j = 0;
          for (int c = 0; c < d; ++c) j = j * n + static_cast<std::size_t>(y[c] + R);
          visit(j, kernel.C);
        }
    } else {
      for (std::size_t j = 0; j < M; ++j) {
        if (j == i) continue;
        const Site y = coords(j);
        Site v(d);
        for (int a = 0; a < d; ++a) v[a] = y[a] - x[a];
        visit(j, kernel.coupling(v));
      }
    }
    // Ordered pairs (x, y) and (y, x) with y outside the box: weight (1 - row_inside) each.
    escape += (1.0 - row_inside) * p.phi[i] * p.phi[i];
  }
  p.dirichlet_form = alpha * (alpha - inside0);
  p.quadratic_form = half_sum + escape;
  return p;
}

WalkEstimate simulate_walk_returns(const KernelSpec& kernel, std::int64_t steps, std::int64_t walks,
                                   std::uint64_t seed) {
  require(steps >= 1 && walks >= 1, "walk simulation needs steps >= 1 and walks >= 1");
  std::vector<std::pair<double, KernelSpec>> comps;
  if (kernel.kind == KernelSpec::Kind::Mixture) {
    comps = kernel.parts;
  } else {
    comps.push_back({1.0, kernel});
  }
  for (const auto& c : comps) {
    require(c.second.kind == KernelSpec::Kind::NearestNeighbor || c.second.kind == KernelSpec::Kind::Yukawa,
            "walk simulation supports nearest-neighbour and Yukawa steps");
  }
  const int d = kernel.d;
  constexpr std::size_t kStreams = 64;
  std::vector<double> sum(kStreams, 0.0), sum2(kStreams, 0.0);
  parallel_for(kStreams, [&](std::size_t stream) {
    Rng rng(derive_seed(seed, stream));
    std::vector<long> pos(d), step(d);
    for (std::int64_t w = static_cast<std::int64_t>(stream); w < walks; w += kStreams) {
      std::fill(pos.begin(), pos.end(), 0);
      double visits = 1.0;
      for (std::int64_t t = 0; t < steps; ++t) {
        double u = uniform01(rng);
        std::size_t ci = 0;
        while (ci + 1 < comps.size() && u >= comps[ci].first) u -= comps[ci++].first;
        const KernelSpec& c = comps[ci].second;
        if (c.kind == KernelSpec::Kind::NearestNeighbor) {
          const auto r = static_cast<int>(uniform01(rng) * 2 * d);
          pos[r / 2] += (r % 2) ? 1 : -1;
        } else {
          // Product of two-sided geometric laws, conditioned on a nonzero step.
          const double q = std::exp(-c.mu);
          const double p0 = (1.0 - q) / (1.0 + q);
          bool nonzero = false;
          while (!nonzero) {
            for (int a = 0; a < d; ++a) {
              const double v = uniform01(rng);
              if (v < p0) {
                step[a] = 0;
              } else {
                const long m = 1 + static_cast<long>(std::floor(std::log1p(-uniform01(rng)) / std::log(q)));
                step[a] = uniform01(rng) < 0.5 ? -m : m;
                nonzero = true;
              }
            }
          }
          for (int a = 0; a < d; ++a) pos[a] += step[a];
        }
        bool home = true;
        for (int a = 0; a < d && home; ++a) home = pos[a] == 0;
        if (home) visits += 1.0;
      }
      sum[stream] += visits;
      sum2[stream] += visits * visits;
    }
  });
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < kStreams; ++i) {
    s += sum[i];
    s2 += sum2[i];
  }
  const double n = static_cast<double>(walks);
  WalkEstimate est;
  est.mean = s / n;
  est.se = walks > 1 ? std::sqrt(std::max(0.0, (s2 / n - est.mean * est.mean) / (n - 1.0))) : 0.0;
  est.steps = steps;
  est.walks = walks;
  return est;
}

}  // namespace rpl
