#include "rpl/chessboard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rpl/errors.hpp"
#include "rpl/fourier.hpp"
#include "rpl/rng.hpp"

namespace rpl {

namespace {

double a2(double k) { return 2.0 - 2.0 * std::cos(k); }  // |1 - e^{ik}|^2

void require_positive(double beta, double kappa) {
  require(beta > 0.0 && std::isfinite(beta), "beta must be finite and > 0");
  require(kappa > 0.0 && std::isfinite(kappa), "kappa must be finite and > 0");
}

}  // namespace

// ---- plaquette patterns ----

PlaquettePattern PlaquettePattern::parse(const std::string& signs) {
  require(signs.size() == 4, "plaquette pattern needs four signs, e.g. +--+");
  PlaquettePattern p;
  for (int i = 0; i < 4; ++i) {
    require(signs[i] == '+' || signs[i] == '-', "plaquette pattern uses only '+' and '-'");
    p.s[i] = signs[i] == '+' ? 1 : -1;
  }
  return p;
}

PlaquettePattern::Class PlaquettePattern::klass() const {
  int minus = 0;
  for (int v : s) minus += v < 0;
  if (minus == 0 || minus == 4) return Class::Good;
  if (minus != 2) return Class::ThreeOne;
  return s[0] == s[3] ? Class::Diagonal : Class::Stripe;
}

std::string PlaquettePattern::str() const {
  std::string out;
  for (int v : s) out += v > 0 ? '+' : '-';
  return out;
}

const char* to_string(PlaquettePattern::Class c) {
  switch (c) {
    case PlaquettePattern::Class::Good:
      return "good";
    case PlaquettePattern::Class::Diagonal:
      return "diagonal";
    case PlaquettePattern::Class::Stripe:
      return "stripe";
    default:
      return "three-one";
  }
}

std::vector<PlaquettePattern> all_plaquette_patterns() {
  std::vector<PlaquettePattern> out;
  for (int m = 0; m < 16; ++m) {
    PlaquettePattern p;
    for (int i = 0; i < 4; ++i) p.s[i] = (m >> i) & 1 ? -1 : 1;
    out.push_back(p);
  }
  return out;
}

double pattern_zvalue(PlaquettePattern::Class c, double beta, double kappa) {
  require_positive(beta, kappa);
  switch (c) {
    case PlaquettePattern::Class::Good:
      return 1.0;
    case PlaquettePattern::Class::Diagonal:
      return std::exp(-4.0 * beta * kappa / (8.0 * beta + kappa));
    case PlaquettePattern::Class::Stripe:
      return std::exp(-2.0 * beta * kappa / (4.0 * beta + kappa));
    default:
      return std::exp(-2.0 * beta * kappa / (8.0 * beta + kappa));
  }
}

double pattern_zvalue(const PlaquettePattern& p, double beta, double kappa) {
  return pattern_zvalue(p.klass(), beta, kappa);
}

double variance_identity_residual(double beta, double kappa) {
  require_positive(beta, kappa);
  const double lhs = 0.5 * kappa * kappa * (1.0 / kappa - 1.0 / (8.0 * beta + kappa));
  const double rhs = 4.0 * beta * kappa / (8.0 * beta + kappa);
  return std::abs(lhs - rhs);
}

Eigen::MatrixXd torus_laplacian(const TorusSpec& torus) {
  require(torus.N() <= 4096, "dense Laplacian limited to N <= 4096 sites");
  const auto N = static_cast<Eigen::Index>(torus.N());
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N, N);
  for (std::size_t x = 0; x < torus.N(); ++x)
    for (int j = 0; j < torus.d(); ++j) {
      const auto y = torus.shift(x, j, 1);
      D(x, x) += 1.0;
      D(y, y) += 1.0;
      D(x, y) -= 1.0;
      D(y, x) -= 1.0;
    }
  return D;
}

double gaussian_pattern_ratio(const PlaquettePattern& p, double beta, double kappa, int L) {
  require(kappa != 0.0, "kappa = 0 leaves the zero mode singular");
  require_positive(beta, kappa);
  require(L >= 2 && L % 2 == 0 && L <= 16, "pattern ratio needs even L in [2, 16]");
  const TorusSpec torus(2, L);
  const auto N = static_cast<Eigen::Index>(torus.N());
  Eigen::MatrixXd P = beta * torus_laplacian(torus);
  P.diagonal().array() += kappa;
  const Eigen::LLT<Eigen::MatrixXd> llt(P);
  Eigen::VectorXd sigma(N), one = Eigen::VectorXd::Ones(N);
  for (Eigen::Index x = 0; x < N; ++x) {
    const auto c = torus.coords(static_cast<std::size_t>(x));
    sigma[x] = p.at(static_cast<int>(c[0]), static_cast<int>(c[1]));
  }
  const double qs = sigma.dot(llt.solve(sigma));
  const double q1 = one.dot(llt.solve(one));
  return std::exp(0.5 * kappa * kappa * (qs - q1) / static_cast<double>(N));
}

double bad_event_bound(double beta, double kappa) {
  using C = PlaquettePattern::Class;
  return 2.0 * pattern_zvalue(C::Diagonal, beta, kappa) + 4.0 * pattern_zvalue(C::Stripe, beta, kappa) +
         8.0 * pattern_zvalue(C::ThreeOne, beta, kappa);
}

Certificate peierls_certificate(double beta, double kappa, double c) {
  require_positive(beta, kappa);
  require(c > 1.0, "circuit-counting constant must exceed 1");
  using C = PlaquettePattern::Class;
  Certificate cert;
  cert.name = "peierls";
  cert.param("beta", beta);
  cert.param("kappa", kappa);
  cert.param("c", c);
  cert.quantity("z_good", pattern_zvalue(C::Good, beta, kappa));
  cert.quantity("z_diagonal", pattern_zvalue(C::Diagonal, beta, kappa));
  cert.quantity("z_stripe", pattern_zvalue(C::Stripe, beta, kappa));
  cert.quantity("z_threeone", pattern_zvalue(C::ThreeOne, beta, kappa));
  const double zb = bad_event_bound(beta, kappa);
  cert.quantity("z_bad", zb);
  cert.quantity("peierls_sum", 2.0 * c * zb);
  cert.quantity("margin", 0.25 - 2.0 * c * zb);
  const bool geometric = cert.check("c z(B) < 1/2", c * zb, 0.5, true);
  const bool coexist = cert.check("2 c z(B) <= 1/4", 2.0 * c * zb, 0.25);
  cert.pass = geometric && coexist;
  return cert;
}

// ---- Gaussian domination by quadrature ----

double double_well_partition(const TorusSpec& torus, double beta, double kappa, const std::vector<double>& h,
                             const DominationOptions& opt) {
  require_positive(beta, kappa);
  require(opt.nodes >= 64, "Gaussian domination quadrature needs at least 64 nodes");
  require(opt.range > 0.0, "quadrature range must be positive");
  require(h.size() == torus.N(), "field has the wrong length");
  const bool ring = torus.d() == 1 && torus.L() <= 8;
  const bool square = torus.d() == 2 && torus.L() == 2;
  require(ring || square, "brute-force partition functions need a ring with L <= 8 or the 2x2 torus");
  std::vector<double> x, w;
  gauss_legendre(opt.nodes, x, w);
  const int n = opt.nodes;
  Eigen::VectorXd phi(n), sw(n);
  for (int i = 0; i < n; ++i) {
    phi[i] = opt.range * x[i];
    const double well = std::exp(-0.5 * kappa * (phi[i] - 1.0) * (phi[i] - 1.0)) +
                        std::exp(-0.5 * kappa * (phi[i] + 1.0) * (phi[i] + 1.0));
    sw[i] = opt.range * w[i] * well;
  }
  // exp(-mult * beta * (phi_i - phi_j + dh)^2)
  auto kernel = [&](double dh, double mult) {
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double u = phi[i] - phi[j] + dh;
        K(i, j) = std::exp(-mult * beta * u * u);
      }
    return K;
  };
  if (ring) {
    const int L = torus.L();
    const Eigen::VectorXd s = sw.array().sqrt();
    Eigen::MatrixXd T = Eigen::MatrixXd::Identity(n, n);
    for (int xx = 0; xx < L; ++xx) {
      const double dh = h[xx] - h[(xx + 1) % L];
      T = T * (s.asDiagonal() * kernel(dh, 1.0) * s.asDiagonal());
    }
    return T.trace();
  }
  // 2x2 torus: every nearest-neighbour pair carries two bonds.
  auto at = [&](int a, int b) { return h[torus.index({a, b})]; };
  const double a00 = at(0, 0), a01 = at(0, 1), a10 = at(1, 0), a11 = at(1, 1);
  const Eigen::MatrixXd H0 = kernel(a00 - a10, 2.0);  // (0,0)-(1,0)
  const Eigen::MatrixXd H1 = kernel(a01 - a11, 2.0);  // (0,1)-(1,1)
  const Eigen::MatrixXd V0 = kernel(a00 - a01, 2.0);  // (0,0)-(0,1)
  const Eigen::MatrixXd V1 = kernel(a10 - a11, 2.0);  // (1,0)-(1,1)
  const Eigen::MatrixXd inner = V0 * (sw.asDiagonal() * H1 * sw.asDiagonal()) * V1.transpose();
  return (sw.asDiagonal() * H0 * sw.asDiagonal()).cwiseProduct(inner).sum();
}

std::vector<std::vector<double>> random_fields(const TorusSpec& torus, int count, std::uint64_t seed,
                                               double amplitude) {
  std::vector<std::vector<double>> out;
  for (int i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    std::vector<double> h(torus.N());
    for (auto& v : h) v = amplitude * (2.0 * uniform01(rng) - 1.0);
    out.push_back(h);
  }
  return out;
}

Certificate gaussian_domination_bruteforce(const TorusSpec& torus, double beta, double kappa,
                                           const std::vector<std::vector<double>>& h_samples,
                                           const DominationOptions& opt) {
  Certificate cert;
  cert.name = "gaussian_domination";
  cert.param("beta", beta);
  cert.param("kappa", kappa);
  cert.param("d", torus.d());
  cert.param("L", torus.L());
  cert.param("nodes", opt.nodes);
  cert.param("range", opt.range);
  const std::vector<double> zero(torus.N(), 0.0);
  const double z0 = double_well_partition(torus, beta, kappa, zero, opt);
  DominationOptions finer = opt;
  finer.nodes = opt.nodes + 32;
  const double z0f = double_well_partition(torus, beta, kappa, zero, finer);
  const double drift = std::abs(z0f - z0) / z0;
  cert.quantity("Z0", z0);
  cert.quantity("node_refinement_drift", drift);
  if (!(z0 > 0.0) || drift > 1e-10) throw ToleranceError("double-well quadrature unstable: node drift " + std::to_string(drift));

  bool ok = true;
  double worst = 0.0;
  for (std::size_t i = 0; i < h_samples.size(); ++i) {
    const double r = double_well_partition(torus, beta, kappa, h_samples[i], opt) / z0;
    worst = std::max(worst, r);
    ok = cert.check("Z(h_" + std::to_string(i) + ")/Z(0) <= 1 + tol", r, 1.0 + opt.tolerance) && ok;
  }
  const std::vector<double> constant(torus.N(), 0.7);
  const double rc = double_well_partition(torus, beta, kappa, constant, opt) / z0;
  cert.quantity("max_ratio", worst);
  cert.quantity("constant_field_ratio", rc);
  ok = cert.check("|Z(c)/Z(0) - 1| <= 1e-14", std::abs(rc - 1.0), 1e-14) && ok;
  cert.pass = ok;
  return cert;
}

ConditionalStats conditional_gaussian_stats(const std::vector<int>& sigma, double beta, double kappa,
                                            const TorusSpec& torus) {
  require(kappa > 0.0, "kappa must be > 0");
  require(beta >= 0.0, "beta must be >= 0");
  require(sigma.size() == torus.N(), "sign configuration has the wrong length");
  require(torus.N() <= 4096, "conditional statistics limited to N <= 4096 sites");
  const std::size_t N = torus.N();
  std::vector<cplx> f(N);
  for (std::size_t x = 0; x < N; ++x) {
    require(sigma[x] == 1 || sigma[x] == -1, "signs must be +1 or -1");
    f[x] = sigma[x];
  }
  torus_dft(torus, f, +1);
  const auto grid = reciprocal_grid(torus);
  double var = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    double D = 0.0;
    for (double kj : grid[k]) D += a2(kj);
    const double p = 2.0 * beta * D + kappa;
    f[k] *= kappa / p;
    var += 1.0 / p;
  }
  torus_dft(torus, f, -1);
  ConditionalStats s;
  s.mean.resize(N);
  for (std::size_t x = 0; x < N; ++x) s.mean[x] = f[x].real() / static_cast<double>(N);
  s.variance.assign(N, var / static_cast<double>(N));
  return s;
}

ConditionalStats conditional_gaussian_stats_dense(const std::vector<int>& sigma, double beta, double kappa,
                                                  const TorusSpec& torus) {
  require(kappa > 0.0, "kappa must be > 0");
  require(sigma.size() == torus.N(), "sign configuration has the wrong length");
  const auto N = static_cast<Eigen::Index>(torus.N());
  Eigen::MatrixXd P = 2.0 * beta * torus_laplacian(torus);
  P.diagonal().array() += kappa;
  const Eigen::MatrixXd C = P.llt().solve(Eigen::MatrixXd::Identity(N, N));
  Eigen::VectorXd sg(N);
  for (Eigen::Index x = 0; x < N; ++x) sg[x] = sigma[x];
  const Eigen::VectorXd m = kappa * (C * sg);
  ConditionalStats s;
  s.mean.assign(m.data(), m.data() + N);
  s.variance.resize(N);
  for (Eigen::Index x = 0; x < N; ++x) s.variance[x] = C(x, x);
  return s;
}

// ---- two-kappa gradient model ----

GradientPattern::Class GradientPattern::klass() const {
  const int d = d_bonds();
  if (d == 0) return Class::AllO;
  if (d == 4) return Class::AllD;
  if (d == 1) return Class::ThreeOneD;
  if (d == 3) return Class::OneOThreeD;
  return (h_even == h_odd) ? Class::ParallelPair : Class::CornerPair;
}

int GradientPattern::d_bonds() const { return h_even + h_odd + v_even + v_odd; }

std::string GradientPattern::str() const {
  auto c = [](bool dis) { return dis ? 'D' : 'O'; };
  return std::string("h:") + c(h_even) + c(h_odd) + " v:" + c(v_even) + c(v_odd);
}

GradientPattern GradientPattern::representative(Class c) {
  switch (c) {
    case Class::AllO:
      return {};
    case Class::AllD:
      return {true, true, true, true};
    case Class::ThreeOneD:
      return {false, false, false, true};
    case Class::OneOThreeD:
      return {true, true, true, false};
    case Class::ParallelPair:
      return {false, false, true, true};
    default:
      return {false, true, false, true};
  }
}

const char* to_string(GradientPattern::Class c) {
  switch (c) {
    case GradientPattern::Class::AllO:
      return "all-O";
    case GradientPattern::Class::AllD:
      return "all-D";
    case GradientPattern::Class::ThreeOneD:
      return "three-O-one-D";
    case GradientPattern::Class::OneOThreeD:
      return "one-O-three-D";
    case GradientPattern::Class::ParallelPair:
      return "parallel-pair";
    default:
      return "corner-pair";
  }
}

std::vector<GradientPattern> all_gradient_patterns() {
  std::vector<GradientPattern> out;
  for (int m = 0; m < 16; ++m) out.push_back({bool(m & 1), bool(m & 2), bool(m & 4), bool(m & 8)});
  return out;
}

Eigen::Matrix2d gradient_block(double k1, double k2, double kO, double kD) {
  require(kO > 0.0 && kD > 0.0, "kappas must be > 0");
  const double am = a2(k1), ap = 2.0 + 2.0 * std::cos(k1), bm = a2(k2);
  Eigen::Matrix2d P;
  P(0, 0) = kO * am + 0.5 * (kO + kD) * bm;
  P(1, 1) = kO * ap + 0.5 * (kO + kD) * bm;
  P(0, 1) = P(1, 0) = 0.5 * (kO - kD) * bm;
  return P;
}

double gradient_block_determinant(double k1, double k2, double kO, double kD) {
  const auto P = gradient_block(k1, k2, kO, kD);
  return P(0, 0) * P(1, 1) - P(0, 1) * P(1, 0);
}

Eigen::Matrix4d gradient_pattern_block(const GradientPattern& p, double k1, double k2, double kO, double kD) {
  require(kO > 0.0 && kD > 0.0, "kappas must be > 0");
  auto kap = [&](bool dis) { return dis ? kD : kO; };
  const double hb = 0.5 * (kap(p.h_even) + kap(p.h_odd)), ht = 0.5 * (kap(p.h_even) - kap(p.h_odd));
  const double vb = 0.5 * (kap(p.v_even) + kap(p.v_odd)), vt = 0.5 * (kap(p.v_even) - kap(p.v_odd));
  constexpr double pi = 3.141592653589793238462643383279502884;
  Eigen::Matrix4d A = Eigen::Matrix4d::Zero();
  for (int s = 0; s < 4; ++s) {
    const int s1 = s & 1, s2 = s >> 1;
    const double g1 = a2(k1 + pi * s1), g2 = a2(k2 + pi * s2);
    A(s, s) = hb * g1 + vb * g2;
    A(s, s ^ 2) = ht * g1;  // row-parity modulation couples k and k + pi e2
    A(s, s ^ 1) = vt * g2;  // column-parity modulation couples k and k + pi e1
  }
  return A;
}

namespace {

PatternFreeEnergy ladder_free_energy(const BzIntegrand& f, const QuadratureSpec& quad, const std::string& what) {
  const auto r = integrate_ladder(2, f, quad);
  PatternFreeEnergy out{r.estimate, r.error};
  if (!std::isfinite(out.F) || out.error > quad.rel_tol * std::max(1.0, std::abs(out.F)))
    throw ToleranceError("log-determinant quadrature did not converge for " + what);
  return out;
}

}  // namespace

PatternFreeEnergy gradient_pattern_free_energy(const GradientPattern& p, double kO, double kD,
                                               const QuadratureSpec& quad) {
  require(kO > 0.0 && kD > 0.0, "kappas must be > 0");
  const auto f = [&](const double* k) { return 0.125 * std::log(gradient_pattern_block(p, k[0], k[1], kO, kD).determinant()); };
  return ladder_free_energy(f, quad, p.str());
}

PatternFreeEnergy three_one_free_energy_block(double kO, double kD, const QuadratureSpec& quad) {
  require(kO > 0.0 && kD > 0.0, "kappas must be > 0");
  const auto f = [&](const double* k) { return 0.25 * std::log(gradient_block_determinant(k[0], k[1], kO, kD)); };
  return ladder_free_energy(f, quad, "three-one block");
}

double gradient_bond_weight(const GradientPattern& pat, double kO, double kD, double p) {
  require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
  const double fD = pat.d_bonds() / 4.0;
  auto term = [](double frac, double weight) {
    if (frac == 0.0) return 0.0;
    return weight > 0.0 ? frac * std::log(weight) : -std::numeric_limits<double>::infinity();
  };
  return 2.0 * (term(1.0 - fD, p * std::sqrt(kO)) + term(fD, (1.0 - p) * std::sqrt(kD)));
}

PatternFreeEnergy weighted_pattern_free_energy(const GradientPattern& pat, double kO, double kD, double p,
                                               const QuadratureSpec& quad) {
  auto r = gradient_pattern_free_energy(pat, kO, kD, quad);
  r.F -= gradient_bond_weight(pat, kO, kD, p);
  return r;
}

double duality_pt(double kO, double kD) {
  require(kO > 0.0 && kD > 0.0, "kappas must be > 0");
  // The smaller probability is computed directly and the other as its
  // complement, so swapping the kappas sums to exactly 1.
  if (kO >= kD) return 1.0 / (1.0 + std::pow(kO / kD, 0.25));
  return 1.0 - 1.0 / (1.0 + std::pow(kD / kO, 0.25));
}

Certificate gradient_pattern_certificate(double kO, double kD, double p, const QuadratureSpec& quad) {
  require(kO > 0.0 && kD > 0.0, "kappas must be > 0");
  if (p < 0.0) p = duality_pt(kO, kD);
  require(p > 0.0 && p < 1.0, "p must lie in (0, 1)");
  using C = GradientPattern::Class;
  Certificate cert;
  cert.name = "gradient_patterns";
  cert.param("kappa_O", kO);
  cert.param("kappa_D", kD);
  cert.param("p", p);
  cert.param("p_t", duality_pt(kO, kD));
  std::vector<std::pair<C, double>> F;
  for (C c : {C::AllO, C::AllD, C::ThreeOneD, C::OneOThreeD, C::ParallelPair, C::CornerPair}) {
    const auto r = weighted_pattern_free_energy(GradientPattern::representative(c), kO, kD, p, quad);
    F.emplace_back(c, r.F);
    cert.quantity(std::string("F_") + to_string(c), r.F);
    cert.quantity(std::string("err_") + to_string(c), r.error);
  }
  const double good = std::min(F[0].second, F[1].second);
  bool ok = true;
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 2; i < F.size(); ++i) {
    margin = std::min(margin, F[i].second - good);
    ok = cert.check(std::string("F_good < F_") + to_string(F[i].first), good, F[i].second, true) && ok;
  }
  cert.quantity("min_bad_excess", margin);
  cert.pass = ok;
  return cert;
}

}  // namespace rpl
