#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rpl/errors.hpp"
#include "rpl/mean_field.hpp"
#include "rpl/rng.hpp"

using namespace rpl;

namespace {

std::vector<double> random_vec(Rng& rng, int n, double scale) {
  std::vector<double> v(n);
  for (auto& a : v) a = scale * (2.0 * uniform01(rng) - 1.0);
  return v;
}

double binary_entropy(double m) {
  auto xlx = [](double x) { return x > 0 ? x * std::log(x) : 0.0; };
  return -(xlx((1 + m) / 2) + xlx((1 - m) / 2));
}

// Root of m = tanh(b m) with m > 0 by plain fixed-point iteration.
double tanh_root(double b) {
  double m = 1.0;
  for (int i = 0; i < 10000; ++i) m = std::tanh(b * m);
  return m;
}

}  // namespace

TEST_SUITE("mean_field") {

TEST_CASE("Ising cumulant is log cosh") {
  auto mu = SingleSpinMeasure::ising();
  for (double h : {-3.0, -0.4, 0.0, 0.9, 5.0}) {
    auto c = cumulant_generating(mu, {h});
    CHECK(c.G == doctest::Approx(std::log(std::cosh(h))).epsilon(1e-14));
    CHECK(c.grad[0] == doctest::Approx(std::tanh(h)).epsilon(1e-14));
    CHECK(c.hess(0, 0) == doctest::Approx(1.0 - std::tanh(h) * std::tanh(h)).epsilon(1e-12));
  }
}

TEST_CASE("Potts cumulant from the tetrahedral atoms") {
  auto mu = SingleSpinMeasure::potts(3);
  auto v = tetrahedral_vectors(3);
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    auto h = random_vec(rng, 2, 4.0);
    double z = 0.0;
    for (const auto& a : v) z += std::exp(h[0] * a[0] + h[1] * a[1]);
    CHECK(cumulant_generating(mu, h).G == doctest::Approx(std::log(z / 3.0)).epsilon(1e-13));
  }
}

TEST_CASE("sphere cumulants match Bessel closed forms") {
  for (double r : {0.0, 0.5, 3.0, 10.0}) {
    auto c3 = cumulant_generating(SingleSpinMeasure::sphere(3), {r, 0.0, 0.0});
    double want3 = r == 0.0 ? 0.0 : std::log(std::sinh(r) / r);
    CHECK(c3.G == doctest::Approx(want3).epsilon(1e-11));
    auto c2 = cumulant_generating(SingleSpinMeasure::sphere(2), {0.0, r});
    CHECK(c2.G == doctest::Approx(std::log(std::cyl_bessel_i(0.0, r))).epsilon(1e-11));
    CHECK(c2.grad[1] == doctest::Approx(std::cyl_bessel_i(1.0, r) / std::cyl_bessel_i(0.0, r)).epsilon(1e-10));
  }
  auto mu = SingleSpinMeasure::sphere(3);
  CHECK_THROWS_AS(cumulant_generating(mu, {2.0 * mu.max_field(), 0.0, 0.0}), ToleranceError);
}

TEST_CASE("gradient of G is monotone and its Hessian is a covariance") {
  Rng rng(9);
  for (auto mu : {SingleSpinMeasure::potts(4), SingleSpinMeasure::sphere(3)}) {
    for (int i = 0; i < 30; ++i) {
      auto a = random_vec(rng, mu.nu(), 6.0), b = random_vec(rng, mu.nu(), 6.0);
      auto ga = cumulant_generating(mu, a), gb = cumulant_generating(mu, b);
      double s = 0.0, gnorm = 0.0;
      for (int j = 0; j < mu.nu(); ++j) {
        s += (ga.grad[j] - gb.grad[j]) * (a[j] - b[j]);
        gnorm += ga.grad[j] * ga.grad[j];
      }
      CHECK(s >= -1e-12);
      CHECK(gnorm <= 1.0 + 1e-12);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ga.hess);
      CHECK(es.eigenvalues().minCoeff() >= -1e-12);
      // Finite-difference gradient.
      for (int j = 0; j < mu.nu(); ++j) {
        auto ap = a, am = a;
        ap[j] += 1e-5;
        am[j] -= 1e-5;
        double fd = (cumulant_generating(mu, ap).G - cumulant_generating(mu, am).G) / 2e-5;
        CHECK(fd == doctest::Approx(ga.grad[j]).epsilon(1e-7));
      }
    }
  }
}

TEST_CASE("Ising entropy is the binary entropy") {
  auto mu = SingleSpinMeasure::ising();
  for (double m : {0.0, 0.3, -0.7, 0.99}) CHECK(entropy(mu, {m}) == doctest::Approx(binary_entropy(m) - std::log(2.0)).epsilon(1e-9));
  CHECK(entropy(mu, {1.0}) == doctest::Approx(-std::log(2.0)));
  CHECK(entropy(mu, {1.2}) == -INFINITY);
}

TEST_CASE("Potts entropy on the axis is the relative mole-fraction entropy") {
  for (int q : {3, 5}) {
    auto mu = SingleSpinMeasure::potts(q);
    auto e = mu.axis();
    for (double m : {0.0, 0.25, 0.8, 1.0}) {
      double x1 = (1 + (q - 1) * m) / q, xk = (1 - m) / q;
      auto xlx = [](double x) { return x > 0 ? x * std::log(x) : 0.0; };
      double want = -(xlx(x1) + (q - 1) * xlx(xk)) - std::log(double(q));
      std::vector<double> v(e);
      for (auto& a : v) a *= m;
      CHECK(entropy(mu, v) == doctest::Approx(want).epsilon(1e-8));
    }
  }
}

TEST_CASE("mole-fraction and general free energies differ by a constant") {
  for (int q : {3, 4, 10}) {
    const double bd = 2.5;
    auto grid = linear_grid(0.0, 0.98, 50);
    auto a = potts_on_axis_profile(q, bd, grid);
    auto b = mean_field_profile(SingleSpinMeasure::potts(q), beta_dot_from_delta(bd, q), grid);
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      lo = std::min(lo, b.phi[i] - a.phi[i]);
      hi = std::max(hi, b.phi[i] - a.phi[i]);
    }
    CHECK(hi - lo < 1e-8);
    CHECK(a.normalization == "delta");
    CHECK(b.normalization == "dot");
  }
  CHECK(beta_dot_from_delta(3.0, 3) == doctest::Approx(2.0));
}

TEST_CASE("Ising fixed points are the tanh roots") {
  auto mu = SingleSpinMeasure::ising();
  auto r = solve_mean_field(mu, 2.0);
  REQUIRE(r.solutions.size() == 3);
  const double m = tanh_root(2.0);
  CHECK(m == doctest::Approx(0.957504).epsilon(1e-6));
  CHECK(std::abs(r.solutions[0].m[0]) == doctest::Approx(m).epsilon(1e-10));
  CHECK(r.solutions[0].stable);
  CHECK(r.solutions[2].m[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_FALSE(r.solutions[2].stable);
  auto hot = solve_mean_field(mu, 0.5);
  REQUIRE(hot.solutions.size() == 1);
  CHECK(hot.solutions[0].stable);
}

TEST_CASE("fixed points are stationary points of the free energy") {
  for (auto [mu, beta] : std::vector<std::pair<SingleSpinMeasure, double>>{
           {SingleSpinMeasure::potts(3), 2.9}, {SingleSpinMeasure::sphere(3), 4.5}, {SingleSpinMeasure::ising(), 1.3}}) {
    auto r = solve_mean_field(mu, beta);
    REQUIRE(!r.solutions.empty());
    for (const auto& s : r.solutions) {
      CHECK(s.residual < 1e-9);
      double norm = 0.0;
      for (double v : s.m) norm += v * v;
      if (std::sqrt(norm) > 0.98) continue;  // finite differences need room inside the hull
      for (int j = 0; j < mu.nu(); ++j) {
        auto p = s.m, m = s.m;
        p[j] += 1e-5;
        m[j] -= 1e-5;
        double fd = (free_energy(mu, beta, p) - free_energy(mu, beta, m)) / 2e-5;
        CHECK(std::abs(fd) < 1e-5);
      }
    }
    for (std::size_t i = 1; i < r.solutions.size(); ++i) CHECK(r.solutions[i - 1].phi <= r.solutions[i].phi);
  }
}

TEST_CASE("bifurcation points") {
  CHECK(bifurcation_beta(SingleSpinMeasure::ising()) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(bifurcation_beta(SingleSpinMeasure::sphere(3)) == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(bifurcation_beta(SingleSpinMeasure::sphere(2)) == doctest::Approx(2.0).epsilon(1e-6));
  // First-order Potts: the secondary minimum appears before the paramagnet destabilizes at q - 1.
  CHECK(bifurcation_beta(SingleSpinMeasure::potts(3)) < 2.0);
}

TEST_CASE("Potts transition matches the closed form") {
  for (int q : {3, 4, 5, 10}) {
    auto t = locate_transition(q);
    const double closed = 2.0 * (q - 1) * std::log(q - 1.0) / (q - 2);
    CHECK(t.beta_t == doctest::Approx(closed).epsilon(1e-8));
    CHECK(t.m_plus == doctest::Approx((q - 2.0) / (q - 1)).epsilon(1e-6));
    CHECK(t.beta0 < t.beta_t);
    // Degenerate minima at beta_t.
    auto p = potts_on_axis_profile(q, t.beta_t, {0.0, 0.5 * t.m_plus, t.m_plus});
    CHECK(p.phi[0] == doctest::Approx(p.phi[2]).epsilon(1e-8));
    CHECK(p.phi[1] > p.phi[0]);
  }
  auto t2 = locate_transition(2);
  CHECK(t2.beta_t == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(t2.m_plus == doctest::Approx(0.0));
}

TEST_CASE("profiles mark extrema") {
  auto p = potts_on_axis_profile(3, 4.0 * std::log(2.0), linear_grid(0.0, 1.0, 2001));
  auto mins = p.minima();
  REQUIRE(mins.size() == 2);
  CHECK(p.grid[mins[0]] == doctest::Approx(0.0));
  CHECK(p.grid[mins[1]] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(p.maxima().size() == 1);
  CHECK_THROWS_AS(mean_field_profile(SingleSpinMeasure::ising(), 1.0, {0.0, 0.5, 1.5}), ValidationError);
}

TEST_CASE("admissible band from a synthetic profile") {
  FreeEnergyProfile p;
  p.normalization = "dot";
  p.beta = 1.0;
  p.grid = {0.0, 0.1, 0.2, 0.3, 0.4};
  p.phi = {0.0, 0.5, 1.0, 0.02, 0.6};
  p.global_min = 0;
  auto b = admissible_band_from_profile(p, 1, 0.1, 0.5);  // band 0.025
  CHECK(b.band == doctest::Approx(0.025));
  REQUIRE(b.components.size() == 2);
  CHECK(b.max_gap() == doctest::Approx(0.3));
  CHECK_THROWS_AS(admissible_band_from_profile(p, 1, 0.1, INFINITY), ValidationError);
  CHECK_THROWS_AS(admissible_band(SingleSpinMeasure::ising(), KernelSpec::nearest_neighbor(2), 1.0, {0.0, 0.5, 1.0}),
                  ValidationError);
}

TEST_CASE("forced discontinuity needs a small mean-field error") {
  DiscontinuityOptions opt;
  opt.grid_points = 1001;
  opt.beta_points = 24;
  auto nn = forced_discontinuity_check(10, KernelSpec::nearest_neighbor(3), opt);
  CHECK_FALSE(nn.pass);
  CHECK(nn.quantity_or("band_to_hump_ratio", 0.0) > 1.0);
  auto ising = forced_discontinuity_check(2, KernelSpec::yukawa(3, 0.3), opt);
  CHECK_FALSE(ising.pass);
  auto rec = forced_discontinuity_check(10, KernelSpec::nearest_neighbor(2), opt);
  CHECK_FALSE(rec.pass);
}

}
