#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "rpl/chessboard.hpp"
#include "rpl/errors.hpp"
#include "rpl/rng.hpp"

using namespace rpl;

namespace {

constexpr double kCatalan = 0.915965594177219015;

// Gaussian ratio from the four-mode decomposition of a 2-periodic pattern:
// exponent kappa^2/2 (sum_k |a_k|^2 / (beta lambda_k + kappa) - 1/kappa).
double four_mode_ratio(const PlaquettePattern& p, double beta, double kappa) {
  double acc = 0.0;
  for (int m1 = 0; m1 < 2; ++m1)
    for (int m2 = 0; m2 < 2; ++m2) {
      double a = 0.0;
      for (int x1 = 0; x1 < 2; ++x1)
        for (int x2 = 0; x2 < 2; ++x2) a += p.at(x1, x2) * ((m1 * x1 + m2 * x2) % 2 ? -1.0 : 1.0);
      a /= 4.0;
      acc += a * a / (beta * 4.0 * (m1 + m2) + kappa);
    }
  return std::exp(0.5 * kappa * kappa * (acc - 1.0 / kappa));
}

// Exact Gaussian partition function of the double well (no truncation of the phi integral).
double double_well_exact(const TorusSpec& t, double beta, double kappa, const std::vector<double>& h) {
  const auto N = static_cast<Eigen::Index>(t.N());
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(N, N);
  for (std::size_t x = 0; x < t.N(); ++x)
    for (int j = 0; j < t.d(); ++j) {
      auto y = t.shift(x, j, 1);
      Q(x, x) += 1;
      Q(y, y) += 1;
      Q(x, y) -= 1;
      Q(y, x) -= 1;
    }
  Eigen::MatrixXd A = 2.0 * beta * Q + kappa * Eigen::MatrixXd::Identity(N, N);
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
  double Z = 0.0;
  for (std::size_t s = 0; s < (1u << t.N()); ++s) {
    Eigen::VectorXd b(N);
    for (Eigen::Index i = 0; i < N; ++i) b[i] = h[i] + ((s >> i) & 1 ? 1.0 : -1.0);
    // Substituting psi = phi + h turns the coupling into psi^T Q psi and the well into |psi - b|^2.
    double e = -0.5 * kappa * b.squaredNorm() + 0.5 * kappa * kappa * b.dot(llt.solve(b));
    Z += std::exp(e);
  }
  return Z * std::pow(2.0 * std::numbers::pi, N / 2.0) * std::exp(-0.5 * logdet);
}

}  // namespace

TEST_SUITE("chessboard") {

TEST_CASE("plaquette classes") {
  std::map<PlaquettePattern::Class, int> count;
  for (const auto& p : all_plaquette_patterns()) {
    ++count[p.klass()];
    CHECK(PlaquettePattern::parse(p.str()).s == p.s);
  }
  CHECK(count[PlaquettePattern::Class::Good] == 2);
  CHECK(count[PlaquettePattern::Class::Diagonal] == 2);
  CHECK(count[PlaquettePattern::Class::Stripe] == 4);
  CHECK(count[PlaquettePattern::Class::ThreeOne] == 8);
  CHECK(PlaquettePattern::parse("+--+").klass() == PlaquettePattern::Class::Diagonal);
  CHECK(PlaquettePattern::parse("++--").klass() == PlaquettePattern::Class::Stripe);
  CHECK_THROWS_AS(PlaquettePattern::parse("+-+"), ValidationError);
}

TEST_CASE("variance identity") {
  for (double b : {0.1, 1.0, 37.0})
    for (double k : {0.5, 4.0, 100.0}) CHECK(variance_identity_residual(b, k) < 1e-12);
}

TEST_CASE("finite-torus Gaussian ratios") {
  for (int L : {4, 8}) {
    for (auto [b, k] : std::vector<std::pair<double, double>>{{1.0, 1.0}, {0.5, 4.0}, {3.0, 0.7}}) {
      for (const auto& p : all_plaquette_patterns()) {
        CAPTURE(p.str());
        double r = gaussian_pattern_ratio(p, b, k, L);
        CHECK(r == doctest::Approx(four_mode_ratio(p, b, k)).epsilon(1e-8));
        auto c = p.klass();
        if (c == PlaquettePattern::Class::Diagonal || c == PlaquettePattern::Class::Stripe ||
            c == PlaquettePattern::Class::Good)
          CHECK(r == doctest::Approx(pattern_zvalue(c, b, k)).epsilon(1e-8));
        else
          CHECK(r <= pattern_zvalue(c, b, k) * (1 + 1e-12));
      }
    }
  }
  CHECK(pattern_zvalue(PlaquettePattern::Class::ThreeOne, 2.0, 3.0) ==
        std::sqrt(pattern_zvalue(PlaquettePattern::Class::Diagonal, 2.0, 3.0)));
  CHECK_THROWS_AS(gaussian_pattern_ratio(PlaquettePattern::parse("++++"), 1, 1, 3), ValidationError);
}

TEST_CASE("Peierls certificates") {
  auto good = peierls_certificate(100, 100);
  CHECK(good.pass);
  CHECK_FALSE(peierls_certificate(1, 1).pass);
  // The bad-event bound decreases in both couplings, and so does passing propagate.
  std::vector<double> grid{1.0, 5.0, 20.0, 60.0, 150.0};
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j < grid.size(); ++j) {
      double z = bad_event_bound(grid[i], grid[j]);
      if (i + 1 < grid.size()) CHECK(bad_event_bound(grid[i + 1], grid[j]) <= z);
      if (j + 1 < grid.size()) CHECK(bad_event_bound(grid[i], grid[j + 1]) <= z);
      bool p = peierls_certificate(grid[i], grid[j]).pass;
      if (p && i + 1 < grid.size()) CHECK(peierls_certificate(grid[i + 1], grid[j]).pass);
      if (p && j + 1 < grid.size()) CHECK(peierls_certificate(grid[i], grid[j + 1]).pass);
    }
}

TEST_CASE("double-well partition function") {
  DominationOptions opt;
  SUBCASE("ring against the exact Gaussian sum") {
    TorusSpec t(1, 4);
    auto hs = random_fields(t, 3, 5);
    hs.push_back(std::vector<double>(4, 0.0));
    for (const auto& h : hs) {
      double z = double_well_partition(t, 1.0, 4.0, h, opt);
      CHECK(z == doctest::Approx(double_well_exact(t, 1.0, 4.0, h)).epsilon(1e-6));
    }
  }
  SUBCASE("2 x 2 torus against the exact Gaussian sum") {
    TorusSpec t(2, 2);
    auto hs = random_fields(t, 2, 9);
    for (const auto& h : hs)
      CHECK(double_well_partition(t, 0.5, 4.0, h, opt) == doctest::Approx(double_well_exact(t, 0.5, 4.0, h)).epsilon(1e-6));
  }
  SUBCASE("domination") {
    TorusSpec t(1, 4);
    auto cert = gaussian_domination_bruteforce(t, 1.0, 4.0, random_fields(t, 5, 1), opt);
    CHECK(cert.pass);
  }
  CHECK_THROWS_AS(double_well_partition(TorusSpec(1, 10), 1, 1, std::vector<double>(10, 0.0)), ValidationError);
}

TEST_CASE("conditional Gaussian statistics") {
  Rng rng(4);
  for (auto [d, L] : std::vector<std::pair<int, int>>{{1, 8}, {2, 4}, {2, 6}}) {
    TorusSpec t(d, L);
    std::vector<int> sigma(t.N());
    for (auto& s : sigma) s = (rng() & 1) ? 1 : -1;
    for (auto [b, k] : std::vector<std::pair<double, double>>{{0.3, 1.0}, {2.0, 5.0}}) {
      auto f = conditional_gaussian_stats(sigma, b, k, t);
      auto g = conditional_gaussian_stats_dense(sigma, b, k, t);
      for (std::size_t x = 0; x < t.N(); ++x) {
        CHECK(f.mean[x] == doctest::Approx(g.mean[x]).epsilon(1e-10));
        CHECK(f.variance[x] == doctest::Approx(g.variance[x]).epsilon(1e-10));
        CHECK(f.variance[x] <= 1.0 / k + 1e-15);
        CHECK(std::abs(f.mean[x] - sigma[x]) <= 8.0 * d * b / k + 1e-12);
      }
    }
  }
}

TEST_CASE("gradient pattern classes") {
  using C = GradientPattern::Class;
  std::map<C, int> count;
  for (const auto& p : all_gradient_patterns()) ++count[p.klass()];
  CHECK(count[C::AllO] == 1);
  CHECK(count[C::AllD] == 1);
  CHECK(count[C::ThreeOneD] == 4);
  CHECK(count[C::OneOThreeD] == 4);
  CHECK(count[C::ParallelPair] == 2);
  CHECK(count[C::CornerPair] == 4);
  for (C c : {C::AllO, C::AllD, C::ThreeOneD, C::OneOThreeD, C::ParallelPair, C::CornerPair})
    CHECK(GradientPattern::representative(c).klass() == c);
}

TEST_CASE("gradient blocks") {
  Rng rng(12);
  for (int i = 0; i < 20; ++i) {
    double k1 = 2 * std::numbers::pi * uniform01(rng), k2 = 2 * std::numbers::pi * uniform01(rng);
    auto P = gradient_block(k1, k2, 2.0, 2.0);
    CHECK(std::abs(P(0, 1)) < 1e-12);
    auto Q = gradient_block(k1, k2, 3.0, 0.5);
    CHECK(gradient_block_determinant(k1, k2, 3.0, 0.5) == doctest::Approx(Q.determinant()).epsilon(1e-12));
    // Equal kappas: the 4 x 4 block is diagonal with kappa times the Laplacian symbol.
    auto A = gradient_pattern_block(GradientPattern::representative(GradientPattern::Class::CornerPair), k1, k2, 1.5, 1.5);
    CHECK((A - Eigen::Matrix4d(A.diagonal().asDiagonal())).norm() < 1e-12);
    CHECK(A(0, 0) == doctest::Approx(1.5 * (4 - 2 * std::cos(k1) - 2 * std::cos(k2))).epsilon(1e-12));
    auto B = gradient_pattern_block(GradientPattern::representative(GradientPattern::Class::ParallelPair), k1, k2, 3.0, 0.5);
    CHECK((B - B.transpose()).norm() < 1e-12);
  }
}

TEST_CASE("gradient free energies") {
  using C = GradientPattern::Class;
  // Homogeneous closed form: 1/2 log kappa + 2 G / pi.
  auto F = gradient_pattern_free_energy(GradientPattern::representative(C::AllO), 2.0, 5.0);
  CHECK(F.F == doctest::Approx(0.5 * std::log(2.0) + 2 * kCatalan / std::numbers::pi).epsilon(1e-5));
  for (C c : {C::ThreeOneD, C::ParallelPair, C::CornerPair}) {
    auto p = GradientPattern::representative(c);
    double f1 = gradient_pattern_free_energy(p, 1.0, 1.0).F;
    CHECK(f1 == doctest::Approx(2 * kCatalan / std::numbers::pi).epsilon(1e-5));
    double a = gradient_pattern_free_energy(p, 4.0, 0.5).F;
    double b = gradient_pattern_free_energy(p, 12.0, 1.5).F;
    CHECK(b - a == doctest::Approx(0.5 * std::log(3.0)).epsilon(1e-6));
  }
  CHECK(three_one_free_energy_block(7.0, 1.0).F ==
        doctest::Approx(gradient_pattern_free_energy(GradientPattern::representative(C::ThreeOneD), 7.0, 1.0).F)
            .epsilon(1e-6));
}

TEST_CASE("duality point") {
  CHECK(duality_pt(1.0, 1.0) == 0.5);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    double a = std::exp(8 * uniform01(rng) - 4), b = std::exp(8 * uniform01(rng) - 4);
    CHECK(duality_pt(a, b) + duality_pt(b, a) == 1.0);
    double p = duality_pt(a, b);
    CHECK(p / (1 - p) == doctest::Approx(std::pow(b / a, 0.25)).epsilon(1e-12));
  }
}

TEST_CASE("weighted pattern free energies at the duality point") {
  using C = GradientPattern::Class;
  const double kO = 100.0, kD = 1.0, p = duality_pt(kO, kD);
  const double homog = -0.5 * std::log(kO) + 2 * kCatalan / std::numbers::pi - 2 * std::log(p);
  auto cert = gradient_pattern_certificate(kO, kD);
  CHECK(cert.pass);
  CHECK(cert.quantity_or("F_all-O", 0) == doctest::Approx(homog).epsilon(1e-5));
  CHECK(cert.quantity_or("F_all-D", 0) == doctest::Approx(homog).epsilon(1e-5));
  // Frozen from an independent quadrature at this point.
  CHECK(cert.quantity_or("F_three-O-one-D", 0) - homog == doctest::Approx(0.3836).epsilon(2e-3));
  CHECK(cert.quantity_or("F_one-O-three-D", 0) - homog == doctest::Approx(0.345).epsilon(2e-3));
  CHECK(cert.quantity_or("F_parallel-pair", 0) - homog == doctest::Approx(0.6319).epsilon(2e-3));
  CHECK(cert.quantity_or("F_corner-pair", 0) - homog == doctest::Approx(0.4009).epsilon(2e-3));
  CHECK(gradient_bond_weight(GradientPattern::representative(C::AllO), kO, kD, p) ==
        doctest::Approx(2 * std::log(p * std::sqrt(kO))));
}

}
