#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rpl/errors.hpp"
#include "rpl/models.hpp"
#include "rpl/rng.hpp"

using namespace rpl;

namespace {

std::vector<double> random_unit(Rng& rng, int n) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  double s = 0.0;
  do {
    s = 0.0;
    for (auto& a : v) {
      a = g(rng);
      s += a * a;
    }
  } while (s < 1e-6);
  for (auto& a : v) a /= std::sqrt(s);
  return v;
}

SpinConfiguration random_config(const ModelSpec& m, const TorusSpec& t, Rng& rng) {
  if (m.family == ModelSpec::Family::Ising) {
    std::vector<int> l(t.N());
    for (auto& v : l) v = (rng() & 1) ? 1 : -1;
    return SpinConfiguration::from_labels(m, t, l);
  }
  if (m.family == ModelSpec::Family::Potts) {
    std::vector<int> l(t.N());
    for (auto& v : l) v = 1 + static_cast<int>(rng() % m.q);
    return SpinConfiguration::from_labels(m, t, l);
  }
  SpinConfiguration c(t, m.components());
  for (std::size_t x = 0; x < t.N(); ++x) {
    auto u = random_unit(rng, c.comps);
    std::copy(u.begin(), u.end(), c.spin(x));
  }
  return c;
}

// Rotate every spin by the same orthogonal map (a product of random Givens rotations).
void rotate(SpinConfiguration& c, Rng& rng) {
  const int n = c.comps;
  for (int r = 0; r < 3 * n; ++r) {
    int i = static_cast<int>(rng() % n), j = static_cast<int>(rng() % n);
    if (i == j) continue;
    double th = 2 * std::numbers::pi * uniform01(rng), cs = std::cos(th), sn = std::sin(th);
    for (std::size_t x = 0; x < c.torus.N(); ++x) {
      double* s = c.spin(x);
      double a = s[i], b = s[j];
      s[i] = cs * a - sn * b;
      s[j] = sn * a + cs * b;
    }
  }
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("tetrahedral vectors are unit with equal mutual angles") {
  for (int q = 2; q <= 10; ++q) {
    auto v = tetrahedral_vectors(q);
    REQUIRE(v.size() == static_cast<std::size_t>(q));
    std::vector<double> sum(q - 1, 0.0);
    for (int a = 0; a < q; ++a) {
      REQUIRE(v[a].size() == static_cast<std::size_t>(q - 1));
      for (int b = 0; b < q; ++b) {
        double dot = 0.0;
        for (int j = 0; j < q - 1; ++j) dot += v[a][j] * v[b][j];
        CHECK(dot == doctest::Approx(a == b ? 1.0 : -1.0 / (q - 1)).epsilon(1e-13));
        CHECK(dot == doctest::Approx(potts_dot(a + 1, b + 1, q)).epsilon(1e-13));
      }
      for (int j = 0; j < q - 1; ++j) sum[j] += v[a][j];
    }
    for (double s : sum) CHECK(std::abs(s) < 1e-13);
  }
  CHECK_THROWS_AS(potts_dot(0, 1, 3), ValidationError);
}

TEST_CASE("Q-matrix trace is (S.S~)^2 - 1/n") {
  Rng rng(2);
  for (int n = 2; n <= 4; ++n)
    for (int i = 0; i < 20; ++i) {
      auto a = random_unit(rng, n), b = random_unit(rng, n);
      double dot = 0.0;
      for (int j = 0; j < n; ++j) dot += a[j] * b[j];
      CHECK(qmatrix_trace(a, b) == doctest::Approx(dot * dot - 1.0 / n).epsilon(1e-13));
      auto mb = b;
      for (auto& v : mb) v = -v;
      CHECK(qmatrix_trace(a, mb) == doctest::Approx(qmatrix_trace(a, b)).epsilon(1e-13));
    }
}

TEST_CASE("alternating Ising chain energy") {
  TorusSpec t(1, 4);
  auto m = ModelSpec::ising();
  auto J = periodize(KernelSpec::nearest_neighbor(1), t);
  auto alt = SpinConfiguration::from_labels(m, t, {1, -1, 1, -1});
  CHECK(torus_hamiltonian(m, J, alt) == doctest::Approx(2.0));
  auto up = SpinConfiguration::from_labels(m, t, {1, 1, 1, 1});
  CHECK(torus_hamiltonian(m, J, up) == doctest::Approx(-2.0));
  CHECK(torus_hamiltonian(m, J, up, EnergyForm::Gradient) == doctest::Approx(0.0));
  CHECK(torus_hamiltonian(m, J, alt, EnergyForm::Gradient) == doctest::Approx(8.0));
}

TEST_CASE("energies are rotation invariant and the two forms differ by a constant") {
  Rng rng(17);
  TorusSpec t(2, 4);
  auto J = periodize(KernelSpec::yukawa(2, 1.0), t);
  double jsum = 0.0;
  for (double v : J.values) jsum += v;
  for (auto m : {ModelSpec::o_n(2), ModelSpec::o_n(3), ModelSpec::liquid_crystal(3)}) {
    double self = m.family == ModelSpec::Family::LiquidCrystal ? 1.0 - 1.0 / m.n : 1.0;
    for (int i = 0; i < 5; ++i) {
      auto c = random_config(m, t, rng);
      double dot = torus_hamiltonian(m, J, c), grad = torus_hamiltonian(m, J, c, EnergyForm::Gradient);
      CHECK(grad == doctest::Approx(2.0 * dot + double(t.N()) * jsum * self).epsilon(1e-12));
      rotate(c, rng);
      CHECK(torus_hamiltonian(m, J, c) == doctest::Approx(dot).epsilon(1e-11));
    }
  }
}

TEST_CASE("liquid-crystal energy is invariant under local sign flips") {
  Rng rng(4);
  TorusSpec t(2, 4);
  auto J = periodize(KernelSpec::nearest_neighbor(2), t);
  auto m = ModelSpec::liquid_crystal(3);
  auto c = random_config(m, t, rng);
  double e = torus_hamiltonian(m, J, c);
  for (std::size_t x = 0; x < t.N(); x += 3)
    for (int a = 0; a < 3; ++a) c.spin(x)[a] = -c.spin(x)[a];
  CHECK(torus_hamiltonian(m, J, c) == doctest::Approx(e).epsilon(1e-12));
}

TEST_CASE("Potts label form is (q-1)/q of the dot form plus a constant") {
  Rng rng(8);
  TorusSpec t(2, 4);
  auto J = periodize(KernelSpec::nearest_neighbor(2), t);
  for (int q : {2, 3, 5}) {
    auto m = ModelSpec::potts(q);
    for (int i = 0; i < 10; ++i) {
      auto c = random_config(m, t, rng);
      double want = (q - 1.0) / q * torus_hamiltonian(m, J, c) - double(t.N()) / (2.0 * q);
      CHECK(potts_label_hamiltonian(J, c) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("GFF energy includes the mass term") {
  TorusSpec t(1, 4);
  auto m = ModelSpec::gff(0.5);
  auto J = periodize(KernelSpec::nearest_neighbor(1), t);
  SpinConfiguration c(t, 1);
  c.values = {1.0, 2.0, 0.0, -1.0};
  // 1/2 sum over ordered nearest-neighbour pairs with J = 1/2: sum_<xy> (phi_x - phi_y)^2 / 2.
  double grad = 0.5 * (1 + 4 + 1 + 4);
  double mass = 0.25 * (1 + 4 + 0 + 1);
  CHECK(torus_hamiltonian(m, J, c, EnergyForm::Gradient) == doctest::Approx(grad + mass));
}

TEST_CASE("double-well potential") {
  for (double k : {0.5, 4.0, 100.0}) {
    CHECK(double_well_potential(0.0, k) == doctest::Approx(k / 2 - std::log(2.0)).epsilon(1e-14));
    CHECK(double_well_potential(1.3, k) == doctest::Approx(double_well_potential(-1.3, k)).epsilon(1e-14));
  }
  // Far from both wells the log-sum-exp stays finite.
  CHECK(std::isfinite(double_well_potential(50.0, 1000.0)));
}

TEST_CASE("specialized ground states") {
  SUBCASE("compass: uniform states cost nothing") {
    auto m = ModelSpec::orbital_compass(2);
    TorusSpec t(2, 4);
    auto c = SpinConfiguration::uniform(m, t, {std::cos(0.3), std::sin(0.3)});
    CHECK(specialized_hamiltonian(m, c) == doctest::Approx(0.0));
    // Flipping one site costs 4 (s_a)^2 per bond: 2 bonds per axis touch the site.
    c.spin(0)[0] = -c.spin(0)[0];
    c.spin(0)[1] = -c.spin(0)[1];
    double s0 = std::cos(0.3), s1 = std::sin(0.3);
    CHECK(specialized_hamiltonian(m, c) == doctest::Approx(2 * 4 * s0 * s0 + 2 * 4 * s1 * s1));
  }
  SUBCASE("antiferromagnet checkerboard-stripe energy") {
    auto m = ModelSpec::nnn_antiferromagnet(1.0);
    TorusSpec t(2, 4);
    SpinConfiguration c(t, 2);
    // Two interpenetrating Neel sublattices at angle theta.
    const double th = 0.7;
    for (std::size_t x = 0; x < t.N(); ++x) {
      auto s = t.coords(x);
      bool subA = (s[0] + s[1]) % 2 == 0;
      int sign = s[0] % 2 ? -1 : 1;
      double a = subA ? 0.0 : th;
      c.spin(x)[0] = sign * std::cos(a);
      c.spin(x)[1] = sign * std::sin(a);
    }
    // Diagonal bonds connect antiparallel spins (-1 each, 2N bonds); nearest-neighbour
    // bonds connect the sublattices with dot -cos(th) or +cos(th) in equal numbers.
    CHECK(specialized_hamiltonian(m, c) == doctest::Approx(-2.0 * double(t.N())));
  }
  SUBCASE("wrong torus dimension") {
    auto m = ModelSpec::one_twenty();
    TorusSpec t(2, 4);
    auto c = SpinConfiguration::uniform(m, t, {1.0, 0.0});
    CHECK_THROWS_AS(specialized_hamiltonian(m, c), ValidationError);
  }
}

TEST_CASE("gradient model energy reduces to the Gaussian one at p = 1") {
  auto m = ModelSpec::gradient_two_kappa(2.0, 0.5, 1.0);
  TorusSpec t(2, 4);
  SpinConfiguration c(t, 1);
  Rng rng(1);
  for (auto& v : c.values) v = uniform01(rng);
  double want = 0.0;
  for (std::size_t x = 0; x < t.N(); ++x)
    for (int a = 0; a < 2; ++a) {
      double e = c.values[t.shift(x, a, 1)] - c.values[x];
      want += 0.5 * 2.0 * e * e;
    }
  CHECK(gradient_model_energy(m, c) == doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("validation") {
  TorusSpec t(1, 4);
  auto m = ModelSpec::o_n(2);
  SpinConfiguration c(t, 2);
  CHECK_THROWS_AS(validate(m, c), ValidationError);
  CHECK_THROWS_AS(SpinConfiguration::from_labels(ModelSpec::potts(3), t, {1, 2, 3, 4}), ValidationError);
  CHECK_THROWS_AS(SpinConfiguration::from_labels(ModelSpec::ising(), t, {1, 0, 1, 1}), ValidationError);
  CHECK_THROWS_AS(ModelSpec::potts(1), ValidationError);
  CHECK_THROWS_AS(ModelSpec::nnn_antiferromagnet(2.0), ValidationError);
  CHECK_THROWS_AS(ModelSpec::gradient_two_kappa(1.0, 1.0, 1.5), ValidationError);
  CHECK(ModelSpec::liquid_crystal(3).nu() == 5);
  CHECK(ModelSpec::potts(4).nu() == 3);
}

}
