#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rpl/errors.hpp"
#include "rpl/kernels.hpp"
#include "rpl/rng.hpp"

using namespace rpl;

namespace {

// Average of 1/(1 - J-hat) for the d = 3 nearest-neighbour walk, written as
// int_0^inf e^{-t} I0(t/3)^3 dt. Simpson on [0, T] plus the asymptotic tail.
double watson_integral() {
  const double T = 1500.0;
  const int n = 300000;
  const double h = T / n;
  auto f = [](double t) {
    const double b = std::exp(-t / 3.0) * std::cyl_bessel_i(0.0, t / 3.0);
    return b * b * b;
  };
  double s = f(0.0) + f(T);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  s *= h / 3.0;
  const double C = std::pow(3.0 / (2.0 * std::numbers::pi), 1.5);
  return s + C * (2.0 / std::sqrt(T) + 0.75 * std::pow(T, -1.5));
}

double direct_transform(const KernelSpec& k, const std::vector<double>& kv, long R) {
  // Brute sum over the box [-R, R]^d.
  const int d = k.d;
  long n = 2 * R + 1, M = 1;
  for (int a = 0; a < d; ++a) M *= n;
  double s = 0.0;
  Site x(d);
  for (long i = 0; i < M; ++i) {
    long r = i;
    double ph = 0.0;
    for (int a = 0; a < d; ++a) {
      x[a] = r % n - R;
      r /= n;
      ph += kv[a] * x[a];
    }
    s += k.coupling(x) * std::cos(ph);
  }
  return s;
}

double binom_return(int m) {
  // P(S_{2m} = 0) for the simple walk on Z.
  return std::exp(std::lgamma(2.0 * m + 1) - 2 * std::lgamma(m + 1.0) - 2.0 * m * std::log(2.0));
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("nearest-neighbour couplings") {
  auto k = KernelSpec::nearest_neighbor(2);
  CHECK(k.coupling({0, 0}) == 0.0);
  CHECK(k.coupling({1, 0}) == doctest::Approx(0.25));
  CHECK(k.coupling({0, -1}) == doctest::Approx(0.25));
  CHECK(k.coupling({1, 1}) == 0.0);
  std::vector<double> kv{0.3, -1.1};
  CHECK(fourier_transform(k, kv) == doctest::Approx(0.5 * (std::cos(0.3) + std::cos(1.1))).epsilon(1e-14));
}

TEST_CASE("invalid kernels are rejected") {
  CHECK_THROWS_AS(KernelSpec::yukawa(3, 0.0), ValidationError);
  CHECK_THROWS_AS(KernelSpec::power_law(2, 2.0), ValidationError);
  CHECK_THROWS_AS(KernelSpec::nearest_neighbor(0), ValidationError);
  CHECK_THROWS_AS(KernelSpec::mixture({{0.5, KernelSpec::nearest_neighbor(1)}}), ValidationError);
}

TEST_CASE("transforms match direct sums") {
  SUBCASE("Yukawa d = 2") {
    auto k = KernelSpec::yukawa(2, 1.0);
    CHECK(k.coupling({0, 0}) == 0.0);
    CHECK(direct_transform(k, {0.0, 0.0}, 40) == doctest::Approx(1.0).epsilon(1e-12));
    for (auto kv : std::vector<std::vector<double>>{{0.4, 1.3}, {3.0, -2.2}, {0.01, 0.0}})
      CHECK(fourier_transform(k, kv) == doctest::Approx(direct_transform(k, kv, 40)).epsilon(1e-11));
  }
  SUBCASE("Yukawa d = 3 slow decay") {
    auto k = KernelSpec::yukawa(3, 0.5);
    std::vector<double> kv{0.7, -0.2, 2.5};
    CHECK(fourier_transform(k, kv) == doctest::Approx(direct_transform(k, kv, 60)).epsilon(1e-10));
  }
  SUBCASE("power law d = 1") {
    auto k = KernelSpec::power_law(1, 3.0);
    for (double kk : {0.1, 1.0, 2.9}) {
      std::vector<double> kv{kk};
      CHECK(fourier_transform(k, kv) == doctest::Approx(direct_transform(k, kv, 200000)).epsilon(1e-8));
    }
  }
  SUBCASE("mixture is the weighted sum") {
    auto a = KernelSpec::nearest_neighbor(3), b = KernelSpec::yukawa(3, 1.0);
    auto m = KernelSpec::mixture({{0.25, a}, {0.75, b}});
    std::vector<double> kv{0.5, 1.5, -0.5};
    CHECK(fourier_transform(m, kv) ==
          doctest::Approx(0.25 * fourier_transform(a, kv) + 0.75 * fourier_transform(b, kv)).epsilon(1e-14));
    CHECK(m.coupling({1, 0, 0}) == doctest::Approx(0.25 * a.coupling({1, 0, 0}) + 0.75 * b.coupling({1, 0, 0})));
  }
}

TEST_CASE("transform is at most 1 and even") {
  Rng rng(5);
  std::vector<KernelSpec> ks{KernelSpec::nearest_neighbor(2), KernelSpec::yukawa(2, 0.3),
                             KernelSpec::power_law(2, 3.5)};
  for (const auto& k : ks) {
    for (int i = 0; i < 50; ++i) {
      std::vector<double> kv{(2 * uniform01(rng) - 1) * std::numbers::pi, (2 * uniform01(rng) - 1) * std::numbers::pi};
      std::vector<double> mk{-kv[0], -kv[1]};
      double j = fourier_transform(k, kv);
      CHECK(j <= 1.0);
      CHECK(j >= -1.0);
      CHECK(j == doctest::Approx(fourier_transform(k, mk)).epsilon(1e-12));
    }
  }
}

TEST_CASE("periodized couplings") {
  TorusSpec t1(1, 2);
  auto m1 = periodize(KernelSpec::nearest_neighbor(1), t1);
  CHECK(m1.at(0) == 0.0);
  CHECK(m1.at(1) == doctest::Approx(1.0));

  TorusSpec t(2, 6);
  auto m = periodize(KernelSpec::yukawa(2, 0.8), t);
  double total = 0.0;
  for (double v : m.values) total += v;
  CHECK(total == doctest::Approx(1.0 - m.truncation_bound).epsilon(1e-14));
  CHECK(m.truncation_bound <= 1e-12);
  for (std::size_t x = 0; x < t.N(); ++x)
    for (std::size_t y = 0; y < t.N(); ++y) CHECK(m.between(x, y) == m.between(y, x));
  // Discrete transform vs the infinite-lattice closed form at torus modes.
  auto jh = m.transform();
  auto ks = reciprocal_grid(t);
  for (std::size_t i = 0; i < ks.size(); ++i) CHECK(jh[i] == doctest::Approx(fourier_transform(m.kernel, ks[i])).epsilon(1e-10));
  CHECK_THROWS_AS(periodize(KernelSpec::yukawa(2, 0.8), TorusSpec(3, 4)), ValidationError);
}

TEST_CASE("d = 3 transience integral agrees with the Bessel representation") {
  const double oracle = watson_integral();
  CHECK(oracle == doctest::Approx(1.516386059).epsilon(1e-8));
  auto r = transience_integral(KernelSpec::nearest_neighbor(3));
  CHECK(r.finite);
  CHECK(std::abs(r.value - oracle) < 1e-4 * oracle);
}

TEST_CASE("recurrence is detected") {
  CHECK_FALSE(transience_integral(KernelSpec::nearest_neighbor(1)).finite);
  CHECK_FALSE(transience_integral(KernelSpec::nearest_neighbor(2)).finite);
  // A slow logarithmic growth misses the factor criterion; it must still never pass as finite.
  bool yukawa_finite = false;
  try {
    yukawa_finite = transience_integral(KernelSpec::yukawa(2, 1.0)).finite;
  } catch (const ToleranceError&) {
  }
  CHECK_FALSE(yukawa_finite);
  CHECK(transience_integral(KernelSpec::power_law(1, 1.5)).finite);
  CHECK_FALSE(transience_integral(KernelSpec::power_law(1, 2.5)).finite);
}

TEST_CASE("mean-field error integral is the transience integral minus one") {
  for (const auto& k : {KernelSpec::nearest_neighbor(3), KernelSpec::yukawa(3, 1.0)}) {
    auto T = transience_integral(k), I = mean_field_error_integral(k);
    REQUIRE(T.finite);
    REQUIRE(I.finite);
    CHECK(std::abs(I.value - (T.value - 1.0)) < 1e-8);
  }
}

TEST_CASE("torus Green's function inverts 1 - J off the zero mode") {
  for (auto [d, L] : std::vector<std::pair<int, int>>{{1, 8}, {2, 6}, {3, 4}}) {
    TorusSpec t(d, L);
    auto m = periodize(KernelSpec::nearest_neighbor(d), t);
    auto G = torus_green_function(m);
    double sum = 0.0;
    for (double g : G) sum += g;
    CHECK(std::abs(sum) < 1e-12);
    for (std::size_t v = 0; v < t.N(); ++v) {
      double jg = 0.0;
      for (std::size_t u = 0; u < t.N(); ++u) jg += m.between(v, u) * G[u];
      const double want = (v == 0 ? 1.0 : 0.0) - 1.0 / double(t.N());
      CHECK(G[v] - jg == doctest::Approx(want).epsilon(1e-12));
      // Reflection symmetry
      auto c = t.coords(v);
      for (auto& a : c) a = -a;
      CHECK(G[v] == doctest::Approx(G[t.index(wrap(c, t))]).epsilon(1e-12));
    }
    CHECK(torus_greens(t, KernelSpec::nearest_neighbor(d), t.coords(1), t.coords(1)) ==
          doctest::Approx(G[0]).epsilon(1e-14));
  }
}

TEST_CASE("harmonic escape profile, d = 1 closed form") {
  for (int R : {1, 3, 10}) {
    for (double alpha : {1.0, 2.5}) {
      auto h = harmonic_escape_profile(KernelSpec::nearest_neighbor(1), R, alpha);
      CHECK(h.dirichlet_form == doctest::Approx(alpha * alpha / (R + 1)).epsilon(1e-10));
      CHECK(h.quadratic_form == doctest::Approx(h.dirichlet_form).epsilon(1e-10));
      CHECK(h.at({0}) == alpha);
      CHECK(h.at({R + 1}) == 0.0);
      for (long x = 1; x <= R; ++x) CHECK(h.at({x}) == doctest::Approx(alpha * (R + 1 - x) / (R + 1)).epsilon(1e-10));
    }
  }
}

TEST_CASE("harmonic escape profile is harmonic off the origin in d = 2") {
  auto k = KernelSpec::nearest_neighbor(2);
  auto h = harmonic_escape_profile(k, 4, 1.0);
  for (long a = -4; a <= 4; ++a)
    for (long b = -4; b <= 4; ++b) {
      if (a == 0 && b == 0) continue;
      double avg = 0.25 * (h.at({a + 1, b}) + h.at({a - 1, b}) + h.at({a, b + 1}) + h.at({a, b - 1}));
      CHECK(h.at({a, b}) == doctest::Approx(avg).epsilon(1e-9));
      CHECK(h.at({a, b}) >= 0.0);
      CHECK(h.at({a, b}) <= 1.0);
    }
  CHECK(h.quadratic_form == doctest::Approx(h.dirichlet_form).epsilon(1e-9));
}

TEST_CASE("walk return counts match the finite-step oracle") {
  const int steps = 12;
  double want = 1.0;
  for (int m = 1; 2 * m <= steps; ++m) want += binom_return(m);
  auto w = simulate_walk_returns(KernelSpec::nearest_neighbor(1), steps, 40000, 99);
  CHECK(std::abs(w.mean - want) < 4.0 * w.se);
  auto w2 = simulate_walk_returns(KernelSpec::nearest_neighbor(1), steps, 40000, 99);
  CHECK(w.mean == w2.mean);
  CHECK_THROWS_AS(simulate_walk_returns(KernelSpec::power_law(1, 1.5), 10, 10, 1), ValidationError);
}

TEST_CASE("Yukawa walk first step has the kernel's law") {
  // One step returns to 0 never; two steps return with probability sum_x J_{0x}^2.
  auto k = KernelSpec::yukawa(1, 1.0);
  double p2 = 0.0;
  for (long x = 1; x < 200; ++x) p2 += 2.0 * std::pow(k.coupling({x}), 2);
  auto w = simulate_walk_returns(k, 2, 200000, 3);
  CHECK(std::abs(w.mean - (1.0 + p2)) < 4.0 * w.se);
}

}
