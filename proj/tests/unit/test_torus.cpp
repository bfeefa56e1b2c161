#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rpl/errors.hpp"
#include "rpl/fourier.hpp"
#include "rpl/parallel.hpp"
#include "rpl/rng.hpp"
#include "rpl/torus.hpp"

using namespace rpl;

TEST_SUITE("torus") {

TEST_CASE("index and coords are inverse") {
  for (int d = 1; d <= 3; ++d) {
    TorusSpec t(d, 4);
    CHECK(t.N() == static_cast<std::size_t>(std::pow(4, d)));
    for (std::size_t i = 0; i < t.N(); ++i) CHECK(t.index(t.coords(i)) == i);
  }
}

TEST_CASE("odd or tiny side lengths are rejected") {
  CHECK_THROWS_AS(TorusSpec(2, 3), ValidationError);
  CHECK_THROWS_AS(TorusSpec(0, 4), ValidationError);
  CHECK_THROWS_AS(TorusSpec(2, 0), ValidationError);
}

TEST_CASE("shift wraps and composes") {
  TorusSpec t(3, 6);
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t i = rng() % t.N();
    int axis = static_cast<int>(rng() % 3);
    long a = static_cast<long>(rng() % 13) - 6, b = static_cast<long>(rng() % 13) - 6;
    CHECK(t.shift(t.shift(i, axis, a), axis, b) == t.shift(i, axis, a + b));
    CHECK(t.shift(i, axis, 6) == i);
    auto x = t.coords(i);
    x[axis] += a;
    CHECK(t.index(wrap(x, t)) == t.shift(i, axis, a));
  }
}

TEST_CASE("displacement is translation invariant") {
  TorusSpec t(2, 8);
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto x = t.coords(rng() % t.N()), y = t.coords(rng() % t.N()), z = t.coords(rng() % t.N());
    auto v = torus_displacement(x, y, t);
    Site xz(2), yz(2);
    for (int j = 0; j < 2; ++j) {
      xz[j] = x[j] + z[j];
      yz[j] = y[j] + z[j];
      CHECK(v[j] >= 0);
      CHECK(v[j] < 8);
    }
    CHECK(torus_displacement(wrap(xz, t), wrap(yz, t), t) == v);
  }
}

TEST_CASE("reciprocal grid starts at zero and uses 2 pi n / L") {
  TorusSpec t(2, 4);
  auto g = reciprocal_grid(t);
  REQUIRE(g.size() == 16);
  CHECK(g[0][0] == 0.0);
  CHECK(g[0][1] == 0.0);
  CHECK(g[1][1] == doctest::Approx(std::numbers::pi / 2));
  CHECK(g[4][0] == doctest::Approx(std::numbers::pi / 2));
}

TEST_CASE("centered angles") {
  CHECK(to_centered(0.0) == 0.0);
  CHECK(to_centered(std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(to_centered(1.5 * std::numbers::pi) == doctest::Approx(-0.5 * std::numbers::pi));
}

TEST_CASE("separable transform matches the direct sum") {
  for (int d = 1; d <= 3; ++d) {
    TorusSpec t(d, 4);
    Rng rng(d);
    std::vector<cplx> f(t.N());
    for (auto& v : f) v = {uniform01(rng) - 0.5, uniform01(rng) - 0.5};
    auto fast = f;
    torus_dft(t, fast, +1);
    auto ks = reciprocal_grid(t);
    for (std::size_t a = 0; a < t.N(); ++a) {
      cplx s = 0;
      for (std::size_t x = 0; x < t.N(); ++x) {
        auto c = t.coords(x);
        double ph = 0;
        for (int j = 0; j < d; ++j) ph += ks[a][j] * c[j];
        s += f[x] * std::polar(1.0, ph);
      }
      CHECK(std::abs(s - fast[a]) < 1e-12);
    }
    // Round trip
    torus_dft(t, fast, -1);
    for (std::size_t x = 0; x < t.N(); ++x) CHECK(std::abs(fast[x] / double(t.N()) - f[x]) < 1e-13);
  }
}

TEST_CASE("ordered sum does not depend on the worker count") {
  auto term = [](std::size_t i) { return std::sin(0.37 * double(i)) / (1.0 + double(i)); };
  set_threads(1);
  double one = ordered_sum(10007, term);
  set_threads(4);
  double four = ordered_sum(10007, term);
  set_threads(0);
  CHECK(one == four);
  std::vector<int> hit(500, 0);
  parallel_for(hit.size(), [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) CHECK(h == 1);
}

TEST_CASE("derived seeds are distinct and uniform01 is in range") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    double u = uniform01(rng);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

}
