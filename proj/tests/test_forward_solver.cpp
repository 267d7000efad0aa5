#include <cmath>
#include <random>

#include "doctest.h"
#include "phaseshift/errors.hpp"
#include "phaseshift/forward_solver.hpp"
#include "phaseshift/ode_oracle.hpp"

using namespace phaseshift;

namespace {

const Potential kQ0({0.5, 1.0, 1.5, 2.0}, {7.2, 4.5, 7.2, 4.5});

// Shifts of q0 at k = 3 for the plain equation, from a 40-digit evaluation
// of the same interface conditions.
constexpr double kQ0Shifts[] = {
    1.0185142035432206,     0.664447042488081,      1.3601220945468248,
    -1.0975610156464811,    -0.56862576585321564,   -0.23023085504919641,
    -0.06707823086966042,   -0.013577817106787359,  -0.0019734180393583546,
    -0.00021762495259842708, -1.901525797214132e-5, -1.3562468263085973e-6,
    -8.0691759573508833e-8, -4.0728031725521214e-9, -1.7679635767371103e-10,
    -6.6761202729460913e-12, -2.214410166636637e-13, -6.5059147389530927e-15,
    -1.7054791691419186e-16, -4.0148360283413251e-18, -8.5360639438703112e-20};

// Reference q0 shifts at k = 3 (six significant digits).
constexpr double kTabulated[] = {
    -0.220024E+00, -0.188623E+00, -0.210693E+00, -0.185306E+00, -0.104318E+00,
    -0.390310E-01, -0.100159E-01, -0.183339E-02, -0.250850E-03, -0.267137E-04,
    -0.228367E-05, -0.160476E-06, -0.944572E-08, -0.472923E-09, -0.204010E-10,
    -0.766553E-12, -0.253238E-13, -0.741554E-15, -0.193858E-16, -0.455299E-18,
    -0.966113E-20};

Potential random_potential(std::mt19937_64& rng, double k) {
  std::uniform_int_distribution<int> layers(1, 4);
  std::uniform_real_distribution<double> radius(0.05, 2.5);
  std::uniform_real_distribution<double> value(0.0, 0.8 * k * k);
  const int n = layers(rng);
  std::vector<double> radii(n), values(n);
  for (auto& r : radii) r = radius(rng);
  for (auto& v : values) v = value(rng);
  std::sort(radii.begin(), radii.end());
  return Potential(radii, values);
}

Potential split_layer(const Potential& p, std::size_t i) {
  std::vector<double> radii(p.radii().begin(), p.radii().end());
  std::vector<double> values(p.values().begin(), p.values().end());
  const double inner = i == 0 ? 0.0 : radii[i - 1];
  radii.insert(radii.begin() + static_cast<std::ptrdiff_t>(i), 0.5 * (inner + radii[i]));
  values.insert(values.begin() + static_cast<std::ptrdiff_t>(i), values[i]);
  return Potential(radii, values);
}

}  // namespace

TEST_CASE("potential validation") {
  CHECK_THROWS_AS(Potential({1.0, 2.0}, {1.0}), ValidationError);
  CHECK_THROWS_AS(Potential({1.0, 0.5}, {1.0, 2.0}), ValidationError);
  CHECK_THROWS_AS(Potential({-1.0}, {1.0}), ValidationError);
  CHECK_THROWS_AS(Potential({1.0}, {NAN}), ValidationError);
  const Potential tied({1.0, 1.0 + 1e-13, 2.0}, {3.0, 4.0, 5.0});
  CHECK(tied.layer_count() == 2);
  CHECK(tied.value_at(1.5) == 5.0);
  const Potential origin({0.0, 1.0}, {3.0, 4.0});
  CHECK(origin.layer_count() == 1);
  CHECK(kQ0.value_at(0.0) == 7.2);
  CHECK(kQ0.value_at(0.5) == 4.5);
  CHECK(kQ0.value_at(2.0) == 0.0);
  CHECK(Potential().value_at(0.3) == 0.0);
}

TEST_CASE("measure where two potentials differ") {
  const Potential a({1.0, 2.0}, {5.0, 1.0});
  const Potential b({1.5}, {5.0});
  // |a-b|: [0,1) 0, [1,1.5) 4, [1.5,2) 1, beyond 0.
  CHECK(measure_where_differs(a, b, 0.5) == doctest::Approx(1.0));
  CHECK(measure_where_differs(a, b, 2.0) == doctest::Approx(0.5));
  CHECK(measure_where_differs(a, a, 0.0) == 0.0);
}

TEST_CASE("layer wavenumbers") {
  const auto w = compute_wavenumbers(kQ0, 3.0);
  REQUIRE(w.kappa.size() == 5);
  CHECK(w.kappa[0] == doctest::Approx(std::sqrt(1.8)));
  CHECK(w.kappa[1] == doctest::Approx(std::sqrt(4.5)));
  CHECK(w.kappa[2] == doctest::Approx(std::sqrt(1.8)));
  CHECK(w.kappa[3] == doctest::Approx(std::sqrt(4.5)));
  CHECK(w.kappa[4] == 3.0);

  CHECK(compute_wavenumbers(Potential({2.0}, {0.0}), 3.0).kappa[0] == 3.0);
  CHECK(compute_wavenumbers(Potential({0.4316}, {8.9991}), 3.0).kappa[0] ==
        doctest::Approx(0.03).epsilon(1e-10));
}

TEST_CASE("evanescent layer is rejected with its index") {
  const Potential p({1.0, 2.0}, {1.0, 9.0});
  try {
    compute_wavenumbers(p, 3.0);
    FAIL("expected EvanescentLayer");
  } catch (const EvanescentLayer& e) {
    CHECK(e.layer() == 2);
  }
  CHECK_THROWS_AS(phase_shift(p, 3.0, 0), EvanescentLayer);
  CHECK_THROWS_AS(compute_wavenumbers(p, 0.0), DomainError);
  CHECK_NOTHROW(compute_wavenumbers(p, 3.0, 0.5));
}

TEST_CASE("interface matrix with matching wavenumbers is a multiple of identity") {
  for (int l : {0, 3, 11}) {
    const auto m = interface_matrix(l, 1.7, 1.7, 0.9);
    CHECK(m.a11 == doctest::Approx(1.7).epsilon(1e-12));
    CHECK(m.a22 == doctest::Approx(1.7).epsilon(1e-12));
    CHECK(std::abs(m.a12) < 1e-9 * std::abs(1.7));
    CHECK(std::abs(m.a21) < 1e-12);
  }
}

TEST_CASE("interface matrix for l = 0 against closed forms") {
  // j_0 = sin, n_0 = -cos, j_0' = cos, n_0' = sin.
  const double ki = 1.0, kn = 2.0, r = 1.0;
  const double j_in = std::sin(ki * r), n_in = -std::cos(ki * r);
  const double jp_in = std::cos(ki * r), np_in = std::sin(ki * r);
  const double j_out = std::sin(kn * r), n_out = -std::cos(kn * r);
  const double jp_out = std::cos(kn * r), np_out = std::sin(kn * r);
  const auto m = interface_matrix(0, ki, kn, r);
  CHECK(m.a11 == doctest::Approx(2.0 * std::sin(1.0) * std::sin(2.0) -
                                 std::cos(1.0) * (-std::cos(2.0))));
  CHECK(m.a11 == doctest::Approx(kn * j_in * np_out - ki * jp_in * n_out));
  CHECK(m.a12 == doctest::Approx(kn * n_in * np_out - ki * np_in * n_out));
  CHECK(m.a21 == doctest::Approx(ki * jp_in * j_out - kn * j_in * jp_out));
  CHECK(m.a22 == doctest::Approx(ki * np_in * j_out - kn * n_in * jp_out));
}

TEST_CASE("interface matrix determinant is kappa_i * kappa_next") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> kappa(0.2, 4.0), radius(0.1, 3.0);
  std::uniform_int_distribution<int> order(0, 15);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = kappa(rng), b = kappa(rng), r = radius(rng);
    const int l = order(rng);
    const auto m = interface_matrix(l, a, b, r);
    INFO("l=" << l << " a=" << a << " b=" << b << " r=" << r);
    CHECK(m.determinant() == doctest::Approx(a * b).epsilon(1e-10));
  }
}

TEST_CASE("zero potential does not scatter") {
  for (int l : {0, 1, 7, 20}) {
    const auto s = propagate(Potential(), 3.0, l);
    CHECK(s.b == 0.0);
    const auto flat = propagate(Potential({2.0}, {0.0}), 3.0, l);
    CHECK(std::abs(flat.ratio()) < 1e-14);
  }
  CHECK(phase_shift(Potential({2.0}, {0.0}), 3.0, 7) == doctest::Approx(0.0));
  const auto table = phase_shift_table(Potential(), 3.0, 20);
  CHECK(table.delta.size() == 21);
  for (double d : table.delta) CHECK(d == 0.0);
}

TEST_CASE("q0 shifts at k = 3 match the high-precision evaluation") {
  const auto table = phase_shift_table(kQ0, 3.0, 20);
  REQUIRE(table.l_max == 20);
  for (int l = 0; l <= 20; ++l) {
    INFO("l=" << l);
    CHECK(table.delta[l] == doctest::Approx(kQ0Shifts[l]).epsilon(1e-10));
    CHECK(phase_shift(kQ0, 3.0, l) == doctest::Approx(table.delta[l]).epsilon(1e-14));
  }
}

TEST_CASE("energy-scaled coupling reproduces the tabulated q0 shifts") {
  const auto table = phase_shift_table(kQ0, 3.0, 20, inverse_energy_coupling(3.0));
  for (int l = 0; l <= 20; ++l) {
    INFO("l=" << l);
    CHECK(table.delta[l] == doctest::Approx(kTabulated[l]).epsilon(1e-5));
  }
  const auto s0 = propagate(kQ0, 3.0, 0, inverse_energy_coupling(3.0));
  CHECK(-std::atan(s0.ratio()) == doctest::Approx(-0.220024).epsilon(1e-5));
}

TEST_CASE("single layer agrees with the ODE oracle") {
  const Potential p({1.0}, {1.0});
  const double delta = phase_shift(p, 2.0, 1);
  CHECK(delta == doctest::Approx(-0.088527188630577622).epsilon(1e-12));
  CHECK(std::abs(delta - phase_shift_ode(p, 2.0, 1)) < 1e-6);
}

TEST_CASE("A = 0 maps to a quarter turn with sign opposite to B") {
  CHECK(phase_shift_from_state({0.0, 2.0, 0}) == doctest::Approx(-M_PI / 2));
  CHECK(phase_shift_from_state({0.0, -2.0, 0}) == doctest::Approx(M_PI / 2));
}

TEST_CASE("refinement invariance") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const double k = 1.0 + trial % 3;
    const Potential p = random_potential(rng, k);
    const std::size_t i = static_cast<std::size_t>(trial) % p.layer_count();
    const auto a = phase_shift_table(p, k, 20);
    const auto b = phase_shift_table(split_layer(p, i), k, 20);
    for (int l = 0; l <= 20; ++l) CHECK(std::abs(a.delta[l] - b.delta[l]) <= 1e-10);
  }
  // Every q0 layer split into equal halves.
  const Potential halves({0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0},
                         {7.2, 7.2, 4.5, 4.5, 7.2, 7.2, 4.5, 4.5});
  const auto a = phase_shift_table(kQ0, 3.0, 20);
  const auto b = phase_shift_table(halves, 3.0, 20);
  for (int l = 0; l <= 20; ++l) CHECK(std::abs(a.delta[l] - b.delta[l]) <= 1e-10);
}

TEST_CASE("interface matching agrees with direct integration on random potentials") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const double k = 1.0 + trial % 3;
    const Potential p = random_potential(rng, k);
    const auto table = phase_shift_table(p, k, 10);
    for (int l = 0; l <= 10; ++l)
      CHECK(std::abs(table.delta[l] - phase_shift_ode(p, k, l)) <= 1e-6);
  }
}

TEST_CASE("q0 shifts decay strictly from l = 2") {
  const auto t = phase_shift_table(kQ0, 3.0, 20);
  for (int l = 2; l < 20; ++l) CHECK(std::abs(t.delta[l + 1]) < std::abs(t.delta[l]));
}

TEST_CASE("coefficient pair agrees with the scalar ratio recursion") {
  std::mt19937_64 rng(5);
  int compared = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const double k = 1.0 + trial % 3;
    const Potential p = random_potential(rng, k);
    const auto w = compute_wavenumbers(p, k);
    for (int l = 0; l <= 8; ++l) {
      double x = 0.0;
      bool clean = true;
      for (std::size_t i = 0; i < p.layer_count(); ++i) {
        const auto m = interface_matrix(l, w.kappa[i], w.kappa[i + 1], p.radii()[i]);
        const double denom = m.a11 + m.a12 * x;
        if (std::abs(denom) < 1e-8 * (std::abs(m.a11) + std::abs(m.a12 * x))) clean = false;
        x = (m.a21 + m.a22 * x) / denom;
      }
      if (!clean) continue;
      ++compared;
      CHECK(std::abs(-std::atan(x) - phase_shift(p, k, l)) <= 1e-9);
    }
  }
  CHECK(compared > 200);
}

TEST_CASE("an extremely thin core does not overflow high orders") {
  const Potential cored({1e-9, 1.0, 2.0}, {5.0, 3.0, 1.0});
  const Potential plain({1.0, 2.0}, {3.0, 1.0});
  const auto a = phase_shift_table(cored, 3.0, 20);
  const auto b = phase_shift_table(plain, 3.0, 20);
  for (int l = 0; l <= 20; ++l) CHECK(a.delta[l] == doctest::Approx(b.delta[l]).epsilon(1e-12));
}
