#include <doctest.h>

#include <cmath>
#include <vector>

#include "prefgame/errors.hpp"
#include "prefgame/nash.hpp"
#include "prefgame/preference_model.hpp"
#include "test_util.hpp"

using namespace prefgame;
using namespace prefgame::testing;

TEST_CASE("preference model validation and symmetrization") {
  CHECK_THROWS_AS(
      PreferenceModel::from_matrix({{0.5, 0.3}, {0.5, 0.5}}),
      DomainError);
  CHECK_THROWS_AS(PreferenceModel::from_matrix({{0.5, 1.7}, {-0.7, 0.5}}),
                  DomainError);
  CHECK_THROWS_AS(PreferenceModel::from_matrix({{0.5, 0.3}}), StructuralError);

  // loader tolerance: slightly inconsistent entries get averaged
  auto m = PreferenceModel::from_matrix(
      {{0.5, 0.3 + 4e-10}, {0.7 + 4e-10, 0.5}}, 1e-9);
  CHECK(m(0, 1) + m(1, 0) == 1.0);
  CHECK(m(0, 0) == 0.5);
}

TEST_CASE("bradley_terry model") {
  auto flat = PreferenceModel::bradley_terry({0.0, 0.0});
  CHECK(flat(0, 1) == 0.5);

  auto two = PreferenceModel::bradley_terry({std::log(2.0), 0.0});
  CHECK(two(0, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-13));

  // extended-precision sigmoid table for rewards [1, 0, -1]
  auto m = PreferenceModel::bradley_terry({1.0, 0.0, -1.0});
  const double s1 = 0.7310585786300049;
  const double s2 = 0.8807970779778824;
  CHECK(m(0, 1) == doctest::Approx(s1).epsilon(1e-15));
  CHECK(m(0, 2) == doctest::Approx(s2).epsilon(1e-15));
  CHECK(m(1, 2) == doctest::Approx(s1).epsilon(1e-15));
  CHECK(m(1, 0) == doctest::Approx(1.0 - s1).epsilon(1e-15));
  CHECK(m(2, 0) == doctest::Approx(1.0 - s2).epsilon(1e-15));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(m(i, j) + m(j, i) == 1.0);

  CHECK_THROWS_AS(PreferenceModel::bradley_terry({1.0, std::nan("")}),
                  DomainError);
}

TEST_CASE("win rates on the cyclic game") {
  auto model = cyclic_game();
  Policy nash = cyclic_nash();

  RngState rng(21, 0);
  for (int trial = 0; trial < 100; ++trial) {
    Policy p = random_policy(3, rng);
    Policy q = random_policy(3, rng);
    CHECK(win_rate(p, p, model) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(win_rate(p, q, model) + win_rate(q, p, model) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }

  // equilibrium equalizes every pure response at 1/2
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(win_rate(nash, Policy::pure(3, i), model) ==
          doctest::Approx(0.5).epsilon(1e-12));

  CHECK(win_rate(Policy::uniform(3), Policy::pure(3, 2), model) ==
        doctest::Approx(0.4666666666666667).epsilon(1e-14));

  CHECK(game_value(Policy::pure(3, 1), Policy::pure(3, 0), model) ==
        doctest::Approx(0.4).epsilon(1e-14));
  CHECK_THROWS_AS(win_rate(Policy::uniform(2), Policy::uniform(3), model),
                  StructuralError);
}

TEST_CASE("gradients on the cyclic game") {
  auto model = cyclic_game();
  GradientVector g = unreg_gradient(cyclic_init(), model);
  CHECK(g[0] == doctest::Approx(0.39).epsilon(1e-14));
  CHECK(g[1] == doctest::Approx(0.46).epsilon(1e-14));
  CHECK(g[2] == doctest::Approx(0.64).epsilon(1e-14));

  GradientVector at_nash = unreg_gradient(cyclic_nash(), model);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(at_nash[i] == doctest::Approx(0.5).epsilon(1e-13));

  GradientVector col = unreg_gradient(Policy::pure(3, 0), model);
  CHECK(col[0] == 0.5);
  CHECK(col[1] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(col[2] == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("regularized game value and gradient") {
  auto model = cyclic_game();
  RegularizedGame game{model, 0.1, Policy::uniform(3)};

  CHECK_THROWS_AS(RegularizedGame(model, 0.0, Policy::uniform(3)), DomainError);

  Policy ref = Policy::uniform(3);
  CHECK(regularized_value(ref, ref, game) == doctest::Approx(0.0).epsilon(1e-14));

  // p1 = ref leaves only the opponent terms
  RngState rng(22, 0);
  for (int trial = 0; trial < 50; ++trial) {
    Policy p2 = random_policy(3, rng);
    double lhs = regularized_value(ref, p2, game);
    double rhs = game_value(ref, p2, model) + 0.1 * kl_divergence(p2, ref);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
  }

  // direct-summation cross-check of the full expression
  for (int trial = 0; trial < 50; ++trial) {
    Policy p1 = random_policy(3, rng);
    Policy p2 = random_policy(3, rng);
    double direct = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        direct += p1[i] * model(i, j) * p2[j];
    direct -= 0.5;
    for (std::size_t i = 0; i < 3; ++i) {
      direct -= 0.1 * p1[i] * std::log(p1[i] / ref[i]);
      direct += 0.1 * p2[i] * std::log(p2[i] / ref[i]);
    }
    CHECK(regularized_value(p1, p2, game) ==
          doctest::Approx(direct).epsilon(1e-12));
  }

  // frozen direct evaluation at the experiment's initial point
  GradientVector rg = reg_gradient(cyclic_init(), game);
  CHECK(rg[0] == doctest::Approx(0.34108256237659906).epsilon(1e-14));
  CHECK(rg[1] == doctest::Approx(0.31945348918918354).epsilon(1e-14));
  CHECK(rg[2] == doctest::Approx(0.5505360515657827).epsilon(1e-14));

  // tau -> 0 limit equals the plain gradient (tau must stay positive, so
  // compare against a tiny value)
  RegularizedGame tiny{model, 1e-300, cyclic_init()};
  GradientVector almost = reg_gradient(cyclic_init(), tiny);
  GradientVector plain = unreg_gradient(cyclic_init(), model);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(almost[i] == doctest::Approx(plain[i]).epsilon(1e-13));

  // at the reference the log-ratio vanishes: gradient = G - tau
  RegularizedGame at_ref{model, 0.1, cyclic_init()};
  GradientVector g0 = reg_gradient(cyclic_init(), at_ref);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(g0[i] == doctest::Approx(plain[i] - 0.1).epsilon(1e-13));

  CHECK_THROWS_AS(reg_gradient(Policy({0.5, 0.5, 0.0}), game), DomainError);
}

TEST_CASE("the +1 in the regularized gradient does not change the prox") {
  auto model = cyclic_game();
  RegularizedGame game{model, 0.1, Policy::uniform(3)};
  RngState rng(23, 0);
  for (int trial = 0; trial < 50; ++trial) {
    Policy mu = random_policy(3, rng);
    GradientVector with_const = reg_gradient(mu, game);
    std::vector<double> without = with_const.values();
    for (double& x : without) x += 0.1;  // drop the -tau*1 term
    Policy a = prox(mu, scaled(with_const, 0.3));
    Policy b = prox(mu, scaled(GradientVector(without), 0.3));
    CHECK(linf_distance(a, b) <= 1e-12);
  }
}

TEST_CASE("duality gap") {
  auto model = cyclic_game();
  CHECK(duality_gap(cyclic_nash(), model) <= 1e-12);
  CHECK(duality_gap(Policy::uniform(3), model) ==
        doctest::Approx(1.0 / 30.0).epsilon(1e-13));
  CHECK(duality_gap(Policy::pure(3, 0), model) ==
        doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("solve_nash on the cyclic game") {
  auto res = solve_nash(cyclic_game(), 1e-10);
  CHECK(res.method == NashMethod::kSupportEnumeration);
  CHECK(linf_distance(res.policy, cyclic_nash()) <= 1e-10);
  CHECK(res.gap <= 1e-10);

  // the equilibrium is unique: the accepted support is the full set and a
  // robust-alignment check holds against every pure response
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(game_value(res.policy, Policy::pure(3, i), cyclic_game()) >= -1e-10);
}

TEST_CASE("solve_nash degenerate and random games") {
  auto flat = PreferenceModel::from_matrix(
      {{0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}});
  auto res = solve_nash(flat, 1e-9);
  CHECK(linf_distance(res.policy, Policy::uniform(3)) <= 1e-12);

  auto flat2 = PreferenceModel::from_matrix({{0.5, 0.5}, {0.5, 0.5}});
  CHECK(linf_distance(solve_nash(flat2, 1e-9).policy, Policy::uniform(2)) <=
        1e-12);

  // seeded random 4x4 models, cross-checked by a grid exploitability scan
  RngState rng(0xBEEF, 1);
  for (int trial = 0; trial < 5; ++trial) {
    auto model = random_preference_model(4, rng);
    auto r = solve_nash(model, 1e-9);
    CHECK(r.gap <= 1e-9);
    const int step = 21;
    double grid_best = 0.0;
    for (int a = 0; a <= step; ++a)
      for (int b = 0; b <= step - a; ++b)
        for (int c = 0; c <= step - a - b; ++c) {
          int d = step - a - b - c;
          Policy q({static_cast<double>(a) / step, static_cast<double>(b) / step,
                    static_cast<double>(c) / step,
                    static_cast<double>(d) / step});
          grid_best =
              std::max(grid_best, game_value(q, r.policy, model));
        }
    CHECK(grid_best <= r.gap + 1e-9);
  }

  CHECK_THROWS_AS(solve_nash(random_preference_model(13, rng), 1e-9),
                  StructuralError);
}

TEST_CASE("solve_regularized_nash") {
  auto model = cyclic_game();

  // strong regularization pins the solution to the reference
  RegularizedGame strong{model, 1000.0, Policy::uniform(3)};
  auto near_ref = solve_regularized_nash(strong, 1e-10);
  CHECK(near_ref.method == NashMethod::kFixedPoint);
  CHECK(linf_distance(near_ref.policy, Policy::uniform(3)) <= 1e-3);

  // moderate regularization lands strictly away from the unregularized
  // equilibrium; frozen fixed-point values
  RegularizedGame game{model, 0.1, Policy::uniform(3)};
  auto reg = solve_regularized_nash(game, 1e-12);
  Policy frozen({0.337135850065674, 0.28346410909888176, 0.37940004083544426});
  CHECK(linf_distance(reg.policy, frozen) <= 1e-12);
  CHECK(linf_distance(reg.policy, cyclic_nash()) > 1e-3);
  CHECK(reg.gap <= 1e-12);

  RegularizedGame anchored{model, 0.1, cyclic_init()};
  auto reg2 = solve_regularized_nash(anchored, 1e-12);
  Policy frozen2({0.27491720525148866, 0.2797225767864419, 0.44536021796206937});
  CHECK(linf_distance(reg2.policy, frozen2) <= 1e-12);

  // the unregularized equilibrium is a fixed point when it is the reference
  RegularizedGame at_nash{model, 0.1, cyclic_nash()};
  auto reg3 = solve_regularized_nash(at_nash, 1e-10);
  CHECK(linf_distance(reg3.policy, cyclic_nash()) <= 1e-10);
}
