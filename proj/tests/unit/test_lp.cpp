#include <doctest.h>

#include <cmath>
#include <optional>
#include <random>
#include <sstream>

#include "tlfw/error.hpp"
#include "tlfw/lp.hpp"
#include "oracles.hpp"

using namespace tlfw;
using namespace tlfw::lp;

using namespace tlfw::oracle;

TEST_CASE("small fixed problems") {
  SUBCASE("box corner") {
    Problem p;
    p.add_var(1);
    p.add_var(1);
    p.add_row(Relation::LessEqual, 1).coeffs = {1, 0};
    p.add_row(Relation::LessEqual, 1).coeffs = {0, 1};
    const Solution s = solve(p);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objectiveValue == doctest::Approx(2));
    CHECK(s.values[0] == doctest::Approx(1));
    CHECK(s.values[1] == doctest::Approx(1));
    CHECK(s.duals[0] == doctest::Approx(1));
  }
  SUBCASE("infeasible") {
    Problem p;
    p.add_var(1);
    p.add_row(Relation::LessEqual, -1).coeffs = {1};
    CHECK(solve(p).status == Status::Infeasible);
  }
  SUBCASE("unbounded") {
    Problem p;
    p.add_var(1);
    p.add_var(0);
    p.add_row(Relation::GreaterEqual, 1).coeffs = {1, 1};
    CHECK(solve(p).status == Status::Unbounded);
  }
  SUBCASE("zero problem") {
    Problem p;
    const Solution s = solve(p);
    CHECK(s.status == Status::Optimal);
    CHECK(s.objectiveValue == 0.0);
    CHECK(verify(p, s).within(1e-9));
  }
  SUBCASE("redundant equality") {
    Problem p;
    p.add_var(1);
    p.add_var(2);
    p.add_row(Relation::Equal, 1).coeffs = {1, 1};
    p.add_row(Relation::Equal, 2).coeffs = {2, 2};
    const Solution s = solve(p);
    REQUIRE(s.status == Status::Optimal);
    CHECK(s.objectiveValue == doctest::Approx(2));
    CHECK(verify(p, s).within(1e-9));
  }
  SUBCASE("ragged row rejected") {
    Problem p;
    p.add_var(1);
    p.rows.push_back(Row{{1, 2}, Relation::LessEqual, 1, ""});
    CHECK_THROWS_AS(solve(p), InputError);
  }
}

TEST_CASE("verify flags a perturbed solution") {
  Problem p;
  p.add_var(3);
  p.add_var(2);
  p.add_row(Relation::LessEqual, 4, "a").coeffs = {1, 1};
  p.add_row(Relation::LessEqual, 6, "b").coeffs = {1, 3};
  Solution s = solve(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(verify(p, s).within(1e-9));
  s.values[0] += 1;
  const Residuals r = verify(p, s);
  CHECK(r.maxViolation > 0.5);
  CHECK(r.worstRow == 0);
}

TEST_CASE("random problems match vertex enumeration") {
  std::mt19937_64 rng(2024);
  int feasibleCount = 0;
  for (int k = 0; k < 200; ++k) {
    const Problem p = random_problem(rng, true);
    const auto oracle = vertex_optimum(p);
    REQUIRE(oracle.has_value());
    const Solution s = solve(p);
    REQUIRE(s.status == Status::Optimal);
    ++feasibleCount;
    CHECK(s.objectiveValue == doctest::Approx(*oracle).epsilon(1e-6).scale(1.0));
    CHECK(verify(p, s).within(1e-9));
    CHECK(std::abs(s.objectiveValue - *oracle) <= 1e-6 * std::max(1.0, std::abs(*oracle)));

    // Weak duality: b . y bounds the primal objective.
    double bound = 0;
    for (std::size_t i = 0; i < p.rows.size(); ++i) bound += p.rows[i].rhs * s.duals[i];
    CHECK(s.objectiveValue <= bound + 1e-6 * std::max(1.0, std::abs(bound)));
  }
  CHECK(feasibleCount == 200);
}

TEST_CASE("random problems without forced feasibility") {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 200; ++k) {
    const Problem p = random_problem(rng, false);
    const auto oracle = vertex_optimum(p);
    const Solution s = solve(p);
    if (!oracle) {
      CHECK(s.status == Status::Infeasible);
      continue;
    }
    REQUIRE(s.status == Status::Optimal);
    CHECK(std::abs(s.objectiveValue - *oracle) <= 1e-6 * std::max(1.0, std::abs(*oracle)));
    CHECK(verify(p, s).within(1e-9));
  }
}

TEST_CASE("determinism and text dump") {
  std::mt19937_64 rng(5);
  const Problem p = random_problem(rng, true);
  const Solution a = solve(p), b = solve(p);
  CHECK(a.values == b.values);
  CHECK(a.iterations == b.iterations);
  std::ostringstream out;
  write_text(p, out);
  CHECK(out.str().rfind("max ", 0) == 0);
}

TEST_CASE("incremental solves match cold solves") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-2.0, 2.0), pos(0.1, 2.0);
  for (int trial = 0; trial < 60; ++trial) {
    Problem p = random_problem(rng, true);
    IncrementalSolver inc(p);
    Solution first = inc.solve();
    REQUIRE(first.status == Status::Optimal);
    for (int step = 0; step < 3; ++step) {
      // A few new columns, then a <= row with rhs >= 0.
      for (int k = 0; k < 2; ++k) {
        std::vector<IncrementalSolver::Entry> col;
        for (std::size_t r = 0; r < inc.problem().rows.size(); ++r)
          col.push_back({r, r == 0 ? pos(rng) : u(rng)});
        inc.add_column(u(rng), col);
      }
      std::vector<IncrementalSolver::Entry> row;
      for (std::size_t j = 0; j < inc.problem().num_vars(); ++j) row.push_back({j, u(rng)});
      inc.add_row(Relation::LessEqual, pos(rng), row);
      const Solution warm = inc.solve();
      const Solution cold = solve(inc.problem());
      REQUIRE(warm.status == cold.status);
      if (cold.status != Status::Optimal) break;
      CHECK(std::abs(warm.objectiveValue - cold.objectiveValue) <=
            1e-7 * std::max(1.0, std::abs(cold.objectiveValue)));
      CHECK(verify(inc.problem(), warm).within(1e-9));
    }
  }
}
