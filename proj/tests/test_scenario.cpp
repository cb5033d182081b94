#include <algorithm>
#include <map>

#include "doctest.h"
#include "oracles.hpp"
#include "scenopt/experiments.hpp"
#include "scenopt/scenario.hpp"

using namespace scenopt;

namespace {

/// min x2 over [0,1]^2 with x2 >= h_i; heights keyed by label.
ScenarioProgram heights(const std::map<Label, double>& h) {
  std::vector<Scenario> sc;
  for (const auto& [label, v] : h) sc.push_back({label, {Row{{0.0, -1.0}, -v}}});
  return ScenarioProgram(LinearProgram({0.0, 1.0}, {Bound{0, 1}, Bound{0, 1}}), sc);
}

/// x2 >= a x1 + b for each (a, b); min x2 on [-10, 10]^2. Three V-shaped
/// pairs, each pair the support of one stage.
ScenarioProgram three_vees() {
  const std::vector<std::pair<double, double>> lines{{-1, 3}, {1, 3},  {-1, 2},
                                                     {2, 1},  {-0.5, 0}, {0.5, 0}};
  std::vector<Scenario> sc;
  Label l = 1;
  for (auto [a, b] : lines) sc.push_back({l++, {Row{{a, -1.0}, -b}}});
  return ScenarioProgram(LinearProgram({0.0, 1.0}, {Bound{-10, 10}, Bound{-10, 10}}), sc);
}

LabelSet set(std::initializer_list<Label> l) { return LabelSet(l); }

}  // namespace

TEST_CASE("program validation") {
  LinearProgram base({1.0}, {Bound{0, 1}});
  CHECK_THROWS_AS(ScenarioProgram(base, {{1, {}}}), InvalidInput);
  CHECK_THROWS_AS(ScenarioProgram(base, {{1, {Row{{1, 2}, 0}}}}), InvalidInput);
  CHECK_THROWS_AS(ScenarioProgram(base, {{1, {Row{{kInf}, 0}}}}), InvalidInput);
  CHECK_THROWS_AS(ScenarioProgram(base, {{1, {Row{{1}, 0}}}, {1, {Row{{1}, 1}}}}), InvalidInput);
  LinearProgram with_row({1.0}, {Bound{0, 1}});
  with_row.add_row(std::vector<double>{1}, 1);
  CHECK_THROWS_AS(ScenarioProgram(with_row, {}), InvalidInput);

  ScenarioProgram p(base, {{7, {Row{{-1}, -0.2}}}, {3, {Row{{-1}, -0.4}}}});
  CHECK(p.labels() == set({3, 7}));
  CHECK(p.contains(7));
  CHECK_THROWS_AS(p.scenario(5), InvalidInput);
  CHECK(p.restricted_to(set({7})).size() == 1);
  CHECK_THROWS_AS(p.restricted_to(set({1})), InvalidInput);
}

TEST_CASE("support of the analytic example is the largest sample") {
  ScenarioProgram p = heights({{1, 0.3}, {2, 0.8}, {3, 0.5}});
  CHECK(support_set(p, p.labels()) == set({2}));
  CHECK(is_nondegenerate(p, p.labels()));
  LpSolution s = solve_stage(p, set({1, 3}));
  CHECK(s.x[1] == doctest::Approx(0.5));
}

TEST_CASE("duplicated constraints have no support and are degenerate") {
  ScenarioProgram p = heights({{1, 0.5}, {2, 0.5}, {3, 0.1}});
  CHECK(support_set(p, p.labels()).empty());
  CHECK_FALSE(is_nondegenerate(p, p.labels()));
}

TEST_CASE("removal that unbounds the program counts as support") {
  // x2 >= |x1| from two scenarios; dropping either leaves a ray.
  LinearProgram base({0.0, 1.0}, {Bound{}, Bound{}});
  ScenarioProgram p(base, {{1, {Row{{1, -1}, 0}}}, {2, {Row{{-1, -1}, 0}}}});
  CHECK(support_set(p, p.labels()) == set({1, 2}));
}

TEST_CASE("padding takes the smallest non-support labels") {
  CHECK(padding_set(set({1, 2, 5, 9}), set({2}), 2) == set({1, 5}));
  CHECK(padding_set(set({4, 6}), set({4}), 0).empty());
  CHECK_THROWS_AS(padding_set(set({4, 6}), set({4}), 2), InsufficientScenarios);
}

TEST_CASE("regularized cascade on the non-fully-supported picture") {
  ScenarioProgram p = heights(
      {{1, 0.1}, {2, 0.5}, {3, 0.2}, {4, 0.9}, {5, 0.3}, {6, 0.05}, {7, 0.15}});
  CascadeTrace t = run_cascade(p, 2, CascadeMode::Regularized);
  REQUIRE(t.stages.size() == 3);
  CHECK(t.stages[0].support == set({4}));
  CHECK(t.stages[0].removed == set({1, 4}));
  CHECK(t.stages[1].support == set({2}));
  CHECK(t.stages[1].removed == set({2, 3}));
  CHECK(t.stages[2].support == set({5}));
  CHECK(t.stages[2].padding == set({6}));
  CHECK(t.discarded() == set({1, 2, 3, 4}));
  CHECK(t.compression_candidate == set({1, 2, 3, 4, 5, 6}));
  CHECK(t.final_x[1] == doctest::Approx(0.3));
  CHECK(t.final_x[0] == 0.0);
  CHECK(verify_compression(p, t));
  CHECK_THROWS_AS(run_cascade(p, 2, CascadeMode::FullySupported), AssumptionViolated);
}

TEST_CASE("fully-supported cascade on the three-vee picture") {
  ScenarioProgram p = three_vees();
  CHECK_THROWS_AS(run_cascade(p, 2, CascadeMode::FullySupported), InsufficientScenarios);
  std::vector<Scenario> sc = p.scenarios();
  sc.push_back({7, {Row{{0.0, -1.0}, 5.0}}});  // x2 >= -5, never active
  ScenarioProgram q(p.base(), sc);
  CascadeTrace t = run_cascade(q, 2, CascadeMode::FullySupported);
  CHECK(t.stages[0].support == set({1, 2}));
  CHECK(t.stages[1].support == set({3, 4}));
  CHECK(t.stages[2].support == set({5, 6}));
  CHECK(t.stages[1].minimizer[0] == doctest::Approx(1.0 / 3));
  CHECK(t.stages[1].minimizer[1] == doctest::Approx(5.0 / 3));
  CHECK(t.final_x[0] == doctest::Approx(0).epsilon(1e-12));
  CHECK(t.final_objective == doctest::Approx(0).epsilon(1e-12));
  for (const StageRecord& s : t.stages) CHECK_FALSE(s.degenerate);
  CHECK(t.counts.stage == 3);
  CHECK(t.counts.nondegeneracy == 3);
  CHECK(verify_compression(q, t));
}

TEST_CASE("cascade preconditions and errors") {
  ScenarioProgram p = heights({{1, 0.1}, {2, 0.5}, {3, 0.2}, {4, 0.3}, {5, 0.4}});
  CHECK_THROWS_AS(run_cascade(p, 2, CascadeMode::Regularized), InsufficientScenarios);
  CHECK_NOTHROW(run_cascade(p, 1, CascadeMode::Regularized));

  ScenarioProgram flat = heights({{1, 0.5}, {2, 0.5}, {3, 0.5}, {4, 0.1}, {5, 0.2}});
  CascadeTrace t = run_cascade(flat, 1, CascadeMode::Regularized);
  CHECK(t.stages[0].support.empty());
  CHECK(t.stages[0].degenerate);

  LinearProgram base({-1.0}, {Bound{0, kInf}});
  ScenarioProgram open(base, {{1, {Row{{-1}, 0}}}, {2, {Row{{-1}, -1}}}, {3, {Row{{-1}, -2}}}});
  CHECK_THROWS_AS(run_cascade(open, 0, CascadeMode::Regularized), StageSolveFailed);
}

TEST_CASE("more than d support scenarios is reported as degeneracy") {
  // Three rows meet at x* = (1, 1); at most two of them can be of support.
  LinearProgram base({-1.0, -2.0}, {Bound{0, 5}, Bound{0, 5}});
  std::vector<Scenario> sc{{1, {Row{{1, 0}, 1}}}, {2, {Row{{0, 1}, 1}}}, {3, {Row{{1, 1}, 2}}}};
  for (Label l = 4; l <= 8; ++l) sc.push_back({l, {Row{{1, 1}, 9}}});
  ScenarioProgram p(base, sc);
  CHECK(support_set(p, p.labels()) == oracle::support(p, p.labels()));
  CHECK(support_set(p, p.labels()).size() <= 2);
  CHECK_NOTHROW(run_cascade(p, 1, CascadeMode::Regularized));

  // A negative tolerance makes every re-solve count as a change, so all
  // three active scenarios register and the guard fires at stage 0.
  Tolerances strict;
  strict.x = -1.0;
  try {
    run_cascade(p, 1, CascadeMode::Regularized, strict);
    FAIL("expected DegeneracyDetected");
  } catch (const DegeneracyDetected& e) {
    CHECK(e.stage == 0);
  }
}

TEST_CASE("shortcut support detection matches the definition") {
  oracle::Gen g(77);
  for (int t = 0; t < 60; ++t) {
    const std::size_t d = static_cast<std::size_t>(g.integer(1, 3));
    const std::size_t m = static_cast<std::size_t>(g.integer(d + 2, 10));
    ScenarioProgram p = oracle::random_box_program(g, d, m, 1 + t % 2, t % 3 == 0);
    CAPTURE(t);
    CHECK(support_set(p, p.labels()) == oracle::support(p, p.labels()));
  }
}

TEST_CASE("greedy removal") {
  ScenarioProgram p =
      heights({{1, 0.1}, {2, 0.5}, {3, 0.2}, {4, 0.9}, {5, 0.3}, {6, 0.05}, {7, 0.15}});
  GreedyTrace none = greedy_removal(p, 0);
  CHECK(none.steps.empty());
  CHECK(none.final_x() == solve_stage(p, p.labels()).x);
  CHECK(none.counts.stage == 1);

  GreedyTrace g = greedy_removal(p, 3);
  REQUIRE(g.steps.size() == 3);
  CHECK(g.steps[0].removed == 4);
  CHECK(g.steps[1].removed == 2);
  CHECK(g.steps[2].removed == 5);
  CHECK(g.final_objective() == doctest::Approx(0.2));
  CHECK(g.counts.stage == 4);
  CHECK_THROWS_AS(greedy_removal(p, 5), InsufficientScenarios);

  ScenarioProgram flat = heights({{1, 0.5}, {2, 0.5}, {3, 0.1}, {4, 0.2}});
  GreedyTrace f = greedy_removal(flat, 1);
  CHECK(f.steps[0].removed == 1);
  CHECK_FALSE(f.steps[0].support_removed);
  CHECK(f.final_objective() == doctest::Approx(0.5));
}

TEST_CASE("greedy and cascade coincide in one dimension") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    RandomSource rng(seed);
    ScenarioProgram p = gen_analytic(30, rng);
    CascadeTrace c = run_cascade(p, 6, CascadeMode::FullySupported);
    GreedyTrace g = greedy_removal(p, 6);
    CHECK(c.final_x == g.final_x());
    std::vector<double> samples;
    for (const Scenario& s : p.scenarios()) samples.push_back(-s.rows[0].b);
    std::sort(samples.rbegin(), samples.rend());
    CHECK(c.final_x[0] == samples[6]);
  }
}

TEST_CASE("cascade objectives never increase and removed sets are disjoint") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    RandomSource rng(seed);
    ScenarioProgram p = gen_resource(2, 2, 80, rng);
    CascadeTrace t = run_cascade(p, 5, CascadeMode::Regularized);
    LabelSet seen;
    for (std::size_t k = 0; k < t.stages.size(); ++k) {
      const StageRecord& s = t.stages[k];
      CHECK(s.support.size() <= 2);
      CHECK(s.removed.size() == 2);
      for (Label l : s.padding) CHECK(s.support.count(l) == 0);
      for (Label l : s.removed) CHECK(seen.insert(l).second);
      if (k > 0) CHECK(s.objective <= t.stages[k - 1].objective + 1e-12);
    }
    CHECK(t.compression_candidate.size() == 12);
    CHECK(verify_compression(p, t));
  }
}

TEST_CASE("mode names") {
  CHECK(cascade_mode_from_string("fully-supported") == CascadeMode::FullySupported);
  CHECK(cascade_mode_from_string("regularized") == CascadeMode::Regularized);
  CHECK(to_string(CascadeMode::Regularized) == "regularized");
  CHECK_THROWS_AS(cascade_mode_from_string("fast"), InvalidInput);
}
