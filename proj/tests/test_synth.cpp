#include <doctest.h>

#include "erralign/kappa.hpp"
#include "erralign/synth.hpp"

using namespace erralign;
using namespace erralign::synth;

namespace {

// Direct predicates for the shared preset layout.
std::size_t truth_of(Point p) { return p.x <= 1 ? 0 : p.x <= 2 ? 1 : 2; }

std::size_t a_of(Point p) {
  const std::size_t t = truth_of(p);
  const bool wrong = (p.y >= -1 && p.y <= 0 && p.x >= 1.5) || p.y >= 1;
  return wrong ? (t + 1) % 3 : t;
}

std::size_t b_of(Point p) {
  const std::size_t t = truth_of(p);
  if (p.y >= -1 && p.y <= 0 && p.x <= 1.5) return (t + 1) % 3;
  if (p.y >= 1 && p.y <= 2) return (t + 1) % 3;
  if (p.y > 2) return (t + 2) % 3;
  return t;
}

struct Scores {
  double ec, ma;
};

Scores score(const Scenario& s) {
  auto sample = sample_scenario(s);
  auto view = build_joint_view(sample.truth, sample.run_a, sample.run_b);
  auto ma = misclassification_agreement(view);
  return {*error_consistency(view).value, ma.defined() ? *ma.value : std::nan("")};
}

}  // namespace

TEST_CASE("region classifier") {
  RegionClassifier c{{{1, box(0, 1, 0, 1)}, {2, box(1, 2, 0, 1)}}, 0};
  CHECK(classify(c, {0.5, 0.5}) == 1);
  CHECK(classify(c, {1.0, 0.5}) == 1);  // shared edge goes to the first region
  CHECK(classify(c, {1.5, 0.5}) == 2);
  CHECK(classify(c, {5.0, 5.0}) == 0);
  CHECK(box(-kInf, kInf, 0, kInf).size() == 1);
  HalfPlane diag{1, 1, 1};
  CHECK(diag.contains({0.5, 0.5}));
  CHECK_FALSE(diag.contains({0.6, 0.5}));
}

TEST_CASE("preset classifiers match the layout predicates on a grid") {
  const Scenario s = preset("dual-error-disagreeing");
  for (int i = 0; i < 100; ++i)
    for (int j = 0; j < 100; ++j) {
      const Point p{(i - 20) / 20.0, (j - 30) / 20.0};
      CAPTURE(p.x);
      CAPTURE(p.y);
      CHECK(classify(s.truth, p) == truth_of(p));
      CHECK(classify(s.system_a, p) == a_of(p));
      CHECK(classify(s.system_b, p) == b_of(p));
    }
}

TEST_CASE("sampling") {
  SUBCASE("deterministic per seed") {
    auto a = sample_scenario(preset("disagreement-mass", 500, 3));
    auto b = sample_scenario(preset("disagreement-mass", 500, 3));
    auto c = sample_scenario(preset("disagreement-mass", 500, 4));
    REQUIRE(a.points.size() == 500);
    bool all_same = true, any_diff = false;
    for (std::size_t i = 0; i < 500; ++i) {
      all_same &= a.points[i].x == b.points[i].x && a.points[i].y == b.points[i].y;
      any_diff |= a.points[i].x != c.points[i].x;
    }
    CHECK(all_same);
    CHECK(any_diff);
    CHECK(a.run_a.entries == b.run_a.entries);
    CHECK(a.truth.entries.begin()->first == "s000000");
    CHECK(a.run_a.system_id == "A");
    CHECK(a.run_b.system_id == "B");
  }
  SUBCASE("uniform stream range") {
    SampleStream st(1);
    for (int i = 0; i < 10000; ++i) {
      const double u = st.uniform();
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
    }
  }
  SUBCASE("tiny sigma collapses onto the centres") {
    Scenario s = preset("jointly-correct-mass", 300, 1);
    for (auto& comp : s.distribution.components) comp.sigma = 1e-9;
    auto view = [&] {
      auto smp = sample_scenario(s);
      return build_joint_view(smp.truth, smp.run_a, smp.run_b);
    }();
    CHECK(*error_consistency(view).value == 1.0);
    CHECK(*misclassification_agreement(view).value == 1.0);
  }
  SUBCASE("invalid mixtures") {
    Scenario s = preset("jointly-correct-mass", 10, 1);
    s.distribution.components[0].weight += 0.5;
    CHECK_THROWS(sample_scenario(s));
    CHECK_THROWS_AS(preset("nope"), InputError);
  }
}

TEST_CASE("preset scores") {
  const auto jc = score(preset("jointly-correct-mass", 4000));
  const auto dm = score(preset("disagreement-mass", 4000));
  const auto da = score(preset("dual-error-agreeing", 4000));
  const auto dd = score(preset("dual-error-disagreeing", 4000));
  CHECK(jc.ec == 1.0);
  CHECK(dm.ec == doctest::Approx(-1.0 / 3).epsilon(0.05));
  CHECK(da.ec == doctest::Approx(0.6).epsilon(0.05));
  CHECK(dd.ec == doctest::Approx(0.6).epsilon(0.05));
  CHECK(std::abs(da.ec - dd.ec) < 0.05);
  CHECK(da.ma == 1.0);
  CHECK(dd.ma == doctest::Approx(-0.5).epsilon(0.05));
  CHECK(std::isnan(dm.ma));
}
