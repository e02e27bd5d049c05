// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.
#include <chrono>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "erralign/analysis.hpp"
#include "erralign/divergence.hpp"
#include "erralign/io.hpp"
#include "erralign/kappa.hpp"
#include "erralign/representational.hpp"
#include "erralign/synth.hpp"
#include "golden.hpp"
#include "oracles.hpp"

using namespace erralign;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  std::cout << (o.ok ? "PASS " : "FAIL ") << name << " | " << o.detail << std::endl;
  failures += !o.ok;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

// Views shared by the kappa and EC criteria.
struct RandomView {
  std::size_t classes;
  std::vector<oracle::Triple> rows;
};

std::vector<RandomView> random_views() {
  std::mt19937_64 rng(500);
  std::vector<RandomView> views;
  for (int i = 0; i < 500; ++i) {
    const std::size_t classes = 2 + rng() % 5;
    views.push_back({classes, testutil::random_triples(rng, 1 + rng() % 100, classes)});
  }
  return views;
}

Outcome kappa_oracle() {
  Outcome o;
  const auto t0 = Clock::now();
  double worst = 0;
  std::size_t defined = 0;
  for (const auto& v : random_views()) {
    const auto got = misclassification_agreement(testutil::to_view(v.rows, testutil::vocab(v.classes)));
    const auto want = oracle::ma(v.rows, v.classes);
    if (got.defined() != want.has_value()) {
      o.fail("definedness differs");
      continue;
    }
    if (!want) continue;
    ++defined;
    worst = std::max(worst, std::abs(*got.value - static_cast<double>(*want)));
  }
  const double secs = seconds_since(t0);
  if (worst > 1e-10) o.fail("max |diff| " + fmt(worst));
  if (secs >= 5.0) o.fail("took " + fmt(secs) + " s");
  if (o.ok) o.detail = "500 views, " + std::to_string(defined) + " defined, max |diff| " + fmt(worst) + ", " +
                       fmt(secs) + " s";
  return o;
}

Outcome ec_dual() {
  Outcome o;
  double worst = 0;
  for (const auto& v : random_views()) {
    const auto view = testutil::to_view(v.rows, testutil::vocab(v.classes));
    const auto ec = error_consistency(view);
    const auto k = cohens_kappa(correctness_agreement_matrix(view));
    const auto direct = oracle::ec(v.rows);
    if (ec.defined() != k.kappa.has_value() || ec.defined() != direct.has_value()) {
      o.fail("definedness differs");
      continue;
    }
    if (!ec.defined()) continue;
    worst = std::max({worst, std::abs(*ec.value - *k.kappa), std::abs(*ec.value - static_cast<double>(*direct))});
  }
  if (worst > 1e-12) o.fail("max |diff| " + fmt(worst));
  if (o.ok) o.detail = "500 views, max |diff| " + fmt(worst);
  return o;
}

Outcome identity_suite() {
  Outcome o;
  std::mt19937_64 rng(81);
  double worst = 0;
  int runs = 0;
  auto check = [&](const char* what, const MetricResult& r) {
    if (!r.defined()) {
      o.fail(std::string(what) + " undefined: " + r.reason);
      return;
    }
    worst = std::max(worst, std::abs(*r.value - 1.0));
  };
  while (runs < 200) {
    const std::size_t classes = 2 + rng() % 8;
    auto rows = testutil::random_triples(rng, 2 + rng() % 150, classes);
    for (auto& r : rows) r.b = r.a;
    if (std::none_of(rows.begin(), rows.end(), [](const auto& r) { return r.a != r.truth; })) continue;
    ++runs;
    auto v = testutil::vocab(classes);
    const auto view = testutil::to_view(rows, v);
    check("EC", error_consistency(view));
    check("MA", misclassification_agreement(view));

    GroundTruth truth{v, {}};
    SystemRun run{"A", v, {}};
    ConfidenceTable conf{"A", v, {}};
    RepresentationMatrix repr{"A", 1 + rng() % 20, {}};
    std::normal_distribution<double> g;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      truth.entries[testutil::id(i)] = rows[i].truth;
      run.entries[testutil::id(i)] = rows[i].a;
      conf.entries.emplace(testutil::id(i), ProbVector(testutil::random_simplex(rng, classes)));
      std::vector<double> x(repr.dim);
      for (auto& e : x) e = g(rng);
      repr.rows.emplace(testutil::id(i), std::move(x));
    }
    check("CLES", cles_from_runs(truth, run, run, SmoothingPrior::uniform(classes)));
    check("SOC", soc(conf, conf));
    check("CKA", linear_cka(repr, repr));
  }
  if (worst > 1e-12) o.fail("max |value - 1| " + fmt(worst));
  if (o.ok) o.detail = "200 runs x {EC, MA, CLES, SOC, CKA}, max |value - 1| " + fmt(worst);
  return o;
}

Outcome jsd_bounds() {
  Outcome o;
  std::mt19937_64 rng(10000);
  for (int i = 0; i < 10000; ++i) {
    const std::size_t c = 2 + rng() % 19;
    const ProbVector p(testutil::random_simplex(rng, c)), q(testutil::random_simplex(rng, c));
    const double d = jsd(p, q);
    if (d != jsd(q, p)) o.fail("asymmetric at pair " + std::to_string(i));
    if (!(d >= 0.0 && d <= 1.0)) o.fail("out of [0, 1] at pair " + std::to_string(i));
    if (jsd(p, p) != 0.0) o.fail("JSD(p, p) != 0 at pair " + std::to_string(i));
  }
  if (jsd(ProbVector({1.0, 0.0}), ProbVector({0.0, 1.0})) != 1.0) o.fail("jsd([1,0],[0,1]) != 1");
  if (o.ok) o.detail = "10000 pairs, C in [2, 20]; jsd([1,0],[0,1]) == 1";
  return o;
}

Outcome cka_invariances() {
  Outcome o;
  std::mt19937_64 rng(200);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  auto random_rows = [&](std::size_t n, std::size_t d) {
    std::vector<std::vector<double>> r(n, std::vector<double>(d));
    for (auto& row : r)
      for (auto& x : row) x = g(rng);
    return r;
  };
  auto to_repr = [](const std::vector<std::vector<double>>& rows) {
    RepresentationMatrix m{"X", rows[0].size(), {}};
    for (std::size_t i = 0; i < rows.size(); ++i) m.rows.emplace(testutil::id(i), rows[i]);
    return m;
  };
  double worst_q = 0, worst_c = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 3 + rng() % 48, d = 1 + rng() % 20, dy = 1 + rng() % 20;
    const auto x = random_rows(n, d), y = random_rows(n, dy);
    // Gram-Schmidt on a Gaussian matrix gives a random orthogonal Q.
    auto q = random_rows(d, d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        const double dot = std::inner_product(q[i].begin(), q[i].end(), q[j].begin(), 0.0);
        for (std::size_t k = 0; k < d; ++k) q[i][k] -= dot * q[j][k];
      }
      const double norm = std::sqrt(std::inner_product(q[i].begin(), q[i].end(), q[i].begin(), 0.0));
      for (auto& e : q[i]) e /= norm;
    }
    auto xq = x, cx = x;
    const double c = scale(rng);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        xq[i][j] = 0;
        for (std::size_t k = 0; k < d; ++k) xq[i][j] += x[i][k] * q[k][j];
        cx[i][j] = c * x[i][j];
      }
    const auto base = linear_cka(to_repr(x), to_repr(y));
    const auto rq = linear_cka(to_repr(xq), to_repr(y));
    const auto rc = linear_cka(to_repr(cx), to_repr(y));
    if (!base.defined() || !rq.defined() || !rc.defined()) {
      o.fail("undefined CKA in case " + std::to_string(t));
      continue;
    }
    worst_q = std::max(worst_q, std::abs(*rq.value - *base.value));
    worst_c = std::max(worst_c, std::abs(*rc.value - *base.value));
  }
  if (worst_q >= 1e-8) o.fail("orthogonal max |diff| " + fmt(worst_q));
  if (worst_c >= 1e-8) o.fail("scaling max |diff| " + fmt(worst_c));
  if (o.ok) o.detail = "200 cases, orthogonal max |diff| " + fmt(worst_q) + ", scaling max |diff| " + fmt(worst_c);
  return o;
}

Outcome spearman_oracle() {
  Outcome o;
  std::mt19937_64 rng(512);
  double worst = 0;
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 3 + rng() % 60;
    const int levels = 2 + static_cast<int>(rng() % 10);
    std::uniform_int_distribution<int> u(0, levels);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = u(rng) * 0.25;
      y[i] = u(rng) * 1.5;
    }
    const auto got = spearman_r(x, y);
    const auto want = oracle::spearman(x, y);
    if (got.has_value() != want.has_value()) {
      o.fail("definedness differs in case " + std::to_string(t));
      continue;
    }
    if (got) worst = std::max(worst, std::abs(*got - static_cast<double>(*want)));

    // monotone images, ties included
    std::vector<double> up(n), down(n);
    for (std::size_t i = 0; i < n; ++i) {
      up[i] = std::exp(x[i]) + 3.0;
      down[i] = -x[i] * x[i] * x[i];
    }
    const auto r_up = spearman_r(x, up), r_down = spearman_r(x, down);
    if (r_up && *r_up != 1.0) o.fail("increasing image gives " + fmt(*r_up));
    if (r_down && *r_down != -1.0) o.fail("decreasing image gives " + fmt(*r_down));
  }
  if (worst > 1e-12) o.fail("max |diff| " + fmt(worst));
  if (o.ok) o.detail = "500 tied vectors, max |diff| " + fmt(worst) + "; monotone images exactly +-1";
  return o;
}

struct PresetGolden {
  std::string preset;
  std::size_t n;
  std::uint64_t seed;
  double ec;
  std::optional<double> ma;
};

std::vector<PresetGolden> read_preset_goldens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);
  std::vector<PresetGolden> out;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    out.push_back({f.at(0), std::stoul(f.at(1)), std::stoull(f.at(2)), io::parse_real(f.at(3)),
                   f.at(4).empty() ? std::nullopt : std::optional<double>(io::parse_real(f.at(4)))});
  }
  return out;
}

Outcome preset_complementarity() {
  Outcome o;
  const auto t0 = Clock::now();
  std::map<std::string, std::pair<double, std::optional<double>>> got;
  for (const auto& g : read_preset_goldens(std::string(ERRALIGN_GOLDEN) + "/synth_presets.csv")) {
    const auto s = synth::sample_scenario(synth::preset(g.preset, g.n, g.seed));
    const auto view = build_joint_view(s.truth, s.run_a, s.run_b);
    const auto ec = error_consistency(view);
    const auto ma = misclassification_agreement(view);
    if (!ec.defined() || std::abs(*ec.value - g.ec) > 1e-12) o.fail(g.preset + ": EC differs from golden");
    if (ma.defined() != g.ma.has_value() || (g.ma && std::abs(*ma.value - *g.ma) > 1e-12))
      o.fail(g.preset + ": MA differs from golden");
    got[g.preset] = {ec.value.value_or(0), ma.value};
  }
  const double secs = seconds_since(t0);
  const auto& agree = got.at("dual-error-agreeing");
  const auto& disagree = got.at("dual-error-disagreeing");
  const double d_ec = std::abs(agree.first - disagree.first);
  const double d_ma = agree.second.value_or(0) - disagree.second.value_or(0);
  if (!(d_ec < 0.05)) o.fail("|dEC| = " + fmt(d_ec));
  if (!(d_ma > 0.5)) o.fail("dMA = " + fmt(d_ma));
  if (secs >= 10.0) o.fail("took " + fmt(secs) + " s");
  if (o.ok) o.detail = "n = 10000, |dEC| = " + fmt(d_ec) + ", dMA = " + fmt(d_ma) + ", matches golden, " +
                       fmt(secs) + " s";
  return o;
}

Outcome cles_correct_independence() {
  Outcome o;
  std::mt19937_64 rng(100);
  for (int t = 0; t < 100; ++t) {
    const std::size_t classes = 2 + rng() % 7;
    auto v = testutil::vocab(classes);
    const auto rows = testutil::random_triples(rng, 5 + rng() % 80, classes);
    GroundTruth truth{v, {}};
    SystemRun a{"A", v, {}}, b{"B", v, {}};
    for (std::size_t i = 0; i < rows.size(); ++i) {
      truth.entries[testutil::id(i)] = rows[i].truth;
      a.entries[testutil::id(i)] = rows[i].a;
      b.entries[testutil::id(i)] = rows[i].b;
    }
    const auto prior = SmoothingPrior::uniform(classes);
    const auto before = cles_from_runs(truth, a, b, prior);
    for (std::size_t i = 0; i < 10 * rows.size(); ++i) {
      const std::string id = "c" + std::to_string(i);
      const ClassIndex label = rng() % classes;
      truth.entries[id] = a.entries[id] = b.entries[id] = label;
    }
    const auto after = cles_from_runs(truth, a, b, prior);
    if (before.value.has_value() != after.value.has_value() ||
        (before.value && std::memcmp(&*before.value, &*after.value, sizeof(double)) != 0)) {
      o.fail("fixture " + std::to_string(t) + " changed");
    }
  }
  if (o.ok) o.detail = "100 fixtures, bitwise identical";
  return o;
}

Outcome global_vs_average() {
  Outcome o;
  auto table = io::read_scores(std::string(ERRALIGN_FIXTURES) + "/two_domain_scores.csv");
  table.canonicalize();
  const auto rows = correlation_report(table, {{"ec", "ma"}});
  std::optional<double> global, average;
  for (const auto& r : rows) {
    if (r.scope == CorrelationScope::global) global = r.r;
    if (r.scope == CorrelationScope::average) average = r.r;
  }
  // brute force from the raw table
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_domain;
  std::vector<double> all_x, all_y;
  std::map<std::tuple<std::string, std::string, std::string>, std::map<std::string, double>> cells;
  for (const auto& r : table.rows) cells[{r.domain, r.system_a, r.system_b}][r.metric] = *r.value;
  for (const auto& [key, m] : cells) {
    by_domain[std::get<0>(key)].first.push_back(m.at("ec"));
    by_domain[std::get<0>(key)].second.push_back(m.at("ma"));
    all_x.push_back(m.at("ec"));
    all_y.push_back(m.at("ma"));
  }
  const double want_global = static_cast<double>(*oracle::spearman(all_x, all_y));
  long double sum = 0;
  for (const auto& [d, xy] : by_domain) sum += *oracle::spearman(xy.first, xy.second);
  const double want_average = static_cast<double>(sum / by_domain.size());
  if (!global || !average) return o.fail("undefined r"), o;
  if (std::abs(*global - want_global) > 1e-12) o.fail("global r " + fmt(*global) + " vs " + fmt(want_global));
  if (std::abs(*average - want_average) > 1e-12) o.fail("average r " + fmt(*average) + " vs " + fmt(want_average));
  if ((*global > 0) == (*average > 0) || *global == 0 || *average == 0) o.fail("no sign difference");
  if (o.ok) o.detail = "global r = " + fmt(*global) + ", average r = " + fmt(*average) + ", oracle-matched";
  return o;
}

Outcome cli_golden() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto results = golden::run(ERRALIGN_CLI, ERRALIGN_FIXTURES, ERRALIGN_GOLDEN, ERRALIGN_SCRATCH, false);
  const double secs = seconds_since(t0);
  std::size_t passed = 0;
  for (const auto& r : results) {
    if (r.ok) ++passed;
    else o.fail(r.name + ": " + r.detail);
  }
  if (secs >= 60.0) o.fail("took " + fmt(secs) + " s");
  if (o.ok) o.detail = std::to_string(passed) + "/" + std::to_string(results.size()) + " cases byte-identical, " +
                       fmt(secs) + " s";
  return o;
}

}  // namespace

int main() {
  report("kappa oracle equivalence", kappa_oracle);
  report("EC dual-formulation identity", ec_dual);
  report("identity suite", identity_suite);
  report("JSD bounds and symmetry", jsd_bounds);
  report("CKA invariances", cka_invariances);
  report("Spearman oracle", spearman_oracle);
  report("synthetic EC/MA complementarity", preset_complementarity);
  report("CLES correct-prediction independence", cles_correct_independence);
  report("global vs average r divergence", global_vs_average);
  report("CLI golden suite", cli_golden);
  return failures;
}
