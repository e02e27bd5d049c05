#include "erralign/synth.hpp"

#include <cmath>
#include <numbers>
#include <algorithm>

namespace erralign::synth {

bool Region::contains(Point p) const {
  for (const auto& h : constraints)
    if (!h.contains(p)) return false;
  return true;
}

std::vector<HalfPlane> box(double x_lo, double x_hi, double y_lo, double y_hi) {
  std::vector<HalfPlane> hs;
  if (std::isfinite(x_lo)) hs.push_back({-1.0, 0.0, -x_lo});
  if (std::isfinite(x_hi)) hs.push_back({1.0, 0.0, x_hi});
  if (std::isfinite(y_lo)) hs.push_back({0.0, -1.0, -y_lo});
  if (std::isfinite(y_hi)) hs.push_back({0.0, 1.0, y_hi});
  return hs;
}

ClassIndex classify(const RegionClassifier& c, Point p) {
  for (const auto& r : c.regions)
    if (r.contains(p)) return r.label;
  return c.fallback;
}

void SampleDistribution::validate() const {
  if (components.empty()) throw InputError("sample distribution has no components");
  double total = 0.0;
  for (const auto& c : components) {
    if (!(c.sigma > 0.0)) throw InputError("mixture component sigma must be > 0");
    if (!(c.weight > 0.0)) throw InputError("mixture component weight must be > 0");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError("mixture weights must sum to 1");
}

double SampleStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SampleStream::normal() {
  double u1 = uniform();
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

ScenarioSample sample_scenario(const Scenario& s) {
  if (s.samples == 0) throw InputError("scenario needs at least 1 sample");
  s.distribution.validate();
  SampleStream stream(s.seed);

  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& c : s.distribution.components) cumulative.push_back(acc += c.weight);

  const std::size_t width = std::max<std::size_t>(6, std::to_string(s.samples - 1).size());
  ScenarioSample out{{}, GroundTruth{s.vocab, {}}, SystemRun{"A", s.vocab, {}}, SystemRun{"B", s.vocab, {}}};
  out.points.reserve(s.samples);
  for (std::size_t i = 0; i < s.samples; ++i) {
    const double u = stream.uniform() * acc;
    std::size_t k = 0;
    while (k + 1 < cumulative.size() && u >= cumulative[k]) ++k;
    const auto& comp = s.distribution.components[k];
    const Point p{comp.center.x + comp.sigma * stream.normal(), comp.center.y + comp.sigma * stream.normal()};
    out.points.push_back(p);

    std::string id = std::to_string(i);
    id = "s" + std::string(width - id.size(), '0') + id;
    out.truth.entries.emplace(id, classify(s.truth, p));
    out.run_a.entries.emplace(id, classify(s.system_a, p));
    out.run_b.entries.emplace(id, classify(s.system_b, p));
  }
  return out;
}

namespace {

// Plane layout shared by all presets. Ground truth is three vertical strips:
// c1 for x <= 1, c2 for 1 < x <= 2, c3 beyond. Horizontal bands decide
// which systems are wrong (boxes are closed, earlier regions win ties):
//   y in [-1, 0]: one system wrong (A for x >= 1.5, B for x <= 1.5)
//   y in [1, 2]:  both wrong, both predict truth + 1
//   y > 2:        both wrong, A predicts truth + 1, B predicts truth + 2
//   elsewhere:    both correct
constexpr std::size_t kClasses = 3;
constexpr double kStripEdges[] = {1.0, 2.0};
constexpr double kSigma = 0.1;

std::vector<Region> shifted_strips(double x_lo, double x_hi, double y_lo, double y_hi, std::size_t shift) {
  const double lo[] = {-kInf, kStripEdges[0], kStripEdges[1]};
  const double hi[] = {kStripEdges[0], kStripEdges[1], kInf};
  std::vector<Region> regions;
  for (std::size_t strip = 0; strip < kClasses; ++strip) {
    const double a = std::max(lo[strip], x_lo);
    const double b = std::min(hi[strip], x_hi);
    if (a >= b) continue;
    regions.push_back({(strip + shift) % kClasses, box(a, b, y_lo, y_hi)});
  }
  return regions;
}

RegionClassifier with_truth_fallback(std::vector<Region> overrides) {
  RegionClassifier c;
  c.regions = std::move(overrides);
  for (auto& r : shifted_strips(-kInf, kInf, -kInf, kInf, 0)) c.regions.push_back(std::move(r));
  c.fallback = kClasses - 1;
  return c;
}

RegionClassifier truth_classifier() { return with_truth_fallback({}); }

RegionClassifier classifier_a() {
  std::vector<Region> r = shifted_strips(1.5, kInf, -1.0, 0.0, 1);
  for (auto& x : shifted_strips(-kInf, kInf, 1.0, kInf, 1)) r.push_back(std::move(x));
  return with_truth_fallback(std::move(r));
}

RegionClassifier classifier_b() {
  std::vector<Region> r = shifted_strips(-kInf, 1.5, -1.0, 0.0, 1);
  for (auto& x : shifted_strips(-kInf, kInf, 1.0, 2.0, 1)) r.push_back(std::move(x));
  for (auto& x : shifted_strips(-kInf, kInf, 2.0, kInf, 2)) r.push_back(std::move(x));
  return with_truth_fallback(std::move(r));
}

// Three components, one per strip centre, at height y.
void add_row(SampleDistribution& d, double y, double weight) {
  for (double x : {0.5, 1.5, 2.5}) d.components.push_back({{x, y}, kSigma, weight / 3.0});
}

// One component where only A is right, one where only B is right.
void add_single_error(SampleDistribution& d, double weight) {
  d.components.push_back({{0.75, -0.5}, kSigma, weight / 2.0});
  d.components.push_back({{2.25, -0.5}, kSigma, weight / 2.0});
}

Scenario make(std::string name, SampleDistribution dist, std::size_t samples, std::uint64_t seed) {
  static const VocabularyPtr vocab =
      std::make_shared<const LabelVocabulary>(std::vector<std::string>{"c1", "c2", "c3"});
  return {std::move(name), vocab, truth_classifier(), classifier_a(), classifier_b(), std::move(dist), samples, seed};
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"jointly-correct-mass", "disagreement-mass", "dual-error-agreeing", "dual-error-disagreeing"};
}

Scenario preset(const std::string& name, std::size_t samples, std::uint64_t seed) {
  SampleDistribution d;
  if (name == "jointly-correct-mass") {
    add_row(d, 0.5, 0.8);
    add_row(d, 1.5, 0.2);
  } else if (name == "disagreement-mass") {
    add_row(d, 0.5, 0.5);
    add_single_error(d, 0.5);
  } else if (name == "dual-error-agreeing") {
    add_row(d, 0.5, 0.4);
    add_single_error(d, 0.2);
    add_row(d, 1.5, 0.4);
  } else if (name == "dual-error-disagreeing") {
    add_row(d, 0.5, 0.4);
    add_single_error(d, 0.2);
    add_row(d, 2.5, 0.4);
  } else {
    throw InputError("unknown preset '" + name + "'");
  }
  return make(name, std::move(d), samples, seed);
}

std::vector<Scenario> scenario_presets(std::size_t samples, std::uint64_t seed) {
  std::vector<Scenario> out;
  for (const auto& n : preset_names()) out.push_back(preset(n, samples, seed));
  return out;
}

}  // namespace erralign::synth
