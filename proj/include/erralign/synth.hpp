#pragma once

// Synthetic decision-region scenarios on the plane: three deterministic
// classifiers (ground truth, A, B) and a Gaussian-mixture sampling distribution.

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "erralign/domain.hpp"

namespace erralign::synth {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// a*x + b*y <= c. Boundary points are inside.
struct HalfPlane {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  bool contains(Point p) const { return a * p.x + b * p.y <= c; }
};

/// Convex region (intersection of half-planes) carrying a class label.
struct Region {
  ClassIndex label = 0;
  std::vector<HalfPlane> constraints;

  bool contains(Point p) const;
};

/// Axis-aligned box as half-planes; infinite bounds are dropped.
std::vector<HalfPlane> box(double x_lo, double x_hi, double y_lo, double y_hi);

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Priority-ordered regions: a point takes the label of the first region that
/// contains it, otherwise `fallback`. Ties on shared boundaries therefore go to
/// the earlier region.
struct RegionClassifier {
  std::vector<Region> regions;
  ClassIndex fallback = 0;
};

ClassIndex classify(const RegionClassifier& c, Point p);

struct GaussianComponent {
  Point center;
  double sigma = 1.0;
  double weight = 1.0;
};

/// Mixture of isotropic Gaussians; weights positive and summing to 1.
struct SampleDistribution {
  std::vector<GaussianComponent> components;

  void validate() const;
};

struct Scenario {
  std::string name;
  VocabularyPtr vocab;
  RegionClassifier truth;
  RegionClassifier system_a;
  RegionClassifier system_b;
  SampleDistribution distribution;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

struct ScenarioSample {
  std::vector<Point> points;
  GroundTruth truth;
  SystemRun run_a;
  SystemRun run_b;
};

/// Portable sampling stream: std::mt19937_64 (fully specified by the standard),
/// 53-bit uniforms, and Box-Muller normals (cosine branch only). The standard
/// library distributions are avoided because their algorithms are unspecified.
class SampleStream {
 public:
  explicit SampleStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform();
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// Draws `samples` points from the mixture and labels them with all three classifiers.
/// Instance ids are "s" followed by a zero-padded index, so id order is draw order.
ScenarioSample sample_scenario(const Scenario& s);

/// The four named presets over classes c1, c2, c3:
///   jointly-correct-mass, disagreement-mass, dual-error-agreeing, dual-error-disagreeing.
std::vector<Scenario> scenario_presets(std::size_t samples = 10000, std::uint64_t seed = 7);
Scenario preset(const std::string& name, std::size_t samples = 10000, std::uint64_t seed = 7);
std::vector<std::string> preset_names();

}  // namespace erralign::synth
