#pragma once

// File formats. All files are UTF-8, comma-separated, with a header row; CRLF
// and LF line endings are both accepted; fields are not quoted. Reals are
// written with 17 significant digits in the "C" locale form so they round-trip.

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "erralign/analysis.hpp"
#include "erralign/domain.hpp"
#include "erralign/synth.hpp"

namespace erralign::io {

namespace fs = std::filesystem;

std::string format_real(double v);
double parse_real(const std::string& text);

/// Writes via a sibling temp file and rename, so readers never see partial output.
void atomic_write(const fs::path& path, const std::string& content);

/// `instance_id,label` rows. Duplicate ids and malformed rows are errors with line numbers.
LabelRows read_label_file(const fs::path& path);
void write_label_file(std::ostream& os, const std::map<InstanceId, ClassIndex>& entries, const LabelVocabulary& vocab);

/// Ground truth plus its vocabulary (labels seen in the file and any declared extras).
GroundTruth load_truth(const fs::path& path, const std::vector<std::string>& declared_labels = {});
SystemRun load_predictions(const fs::path& path, const std::string& system_id, const VocabularyPtr& vocab);

struct ConfidenceLoad {
  ConfidenceTable table;
  std::vector<std::string> warnings;
};

/// Header `instance_id,<class>...`; class columns are mapped by name and must
/// match the vocabulary exactly. When `vocab` is null the vocabulary is taken
/// from the header (sorted). Row sums off by <= 1e-6 are renormalized silently,
/// by <= 1e-2 renormalized with a warning, beyond that rejected.
ConfidenceLoad load_confidences(const fs::path& path, const std::string& system_id, VocabularyPtr vocab);

/// Header `instance_id,f0,...,f{D-1}`; all rows must have D values.
RepresentationMatrix load_representations(const fs::path& path, const std::string& system_id);
void write_representations(std::ostream& os, const RepresentationMatrix& m);

struct ConfusionLoad {
  CountMatrix matrix;
  VocabularyPtr vocab;
  std::int64_t dropped_diagonal = 0;
};

/// Square table: header row `<corner>,<class>...`, then `<class>,<count>...` per
/// true class. A nonzero diagonal (full confusion matrix) is zeroed and the
/// dropped count reported. When `vocab` is null it is taken from the header (sorted).
ConfusionLoad load_confusion(const fs::path& path, VocabularyPtr vocab);

void write_scores(std::ostream& os, const PairwiseScoreTable& table);
PairwiseScoreTable read_scores(const fs::path& path);

void write_correlations(std::ostream& os, const std::vector<CorrelationRow>& rows);
void write_zscores(std::ostream& os, const std::vector<ZScoreRow>& rows);

struct ManifestSystem {
  std::string id;
  std::string family;
  fs::path predictions;
  std::optional<fs::path> confidences;
  std::optional<fs::path> representations;
};

/// Run manifest; see README for the grammar. Relative paths resolve against the manifest's directory.
struct RunManifest {
  std::string domain;
  fs::path truth;
  std::vector<std::string> labels;
  std::vector<ManifestSystem> systems;
};

RunManifest parse_manifest(const std::string& text, const fs::path& base_dir = {});
/// `check_files` verifies that every referenced file exists.
RunManifest load_manifest(const fs::path& path, bool check_files = true);
std::string render_manifest(const RunManifest& m);

/// Files written by `synth`: truth.csv, A.csv, B.csv, points.csv, manifest.toml.
void write_scenario(const fs::path& dir, const synth::Scenario& scenario, const synth::ScenarioSample& sample);

}  // namespace erralign::io
