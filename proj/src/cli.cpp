#include "erralign/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>

#include "erralign/analysis.hpp"
#include "erralign/divergence.hpp"
#include "erralign/io.hpp"
#include "erralign/kappa.hpp"
#include "erralign/kernels.hpp"
#include "erralign/representational.hpp"
#include "erralign/synth.hpp"

namespace erralign {

namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  double alpha = SmoothingPrior::kDefaultAlpha;
  std::string log_base = "2";
  std::string out;
  int jobs = 0;

  ScoringOptions scoring() const {
    if (!(alpha > 0.0)) throw InputError("--alpha must be positive");
    return {alpha, log_base == "e" ? LogBase::e : LogBase::two};
  }
};

void emit(const std::string& content, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << content;
  } else {
    io::atomic_write(out_path, content);
  }
}

void apply_jobs(int jobs) {
  if (jobs <= 0) {
    if (const char* env = std::getenv("ERROR_ALIGN_JOBS")) {
      try {
        jobs = std::stoi(env);
      } catch (const std::exception&) {
        throw InputError("ERROR_ALIGN_JOBS is not an integer");
      }
    }
  }
  kernels::set_max_threads(jobs > 0 ? jobs : 0);
}

std::vector<std::string> split_labels(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// ---- score -----------------------------------------------------------------

struct ScoreArgs {
  std::string metric;
  std::string truth, a, b, a_id, b_id;
  std::string conf_a, conf_b, repr_a, repr_b, confusion_a, confusion_b;
  std::string labels;
  std::string domain = "default";
};

std::string stem_or(const std::vector<std::string>& paths, const std::string& fallback) {
  for (const auto& p : paths)
    if (!p.empty()) return fs::path(p).stem().string();
  return fallback;
}

void require(bool ok, const std::string& metric, const char* what) {
  if (!ok) throw InputError("--metric " + metric + " requires " + what);
}

int run_score(const ScoreArgs& args, const CommonOptions& common, std::ostream& out, std::ostream& err) {
  const Metric metric = parse_metric(args.metric);
  const ScoringOptions opts = common.scoring();
  const std::string id_a =
      args.a_id.empty() ? stem_or({args.a, args.conf_a, args.repr_a, args.confusion_a}, "A") : args.a_id;
  const std::string id_b =
      args.b_id.empty() ? stem_or({args.b, args.conf_b, args.repr_b, args.confusion_b}, "B") : args.b_id;
  const bool have_runs = !args.truth.empty() && !args.a.empty() && !args.b.empty();

  std::optional<GroundTruth> truth;
  if (!args.truth.empty()) truth = io::load_truth(args.truth, split_labels(args.labels));
  auto runs = [&]() {
    return std::pair{io::load_predictions(args.a, id_a, truth->vocab), io::load_predictions(args.b, id_b, truth->vocab)};
  };
  auto view_of = [&](const SystemRun& ra, const SystemRun& rb) {
    JointView v = build_joint_view(*truth, ra, rb);
    if (v.dropped() > 0) err << "note: " << v.dropped() << " instance ids not shared by all inputs were dropped\n";
    return v;
  };
  auto confidences = [&](const std::string& path, const std::string& id, VocabularyPtr vocab) {
    io::ConfidenceLoad load = io::load_confidences(path, id, std::move(vocab));
    for (const auto& w : load.warnings) err << "warning: " << w << '\n';
    return load.table;
  };

  MetricResult result;
  switch (metric) {
    case Metric::ec:
    case Metric::ma: {
      require(have_runs, args.metric, "--truth, --a and --b");
      auto [ra, rb] = runs();
      const JointView v = view_of(ra, rb);
      result = metric == Metric::ec ? error_consistency(v) : misclassification_agreement(v);
      break;
    }
    case Metric::cles: {
      if (!args.confusion_a.empty() || !args.confusion_b.empty()) {
        require(!args.confusion_a.empty() && !args.confusion_b.empty(), args.metric,
                "both --confusion-a and --confusion-b");
        io::ConfusionLoad ca = io::load_confusion(args.confusion_a, truth ? truth->vocab : nullptr);
        io::ConfusionLoad cb = io::load_confusion(args.confusion_b, ca.vocab);
        for (const auto* c : {&ca, &cb}) {
          if (c->dropped_diagonal > 0) {
            err << "warning: zeroed the diagonal of a full confusion matrix (" << c->dropped_diagonal
                << " correct predictions dropped)\n";
          }
        }
        result = cles(ca.matrix, cb.matrix, SmoothingPrior::uniform(ca.vocab->size(), opts.alpha), opts.log_base);
      } else {
        require(have_runs, args.metric, "--truth, --a and --b (or --confusion-a and --confusion-b)");
        auto [ra, rb] = runs();
        result = cles_from_runs(*truth, ra, rb, SmoothingPrior::uniform(truth->vocab->size(), opts.alpha),
                                opts.log_base);
      }
      break;
    }
    case Metric::soc: {
      require(!args.conf_a.empty() && !args.conf_b.empty(), args.metric, "--conf-a and --conf-b");
      ConfidenceTable ta = confidences(args.conf_a, id_a, truth ? truth->vocab : nullptr);
      ConfidenceTable tb = confidences(args.conf_b, id_b, ta.vocab);
      result = soc(ta, tb, opts.log_base);
      break;
    }
    case Metric::soce: {
      require(have_runs && !args.conf_a.empty() && !args.conf_b.empty(), args.metric,
              "--truth, --a, --b, --conf-a and --conf-b");
      auto [ra, rb] = runs();
      const JointView v = view_of(ra, rb);
      result = soce(confidences(args.conf_a, id_a, truth->vocab), confidences(args.conf_b, id_b, truth->vocab), v,
                    opts.log_base);
      break;
    }
    case Metric::cka: {
      require(!args.repr_a.empty() && !args.repr_b.empty(), args.metric, "--repr-a and --repr-b");
      auto [x, y] = align_representations(io::load_representations(args.repr_a, id_a),
                                          io::load_representations(args.repr_b, id_b));
      result = x.rows.size() < 2 ? MetricResult::undefined("cka", "fewer than 2 common instances", x.rows.size())
                                 : linear_cka(x, y);
      break;
    }
  }

  PairwiseScoreTable table;
  table.rows.push_back({args.domain, id_a, id_b, metric_name(metric), result.value, result.reason, result.support});
  table.canonicalize();
  std::ostringstream os;
  io::write_scores(os, table);
  emit(os.str(), common.out, out);
  return kExitOk;
}

// ---- pairwise --------------------------------------------------------------

int run_pairwise(const std::vector<std::string>& manifests, const std::string& metric_list,
                 const CommonOptions& common, std::ostream& out, std::ostream& err) {
  const std::vector<Metric> metrics = parse_metric_list(metric_list);
  const ScoringOptions opts = common.scoring();
  apply_jobs(common.jobs);
  const bool need_conf = std::any_of(metrics.begin(), metrics.end(),
                                     [](Metric m) { return m == Metric::soc || m == Metric::soce; });
  const bool need_repr = std::find(metrics.begin(), metrics.end(), Metric::cka) != metrics.end();

  PairwiseScoreTable all;
  for (const auto& path : manifests) {
    const io::RunManifest m = io::load_manifest(path);
    const GroundTruth truth = io::load_truth(m.truth, m.labels);
    std::vector<SystemRun> systems;
    AuxInputs aux;
    for (const auto& s : m.systems) {
      systems.push_back(io::load_predictions(s.predictions, s.id, truth.vocab));
      if (need_conf && s.confidences) {
        io::ConfidenceLoad c = io::load_confidences(*s.confidences, s.id, truth.vocab);
        for (const auto& w : c.warnings) err << "warning: " << w << '\n';
        aux.confidences.emplace(s.id, std::move(c.table));
      }
      if (need_repr && s.representations) {
        aux.representations.emplace(s.id, io::load_representations(*s.representations, s.id));
      }
    }
    all.append(pairwise_scores(m.domain, systems, truth, metrics, aux, opts));
  }
  all.canonicalize();
  std::ostringstream os;
  io::write_scores(os, all);
  emit(os.str(), common.out, out);
  return kExitOk;
}

// ---- correlate / zscore ----------------------------------------------------

PairwiseScoreTable read_all_scores(const std::vector<std::string>& paths) {
  PairwiseScoreTable table;
  for (const auto& p : paths) table.append(io::read_scores(p));
  table.canonicalize();
  return table;
}

FamilyMap load_families(const std::vector<std::string>& manifests, const std::string& families_csv) {
  FamilyMap families;
  auto add = [&](const std::string& id, const std::string& family) {
    auto [it, inserted] = families.emplace(id, family);
    if (!inserted && it->second != family) {
      throw InputError("system '" + id + "' has conflicting families '" + it->second + "' and '" + family + "'");
    }
  };
  for (const auto& path : manifests) {
    const io::RunManifest m = io::load_manifest(path, false);
    for (const auto& s : m.systems) {
      if (s.family.empty()) throw InputError("manifest '" + path + "': system '" + s.id + "' has no family");
      add(s.id, s.family);
    }
  }
  if (!families_csv.empty()) {
    std::ifstream in(families_csv, std::ios::binary);
    if (!in) throw InputError("cannot open '" + families_csv + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
        throw InputError(families_csv + ":" + std::to_string(line_no) + ": expected 'system_id,family'");
      }
      if (line_no == 1 && line == "system_id,family") continue;
      add(line.substr(0, comma), line.substr(comma + 1));
    }
  }
  return families;
}

struct CorrelateArgs {
  std::vector<std::string> scores;
  std::string pairs = "ec:ma,ec:cles,ma:cles";
  bool global = false;
  bool per_domain = false;
  bool log_ma = false;
  std::vector<std::string> manifests;
  std::string families_csv;
  std::vector<std::string> exclude_family;
};

int run_correlate(const CorrelateArgs& args, const CommonOptions& common, std::ostream& out) {
  const PairwiseScoreTable table = read_all_scores(args.scores);
  CorrelationOptions opts;
  opts.log_ma = args.log_ma;
  if (!args.exclude_family.empty()) {
    const FamilyMap families = load_families(args.manifests, args.families_csv);
    const std::set<std::string> excluded(args.exclude_family.begin(), args.exclude_family.end());
    for (const auto& r : table.rows) {
      for (const auto* s : {&r.system_a, &r.system_b}) {
        if (!families.contains(*s)) throw InputError("system '" + *s + "' has no family");
      }
    }
    opts.include = [families, excluded](const ScoreRow& r) {
      return !excluded.contains(families.at(r.system_a)) && !excluded.contains(families.at(r.system_b));
    };
  }
  std::vector<CorrelationRow> rows = correlation_report(table, parse_metric_pairs(args.pairs), opts);
  if (args.global != args.per_domain) {
    std::erase_if(rows, [&](const CorrelationRow& r) {
      const bool is_domain = r.scope == CorrelationScope::domain;
      return args.global ? is_domain : !is_domain;
    });
  }
  std::ostringstream os;
  io::write_correlations(os, rows);
  emit(os.str(), common.out, out);
  return kExitOk;
}

int run_zscore(const std::vector<std::string>& scores, const std::vector<std::string>& manifests,
               const std::string& families_csv, const CommonOptions& common, std::ostream& out) {
  if (manifests.empty() && families_csv.empty()) throw InputError("zscore needs --manifest or --families");
  const PairwiseScoreTable table = read_all_scores(scores);
  std::ostringstream os;
  io::write_zscores(os, zscore_by_metric(table, load_families(manifests, families_csv)));
  emit(os.str(), common.out, out);
  return kExitOk;
}

// ---- synth -----------------------------------------------------------------

int run_synth(const std::string& preset_name, std::size_t n, std::uint64_t seed, const std::string& dir) {
  const synth::Scenario s = synth::preset(preset_name, n, seed);
  io::write_scenario(dir, s, synth::sample_scenario(s));
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Behavioural and representational alignment metrics between classification systems", "erralign"};
  app.require_subcommand(1);

  CommonOptions common;
  auto add_numeric = [&](CLI::App* sub) {
    sub->add_option("--alpha", common.alpha, "Dirichlet prior shape per class (CLES)")->capture_default_str();
    sub->add_option("--log-base", common.log_base, "Logarithm base for JSD")
        ->check(CLI::IsMember({"2", "e"}))
        ->capture_default_str();
  };

  ScoreArgs score;
  auto* sc = app.add_subcommand("score", "Compute one metric for one system pair");
  sc->add_option("--metric", score.metric, "ec|ma|cles|soc|soce|cka")
      ->required()
      ->check(CLI::IsMember({"ec", "ma", "cles", "soc", "soce", "cka"}));
  sc->add_option("--truth", score.truth, "Ground truth CSV (instance_id,label)");
  sc->add_option("--a", score.a, "Predictions of system A");
  sc->add_option("--b", score.b, "Predictions of system B");
  sc->add_option("--a-id", score.a_id, "System id for A (default: file stem)");
  sc->add_option("--b-id", score.b_id, "System id for B (default: file stem)");
  sc->add_option("--conf-a", score.conf_a, "Confidences of system A");
  sc->add_option("--conf-b", score.conf_b, "Confidences of system B");
  sc->add_option("--repr-a", score.repr_a, "Representations of system A");
  sc->add_option("--repr-b", score.repr_b, "Representations of system B");
  sc->add_option("--confusion-a", score.confusion_a, "Confusion matrix of system A (CLES only)");
  sc->add_option("--confusion-b", score.confusion_b, "Confusion matrix of system B (CLES only)");
  sc->add_option("--labels", score.labels, "Extra class labels, comma-separated");
  sc->add_option("--domain", score.domain, "Domain column value")->capture_default_str();
  sc->add_option("--out", common.out, "Output CSV (default: stdout)");
  add_numeric(sc);

  std::vector<std::string> manifests;
  std::string metric_list = "ec,ma,cles";
  auto* pw = app.add_subcommand("pairwise", "Score every system pair listed in run manifests");
  pw->add_option("--manifest", manifests, "Run manifest(s)")->required();
  pw->add_option("--metrics", metric_list, "Comma-separated metrics")->capture_default_str();
  pw->add_option("--out", common.out, "Output CSV (default: stdout)");
  pw->add_option("--jobs", common.jobs, "Worker threads (default: $ERROR_ALIGN_JOBS or all cores)");
  add_numeric(pw);

  CorrelateArgs corr;
  auto* co = app.add_subcommand("correlate", "Spearman correlations between metrics over score tables");
  co->add_option("--scores", corr.scores, "Score CSV(s)")->required();
  co->add_option("--pairs", corr.pairs, "Metric pairs x:y, comma-separated")->capture_default_str();
  co->add_flag("--global", corr.global, "Emit global and average r rows");
  co->add_flag("--per-domain", corr.per_domain, "Emit per-domain r rows");
  co->add_flag("--log-ma", corr.log_ma, "Correlate log(MA) instead of MA");
  co->add_option("--manifest", corr.manifests, "Manifest(s) supplying system families");
  co->add_option("--families", corr.families_csv, "CSV system_id,family");
  co->add_option("--exclude-family", corr.exclude_family, "Drop pairs involving this family");
  co->add_option("--out", common.out, "Output CSV (default: stdout)");

  std::vector<std::string> z_scores;
  std::vector<std::string> z_manifests;
  std::string z_families;
  auto* zs = app.add_subcommand("zscore", "Within-metric z-scores tagged by family pair");
  zs->add_option("--scores", z_scores, "Score CSV(s)")->required();
  zs->add_option("--manifest", z_manifests, "Manifest(s) supplying system families");
  zs->add_option("--families", z_families, "CSV system_id,family");
  zs->add_option("--out", common.out, "Output CSV (default: stdout)");

  std::string preset_name;
  std::size_t synth_n = 10000;
  std::uint64_t synth_seed = 7;
  std::string synth_dir;
  auto* sy = app.add_subcommand("synth", "Write a synthetic decision-region scenario");
  sy->add_option("--preset", preset_name, "Preset name")->required()->check(CLI::IsMember(synth::preset_names()));
  sy->add_option("--n", synth_n, "Number of samples")->capture_default_str()->check(CLI::PositiveNumber);
  sy->add_option("--seed", synth_seed, "RNG seed")->capture_default_str();
  sy->add_option("--out", synth_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*sc) return run_score(score, common, out, err);
    if (*pw) return run_pairwise(manifests, metric_list, common, out, err);
    if (*co) return run_correlate(corr, common, out);
    if (*zs) return run_zscore(z_scores, z_manifests, z_families, common, out);
    if (*sy) return run_synth(preset_name, synth_n, synth_seed, synth_dir);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternalError;
  }
  return kExitInternalError;
}

}  // namespace erralign
