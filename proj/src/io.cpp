#include "erralign/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

namespace erralign::io {

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_real(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || first == last || !std::isfinite(v)) {
    throw InputError("not a number: '" + text + "'");
  }
  return v;
}

void atomic_write(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw InputError("cannot write '" + tmp.string() + "'");
    os << content;
    os.flush();
    if (!os) throw InputError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw InputError("cannot rename into '" + path.string() + "': " + ec.message());
  }
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

/// Line-oriented CSV reader with positions for error messages.
class CsvReader {
 public:
  explicit CsvReader(const fs::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw InputError("cannot open '" + path.string() + "'");
  }

  /// Next non-empty line split into fields; false at end of file.
  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line_no_ == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      if (line.empty()) continue;
      fields = split_fields(line);
      return true;
    }
    return false;
  }

  std::vector<std::string> header(std::size_t min_fields) {
    std::vector<std::string> h;
    if (!next(h)) fail("missing header row");
    if (h.size() < min_fields) fail("header has too few columns");
    return h;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError(path_.string() + ":" + std::to_string(line_no_) + ": " + msg);
  }

  std::size_t line() const { return line_no_; }

 private:
  fs::path path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

std::string clean_reason(std::string r) {
  std::replace(r.begin(), r.end(), ',', ';');
  std::replace(r.begin(), r.end(), '\n', ' ');
  return r;
}

std::string value_or_empty(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

VocabularyPtr sorted_vocab(std::vector<std::string> labels) {
  std::sort(labels.begin(), labels.end());
  return std::make_shared<const LabelVocabulary>(std::move(labels));
}

}  // namespace

LabelRows read_label_file(const fs::path& path) {
  CsvReader csv(path);
  auto h = csv.header(2);
  if (h.size() != 2 || h[0] != "instance_id" || h[1] != "label") csv.fail("expected header 'instance_id,label'");
  LabelRows rows;
  std::vector<std::string> f;
  while (csv.next(f)) {
    if (f.size() != 2) csv.fail("expected 2 fields, got " + std::to_string(f.size()));
    if (f[0].empty()) csv.fail("empty instance_id");
    if (f[1].empty()) csv.fail("empty label");
    if (!rows.emplace(f[0], f[1]).second) csv.fail("duplicate instance_id '" + f[0] + "'");
  }
  return rows;
}

void write_label_file(std::ostream& os, const std::map<InstanceId, ClassIndex>& entries, const LabelVocabulary& vocab) {
  os << "instance_id,label\n";
  for (const auto& [id, label] : entries) os << id << ',' << vocab.label(label) << '\n';
}

GroundTruth load_truth(const fs::path& path, const std::vector<std::string>& declared_labels) {
  LabelRows rows = read_label_file(path);
  if (rows.empty()) throw InputError(path.string() + ": no rows");
  return GroundTruth::encode(vocabulary_from(rows, declared_labels), rows);
}

SystemRun load_predictions(const fs::path& path, const std::string& system_id, const VocabularyPtr& vocab) {
  LabelRows rows = read_label_file(path);
  try {
    return SystemRun::encode(system_id, vocab, rows);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

ConfidenceLoad load_confidences(const fs::path& path, const std::string& system_id, VocabularyPtr vocab) {
  CsvReader csv(path);
  auto h = csv.header(3);
  if (h[0] != "instance_id") csv.fail("first column must be 'instance_id'");
  std::vector<std::string> columns(h.begin() + 1, h.end());
  if (!vocab) vocab = sorted_vocab(columns);
  if (columns.size() != vocab->size()) {
    csv.fail("has " + std::to_string(columns.size()) + " class columns, vocabulary has " +
             std::to_string(vocab->size()));
  }
  std::vector<ClassIndex> slot(columns.size());
  std::set<ClassIndex> used;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    auto idx = vocab->find(columns[i]);
    if (!idx) csv.fail("unknown class column '" + columns[i] + "'");
    if (!used.insert(*idx).second) csv.fail("duplicate class column '" + columns[i] + "'");
    slot[i] = *idx;
  }

  ConfidenceLoad out{{system_id, vocab, {}}, {}};
  std::vector<std::string> f;
  while (csv.next(f)) {
    if (f.size() != h.size()) csv.fail("expected " + std::to_string(h.size()) + " fields");
    std::vector<double> p(vocab->size());
    double sum = 0.0;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      double v = 0.0;
      try {
        v = parse_real(f[i + 1]);
      } catch (const InputError& e) {
        csv.fail(e.what());
      }
      if (v < 0.0) csv.fail("negative confidence");
      p[slot[i]] = v;
    }
    for (double v : p) sum += v;
    const double off = std::abs(sum - 1.0);
    if (off > 1e-2) csv.fail("confidences sum to " + format_real(sum));
    if (off > 1e-6) {
      out.warnings.push_back(path.string() + ":" + std::to_string(csv.line()) + ": renormalized row summing to " +
                             format_real(sum));
    }
    if (off > 0.0)
      for (double& v : p) v /= sum;
    if (!out.table.entries.emplace(f[0], ProbVector(std::move(p))).second) {
      csv.fail("duplicate instance_id '" + f[0] + "'");
    }
  }
  return out;
}

RepresentationMatrix load_representations(const fs::path& path, const std::string& system_id) {
  CsvReader csv(path);
  auto h = csv.header(2);
  if (h[0] != "instance_id") csv.fail("first column must be 'instance_id'");
  RepresentationMatrix m{system_id, h.size() - 1, {}};
  std::vector<std::string> f;
  while (csv.next(f)) {
    if (f.size() != h.size()) {
      csv.fail("ragged row: " + std::to_string(f.size() - 1) + " values, expected " + std::to_string(m.dim));
    }
    std::vector<double> row(m.dim);
    for (std::size_t i = 0; i < m.dim; ++i) {
      try {
        row[i] = parse_real(f[i + 1]);
      } catch (const InputError& e) {
        csv.fail(e.what());
      }
    }
    if (!m.rows.emplace(f[0], std::move(row)).second) csv.fail("duplicate instance_id '" + f[0] + "'");
  }
  m.validate();
  return m;
}

void write_representations(std::ostream& os, const RepresentationMatrix& m) {
  os << "instance_id";
  for (std::size_t i = 0; i < m.dim; ++i) os << ",f" << i;
  os << '\n';
  for (const auto& [id, row] : m.rows) {
    os << id;
    for (double v : row) os << ',' << format_real(v);
    os << '\n';
  }
}

ConfusionLoad load_confusion(const fs::path& path, VocabularyPtr vocab) {
  CsvReader csv(path);
  auto h = csv.header(3);
  std::vector<std::string> columns(h.begin() + 1, h.end());
  if (!vocab) vocab = sorted_vocab(columns);
  const std::size_t classes = vocab->size();
  if (columns.size() != classes) csv.fail("header does not match the vocabulary");
  std::vector<ClassIndex> col_slot(classes);
  std::set<ClassIndex> used;
  for (std::size_t i = 0; i < classes; ++i) {
    auto idx = vocab->find(columns[i]);
    if (!idx) csv.fail("unknown class name '" + columns[i] + "'");
    if (!used.insert(*idx).second) csv.fail("duplicate class name '" + columns[i] + "'");
    col_slot[i] = *idx;
  }

  ConfusionLoad out{CountMatrix(classes, MatrixAxes::confusion), vocab, 0};
  std::set<ClassIndex> seen_rows;
  std::vector<std::string> f;
  while (csv.next(f)) {
    if (f.size() != h.size()) csv.fail("matrix is not square");
    auto row = vocab->find(f[0]);
    if (!row) csv.fail("unknown class name '" + f[0] + "'");
    if (!seen_rows.insert(*row).second) csv.fail("duplicate row '" + f[0] + "'");
    for (std::size_t i = 0; i < classes; ++i) {
      std::int64_t v = 0;
      const std::string& cell = f[i + 1];
      auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() || cell.empty()) {
        csv.fail("not an integer count: '" + cell + "'");
      }
      if (v < 0) csv.fail("negative count");
      if (*row == col_slot[i]) {
        out.dropped_diagonal += v;
        continue;
      }
      out.matrix.set(*row, col_slot[i], v);
    }
  }
  if (seen_rows.size() != classes) csv.fail("matrix is not square");
  return out;
}

void write_scores(std::ostream& os, const PairwiseScoreTable& table) {
  os << "domain,system_a,system_b,metric,value,status,reason,support\n";
  for (const auto& r : table.rows) {
    os << r.domain << ',' << r.system_a << ',' << r.system_b << ',' << r.metric << ',' << value_or_empty(r.value)
       << ',' << (r.value ? "ok" : "undefined") << ',' << (r.value ? "" : clean_reason(r.reason)) << ','
       << r.support << '\n';
  }
}

PairwiseScoreTable read_scores(const fs::path& path) {
  CsvReader csv(path);
  auto h = csv.header(8);
  if (h != std::vector<std::string>{"domain", "system_a", "system_b", "metric", "value", "status", "reason",
                                    "support"}) {
    csv.fail("unexpected score table header");
  }
  PairwiseScoreTable table;
  std::vector<std::string> f;
  while (csv.next(f)) {
    if (f.size() != 8) csv.fail("expected 8 fields");
    ScoreRow r{f[0], f[1], f[2], f[3], std::nullopt, f[6], 0};
    if (f[5] == "ok") {
      try {
        r.value = parse_real(f[4]);
      } catch (const InputError& e) {
        csv.fail(e.what());
      }
      r.reason.clear();
    } else if (f[5] == "undefined") {
      if (!f[4].empty()) csv.fail("undefined row carries a value");
    } else {
      csv.fail("status must be ok or undefined");
    }
    std::uint64_t support = 0;
    auto res = std::from_chars(f[7].data(), f[7].data() + f[7].size(), support);
    if (res.ec != std::errc() || res.ptr != f[7].data() + f[7].size()) csv.fail("bad support count");
    r.support = support;
    table.rows.push_back(std::move(r));
  }
  return table;
}

void write_correlations(std::ostream& os, const std::vector<CorrelationRow>& rows) {
  os << "metric_x,metric_y,scope,domain,value,status,reason,n,dropped\n";
  for (const auto& r : rows) {
    os << r.metric_x << ',' << r.metric_y << ',' << scope_name(r.scope) << ',' << r.domain << ','
       << value_or_empty(r.r) << ',' << (r.r ? "ok" : "undefined") << ',' << (r.r ? "" : clean_reason(r.reason))
       << ',' << r.n << ',' << r.dropped << '\n';
  }
}

void write_zscores(std::ostream& os, const std::vector<ZScoreRow>& rows) {
  os << "domain,system_a,system_b,family_pair,metric,value,z,status,reason\n";
  for (const auto& r : rows) {
    os << r.domain << ',' << r.system_a << ',' << r.system_b << ',' << r.family_pair << ',' << r.metric << ','
       << value_or_empty(r.raw) << ',' << value_or_empty(r.z) << ',' << (r.z ? "ok" : "undefined") << ','
       << (r.z ? "" : clean_reason(r.reason)) << '\n';
  }
}

// Manifest grammar (a TOML subset):
//   file    := { line }
//   line    := blank | comment | "[[system]]" | key "=" value
//   value   := string | "[" [ string { "," string } ] "]"
//   string  := '"' { char | '\"' | '\\' } '"'
// Top-level keys: domain, truth, labels. System keys: id, family,
// predictions, confidences, representations.
namespace {

struct ManifestParser {
  const std::string& text;
  std::size_t line_no = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError("manifest line " + std::to_string(line_no) + ": " + msg);
  }

  static void skip_ws(const std::string& s, std::size_t& i) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  }

  std::string parse_string(const std::string& s, std::size_t& i) const {
    if (i >= s.size() || s[i] != '"') fail("expected a quoted string");
    ++i;
    std::string out;
    while (i < s.size() && s[i] != '"') {
      if (s[i] == '\\') {
        if (i + 1 >= s.size()) fail("dangling escape");
        const char e = s[i + 1];
        if (e != '"' && e != '\\') fail("unsupported escape");
        out += e;
        i += 2;
      } else {
        out += s[i++];
      }
    }
    if (i >= s.size()) fail("unterminated string");
    ++i;
    return out;
  }

  void expect_end(const std::string& s, std::size_t i) const {
    skip_ws(s, i);
    if (i < s.size() && s[i] != '#') fail("trailing characters");
  }
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

RunManifest parse_manifest(const std::string& text, const fs::path& base_dir) {
  ManifestParser p{text};
  RunManifest m;
  ManifestSystem* current = nullptr;
  std::set<std::string> top_seen;
  std::set<std::string> sys_seen;
  auto resolve = [&](const std::string& s) { return fs::path(s).is_absolute() ? fs::path(s) : base_dir / s; };

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++p.line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t i = 0;
    ManifestParser::skip_ws(line, i);
    if (i == line.size() || line[i] == '#') continue;
    if (line.compare(i, 10, "[[system]]") == 0) {
      p.expect_end(line, i + 10);
      m.systems.emplace_back();
      current = &m.systems.back();
      sys_seen.clear();
      continue;
    }
    const std::size_t key_start = i;
    while (i < line.size() && (std::isalnum(static_cast<unsigned char>(line[i])) || line[i] == '_')) ++i;
    const std::string key = line.substr(key_start, i - key_start);
    if (key.empty()) p.fail("expected a key");
    ManifestParser::skip_ws(line, i);
    if (i >= line.size() || line[i] != '=') p.fail("expected '=' after '" + key + "'");
    ++i;
    ManifestParser::skip_ws(line, i);

    if (!current) {
      if (!top_seen.insert(key).second) p.fail("duplicate key '" + key + "'");
      if (key == "labels") {
        if (i >= line.size() || line[i] != '[') p.fail("labels must be an array of strings");
        ++i;
        ManifestParser::skip_ws(line, i);
        while (i < line.size() && line[i] != ']') {
          m.labels.push_back(p.parse_string(line, i));
          ManifestParser::skip_ws(line, i);
          if (i < line.size() && line[i] == ',') {
            ++i;
            ManifestParser::skip_ws(line, i);
          }
        }
        if (i >= line.size()) p.fail("unterminated array");
        p.expect_end(line, i + 1);
        continue;
      }
      const std::string value = p.parse_string(line, i);
      p.expect_end(line, i);
      if (key == "domain") {
        m.domain = value;
      } else if (key == "truth") {
        m.truth = resolve(value);
      } else {
        p.fail("unknown key '" + key + "'");
      }
    } else {
      if (!sys_seen.insert(key).second) p.fail("duplicate key '" + key + "'");
      const std::string value = p.parse_string(line, i);
      p.expect_end(line, i);
      if (key == "id") {
        current->id = value;
      } else if (key == "family") {
        current->family = value;
      } else if (key == "predictions") {
        current->predictions = resolve(value);
      } else if (key == "confidences") {
        current->confidences = resolve(value);
      } else if (key == "representations") {
        current->representations = resolve(value);
      } else {
        p.fail("unknown system key '" + key + "'");
      }
    }
  }

  if (m.domain.empty()) throw InputError("manifest: missing 'domain'");
  if (m.truth.empty()) throw InputError("manifest: missing 'truth'");
  std::set<std::string> ids;
  for (const auto& s : m.systems) {
    if (s.id.empty()) throw InputError("manifest: system without 'id'");
    if (s.predictions.empty()) throw InputError("manifest: system '" + s.id + "' has no 'predictions'");
    if (s.id.find(',') != std::string::npos) throw InputError("manifest: system id '" + s.id + "' contains a comma");
    if (!ids.insert(s.id).second) throw InputError("manifest: duplicate system id '" + s.id + "'");
  }
  return m;
}

RunManifest load_manifest(const fs::path& path, bool check_files) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open manifest '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  RunManifest m = parse_manifest(ss.str(), path.parent_path());
  if (!check_files) return m;
  auto must_exist = [](const fs::path& p) {
    if (!fs::exists(p)) throw InputError("manifest references missing file '" + p.string() + "'");
  };
  must_exist(m.truth);
  for (const auto& s : m.systems) {
    must_exist(s.predictions);
    if (s.confidences) must_exist(*s.confidences);
    if (s.representations) must_exist(*s.representations);
  }
  return m;
}

std::string render_manifest(const RunManifest& m) {
  std::ostringstream os;
  os << "domain = " << quote(m.domain) << '\n';
  os << "truth = " << quote(m.truth.generic_string()) << '\n';
  if (!m.labels.empty()) {
    os << "labels = [";
    for (std::size_t i = 0; i < m.labels.size(); ++i) os << (i ? ", " : "") << quote(m.labels[i]);
    os << "]\n";
  }
  for (const auto& s : m.systems) {
    os << "\n[[system]]\n";
    os << "id = " << quote(s.id) << '\n';
    if (!s.family.empty()) os << "family = " << quote(s.family) << '\n';
    os << "predictions = " << quote(s.predictions.generic_string()) << '\n';
    if (s.confidences) os << "confidences = " << quote(s.confidences->generic_string()) << '\n';
    if (s.representations) os << "representations = " << quote(s.representations->generic_string()) << '\n';
  }
  return os.str();
}

void write_scenario(const fs::path& dir, const synth::Scenario& scenario, const synth::ScenarioSample& sample) {
  const LabelVocabulary& vocab = *scenario.vocab;
  auto labels = [&](const std::map<InstanceId, ClassIndex>& entries) {
    std::ostringstream os;
    write_label_file(os, entries, vocab);
    return os.str();
  };
  atomic_write(dir / "truth.csv", labels(sample.truth.entries));
  atomic_write(dir / "A.csv", labels(sample.run_a.entries));
  atomic_write(dir / "B.csv", labels(sample.run_b.entries));

  std::ostringstream pts;
  pts << "instance_id,x,y\n";
  std::size_t i = 0;
  for (const auto& [id, _] : sample.truth.entries) {
    pts << id << ',' << format_real(sample.points[i].x) << ',' << format_real(sample.points[i].y) << '\n';
    ++i;
  }
  atomic_write(dir / "points.csv", pts.str());

  RunManifest m;
  m.domain = scenario.name;
  m.truth = "truth.csv";
  m.labels = vocab.labels();
  m.systems.push_back({"A", "synthetic", "A.csv", std::nullopt, std::nullopt});
  m.systems.push_back({"B", "synthetic", "B.csv", std::nullopt, std::nullopt});
  atomic_write(dir / "manifest.toml", render_manifest(m));
}

}  // namespace erralign::io
