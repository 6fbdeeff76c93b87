#ifndef VOXMARK_CLI_EXTRACT_HPP
#define VOXMARK_CLI_EXTRACT_HPP

#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>

#include <unistd.h>

#include "voxmark/cli/config.hpp"
#include "voxmark/coherence.hpp"
#include "voxmark/mlpipe/table.hpp"
#include "voxmark/textfeat.hpp"

namespace voxmark::cli {

inline constexpr const char* kSentimentFeature = "sentiment_valence";

/// Column names of one feature set under this config.
inline std::vector<std::string> feature_set_columns(const std::string& set, const PipelineConfig& c) {
  if (set == "gemaps_core") return gemaps_feature_names();
  if (set == "spectral") return spectral_feature_names(c.acoustic);
  if (set == "complexity") return complexity_feature_names();
  if (set == "syntax") return syntax_feature_names();
  if (set == "sentiment") return {kSentimentFeature};
  if (set == "coherence") return coherence_feature_names();
  throw Error(ErrorCode::InvalidArgument, "unknown feature set '" + set + "'");
}

/// CSV header after row_id; a pure function of the config.
inline std::vector<std::string> output_columns(const PipelineConfig& c) {
  std::vector<std::string> out;
  for (const auto& s : feature_set_names()) {
    if (!c.enabled(s)) continue;
    auto cols = feature_set_columns(s, c);
    out.insert(out.end(), cols.begin(), cols.end());
  }
  return out;
}

/// Read-only resources loaded once and shared by all workers.
struct Resources {
  std::unordered_set<std::string> markers = default_unintelligible_markers();
  std::optional<std::unordered_set<std::string>> dictionary;
  std::vector<std::string> suffixes = default_suffixes();
  std::optional<ValenceLexicon> lexicon;
  std::optional<EmbeddingTable> embeddings;
};

inline Resources load_resources(const PipelineConfig& c) {
  Resources r;
  auto words = [](const std::filesystem::path& p) {
    std::vector<std::string> w;
    for (auto& s : load_word_list(p)) w.push_back(ascii_lower(s));
    return w;
  };
  if (const auto& p = c.paths.at("unintelligible_markers")) {
    const auto w = words(*p);
    r.markers = {w.begin(), w.end()};
  }
  if (const auto& p = c.paths.at("dictionary")) {
    const auto w = words(*p);
    r.dictionary.emplace(w.begin(), w.end());
  }
  if (const auto& p = c.paths.at("suffixes")) r.suffixes = words(*p);
  if (c.enabled("sentiment")) r.lexicon = load_valence_csv(*c.paths.at("valence_lexicon"));
  if (c.enabled("coherence")) r.embeddings = load_embeddings(*c.paths.at("embeddings"));
  return r;
}

struct InputItem {
  std::string source_id;
  std::filesystem::path audio;
  std::optional<std::filesystem::path> transcript;
};

struct InputStatus {
  std::string source_id;
  std::string audio;
  std::string transcript;
  bool ok = false;
  std::string message;
  std::vector<std::string> warnings;
};

struct RunManifest {
  std::vector<InputStatus> inputs;
  std::map<std::string, std::size_t> feature_counts;
  std::size_t n_features = 0;
  double wall_seconds = 0.0;
  std::string config_hash;

  bool all_ok() const {
    return std::all_of(inputs.begin(), inputs.end(), [](const InputStatus& s) { return s.ok; });
  }

  json to_json() const {
    json j;
    j["config_hash"] = config_hash;
    j["n_features"] = n_features;
    j["feature_counts"] = feature_counts;
    j["wall_seconds"] = wall_seconds;
    j["inputs"] = json::array();
    for (const auto& s : inputs) {
      json e = {{"source_id", s.source_id}, {"audio", s.audio}, {"status", s.ok ? "ok" : "error"}};
      e["transcript"] = s.transcript.empty() ? json(nullptr) : json(s.transcript);
      if (!s.ok) e["message"] = s.message;
      e["warnings"] = s.warnings;
      j["inputs"].push_back(e);
    }
    return j;
  }
};

inline bool has_extension(const std::filesystem::path& p, std::string_view ext) {
  return ascii_lower(p.extension().string()) == ext;
}

/// explicit_pairs lines: "<audio basename>,<transcript path>" (relative paths resolve against the pairs file).
inline std::map<std::string, std::filesystem::path> load_pairs(const std::filesystem::path& path) {
  std::map<std::string, std::filesystem::path> out;
  const std::string content = read_text_file(path);
  for (auto line : voxmark::detail::lines(content)) {
    line = voxmark::detail::trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) throw Error(ErrorCode::ConfigError, "pairs file line lacks a comma: " + std::string(line));
    std::filesystem::path audio(std::string(voxmark::detail::trim(line.substr(0, comma))));
    std::filesystem::path tr(std::string(voxmark::detail::trim(line.substr(comma + 1))));
    if (tr.is_relative()) tr = path.parent_path() / tr;
    out[audio.stem().string()] = tr;
  }
  return out;
}

/// WAVs sorted by source_id; transcripts paired by basename (.conllu preferred over .txt).
inline std::vector<InputItem> discover_inputs(const std::filesystem::path& audio_dir,
                                              const std::optional<std::filesystem::path>& transcript_dir,
                                              const std::map<std::string, std::filesystem::path>& pairs = {}) {
  if (!std::filesystem::is_directory(audio_dir)) throw Error(ErrorCode::NoInputs, "not a directory: " + audio_dir.string());
  std::vector<InputItem> items;
  for (const auto& entry : std::filesystem::directory_iterator(audio_dir)) {
    if (entry.is_regular_file() && has_extension(entry.path(), ".wav")) items.push_back({entry.path().stem().string(), entry.path(), {}});
  }
  if (items.empty()) throw Error(ErrorCode::NoInputs, "no .wav files in " + audio_dir.string());
  std::sort(items.begin(), items.end(), [](const InputItem& a, const InputItem& b) {
    return a.source_id != b.source_id ? a.source_id < b.source_id : a.audio < b.audio;
  });
  const auto tdir = transcript_dir.value_or(audio_dir);
  for (auto& item : items) {
    if (auto it = pairs.find(item.source_id); it != pairs.end()) {
      item.transcript = it->second;
      continue;
    }
    for (const char* ext : {".conllu", ".txt"}) {
      const auto candidate = tdir / (item.source_id + ext);
      if (std::filesystem::is_regular_file(candidate)) {
        item.transcript = candidate;
        break;
      }
    }
  }
  return items;
}

/// One row; throws on unreadable audio. Missing transcript leaves text features NaN with a warning.
inline std::vector<double> extract_row(const InputItem& item, const PipelineConfig& c, const Resources& res,
                                       std::vector<std::string>& warnings) {
  FeatureVector fv;
  const bool need_audio = c.enabled("gemaps_core") || c.enabled("spectral");
  if (need_audio) {
    const AudioBuffer buf = load_wav(item.audio);
    if (c.enabled("gemaps_core")) fv.append(gemaps_core(buf, c.acoustic));
    if (c.enabled("spectral")) fv.append(spectral_set(buf, c.acoustic));
  } else {
    load_wav(item.audio);  // still validates the input
  }
  std::optional<Transcript> t;
  if (c.any_text()) {
    if (!item.transcript) {
      warnings.push_back("no transcript found; text features are NaN");
    } else if (has_extension(*item.transcript, ".conllu")) {
      t = load_conllu(*item.transcript, res.markers);
    } else {
      t = tokenize(read_text_file(*item.transcript), res.markers);
    }
  }
  auto push_nan = [&](const std::string& set) {
    for (const auto& n : feature_set_columns(set, c)) fv.push(n, kNaN);
  };
  if (c.enabled("complexity")) {
    if (t) fv.append(to_features(complexity(*t, res.dictionary ? &*res.dictionary : nullptr, res.suffixes)));
    else push_nan("complexity");
  }
  if (c.enabled("syntax")) {
    if (t) {
      if (!t->has_pos()) warnings.push_back("transcript has no POS tags; syntax counts fall under UNTAGGED");
      fv.append(to_features(syntax_counts(*t)));
    } else {
      push_nan("syntax");
    }
  }
  if (c.enabled("sentiment")) fv.push(kSentimentFeature, t ? sentiment(*t, *res.lexicon) : kNaN);
  if (c.enabled("coherence")) {
    if (t) fv.append(to_features(coherence_features(*t, *res.embeddings)));
    else push_nan("coherence");
  }
  if (fv.names != output_columns(c)) throw Error(ErrorCode::SchemaError, "internal: feature order differs from header");
  return fv.values;
}

/// Writes to a sibling temp file then renames over the target.
inline void write_atomic(const std::filesystem::path& out, std::string_view content) {
  const auto parent = out.parent_path().empty() ? std::filesystem::path(".") : out.parent_path();
  if (!std::filesystem::is_directory(parent)) throw Error(ErrorCode::UnwritableOutput, "output directory does not exist: " + parent.string());
  auto tmp = out;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::UnwritableOutput, "cannot write " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) {
      std::filesystem::remove(tmp);
      throw Error(ErrorCode::UnwritableOutput, "write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, out, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorCode::UnwritableOutput, "cannot move output into place: " + out.string() + " (" + ec.message() + ")");
  }
}

inline std::filesystem::path manifest_path(const std::filesystem::path& out_csv) {
  auto p = out_csv;
  p += ".manifest.json";
  return p;
}

struct ExtractRequest {
  std::filesystem::path audio_dir;
  std::optional<std::filesystem::path> transcript_dir;
  std::optional<std::filesystem::path> pairs_file;
  std::filesystem::path out_csv;
};

/// Failed recordings are left out of the CSV and marked in the manifest.
inline RunManifest cmd_extract(const ExtractRequest& req, const PipelineConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  const auto out_parent = req.out_csv.parent_path().empty() ? std::filesystem::path(".") : req.out_csv.parent_path();
  if (!std::filesystem::is_directory(out_parent)) throw Error(ErrorCode::UnwritableOutput, "output directory does not exist: " + out_parent.string());
  const auto pairs = req.pairs_file ? load_pairs(*req.pairs_file) : std::map<std::string, std::filesystem::path>{};
  const auto items = discover_inputs(req.audio_dir, req.transcript_dir, pairs);
  const Resources res = load_resources(c);
  const auto columns = output_columns(c);

  RunManifest m;
  m.config_hash = config_hash(c);
  m.n_features = columns.size();
  for (const auto& s : feature_set_names()) {
    if (c.enabled(s)) m.feature_counts[s] = feature_set_columns(s, c).size();
  }
  m.inputs.resize(items.size());
  std::vector<std::vector<double>> rows(items.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      InputStatus& st = m.inputs[i];
      st.source_id = items[i].source_id;
      st.audio = items[i].audio.string();
      st.transcript = items[i].transcript ? items[i].transcript->string() : "";
      try {
        rows[i] = extract_row(items[i], c, res, st.warnings);
        st.ok = true;
      } catch (const std::exception& e) {
        st.message = e.what();
      }
    }
  };
  const std::size_t n_workers = std::min(c.worker_count(), items.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::unordered_set<std::string> seen;
  for (auto& st : m.inputs) {
    if (st.ok && !seen.insert(st.source_id).second) {
      st.ok = false;
      st.message = "duplicate source_id '" + st.source_id + "'";
    }
  }
  std::vector<std::string> ids;
  std::vector<std::size_t> ok_rows;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (m.inputs[i].ok) {
      ok_rows.push_back(i);
      ids.push_back(items[i].source_id);
    }
  }
  ml::FeatureTable table;
  table.column_names = columns;
  table.row_ids = ids;
  table.data.resize(static_cast<Eigen::Index>(ok_rows.size()), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t r = 0; r < ok_rows.size(); ++r) {
    for (std::size_t j = 0; j < columns.size(); ++j) table.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = rows[ok_rows[r]][j];
  }
  write_atomic(req.out_csv, ml::table_to_csv(table));
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_atomic(manifest_path(req.out_csv), m.to_json().dump(2) + "\n");
  return m;
}

}  // namespace voxmark::cli

#endif
