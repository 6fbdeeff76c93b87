#ifndef VOXMARK_COHERENCE_HPP
#define VOXMARK_COHERENCE_HPP

// Semantic coherence between phrase vectors at increasing phrase distance,
// plus the syntactic markers reported alongside it.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "voxmark/error.hpp"
#include "voxmark/functionals.hpp"
#include "voxmark/textfeat.hpp"

namespace voxmark {

/// Immutable word -> vector lookup, keyed by lowercase word.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return vectors_.size(); }

  void insert(std::string word, std::vector<double> v) {
    if (v.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "vector for '" + word + "' has wrong length");
    vectors_[ascii_lower(word)] = std::move(v);
  }
  const std::vector<double>* find(const std::string& lower) const {
    auto it = vectors_.find(lower);
    return it == vectors_.end() ? nullptr : &it->second;
  }

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

/// Text vectors: optional "count dim" header, then "word v1 ... vdim" per line.
/// Without a header the first row fixes the dimension. Duplicate words: last wins.
inline EmbeddingTable parse_embeddings(std::string_view content) {
  std::vector<std::vector<std::string_view>> rows;
  for (auto raw : detail::lines(content)) {
    const auto line = detail::trim(raw);
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      std::size_t end = pos;
      while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
      if (end > pos) fields.push_back(line.substr(pos, end - pos));
      pos = end;
    }
    rows.push_back(std::move(fields));
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyFile, "embedding file has no rows");

  auto parse_num = [](std::string_view s, double& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
  };
  std::size_t first = 0;
  std::size_t dim = 0;
  if (rows[0].size() == 2) {
    std::size_t count = 0;
    auto a = std::from_chars(rows[0][0].data(), rows[0][0].data() + rows[0][0].size(), count);
    auto b = std::from_chars(rows[0][1].data(), rows[0][1].data() + rows[0][1].size(), dim);
    if (a.ec == std::errc() && b.ec == std::errc() && a.ptr == rows[0][0].data() + rows[0][0].size() &&
        b.ptr == rows[0][1].data() + rows[0][1].size()) {
      first = 1;
    } else {
      dim = 0;
    }
  }
  if (first == rows.size()) throw Error(ErrorCode::EmptyFile, "embedding file has a header but no vectors");
  if (dim == 0) dim = rows[first].size() - 1;
  if (dim == 0) throw Error(ErrorCode::DimensionMismatch, "embedding rows need at least one value");

  EmbeddingTable table(dim);
  for (std::size_t r = first; r < rows.size(); ++r) {
    const auto& f = rows[r];
    if (f.size() != dim + 1) {
      throw Error(ErrorCode::DimensionMismatch, "row " + std::to_string(r + 1) + " has " + std::to_string(f.size() - 1) +
                                                    " values, expected " + std::to_string(dim));
    }
    std::vector<double> v(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      if (!parse_num(f[j + 1], v[j])) throw Error(ErrorCode::DimensionMismatch, "non-numeric value in row " + std::to_string(r + 1));
    }
    table.insert(std::string(f[0]), std::move(v));
  }
  return table;
}

inline EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  return parse_embeddings(read_text_file(path));
}

/// Mean vector of in-vocabulary tokens; nullopt when none are in vocabulary.
inline std::optional<std::vector<double>> phrase_vector(const Sentence& sentence, const EmbeddingTable& emb) {
  std::vector<double> acc(emb.dim(), 0.0);
  std::size_t hits = 0;
  for (const auto& tok : sentence) {
    const auto* v = emb.find(tok.lower);
    if (!v) continue;
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += (*v)[j];
    ++hits;
  }
  if (hits == 0) return std::nullopt;
  if (hits > 1) {
    for (auto& x : acc) x /= static_cast<double>(hits);
  }
  return acc;
}

/// Cosine similarity clamped to [-1, 1]; NaN when either vector has zero norm.
inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (!(aa > 0.0) || !(bb > 0.0)) return kNaN;
  return std::clamp(ab / std::sqrt(aa * bb), -1.0, 1.0);
}

struct PhraseVectors {
  std::vector<std::vector<double>> vectors;
  std::size_t skipped = 0;
};

inline PhraseVectors phrase_vectors(const Transcript& t, const EmbeddingTable& emb) {
  PhraseVectors out;
  for (const auto& s : t.sentences) {
    if (auto v = phrase_vector(s, emb)) out.vectors.push_back(std::move(*v));
    else ++out.skipped;
  }
  return out;
}

inline constexpr int kMaxCoherenceOrder = 3;

/// Order q compares each defined phrase with the one q + 1 positions later.
inline std::vector<double> coherence_series(const PhraseVectors& phrases, int order) {
  if (order < 0 || order > kMaxCoherenceOrder) throw Error(ErrorCode::InvalidArgument, "coherence order must be 0..3");
  std::vector<double> out;
  const auto gap = static_cast<std::size_t>(order) + 1;
  for (std::size_t i = 0; i + gap < phrases.vectors.size(); ++i) {
    const double c = cosine(phrases.vectors[i], phrases.vectors[i + gap]);
    if (!std::isnan(c)) out.push_back(c);
  }
  return out;
}

inline std::vector<double> coherence_series(const Transcript& t, const EmbeddingTable& emb, int order) {
  return coherence_series(phrase_vectors(t, emb), order);
}

struct CoherenceStats {
  double mean = kNaN, stddev = kNaN, min = kNaN, max = kNaN, p10 = kNaN;
};

struct CoherenceFeatures {
  std::array<CoherenceStats, kMaxCoherenceOrder + 1> raw;
  std::array<CoherenceStats, kMaxCoherenceOrder + 1> normalized;
  double max_phrase_length = kNaN;
  double determiner_rate = kNaN;
  std::size_t skipped_phrases = 0;
};

inline FunctionalBank coherence_bank() { return FunctionalBank::parse({"mean", "stddev", "min", "max", "p10"}); }

namespace detail {

inline CoherenceStats summarize(const std::vector<double>& v) {
  const auto fv = apply_bank("c", v, coherence_bank());
  return {fv.values[0], fv.values[1], fv.values[2], fv.values[3], fv.values[4]};
}

inline bool is_determiner(const Token& t) {
  return (t.pos && *t.pos == "DET") || (t.xpos && (*t.xpos == "DT" || *t.xpos == "PDT" || *t.xpos == "WDT"));
}

}  // namespace detail

/// Normalized statistics subtract the document baseline: the mean cosine over every pair of
/// defined phrase vectors in the transcript.
inline CoherenceFeatures coherence_features(const Transcript& t, const EmbeddingTable& emb) {
  CoherenceFeatures out;
  const auto phrases = phrase_vectors(t, emb);
  out.skipped_phrases = phrases.skipped;

  double pair_sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < phrases.vectors.size(); ++i) {
    for (std::size_t j = i + 1; j < phrases.vectors.size(); ++j) {
      const double c = cosine(phrases.vectors[i], phrases.vectors[j]);
      if (std::isnan(c)) continue;
      pair_sum += c;
      ++pairs;
    }
  }
  const double baseline = pairs ? pair_sum / static_cast<double>(pairs) : kNaN;

  for (int q = 0; q <= kMaxCoherenceOrder; ++q) {
    auto series = coherence_series(phrases, q);
    out.raw[static_cast<std::size_t>(q)] = detail::summarize(series);
    for (auto& c : series) c -= baseline;
    out.normalized[static_cast<std::size_t>(q)] = detail::summarize(series);
  }

  std::size_t longest = 0, determiners = 0, total = 0;
  for (const auto& s : t.sentences) {
    longest = std::max(longest, s.size());
    for (const auto& tok : s) {
      ++total;
      determiners += detail::is_determiner(tok) ? 1 : 0;
    }
  }
  if (!t.sentences.empty()) out.max_phrase_length = static_cast<double>(longest);
  if (total > 0 && t.has_pos()) out.determiner_rate = static_cast<double>(determiners) / static_cast<double>(total);
  return out;
}

inline std::vector<std::string> coherence_feature_names() {
  std::vector<std::string> out;
  const auto stats = coherence_bank().names();
  for (int q = 0; q <= kMaxCoherenceOrder; ++q) {
    for (const auto& s : stats) out.push_back("coh_q" + std::to_string(q) + "_" + s);
    for (const auto& s : stats) out.push_back("coh_q" + std::to_string(q) + "_norm_" + s);
  }
  out.emplace_back("coh_max_phrase_length");
  out.emplace_back("coh_determiner_rate");
  return out;
}

inline FeatureVector to_features(const CoherenceFeatures& c) {
  FeatureVector fv;
  const auto names = coherence_feature_names();
  std::size_t i = 0;
  auto push_stats = [&](const CoherenceStats& s) {
    for (double v : {s.mean, s.stddev, s.min, s.max, s.p10}) fv.push(names[i++], v);
  };
  for (std::size_t q = 0; q <= kMaxCoherenceOrder; ++q) {
    push_stats(c.raw[q]);
    push_stats(c.normalized[q]);
  }
  fv.push(names[i++], c.max_phrase_length);
  fv.push(names[i++], c.determiner_rate);
  return fv;
}

}  // namespace voxmark

#endif  // VOXMARK_COHERENCE_HPP
