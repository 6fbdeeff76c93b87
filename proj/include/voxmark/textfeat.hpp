#ifndef VOXMARK_TEXTFEAT_HPP
#define VOXMARK_TEXTFEAT_HPP

// Transcript ingestion, lexical complexity metrics, tag/relation counts and lexicon sentiment.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "voxmark/error.hpp"
#include "voxmark/functionals.hpp"
#include "voxmark/series.hpp"

namespace voxmark {

struct Token {
  std::string surface;
  std::string lower;
  std::optional<std::string> pos;    // universal tag (UPOS)
  std::optional<std::string> xpos;   // language-specific tag, e.g. Penn Treebank
  std::optional<std::string> deprel;
  bool is_unintelligible = false;
};

using Sentence = std::vector<Token>;

struct Transcript {
  std::vector<Sentence> sentences;

  std::size_t token_count() const noexcept {
    std::size_t n = 0;
    for (const auto& s : sentences) n += s.size();
    return n;
  }
  bool has_pos() const noexcept {
    for (const auto& s : sentences) {
      for (const auto& t : s) {
        if (t.pos || t.xpos) return true;
      }
    }
    return false;
  }
};

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline const std::unordered_set<std::string>& default_unintelligible_markers() {
  static const std::unordered_set<std::string> m = {"xxx", "[unintelligible]", "[inaudible]"};
  return m;
}

inline Token make_token(std::string surface, const std::unordered_set<std::string>& markers) {
  Token t;
  t.lower = ascii_lower(surface);
  t.is_unintelligible = markers.count(t.lower) > 0;
  t.surface = std::move(surface);
  return t;
}

namespace detail {

inline bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }
inline bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

inline std::string_view strip_punct(std::string_view w) {
  while (!w.empty() && is_punct(w.front())) w.remove_prefix(1);
  while (!w.empty() && is_punct(w.back())) w.remove_suffix(1);
  return w;
}

// Like strip_punct but keeps brackets, for markers such as "[inaudible],".
inline std::string_view strip_punct_keep_brackets(std::string_view w) {
  auto strippable = [](char c) { return is_punct(c) && c != '[' && c != ']'; };
  while (!w.empty() && strippable(w.front())) w.remove_prefix(1);
  while (!w.empty() && strippable(w.back())) w.remove_suffix(1);
  return w;
}

}  // namespace detail

/// Sentences end at '.', '!' or '?' (a '.' between two digits is kept as a decimal point).
/// Tokens are whitespace-delimited with surrounding punctuation stripped; marker tokens are
/// matched before stripping so bracketed markers survive.
inline Transcript tokenize(std::string_view text,
                           const std::unordered_set<std::string>& markers = default_unintelligible_markers()) {
  Transcript out;
  Sentence current;
  std::string word;
  auto flush_word = [&] {
    if (word.empty()) return;
    const std::string bracketed(detail::strip_punct_keep_brackets(word));
    if (markers.count(ascii_lower(word))) {
      current.push_back(make_token(word, markers));
    } else if (markers.count(ascii_lower(bracketed))) {
      current.push_back(make_token(bracketed, markers));
    } else {
      const auto core = detail::strip_punct(word);
      if (!core.empty()) current.push_back(make_token(std::string(core), markers));
    }
    word.clear();
  };
  auto flush_sentence = [&] {
    flush_word();
    if (!current.empty()) out.sentences.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush_word();
    } else if (c == '!' || c == '?' ||
               (c == '.' && !(i > 0 && i + 1 < text.size() && detail::is_digit(text[i - 1]) && detail::is_digit(text[i + 1])))) {
      flush_sentence();
    } else {
      word.push_back(c);
    }
  }
  flush_sentence();
  return out;
}

// ---------------------------------------------------------------------------
// CoNLL-U

/// Columns: ID FORM LEMMA UPOS XPOS FEATS HEAD DEPREL DEPS MISC. Multiword ranges ("1-2")
/// and empty nodes ("1.1") are skipped; "_" means the field is absent.
inline Transcript parse_conllu(std::string_view content,
                               const std::unordered_set<std::string>& markers = default_unintelligible_markers()) {
  Transcript out;
  Sentence current;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto field = [](std::string_view v) -> std::optional<std::string> {
    if (v.empty() || v == "_") return std::nullopt;
    return std::string(v);
  };
  while (pos <= content.size()) {
    const std::size_t end = std::min(content.find('\n', pos), content.size());
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) {
      if (!current.empty()) out.sentences.push_back(std::move(current));
      current.clear();
      if (end == content.size()) break;
      continue;
    }
    if (line.front() == '#') continue;
    std::vector<std::string_view> cols;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (cols.size() != 10) {
      throw Error(ErrorCode::MalformedConllu, "line " + std::to_string(line_no) + " has " + std::to_string(cols.size()) +
                                                  " columns (expected 10)");
    }
    if (cols[0].find_first_of("-.") != std::string_view::npos) continue;
    if (cols[1].empty()) throw Error(ErrorCode::MalformedConllu, "line " + std::to_string(line_no) + " has an empty FORM");
    Token t = make_token(std::string(cols[1]), markers);
    t.pos = field(cols[3]);
    t.xpos = field(cols[4]);
    t.deprel = field(cols[7]);
    current.push_back(std::move(t));
    if (end == content.size()) break;
  }
  if (!current.empty()) out.sentences.push_back(std::move(current));
  return out;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Transcript load_conllu(const std::filesystem::path& path,
                              const std::unordered_set<std::string>& markers = default_unintelligible_markers()) {
  return parse_conllu(read_text_file(path), markers);
}

// ---------------------------------------------------------------------------
// Complexity metrics

struct ComplexityFeatures {
  double unintelligible_word_ratio = kNaN;
  double standardized_word_entropy = kNaN;
  double suffix_ratio = kNaN;
  double number_ratio = kNaN;
  double brunet_index = kNaN;
  double honore_statistic = kNaN;
  double type_token_ratio = kNaN;
};

inline const std::vector<std::string>& complexity_feature_names() {
  static const std::vector<std::string> names = {
      "unintelligible_word_ratio", "standardized_word_entropy", "suffix_ratio",    "number_ratio",
      "brunet_index",              "honore_statistic",          "type_token_ratio"};
  return names;
}

inline FeatureVector to_features(const ComplexityFeatures& c) {
  FeatureVector fv;
  const double vals[] = {c.unintelligible_word_ratio, c.standardized_word_entropy, c.suffix_ratio, c.number_ratio,
                         c.brunet_index, c.honore_statistic, c.type_token_ratio};
  for (std::size_t i = 0; i < complexity_feature_names().size(); ++i) fv.push(complexity_feature_names()[i], vals[i]);
  return fv;
}

inline const std::vector<std::string>& default_suffixes() {
  static const std::vector<std::string> s = {"ness", "ment", "tion", "ity", "able", "ful", "less", "ly"};
  return s;
}

inline const std::unordered_set<std::string>& number_words() {
  static const std::unordered_set<std::string> w = {
      "zero",    "one",      "two",      "three",   "four",    "five",     "six",     "seven",   "eight",
      "nine",    "ten",      "eleven",   "twelve",  "thirteen", "fourteen", "fifteen", "sixteen", "seventeen",
      "eighteen", "nineteen", "twenty",  "thirty",  "forty",   "fifty",    "sixty",   "seventy", "eighty",
      "ninety",  "hundred",  "thousand", "million", "billion"};
  return w;
}

/// Digits with optional ',' or '.' separators, at least one digit.
inline bool is_numeric_token(std::string_view w) {
  bool digit = false;
  for (char c : w) {
    if (detail::is_digit(c)) digit = true;
    else if (c != '.' && c != ',') return false;
  }
  return digit;
}

inline constexpr double kBrunetExponent = 0.165;

/// N tokens, V distinct lowercase types, V1 hapax legomena:
///   entropy  = H / log2 V with H in bits (NaN when V = 1)
///   brunet   = N ^ (V ^ -0.165)
///   honore   = 100 ln N / (1 - V1 / V) (NaN when every type is a hapax)
///   ttr      = V / N
/// A token counts as unintelligible when flagged as a marker or, when a dictionary is
/// supplied, absent from it.
inline ComplexityFeatures complexity(const Transcript& t, const std::unordered_set<std::string>* dictionary = nullptr,
                                     const std::vector<std::string>& suffixes = default_suffixes()) {
  ComplexityFeatures out;
  std::map<std::string, std::size_t> freq;
  std::size_t n = 0, unintelligible = 0, suffixed = 0, numbers = 0;
  for (const auto& s : t.sentences) {
    for (const auto& tok : s) {
      ++n;
      ++freq[tok.lower];
      if (tok.is_unintelligible || (dictionary && !dictionary->count(tok.lower))) ++unintelligible;
      for (std::string_view suf : suffixes) {
        if (suf.starts_with('-')) suf.remove_prefix(1);
        if (!suf.empty() && tok.lower.ends_with(suf)) {
          ++suffixed;
          break;
        }
      }
      if (is_numeric_token(tok.lower) || number_words().count(tok.lower)) ++numbers;
    }
  }
  if (n == 0) return out;
  const double nd = static_cast<double>(n);
  const double v = static_cast<double>(freq.size());
  std::size_t hapax = 0;
  double h = 0.0;
  for (const auto& [w, c] : freq) {
    if (c == 1) ++hapax;
    const double p = static_cast<double>(c) / nd;
    h -= p * std::log2(p);
  }
  out.unintelligible_word_ratio = static_cast<double>(unintelligible) / nd;
  out.standardized_word_entropy = freq.size() > 1 ? std::clamp(h / std::log2(v), 0.0, 1.0) : kNaN;
  out.suffix_ratio = static_cast<double>(suffixed) / nd;
  out.number_ratio = static_cast<double>(numbers) / nd;
  out.brunet_index = std::pow(nd, std::pow(v, -kBrunetExponent));
  out.honore_statistic = hapax == freq.size() ? kNaN : 100.0 * std::log(nd) / (1.0 - static_cast<double>(hapax) / v);
  out.type_token_ratio = v / nd;
  return out;
}

// ---------------------------------------------------------------------------
// Syntax counts

inline const std::vector<std::string>& upos_inventory() {
  static const std::vector<std::string> tags = {"ADJ",  "ADP",  "ADV",   "AUX",   "CCONJ", "DET",
                                                "INTJ", "NOUN", "NUM",   "PART",  "PRON",  "PROPN",
                                                "PUNCT", "SCONJ", "SYM", "VERB",  "X"};
  return tags;
}

inline const std::vector<std::string>& penn_inventory() {
  static const std::vector<std::string> tags = {
      "CC", "CD", "DT",  "EX",  "FW",  "IN", "JJ",  "JJR", "JJS", "LS",  "MD",  "NN",
      "NNS", "NNP", "NNPS", "PDT", "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP", "SYM",
      "TO", "UH", "VB",  "VBD", "VBG", "VBN", "VBP", "VBZ", "WDT", "WP",  "WP$", "WRB"};
  return tags;
}

inline const std::vector<std::string>& deprel_inventory() {
  static const std::vector<std::string> rels = {
      "acl",       "advcl",     "advmod",   "amod",       "appos",    "aux",     "case",     "cc",
      "ccomp",     "clf",       "compound", "conj",       "cop",      "csubj",   "dep",      "det",
      "discourse", "dislocated", "expl",    "fixed",      "flat",     "goeswith", "iobj",    "list",
      "mark",      "nmod",      "nsubj",    "nummod",     "obj",      "obl",     "orphan",   "parataxis",
      "punct",     "reparandum", "root",    "vocative",   "xcomp"};
  return rels;
}

inline constexpr std::string_view kUntagged = "UNTAGGED";
inline constexpr std::string_view kOtherTag = "OTHER";

/// Counts over a fixed inventory (plus OTHER and UNTAGGED buckets) so every transcript
/// yields the same feature columns. Relation subtypes ("nmod:poss") count under their base.
struct SyntaxCounts {
  std::map<std::string, std::size_t> pos_counts;
  std::map<std::string, std::size_t> xpos_counts;
  std::map<std::string, std::size_t> dep_counts;
  std::size_t total_tokens = 0;

  double rate(const std::map<std::string, std::size_t>& counts, const std::string& key) const {
    if (total_tokens == 0) return kNaN;
    auto it = counts.find(key);
    return static_cast<double>(it == counts.end() ? 0 : it->second) / static_cast<double>(total_tokens);
  }
};

namespace detail {

inline std::vector<std::string> with_buckets(const std::vector<std::string>& inv) {
  auto out = inv;
  out.emplace_back(kOtherTag);
  out.emplace_back(kUntagged);
  return out;
}

inline void bump(std::map<std::string, std::size_t>& counts, const std::vector<std::string>& inv,
                 const std::optional<std::string>& tag) {
  if (!tag) {
    ++counts[std::string(kUntagged)];
  } else if (std::find(inv.begin(), inv.end(), *tag) != inv.end()) {
    ++counts[*tag];
  } else {
    ++counts[std::string(kOtherTag)];
  }
}

}  // namespace detail

inline SyntaxCounts syntax_counts(const Transcript& t) {
  SyntaxCounts c;
  for (const auto* inv : {&upos_inventory(), &penn_inventory()}) {
    auto& counts = inv == &upos_inventory() ? c.pos_counts : c.xpos_counts;
    for (const auto& tag : detail::with_buckets(*inv)) counts[tag] = 0;
  }
  for (const auto& rel : detail::with_buckets(deprel_inventory())) c.dep_counts[rel] = 0;
  for (const auto& s : t.sentences) {
    for (const auto& tok : s) {
      ++c.total_tokens;
      detail::bump(c.pos_counts, upos_inventory(), tok.pos);
      detail::bump(c.xpos_counts, penn_inventory(), tok.xpos);
      std::optional<std::string> base = tok.deprel;
      if (base) base = base->substr(0, base->find(':'));
      detail::bump(c.dep_counts, deprel_inventory(), base);
    }
  }
  return c;
}

inline std::vector<std::string> syntax_feature_names() {
  std::vector<std::string> out;
  auto add = [&](std::string_view prefix, const std::vector<std::string>& inv) {
    for (const auto& tag : detail::with_buckets(inv)) {
      out.push_back(std::string(prefix) + tag + "_count");
      out.push_back(std::string(prefix) + tag + "_rate");
    }
  };
  add("pos_", upos_inventory());
  add("xpos_", penn_inventory());
  add("dep_", deprel_inventory());
  return out;
}

inline FeatureVector to_features(const SyntaxCounts& c) {
  FeatureVector fv;
  auto add = [&](std::string_view prefix, const std::vector<std::string>& inv, const std::map<std::string, std::size_t>& counts) {
    for (const auto& tag : detail::with_buckets(inv)) {
      fv.push(std::string(prefix) + tag + "_count", static_cast<double>(counts.at(tag)));
      fv.push(std::string(prefix) + tag + "_rate", c.rate(counts, tag));
    }
  };
  add("pos_", upos_inventory(), c.pos_counts);
  add("xpos_", penn_inventory(), c.xpos_counts);
  add("dep_", deprel_inventory(), c.dep_counts);
  return fv;
}

// ---------------------------------------------------------------------------
// Sentiment and word lists

using ValenceLexicon = std::unordered_map<std::string, double>;

/// Mean valence over lexicon-matched lowercase tokens; NaN when nothing matches.
inline double sentiment(const Transcript& t, const ValenceLexicon& lexicon) {
  if (lexicon.empty()) throw Error(ErrorCode::EmptyLexicon, "valence lexicon is empty");
  double sum = 0.0;
  std::size_t matched = 0;
  for (const auto& s : t.sentences) {
    for (const auto& tok : s) {
      auto it = lexicon.find(tok.lower);
      if (it == lexicon.end()) continue;
      sum += it->second;
      ++matched;
    }
  }
  return matched ? sum / static_cast<double>(matched) : kNaN;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> lines(std::string_view content) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    out.push_back(content.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

}  // namespace detail

/// "word,valence" rows; a first row whose valence is not numeric is treated as a header.
inline ValenceLexicon parse_valence_csv(std::string_view content) {
  ValenceLexicon lex;
  bool first = true;
  for (auto raw : detail::lines(content)) {
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.rfind(',');
    if (comma == std::string_view::npos) throw Error(ErrorCode::SchemaError, "lexicon row without comma: " + std::string(line));
    const auto word = detail::trim(line.substr(0, comma));
    const auto val = detail::trim(line.substr(comma + 1));
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
    if (ec != std::errc() || ptr != val.data() + val.size()) {
      if (first) {
        first = false;
        continue;
      }
      throw Error(ErrorCode::SchemaError, "non-numeric valence in row: " + std::string(line));
    }
    first = false;
    lex[ascii_lower(word)] = v;
  }
  return lex;
}

inline ValenceLexicon load_valence_csv(const std::filesystem::path& path) {
  return parse_valence_csv(read_text_file(path));
}

/// One entry per line, lowercased; blank lines and '#' comments ignored.
inline std::vector<std::string> parse_word_list(std::string_view content) {
  std::vector<std::string> out;
  for (auto raw : detail::lines(content)) {
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    out.push_back(ascii_lower(line));
  }
  return out;
}

inline std::vector<std::string> load_word_list(const std::filesystem::path& path) {
  return parse_word_list(read_text_file(path));
}

}  // namespace voxmark

#endif  // VOXMARK_TEXTFEAT_HPP
