#ifndef VOXMARK_CLI_FEATDICT_HPP
#define VOXMARK_CLI_FEATDICT_HPP

#include "voxmark/cli/extract.hpp"

namespace voxmark::cli {

struct DictEntry {
  std::string name;
  std::string set;
  bool active = true;
  std::string formula;
};

namespace detail {

inline std::string stat_phrase(const Stat& s) {
  switch (s.kind) {
    case Stat::Kind::mean: return "mean";
    case Stat::Kind::stddev: return "population standard deviation";
    case Stat::Kind::min: return "minimum";
    case Stat::Kind::max: return "maximum";
    case Stat::Kind::median: return "median";
    case Stat::Kind::range: return "max - min";
    case Stat::Kind::slope: return "OLS slope against frame index";
    case Stat::Kind::delta_mean_abs: return "mean |x[t] - x[t-1]| over adjacent defined frames";
    case Stat::Kind::percentile: return "percentile " + ml::format_double(s.p) + " (linear interpolation)";
  }
  return "?";
}

inline void add_series(std::vector<DictEntry>& out, const std::string& set, const std::string& series, const FunctionalBank& bank,
                       const std::string& lld) {
  for (const auto& st : bank.stats()) {
    out.push_back({series + "_" + st.name(), set, true, stat_phrase(st) + " over defined frames of: " + lld});
  }
}

inline const std::map<std::string, std::string>& lld_formulas() {
  static const std::map<std::string, std::string> m = {
      {"f0_semitone", "12*log2(F0/27.5 Hz), F0 by YIN (CMND threshold 0.15, parabolic refinement); unvoiced frames NaN"},
      {"loudness_rms", "frame RMS of raw samples, sqrt(mean(x^2))"},
      {"jitter_cycle", "per cycle |T[i]-T[i-1]| / mean(T) over consecutive glottal cycles within voiced runs"},
      {"shimmer_cycle", "per cycle |A[i]-A[i-1]| / mean(A) over consecutive cycle peak amplitudes within voiced runs"},
      {"hnr_frame", "10*log10(r/(1-r)), r = normalized autocorrelation at the F0 lag, voiced frames"},
      {"slope_0_500", "OLS slope of linear magnitude against frequency (Hz) over bins in [0, 500) Hz"},
      {"slope_500_1500", "OLS slope of linear magnitude against frequency (Hz) over bins in [500, 1500) Hz"},
      {"alpha_ratio", "10*log10(E[50,1000) / E[1000,5000)), E = summed power"},
      {"hammarberg", "20*log10(peak magnitude [0,2000) / peak magnitude [2000,5000))"},
      {"mfcc1", "MFCC 1: orthonormal DCT-II of log HTK-mel power energies (20 Hz to Nyquist)"},
      {"mfcc2", "MFCC 2: orthonormal DCT-II of log HTK-mel power energies (20 Hz to Nyquist)"},
      {"mfcc3", "MFCC 3: orthonormal DCT-II of log HTK-mel power energies (20 Hz to Nyquist)"},
      {"mfcc4", "MFCC 4: orthonormal DCT-II of log HTK-mel power energies (20 Hz to Nyquist)"},
      {"centroid", "sum(f*|X|)/sum(|X|)"},
      {"bandwidth", "sqrt(sum(|X|*(f-centroid)^2)/sum(|X|))"},
      {"flatness", "geometric mean / arithmetic mean of floored power spectrum"},
      {"rolloff", "lowest frequency below which 85% of spectral power lies"},
      {"flux_onset", "mean half-wave rectified frame-to-frame difference of log magnitude"},
      {"zcr", "fraction of adjacent raw-sample pairs whose sign differs (zero counts as positive)"},
      {"poly_c0", "intercept of the least-squares line of magnitude against frequency (Hz)"},
      {"poly_c1", "slope of the least-squares line of magnitude against frequency (Hz)"},
      {"rms", "frame RMS of raw samples"},
  };
  return m;
}

inline std::string contrast_formula(std::size_t b, std::size_t n_bands) {
  const std::string lo = b == 0 ? "0" : std::to_string(200u << (b - 1));
  const std::string hi = b + 1 == n_bands ? "Nyquist" : std::to_string(200u << b) + " Hz";
  return "ln(peak) - ln(valley), peak/valley = mean of the top/bottom max(1, floor(0.02 n)) magnitudes in band [" + lo + " Hz, " + hi + ")";
}

}  // namespace detail

/// Every emittable feature in CSV column order; sets disabled in the config are marked inactive.
inline std::vector<DictEntry> feature_dictionary(const PipelineConfig& c) {
  std::vector<DictEntry> out;
  const auto& f = detail::lld_formulas();
  auto mark = [&](std::size_t from, const std::string& set) {
    for (std::size_t i = from; i < out.size(); ++i) out[i].active = c.enabled(set);
  };

  std::size_t start = out.size();
  for (const auto& s : gemaps_series_names()) detail::add_series(out, "gemaps_core", s, mean_std_bank(), f.at(s));
  out.push_back({"voiced_fraction", "gemaps_core", true, "defined F0 frames / all frames"});
  out.push_back({"jitter_local", "gemaps_core", true, "mean |T[i]-T[i-1]| / mean T over within-run consecutive cycle pairs"});
  out.push_back({"shimmer_local", "gemaps_core", true, "mean |A[i]-A[i-1]| / mean A over within-run consecutive cycle pairs"});
  out.push_back({"hnr_db", "gemaps_core", true, "mean of per-frame HNR (dB) over voiced frames"});
  mark(start, "gemaps_core");

  start = out.size();
  for (const auto& s : spectral_series_names(c.acoustic)) {
    std::string formula;
    if (s.starts_with("contrast_b")) formula = detail::contrast_formula(std::stoul(s.substr(10)), c.acoustic.contrast_bands);
    else formula = f.at(s);
    detail::add_series(out, "spectral", s, c.acoustic.bank, formula);
  }
  detail::add_series(out, "spectral", "rms", rms_bank(), f.at("rms"));
  out.push_back({"tempo_bpm", "spectral", true,
                 "argmax over 30-300 BPM of the mean normalized onset autocorrelation (384-frame Hann windows), parabolic refinement"});
  mark(start, "spectral");

  start = out.size();
  const std::vector<std::string> complexity_formulas = {
      "(marker tokens + out-of-dictionary tokens when a dictionary is given) / N",
      "H / log2(V), H = -sum p_w log2 p_w over lowercase token frequencies; NaN when V = 1",
      "tokens ending in a configured suffix / N",
      "(digit tokens + English number words) / N",
      "Brunet's index W = N^(V^-0.165)",
      "Honore's statistic 100*ln(N) / (1 - V1/V); NaN when V1 = V",
      "V / N",
  };
  for (std::size_t i = 0; i < complexity_feature_names().size(); ++i) {
    out.push_back({complexity_feature_names()[i], "complexity", true, complexity_formulas[i]});
  }
  mark(start, "complexity");

  start = out.size();
  for (const auto& name : syntax_feature_names()) {
    const bool rate = name.ends_with("_rate");
    const auto first = name.find('_');
    const std::string family = name.substr(0, first);
    const std::string tag = name.substr(first + 1, name.rfind('_') - first - 1);
    const std::string what = family == "pos" ? "UPOS tag " : family == "xpos" ? "Penn XPOS tag " : "dependency relation ";
    out.push_back({name, "syntax", true,
                   (rate ? "count of tokens with " : "tokens with ") + what + tag + (rate ? " / total tokens" : "")});
  }
  mark(start, "syntax");

  start = out.size();
  out.push_back({kSentimentFeature, "sentiment", true, "mean valence of lexicon-matched lowercase tokens; NaN when none match"});
  mark(start, "sentiment");

  start = out.size();
  for (const auto& name : coherence_feature_names()) {
    std::string formula;
    if (name == "coh_max_phrase_length") formula = "maximum tokens per sentence";
    else if (name == "coh_determiner_rate") formula = "tokens tagged DET (UPOS) or DT/PDT/WDT (XPOS) / all tokens; NaN without tags";
    else {
      const int q = name[5] - '0';
      const bool norm = name.find("_norm_") != std::string::npos;
      const std::string stat = name.substr(name.rfind('_') + 1);
      formula = stat + " of cosine(v_i, v_{i+" + std::to_string(q + 1) + ") over phrase vectors (mean word embedding per sentence)";
      if (norm) formula += ", minus the mean cosine over all phrase pairs";
    }
    out.push_back({name, "coherence", true, formula});
  }
  mark(start, "coherence");
  return out;
}

/// Tab-separated: feature, set, status, formula.
inline std::string render_feature_dictionary(const PipelineConfig& c) {
  std::string out = "# voxmark feature dictionary\n";
  out += "# gemaps_core is a 30-feature voice-quality subset, not the full extended set.\n";
  out += "# Frame statistics ignore NaN frames; stddev uses the population (n) denominator.\n";
  out += "feature\tset\tstatus\tformula\n";
  for (const auto& e : feature_dictionary(c)) {
    out += e.name + "\t" + e.set + "\t" + (e.active ? "active" : "inactive") + "\t" + e.formula + "\n";
  }
  return out;
}

inline void cmd_featdict(const std::filesystem::path& out_path, const PipelineConfig& c) {
  write_atomic(out_path, render_feature_dictionary(c));
}

}  // namespace voxmark::cli

#endif
