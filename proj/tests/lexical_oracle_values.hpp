// Generated by tests/oracles/lexical_oracle.py. Column order follows complexity_feature_names().
#pragma once

#include <array>
#include <optional>
#include <string>
#include <unordered_set>

#include "voxmark/series.hpp"

namespace voxmark::testing {

struct LexicalCase {
  const char* text;
  std::optional<std::unordered_set<std::string>> dictionary;
  std::array<double, 7> expected;
};

inline const std::array<LexicalCase, 10>& lexical_cases() {
  static const std::array<LexicalCase, 10> cases = {{
      {"a b c d", std::nullopt,
       {0.0, 1.0, 0.0, 0.0, 3.0127333051006895, kNaN, 1.0}},
      {"The cat sat. The cat ran!", std::nullopt,
       {0.0, 0.9591479170272447, 0.0, 0.0, 4.159563029973616, 358.351893845611, 0.6666666666666666}},
      {"one 2 three cats", std::nullopt,
       {0.0, 1.0, 0.0, 0.75, 3.0127333051006895, kNaN, 1.0}},
      {"uh xxx okay xxx [inaudible] well", std::nullopt,
       {0.5, 0.9697238998682473, 0.0, 0.0, 3.950660217403698, 895.8797346140277, 0.8333333333333334}},
      {"Happiness is a movement of kindness. Kindness is timeless, careful and able!", std::nullopt,
       {0.0, 0.9788379141596311, 0.5833333333333334, 0.0, 5.470973657829771, 1242.4533248940004, 0.8333333333333334}},
      {"I saw 12 dogs and 3.5 cats? Twenty birds flew away quickly.", std::nullopt,
       {0.0, 1.0, 0.08333333333333333, 0.25, 5.202259720982909, kNaN, 1.0}},
      {"the the the the", std::nullopt,
       {0.0, kNaN, 0.0, 0.0, 4.0, 138.62943611198907, 0.25}},
      {"We went to the market. The market was closed. We went home.", std::nullopt,
       {0.0, 0.972765278018163, 0.0, 0.0, 5.831035103343042, 496.98132995760005, 0.6666666666666666}},
      {"zebra quietly ate grass near the river bank", std::unordered_set<std::string>{"ate", "grass", "near", "river", "the", "zebra"},
       {0.25, 1.0, 0.125, 0.0, 4.373186982084907, kNaN, 1.0}},
      {"Honestly the situation became hopeless. Nobody could explain the confusion, and the committee lost its credibility entirely.", std::nullopt,
       {0.0, 0.9746276439625041, 0.29411764705882354, 0.0, 6.124367626821568, 4249.820016084325, 0.8823529411764706}},
  }};
  return cases;
}

inline constexpr double kBrunetHundredFifty = 11.189676933375944;

}  // namespace voxmark::testing
