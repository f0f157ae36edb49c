#pragma once

#include <array>
#include <string_view>

namespace fuas::strategy {

/// F1 scores over whitespace tokens.
struct RougeScores {
  double r1 = 0;
  double r2 = 0;
  double rl = 0;
};

RougeScores rouge(std::string_view ref, std::string_view hyp);

struct BleuScores {
  std::array<double, 4> b{};  // b[k-1] = BLEU-k
  double brevity_penalty = 0;
};

/// Clipped n-gram precision with brevity penalty; zero match counts for n >= 2
/// get add-one smoothing. Orders above max_n are left at 0.
BleuScores bleu(std::string_view ref, std::string_view hyp, int max_n = 4);

}  // namespace fuas::strategy
