#include "fuas/dosemodel/roc.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>

#include "fuas/core/error.hpp"

namespace fuas::dose {

namespace {

struct Counts {
  std::uint64_t pos = 0, neg = 0;
};

Counts check(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw Error(ErrorCode::InvalidValue, "scores and labels differ in length");
  Counts c;
  for (int l : labels) (l != 0 ? c.pos : c.neg) += 1;
  if (c.pos == 0 || c.neg == 0) throw Error(ErrorCode::SingleClass, "both classes must be present");
  return c;
}

}  // namespace

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  const Counts c = check(scores, labels);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Walk groups of equal score in ascending order. Each positive beats every
  // negative seen in earlier groups and ties with negatives in its own group.
  std::uint64_t twice_wins = 0, neg_below = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::uint64_t pos_here = 0, neg_here = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] != 0 ? pos_here : neg_here) += 1;
      ++j;
    }
    twice_wins += pos_here * (2 * neg_below + neg_here);
    neg_below += neg_here;
    i = j;
  }
  return static_cast<double>(twice_wins) / (2.0 * static_cast<double>(c.pos) * static_cast<double>(c.neg));
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const int> labels) {
  const Counts c = check(scores, labels);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<RocPoint> out{{scores[order[0]] + 1.0, 0.0, 0.0}};
  std::uint64_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] != 0 ? tp : fp) += 1;
      ++j;
    }
    out.push_back({scores[order[i]], static_cast<double>(tp) / static_cast<double>(c.pos),
                   static_cast<double>(fp) / static_cast<double>(c.neg)});
    i = j;
  }
  return out;
}

}  // namespace fuas::dose
