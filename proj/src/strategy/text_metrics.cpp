#include "fuas/strategy/text_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "fuas/core/error.hpp"
#include "fuas/memory/chunker.hpp"

namespace fuas::strategy {

namespace {

using Tokens = std::vector<std::string>;
using Counts = std::map<std::vector<std::string>, std::size_t>;

Counts ngrams(const Tokens& t, std::size_t n) {
  Counts c;
  for (std::size_t i = 0; i + n <= t.size(); ++i) ++c[Tokens(t.begin() + i, t.begin() + i + n)];
  return c;
}

std::size_t total(const Counts& c) {
  std::size_t s = 0;
  for (const auto& [g, k] : c) s += k;
  return s;
}

std::size_t clipped_overlap(const Counts& ref, const Counts& hyp) {
  std::size_t s = 0;
  for (const auto& [g, k] : hyp)
    if (auto it = ref.find(g); it != ref.end()) s += std::min(k, it->second);
  return s;
}

double f1(double overlap, double n_hyp, double n_ref) {
  if (overlap == 0) return 0;
  const double p = overlap / n_hyp, r = overlap / n_ref;
  return 2 * p * r / (p + r);
}

double rouge_n(const Tokens& ref, const Tokens& hyp, std::size_t n) {
  const Counts cr = ngrams(ref, n), ch = ngrams(hyp, n);
  const std::size_t tr = total(cr), th = total(ch);
  if (tr == 0 && th == 0) return ref == hyp ? 1.0 : 0.0;
  if (tr == 0 || th == 0) return 0;
  return f1(static_cast<double>(clipped_overlap(cr, ch)), static_cast<double>(th), static_cast<double>(tr));
}

std::size_t lcs(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

RougeScores rouge(std::string_view ref_text, std::string_view hyp_text) {
  const Tokens ref = memory::tokenize(ref_text), hyp = memory::tokenize(hyp_text);
  if (ref.empty() && hyp.empty()) return {1, 1, 1};
  if (ref.empty() || hyp.empty()) return {0, 0, 0};
  RougeScores s;
  s.r1 = rouge_n(ref, hyp, 1);
  s.r2 = rouge_n(ref, hyp, 2);
  s.rl = f1(static_cast<double>(lcs(ref, hyp)), static_cast<double>(hyp.size()), static_cast<double>(ref.size()));
  return s;
}

BleuScores bleu(std::string_view ref_text, std::string_view hyp_text, int max_n) {
  if (max_n < 1 || max_n > 4) throw Error(ErrorCode::InvalidValue, "max_n must be in 1..4");
  const Tokens ref = memory::tokenize(ref_text), hyp = memory::tokenize(hyp_text);
  BleuScores s;
  if (ref.empty() && hyp.empty()) {
    s.brevity_penalty = 1;
    for (int k = 0; k < max_n; ++k) s.b[k] = 1;
    return s;
  }
  if (ref.empty() || hyp.empty()) return s;

  const double c = static_cast<double>(hyp.size()), r = static_cast<double>(ref.size());
  s.brevity_penalty = c > r ? 1.0 : std::exp(1.0 - r / c);
  double log_sum = 0;
  bool zero = false;
  for (int n = 1; n <= max_n; ++n) {
    const Counts ch = ngrams(hyp, n);
    double matches = static_cast<double>(clipped_overlap(ngrams(ref, n), ch));
    double count = static_cast<double>(total(ch));
    if (n >= 2 && matches == 0) {
      matches += 1;
      count += 1;
    }
    if (matches == 0) zero = true;
    else log_sum += std::log(matches / count);
    s.b[n - 1] = zero ? 0.0 : s.brevity_penalty * std::exp(log_sum / n);
  }
  return s;
}

}  // namespace fuas::strategy
