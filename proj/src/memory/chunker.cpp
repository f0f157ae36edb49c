#include "fuas/memory/chunker.hpp"

#include "fuas/core/error.hpp"

namespace fuas::memory {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  auto space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (i < text.size()) {
    while (i < text.size() && space(text[i])) ++i;
    const std::size_t b = i;
    while (i < text.size() && !space(text[i])) ++i;
    if (i > b) out.emplace_back(text.substr(b, i - b));
  }
  return out;
}

std::vector<ChunkSpan> chunk_spans(std::size_t n_tokens, std::size_t window, std::size_t overlap) {
  if (window <= overlap) throw Error(ErrorCode::InvalidValue, "chunk window must exceed overlap");
  std::vector<ChunkSpan> out;
  const std::size_t stride = window - overlap;
  for (std::size_t start = 0; start < n_tokens; start += stride) {
    out.push_back({start, std::min(start + window, n_tokens)});
    if (start + window >= n_tokens) break;
  }
  return out;
}

std::vector<std::string> chunk(std::string_view text, std::size_t window, std::size_t overlap) {
  const auto tokens = tokenize(text);
  std::vector<std::string> out;
  for (const auto& span : chunk_spans(tokens.size(), window, overlap)) {
    std::string s;
    for (std::size_t t = span.begin; t < span.end; ++t) {
      if (t > span.begin) s += ' ';
      s += tokens[t];
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace fuas::memory
