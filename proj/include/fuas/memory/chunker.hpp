#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fuas::memory {

std::vector<std::string> tokenize(std::string_view text);

struct ChunkSpan {
  std::size_t begin = 0;  // token index
  std::size_t end = 0;    // one past the last token
};

/// Token windows of `window` with stride window - overlap; the last one may be short.
/// Throws InvalidValue unless window > overlap.
std::vector<ChunkSpan> chunk_spans(std::size_t n_tokens, std::size_t window = 512, std::size_t overlap = 50);

/// Chunk texts, tokens re-joined with single spaces.
std::vector<std::string> chunk(std::string_view text, std::size_t window = 512, std::size_t overlap = 50);

}  // namespace fuas::memory
