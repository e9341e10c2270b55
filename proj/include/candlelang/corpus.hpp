#pragma once

#include "candlelang/lexicon.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace candlelang {

/// Rolling stride-1 windows of length l_s over a word sequence. Row r is the
/// subsequence [r, r + l_s).
class SentenceMatrix {
public:
    SentenceMatrix() = default;
    SentenceMatrix(std::vector<WordId> words, std::size_t sentence_length);

    std::size_t sentence_length() const noexcept { return length_; }
    std::size_t sentence_count() const noexcept { return words_.size() - length_ + 1; }
    std::span<const WordId> sentence(std::size_t r) const { return {words_.data() + r, length_}; }
    std::span<const WordId> words() const noexcept { return words_; }

private:
    std::vector<WordId> words_;
    std::size_t length_ = 1;
};

/// Throws std::invalid_argument when l_s is 0 or exceeds the sequence length.
SentenceMatrix build_sentences(std::span<const WordId> words, std::size_t l_s);

}  // namespace candlelang
