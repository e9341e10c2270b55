#include "candlelang/corpus.hpp"

#include <stdexcept>
#include <string>

namespace candlelang {

SentenceMatrix::SentenceMatrix(std::vector<WordId> words, std::size_t sentence_length)
    : words_(std::move(words)), length_(sentence_length) {
    if (length_ == 0) throw std::invalid_argument("sentence length must be at least 1");
    if (words_.size() < length_) {
        throw std::invalid_argument("word sequence of length " + std::to_string(words_.size()) +
                                    " is shorter than sentence length " + std::to_string(length_));
    }
}

SentenceMatrix build_sentences(std::span<const WordId> words, std::size_t l_s) {
    return SentenceMatrix(std::vector<WordId>(words.begin(), words.end()), l_s);
}

}  // namespace candlelang
