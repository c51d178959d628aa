#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace recoding::engine {

// priming + P + Y + d, with one space inserted before Y and before d when
// the text assembled so far is non-empty and does not end in whitespace.
std::string construct_input(std::string_view priming, std::string_view prompt,
                            std::string_view generated, std::string_view diverting);

struct SentenceSplit {
  std::string sentence;
  std::string rest;
};

// Cuts at the first sentence boundary: '.', '!' or '?' followed by
// whitespace or end of text (closing quotes/brackets stay attached; a
// directly following newline is absorbed), or a newline that ends a
// non-blank line. A "12." list marker is not a boundary. Without a boundary
// the whole text is the sentence.
SentenceSplit split_sentence(std::string_view text);

// Repeated split_sentence until the text is consumed.
std::vector<std::string> split_sentences(std::string_view text);

}  // namespace recoding::engine
