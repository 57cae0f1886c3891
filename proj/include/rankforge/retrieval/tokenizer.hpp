#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rankforge::retrieval {

// Lowercases ASCII letters and splits on every ASCII byte that is not a letter
// or digit. Bytes >= 0x80 are kept inside tokens so UTF-8 words stay whole.
// No stemming, no stopwords.
std::vector<std::string> tokenize(std::string_view text);

}  // namespace rankforge::retrieval
