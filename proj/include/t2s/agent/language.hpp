#pragma once

#include <string>
#include <string_view>

namespace t2s::agent {

/// "es" when the question has an inverted question/exclamation mark or more
/// Spanish than English stopwords; "en" otherwise (including ties).
std::string detect_language(std::string_view question);

}  // namespace t2s::agent
