#include "t2s/agent/language.hpp"

#include <algorithm>
#include <array>

#include "t2s/common/text.hpp"

namespace t2s::agent {

namespace {

// Words that are common in one language and rare in the other. Ambiguous
// ones ("a", "no", "me", "se") are left out of both lists.
constexpr std::array<std::string_view, 48> kEnglish{
    "the",   "is",    "are",   "was",  "were", "of",    "and",   "in",   "to",   "an",    "what",  "who",
    "whom",  "which", "how",   "many", "much", "does",  "did",   "do",   "for",  "with",  "by",    "on",
    "at",    "from",  "that",  "this", "when", "where", "has",   "have", "had",  "list",  "give",  "all",
    "there", "their", "its",   "it",   "be",   "been",  "than",  "most", "name", "about", "whose", "any",
};

constexpr std::array<std::string_view, 48> kSpanish{
    "el",    "la",     "los",    "las",   "de",     "del",     "y",      "en",     "que",   "qué",   "es",   "son",
    "fue",   "fueron", "un",     "una",   "por",    "con",     "para",   "cuál",   "cuáles", "sobre", "cuántos",
    "cuántas", "cuánto", "quién", "quiénes", "dónde", "cuándo", "cómo",  "su",     "sus",   "al",    "lo",   "como",
    "está",  "están",  "tiene",  "tienen", "hay",   "nació",   "dame",   "todos",  "todas", "cual",  "quien", "donde",
};

}  // namespace

std::string detect_language(std::string_view question) {
    if (question.find("¿") != std::string_view::npos || question.find("¡") != std::string_view::npos) return "es";
    std::size_t en = 0;
    std::size_t es = 0;
    for (const auto& token : text::tokenize(question)) {
        if (std::find(kEnglish.begin(), kEnglish.end(), token) != kEnglish.end()) ++en;
        if (std::find(kSpanish.begin(), kSpanish.end(), token) != kSpanish.end()) ++es;
    }
    return es > en ? "es" : "en";
}

}  // namespace t2s::agent
