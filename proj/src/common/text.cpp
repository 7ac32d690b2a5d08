#include "t2s/common/text.hpp"

#include <locale.h>
#include <wctype.h>

#include <algorithm>
#include <cctype>

namespace t2s::text {

namespace {

class Utf8Locale {
public:
    Utf8Locale() {
        handle_ = newlocale(LC_CTYPE_MASK, "C.UTF-8", static_cast<locale_t>(nullptr));
        if (handle_ == static_cast<locale_t>(nullptr)) {
            handle_ = newlocale(LC_CTYPE_MASK, "en_US.UTF-8", static_cast<locale_t>(nullptr));
        }
    }
    ~Utf8Locale() {
        if (handle_ != static_cast<locale_t>(nullptr)) freelocale(handle_);
    }
    Utf8Locale(const Utf8Locale&) = delete;
    Utf8Locale& operator=(const Utf8Locale&) = delete;

    bool is_alnum(char32_t cp) const {
        if (cp < 0x80) return std::isalnum(static_cast<unsigned char>(cp)) != 0;
        if (handle_ == static_cast<locale_t>(nullptr)) return true;
        return iswalnum_l(static_cast<wint_t>(cp), handle_) != 0;
    }

    char32_t lower(char32_t cp) const {
        if (cp < 0x80) return static_cast<char32_t>(std::tolower(static_cast<int>(cp)));
        if (handle_ == static_cast<locale_t>(nullptr)) return cp;
        return static_cast<char32_t>(towlower_l(static_cast<wint_t>(cp), handle_));
    }

    bool is_space(char32_t cp) const {
        if (cp < 0x80) return std::isspace(static_cast<unsigned char>(cp)) != 0;
        if (handle_ == static_cast<locale_t>(nullptr)) return false;
        return iswspace_l(static_cast<wint_t>(cp), handle_) != 0;
    }

private:
    locale_t handle_;
};

const Utf8Locale& utf8_locale() {
    static const Utf8Locale locale;
    return locale;
}

// Decodes one code point at `pos`, advancing it. Invalid bytes decode as
// U+FFFD and consume one byte.
char32_t decode(std::string_view s, std::size_t& pos) {
    const auto lead = static_cast<unsigned char>(s[pos]);
    std::size_t len = 1;
    char32_t cp = 0xFFFD;
    if (lead < 0x80) {
        cp = lead;
    } else if ((lead & 0xE0) == 0xC0) {
        len = 2;
        cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
        len = 3;
        cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
        len = 4;
        cp = lead & 0x07;
    } else {
        ++pos;
        return 0xFFFD;
    }
    if (pos + len > s.size()) {
        ++pos;
        return 0xFFFD;
    }
    for (std::size_t i = 1; i < len; ++i) {
        const auto cont = static_cast<unsigned char>(s[pos + i]);
        if ((cont & 0xC0) != 0x80) {
            ++pos;
            return 0xFFFD;
        }
        cp = (cp << 6) | (cont & 0x3F);
    }
    pos += len;
    return cp;
}

void encode(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool ascii_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::vector<std::string> tokenize(std::string_view utf8) {
    const auto& loc = utf8_locale();
    std::vector<std::string> tokens;
    std::string current;
    std::size_t pos = 0;
    while (pos < utf8.size()) {
        const char32_t cp = decode(utf8, pos);
        if (cp != 0xFFFD && loc.is_alnum(cp)) {
            encode(loc.lower(cp), current);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::string to_lower(std::string_view utf8) {
    const auto& loc = utf8_locale();
    std::string out;
    out.reserve(utf8.size());
    std::size_t pos = 0;
    while (pos < utf8.size()) encode(loc.lower(decode(utf8, pos)), out);
    return out;
}

std::string trim(std::string_view s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && ascii_space(s[begin])) ++begin;
    while (end > begin && ascii_space(s[end - 1])) --end;
    return std::string(s.substr(begin, end - begin));
}

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pendingSpace = false;
    for (char c : s) {
        if (ascii_space(c)) {
            pendingSpace = !out.empty();
            continue;
        }
        if (pendingSpace) out.push_back(' ');
        pendingSpace = false;
        out.push_back(c);
    }
    return out;
}

bool starts_with_icase(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    return equals_icase(s.substr(0, prefix.size()), prefix);
}

bool equals_icase(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

std::string_view utf8_prefix(std::string_view s, std::size_t maxBytes) {
    if (s.size() <= maxBytes) return s;
    std::size_t cut = maxBytes;
    while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) --cut;
    return s.substr(0, cut);
}

std::string iri_local_name(std::string_view iri) {
    const auto cut = iri.find_last_of("#/:");
    if (cut == std::string_view::npos || cut + 1 >= iri.size()) {
        // Trailing separator: fall back to the previous segment.
        const auto trimmed = iri.substr(0, iri.empty() ? 0 : iri.size() - 1);
        const auto prev = trimmed.find_last_of("#/:");
        return std::string(prev == std::string_view::npos ? trimmed : trimmed.substr(prev + 1));
    }
    return std::string(iri.substr(cut + 1));
}

std::string split_identifier(std::string_view name) {
    std::string out;
    out.reserve(name.size() + 8);
    for (std::size_t i = 0; i < name.size(); ++i) {
        const char c = name[i];
        if (c == '_' || c == '-') {
            if (!out.empty() && out.back() != ' ') out.push_back(' ');
            continue;
        }
        const bool upper = std::isupper(static_cast<unsigned char>(c)) != 0;
        if (upper && i > 0 && std::islower(static_cast<unsigned char>(name[i - 1])) &&
            !out.empty() && out.back() != ' ') {
            out.push_back(' ');
        }
        out.push_back(c);
    }
    return trim(out);
}

}  // namespace t2s::text
