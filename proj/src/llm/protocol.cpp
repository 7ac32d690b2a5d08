#include "t2s/llm/protocol.hpp"

#include <array>
#include <cctype>
#include <optional>
#include <utility>
#include <vector>

#include "t2s/common/text.hpp"

namespace t2s::llm {

std::string format_invocation(const ActionInvocation& invocation) {
    return std::string(to_string(invocation.kind)) + "(" + invocation.argument + ")";
}

namespace {

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r'; }
bool is_ident(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

std::optional<ActionKind> lookup_action(std::string_view name) {
    const std::string lower = text::to_lower(name);
    if (auto kind = parse_action_kind(lower)) return kind;
    // short names models like to use
    static constexpr std::array<std::pair<std::string_view, ActionKind>, 5> aliases{{
        {"search_entity", ActionKind::SearchEntityByLabel},
        {"search_property", ActionKind::SearchPropertyByLabel},
        {"search_class", ActionKind::SearchClassByLabel},
        {"get_knowledge_graph_entry", ActionKind::GetKnowledgegraphEntry},
        {"get_property_example", ActionKind::GetPropertyExamples},
    }};
    for (const auto& [alias, kind] : aliases) {
        if (alias == lower) return kind;
    }
    return std::nullopt;
}

struct Candidate {
    std::size_t lineStart = 0;
    std::size_t openParen = 0;
    ActionKind kind = ActionKind::Stop;
};

// Does the line at `start` open an action call? Decoration such as "**",
// backticks, list dashes and an "Action:" / "Action 2:" label is skipped.
std::optional<Candidate> match_line(std::string_view text, std::size_t start) {
    auto skip_decoration = [&](std::size_t p) {
        while (p < text.size() && (is_blank(text[p]) || text[p] == '*' || text[p] == '`' || text[p] == '>' ||
                                   text[p] == '-')) {
            ++p;
        }
        return p;
    };
    std::size_t p = skip_decoration(start);
    if (text::starts_with_icase(text.substr(p), "action")) {
        std::size_t q = p + 6;
        while (q < text.size() && (is_blank(text[q]) || std::isdigit(static_cast<unsigned char>(text[q])) != 0)) ++q;
        while (q < text.size() && text[q] == '*') ++q;
        if (q < text.size() && text[q] == ':') p = skip_decoration(q + 1);
    }
    std::size_t end = p;
    while (end < text.size() && is_ident(text[end])) ++end;
    if (end == p) return std::nullopt;
    auto kind = lookup_action(text.substr(p, end - p));
    if (!kind) return std::nullopt;
    while (end < text.size() && is_blank(text[end])) ++end;
    if (end >= text.size() || text[end] != '(') return std::nullopt;
    return Candidate{start, end, *kind};
}

std::string strip_wrapping(std::string arg) {
    arg = text::trim(arg);
    if (arg.rfind("```", 0) == 0) {
        const auto nl = arg.find('\n');
        arg = nl == std::string::npos ? arg.substr(3) : arg.substr(nl + 1);
        if (arg.size() >= 3 && arg.compare(arg.size() - 3, 3, "```") == 0) arg.resize(arg.size() - 3);
        arg = text::trim(arg);
    }
    if (arg.size() >= 2) {
        const char q = arg.front();
        if ((q == '"' || q == '\'' || q == '`') && arg.back() == q &&
            arg.find(q, 1) == arg.size() - 1) {
            arg = arg.substr(1, arg.size() - 2);
        }
    }
    return arg;
}

std::string strip_thought_label(std::string thought) {
    thought = text::trim(thought);
    std::size_t p = 0;
    while (p < thought.size() && thought[p] == '*') ++p;
    if (text::starts_with_icase(std::string_view(thought).substr(p), "thought")) {
        std::size_t q = p + 7;
        while (q < thought.size() && (is_blank(thought[q]) || thought[q] == '*')) ++q;
        if (q < thought.size() && thought[q] == ':') {
            ++q;
            while (q < thought.size() && thought[q] == '*') ++q;
            thought = text::trim(std::string_view(thought).substr(q));
        }
    }
    return thought;
}

}  // namespace

Result<ControllerDecision, NoActionFound> parse_controller_output(std::string_view text) {
    std::optional<Candidate> last;
    for (std::size_t lineStart = 0; lineStart <= text.size();) {
        if (auto c = match_line(text, lineStart)) last = c;
        const auto nl = text.find('\n', lineStart);
        if (nl == std::string_view::npos) break;
        lineStart = nl + 1;
    }
    if (!last) {
        return NoActionFound{std::string(text), "no line starts with one of the seven action names followed by '('"};
    }

    std::size_t close = std::string_view::npos;
    int depth = 0;
    for (std::size_t i = last->openParen; i < text.size(); ++i) {
        if (text[i] == '(') {
            ++depth;
        } else if (text[i] == ')' && --depth == 0) {
            close = i;
            break;
        }
    }
    if (close == std::string_view::npos) {
        // unbalanced, typically a ")" inside a string literal; take the last one
        close = text.rfind(')');
        if (close == std::string_view::npos || close < last->openParen) {
            return NoActionFound{std::string(text), "the action call has no closing ')'"};
        }
    }

    ControllerDecision decision;
    decision.thought = strip_thought_label(std::string(text.substr(0, last->lineStart)));
    decision.action.kind = last->kind;
    if (last->kind != ActionKind::Stop) {
        decision.action.argument = strip_wrapping(std::string(text.substr(last->openParen + 1, close - last->openParen - 1)));
    }
    return decision;
}

namespace {

bool word_at(std::string_view s, std::size_t pos, std::string_view word) {
    if (pos + word.size() > s.size()) return false;
    if (!text::equals_icase(s.substr(pos, word.size()), word)) return false;
    return pos + word.size() == s.size() || !is_ident(s[pos + word.size()]);
}

std::size_t skip_ws(std::string_view s, std::size_t p) {
    while (p < s.size() && std::isspace(static_cast<unsigned char>(s[p])) != 0) ++p;
    return p;
}

// True if a query form (or prologue) keyword at `pos` looks like SPARQL rather
// than English. "Select the entity..." must not match.
bool query_starts_at(std::string_view s, std::size_t pos) {
    if (pos > 0 && (is_ident(s[pos - 1]) || s[pos - 1] == ':' || s[pos - 1] == '?')) return false;
    auto next = [&](std::size_t len) {
        const std::size_t p = skip_ws(s, pos + len);
        return p < s.size() ? s[p] : '\0';
    };
    auto next_word = [&](std::size_t len, std::string_view w) { return word_at(s, skip_ws(s, pos + len), w); };

    if (word_at(s, pos, "select")) {
        const char c = next(6);
        return c == '?' || c == '$' || c == '*' || c == '(' || next_word(6, "distinct") || next_word(6, "reduced");
    }
    if (word_at(s, pos, "ask")) return next(3) == '{' || next_word(3, "where") || next_word(3, "from");
    if (word_at(s, pos, "construct")) return next(9) == '{' || next_word(9, "where");
    if (word_at(s, pos, "describe")) {
        const char c = next(8);
        return c == '?' || c == '$' || c == '<' || c == '*';
    }
    if (word_at(s, pos, "base")) return next(4) == '<';
    if (word_at(s, pos, "prefix")) {
        std::size_t p = skip_ws(s, pos + 6);
        while (p < s.size() && (is_ident(s[p]) || s[p] == '-' || s[p] == '.')) ++p;
        if (p >= s.size() || s[p] != ':') return false;
        return skip_ws(s, p + 1) < s.size() && s[skip_ws(s, p + 1)] == '<';
    }
    return false;
}

std::optional<std::size_t> find_query_start(std::string_view s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
        if ((c == 's' || c == 'a' || c == 'c' || c == 'd' || c == 'b' || c == 'p') && query_starts_at(s, i)) return i;
    }
    return std::nullopt;
}

// Outside fences the query ends at the first blank line after its braces close.
std::size_t unfenced_end(std::string_view s, std::size_t start) {
    int depth = 0;
    bool closed = false;
    for (std::size_t i = start; i < s.size(); ++i) {
        if (s[i] == '{') {
            ++depth;
        } else if (s[i] == '}') {
            if (--depth <= 0) {
                depth = 0;
                closed = true;
            }
        } else if (s[i] == '\n' && closed && depth == 0) {
            std::size_t p = i + 1;
            while (p < s.size() && is_blank(s[p])) ++p;
            if (p >= s.size() || s[p] == '\n') return i;
        }
    }
    return s.size();
}

struct Block {
    std::size_t begin;
    std::size_t end;
};

std::vector<Block> fenced_blocks(std::string_view s) {
    std::vector<Block> blocks;
    std::optional<std::size_t> open;
    for (std::size_t lineStart = 0; lineStart < s.size();) {
        auto nl = s.find('\n', lineStart);
        const std::size_t lineEnd = nl == std::string_view::npos ? s.size() : nl;
        const std::string line = text::trim(s.substr(lineStart, lineEnd - lineStart));
        if (line.rfind("```", 0) == 0) {
            if (open) {
                blocks.push_back({*open, lineStart});
                open.reset();
            } else {
                open = nl == std::string_view::npos ? s.size() : nl + 1;
            }
        }
        if (nl == std::string_view::npos) break;
        lineStart = nl + 1;
    }
    if (open) blocks.push_back({*open, s.size()});  // reply cut off inside a fence
    return blocks;
}

}  // namespace

Result<std::string, NoQueryFound> extract_sparql_text(std::string_view text) {
    for (const auto& block : fenced_blocks(text)) {
        const auto body = text.substr(block.begin, block.end - block.begin);
        if (auto start = find_query_start(body)) {
            auto query = text::trim(body.substr(*start));
            if (!query.empty()) return query;
        }
    }
    if (auto start = find_query_start(text)) {
        const std::size_t end = unfenced_end(text, *start);
        std::string query = text::trim(text.substr(*start, end - *start));
        // a stray closing fence can trail an otherwise unfenced answer
        if (query.size() >= 3 && query.compare(query.size() - 3, 3, "```") == 0) {
            query = text::trim(std::string_view(query).substr(0, query.size() - 3));
        }
        if (!query.empty()) return query;
    }
    return NoQueryFound{std::string(text)};
}

}  // namespace t2s::llm
