#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "t2s/llm/chat.hpp"

namespace t2s::llm {

struct HistoryEntry {
    std::string thought;
    std::string action;  // rendered invocation, e.g. "execute_sparql(ASK {...})"
    std::string observation;
};

/// Embedded template text by name ("controller.v1", ...). Throws
/// std::out_of_range for unknown names.
const std::string& prompt_template(std::string_view name);

/// Single pass {{key}} substitution. Unknown keys are left in place and
/// substituted text is never rescanned.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

std::string render_history(const std::vector<HistoryEntry>& history);

std::vector<ChatMessage> render_controller_prompt(std::string_view dataset, std::string_view question,
                                                  const std::vector<HistoryEntry>& history,
                                                  std::string_view language = "en");

std::vector<ChatMessage> render_extraction_prompt(std::string_view dataset, std::string_view question,
                                                  const std::vector<HistoryEntry>& history);

}  // namespace t2s::llm
