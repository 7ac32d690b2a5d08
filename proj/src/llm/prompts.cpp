#include "t2s/llm/prompts.hpp"

#include <stdexcept>

namespace t2s::llm {

// generated from prompts/*.txt at configure time
const std::map<std::string, std::string, std::less<>>& embedded_prompts();

const std::string& prompt_template(std::string_view name) {
    const auto& all = embedded_prompts();
    auto it = all.find(name);
    if (it == all.end()) throw std::out_of_range("no prompt template named " + std::string(name));
    return it->second;
}

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        const auto open = tmpl.find("{{", pos);
        if (open == std::string_view::npos) break;
        const auto close = tmpl.find("}}", open + 2);
        if (close == std::string_view::npos) break;
        out.append(tmpl.substr(pos, open - pos));
        const std::string key(tmpl.substr(open + 2, close - open - 2));
        auto it = values.find(key);
        if (it != values.end()) {
            out += it->second;
        } else {
            out.append(tmpl.substr(open, close + 2 - open));
        }
        pos = close + 2;
    }
    out.append(tmpl.substr(pos));
    return out;
}

std::string render_history(const std::vector<HistoryEntry>& history) {
    std::string out;
    for (std::size_t i = 0; i < history.size(); ++i) {
        const auto& h = history[i];
        out += "Step " + std::to_string(i + 1) + "\n";
        out += "Thought: " + h.thought + "\n";
        out += "Action: " + h.action + "\n";
        out += "Observation:\n" + h.observation;
        if (h.observation.empty() || h.observation.back() != '\n') out += '\n';
        out += '\n';
    }
    return out;
}

std::vector<ChatMessage> render_controller_prompt(std::string_view dataset, std::string_view question,
                                                  const std::vector<HistoryEntry>& history,
                                                  std::string_view language) {
    const std::map<std::string, std::string> values{{"dataset", std::string(dataset)},
                                                    {"question", std::string(question)},
                                                    {"language", std::string(language)},
                                                    {"history", render_history(history)}};
    return {
        {Role::System, render_template(prompt_template("controller.v1"), values)},
        {Role::User, render_template(prompt_template("controller_turn.v1"), values)},
    };
}

std::vector<ChatMessage> render_extraction_prompt(std::string_view dataset, std::string_view question,
                                                  const std::vector<HistoryEntry>& history) {
    const std::map<std::string, std::string> values{{"dataset", std::string(dataset)},
                                                    {"question", std::string(question)},
                                                    {"history", render_history(history)}};
    return {
        {Role::System, render_template(prompt_template("extraction.v1"), values)},
        {Role::User, render_template(prompt_template("extraction_turn.v1"), values)},
    };
}

}  // namespace t2s::llm
