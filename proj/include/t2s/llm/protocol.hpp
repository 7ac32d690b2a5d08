#pragma once

#include <string>
#include <string_view>

#include "t2s/common/action_kind.hpp"
#include "t2s/common/result.hpp"

namespace t2s::llm {

struct ActionInvocation {
    ActionKind kind = ActionKind::Stop;
    std::string argument;  // empty for stop

    friend bool operator==(const ActionInvocation&, const ActionInvocation&) = default;
};

/// "kind(argument)", the form the controller is asked to write.
std::string format_invocation(const ActionInvocation& invocation);

struct ControllerDecision {
    std::string thought;
    ActionInvocation action;
};

struct NoActionFound {
    std::string text;
    std::string message;
};

/// Finds the last line that starts (after an optional "Action:" label) with an
/// action name and "(", then takes everything up to the matching ")" by
/// parenthesis depth. The argument may span lines.
Result<ControllerDecision, NoActionFound> parse_controller_output(std::string_view text);

struct NoQueryFound {
    std::string text;
};

/// Pulls the SPARQL query out of an extraction reply, dropping markdown fences
/// and surrounding prose.
Result<std::string, NoQueryFound> extract_sparql_text(std::string_view text);

}  // namespace t2s::llm
