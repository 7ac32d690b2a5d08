#include "t2s/common/action_kind.hpp"

namespace t2s {

std::optional<ActionKind> parse_action_kind(std::string_view name) {
    for (ActionKind kind : kAllActionKinds) {
        if (to_string(kind) == name) return kind;
    }
    return std::nullopt;
}

}  // namespace t2s
