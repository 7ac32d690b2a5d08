#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace t2s {

/// The seven controller actions. The enumerator order is the canonical column
/// order used by every analytics table.
enum class ActionKind {
    GetKnowledgegraphEntry,
    SearchEntityByLabel,
    SearchPropertyByLabel,
    SearchClassByLabel,
    GetPropertyExamples,
    ExecuteSparql,
    Stop,
};

inline constexpr std::array<ActionKind, 7> kAllActionKinds = {
    ActionKind::GetKnowledgegraphEntry, ActionKind::SearchEntityByLabel,
    ActionKind::SearchPropertyByLabel,  ActionKind::SearchClassByLabel,
    ActionKind::GetPropertyExamples,    ActionKind::ExecuteSparql,
    ActionKind::Stop,
};

constexpr std::string_view to_string(ActionKind kind) {
    switch (kind) {
        case ActionKind::GetKnowledgegraphEntry: return "get_knowledgegraph_entry";
        case ActionKind::SearchEntityByLabel: return "search_entity_by_label";
        case ActionKind::SearchPropertyByLabel: return "search_property_by_label";
        case ActionKind::SearchClassByLabel: return "search_class_by_label";
        case ActionKind::GetPropertyExamples: return "get_property_examples";
        case ActionKind::ExecuteSparql: return "execute_sparql";
        case ActionKind::Stop: return "stop";
    }
    return "";
}

constexpr std::size_t index_of(ActionKind kind) { return static_cast<std::size_t>(kind); }

/// Exact (case-sensitive) lookup of a canonical action name.
std::optional<ActionKind> parse_action_kind(std::string_view name);

}  // namespace t2s
