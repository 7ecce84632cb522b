#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "hybridtag/core.hpp"

namespace hybridtag {

enum class RuleAction { Remove, Select };

// Grammar rules encode reliable linguistic constraints; heuristic rules are
// riskier tie-breakers that only run when explicitly enabled.
enum class RuleTier { Grammar, Heuristic };

// One context condition: the cohort at `position` relative to the target
// must (or, with negate, must not) have a reading carrying all of `tags`.
// A careful test additionally requires that cohort to be unambiguous.
// Positions outside the sentence fail the test regardless of flags.
struct ContextTest {
    int position = 0;
    bool careful = false;
    bool negate = false;
    std::vector<Tag> tags;
};

struct ConstraintRule {
    RuleAction action = RuleAction::Remove;
    std::vector<Tag> target;
    std::vector<ContextTest> tests;
    RuleTier tier = RuleTier::Grammar;
    std::size_t line = 0;
};

// Rules in application order: the grammar tier first, then heuristics, each
// tier in file order.
struct Grammar {
    std::vector<ConstraintRule> rules;
};

// Rule file: CONSTRAINTS and HEURISTICS section headers followed by rules of
// the form "ACTION (TAGS) IF (OFFSET[C] [NOT] TAGS) ... ;" with # comments.
Grammar parse_grammar(std::istream& in);
Grammar parse_grammar_text(std::string_view text);
void serialize_grammar(const Grammar& grammar, std::ostream& out);
std::string serialize_grammar(const Grammar& grammar);

// True iff every context test of the rule passes at the given cohort.
bool rule_applies(const ConstraintRule& rule, const Sentence& sentence,
                  std::size_t index);

struct TraceEvent {
    std::size_t rule_line = 0;
    std::size_t sentence_index = 0;
    std::size_t cohort_index = 0;
    std::vector<Reading> removed;
};

using TraceSink = std::function<void(const TraceEvent&)>;

// Applies the grammar tier to a fixpoint, then, when max_tier is Heuristic,
// all rules to a fixpoint. A rule application never empties a cohort: REMOVE
// whose target matches every reading is skipped, and SELECT keeps the
// matching readings only when at least one matches. Readings only ever
// shrink, the result is stable under re-application, and running with the
// heuristic tier can only remove more than the grammar tier alone.
Sentence disambiguate(const Sentence& sentence, const Grammar& grammar,
                      RuleTier max_tier, const TraceSink& trace = nullptr,
                      std::size_t sentence_index = 0);

}  // namespace hybridtag
