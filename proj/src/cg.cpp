#include "hybridtag/cg.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

namespace hybridtag {

namespace {

struct GrammarToken {
    std::string text;
    std::size_t line;
};

std::vector<GrammarToken> lex_grammar(std::istream& in) {
    std::vector<GrammarToken> tokens;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::size_t i = 0;
        while (i < line.size()) {
            unsigned char c = static_cast<unsigned char>(line[i]);
            if (std::isspace(c)) {
                ++i;
                continue;
            }
            if (c == '(' || c == ')' || c == ';') {
                tokens.push_back({std::string(1, line[i]), lineno});
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < line.size()) {
                unsigned char d = static_cast<unsigned char>(line[j]);
                if (std::isspace(d) || d == '(' || d == ')' || d == ';') break;
                ++j;
            }
            tokens.push_back({line.substr(i, j - i), lineno});
            i = j;
        }
    }
    return tokens;
}

class GrammarParser {
public:
    explicit GrammarParser(std::vector<GrammarToken> tokens)
        : tokens_(std::move(tokens)) {}

    Grammar parse() {
        std::vector<ConstraintRule> grammar_rules;
        std::vector<ConstraintRule> heuristic_rules;
        RuleTier tier = RuleTier::Grammar;
        while (!at_end()) {
            const GrammarToken& head = peek();
            if (head.text == "CONSTRAINTS") {
                tier = RuleTier::Grammar;
                advance();
            } else if (head.text == "HEURISTICS") {
                tier = RuleTier::Heuristic;
                advance();
            } else {
                ConstraintRule rule = parse_rule(tier);
                (tier == RuleTier::Grammar ? grammar_rules : heuristic_rules)
                    .push_back(std::move(rule));
            }
        }
        Grammar grammar;
        grammar.rules = std::move(grammar_rules);
        grammar.rules.insert(grammar.rules.end(),
                             std::make_move_iterator(heuristic_rules.begin()),
                             std::make_move_iterator(heuristic_rules.end()));
        return grammar;
    }

private:
    bool at_end() const { return pos_ >= tokens_.size(); }
    const GrammarToken& peek() const { return tokens_[pos_]; }
    const GrammarToken& advance() { return tokens_[pos_++]; }
    std::size_t line_here() const {
        return at_end() ? (tokens_.empty() ? 1 : tokens_.back().line)
                        : tokens_[pos_].line;
    }

    const GrammarToken& expect(std::string_view text) {
        if (at_end() || peek().text != text)
            throw ParseError(line_here(), "expected '" + std::string(text) + "'");
        return advance();
    }

    std::vector<Tag> parse_tag_list() {
        expect("(");
        std::vector<Tag> tags;
        while (!at_end() && peek().text != ")") {
            const GrammarToken& tok = advance();
            try {
                tags.emplace_back(tok.text, Tagset::Fine);
            } catch (const DataError& e) {
                throw ParseError(tok.line, e.what());
            }
        }
        if (at_end()) throw ParseError(line_here(), "unterminated tag list");
        if (tags.empty()) throw ParseError(peek().line, "empty tag list");
        expect(")");
        return tags;
    }

    ContextTest parse_test() {
        const GrammarToken& open = expect("(");
        ContextTest test;
        if (at_end()) throw ParseError(open.line, "unterminated context test");
        const GrammarToken& offset = advance();
        std::string spec = offset.text;
        if (!spec.empty() && spec.back() == 'C') {
            test.careful = true;
            spec.pop_back();
        }
        std::size_t digits = 0;
        std::size_t start = (!spec.empty() && (spec[0] == '+' || spec[0] == '-')) ? 1 : 0;
        for (std::size_t i = start; i < spec.size(); ++i)
            if (std::isdigit(static_cast<unsigned char>(spec[i]))) ++digits;
        if (spec.size() == start || digits != spec.size() - start)
            throw ParseError(offset.line, "malformed context offset: " + offset.text);
        test.position = std::stoi(spec);
        if (!at_end() && peek().text == "NOT") {
            test.negate = true;
            advance();
        }
        while (!at_end() && peek().text != ")") {
            const GrammarToken& tok = advance();
            try {
                test.tags.emplace_back(tok.text, Tagset::Fine);
            } catch (const DataError& e) {
                throw ParseError(tok.line, e.what());
            }
        }
        if (at_end()) throw ParseError(line_here(), "unterminated context test");
        if (test.tags.empty()) throw ParseError(peek().line, "empty tag list");
        expect(")");
        return test;
    }

    ConstraintRule parse_rule(RuleTier tier) {
        const GrammarToken& head = advance();
        ConstraintRule rule;
        rule.tier = tier;
        rule.line = head.line;
        if (head.text == "REMOVE")
            rule.action = RuleAction::Remove;
        else if (head.text == "SELECT")
            rule.action = RuleAction::Select;
        else
            throw ParseError(head.line, "unknown action keyword: " + head.text);
        rule.target = parse_tag_list();
        if (!at_end() && peek().text == "IF") {
            advance();
            if (at_end() || peek().text != "(")
                throw ParseError(line_here(), "IF without context tests");
            while (!at_end() && peek().text == "(")
                rule.tests.push_back(parse_test());
        }
        expect(";");
        return rule;
    }

    std::vector<GrammarToken> tokens_;
    std::size_t pos_ = 0;
};

void serialize_rule(const ConstraintRule& rule, std::ostream& out) {
    out << (rule.action == RuleAction::Remove ? "REMOVE" : "SELECT") << " (";
    for (std::size_t i = 0; i < rule.target.size(); ++i) {
        if (i > 0) out << ' ';
        out << rule.target[i].name;
    }
    out << ')';
    if (!rule.tests.empty()) {
        out << " IF";
        for (const ContextTest& test : rule.tests) {
            out << " (" << test.position;
            if (test.careful) out << 'C';
            if (test.negate) out << " NOT";
            for (const Tag& tag : test.tags) out << ' ' << tag.name;
            out << ')';
        }
    }
    out << " ;\n";
}

// One full pass of `rules` over the sentence, left to right per rule.
// Returns whether any application changed a cohort.
bool run_pass(Sentence& sentence, const std::vector<const ConstraintRule*>& rules,
              const TraceSink& trace, std::size_t sentence_index) {
    bool changed = false;
    for (const ConstraintRule* rule : rules) {
        for (std::size_t i = 0; i < sentence.cohorts.size(); ++i) {
            if (!rule_applies(*rule, sentence, i)) continue;
            Cohort& cohort = sentence.cohorts[i];
            std::vector<Reading> keep;
            std::vector<Reading> removed;
            for (const Reading& reading : cohort.readings) {
                bool match = reading.contains_all(rule->target);
                bool drop = rule->action == RuleAction::Remove ? match : !match;
                (drop ? removed : keep).push_back(reading);
            }
            // Applications that would empty the cohort or change nothing
            // are skipped, which also makes SELECT without a match a no-op.
            if (keep.empty() || removed.empty()) continue;
            cohort = cohort.reduced_to(std::move(keep));
            changed = true;
            if (trace) trace(TraceEvent{rule->line, sentence_index, i, std::move(removed)});
        }
    }
    return changed;
}

void run_fixpoint(Sentence& sentence, const std::vector<const ConstraintRule*>& rules,
                  const TraceSink& trace, std::size_t sentence_index) {
    std::size_t budget = 0;
    for (const Cohort& cohort : sentence.cohorts) budget += cohort.readings.size();
    // Every changing pass removes at least one reading, so `budget + 1`
    // passes always suffice to reach the fixpoint.
    for (std::size_t pass = 0; pass <= budget; ++pass)
        if (!run_pass(sentence, rules, trace, sentence_index)) return;
}

}  // namespace

Grammar parse_grammar(std::istream& in) {
    return GrammarParser(lex_grammar(in)).parse();
}

Grammar parse_grammar_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_grammar(in);
}

void serialize_grammar(const Grammar& grammar, std::ostream& out) {
    bool grammar_header = false;
    bool heuristic_header = false;
    for (const ConstraintRule& rule : grammar.rules) {
        if (rule.tier == RuleTier::Grammar && !grammar_header) {
            out << "CONSTRAINTS\n";
            grammar_header = true;
        } else if (rule.tier == RuleTier::Heuristic && !heuristic_header) {
            out << "HEURISTICS\n";
            heuristic_header = true;
        }
        serialize_rule(rule, out);
    }
}

std::string serialize_grammar(const Grammar& grammar) {
    std::ostringstream out;
    serialize_grammar(grammar, out);
    return out.str();
}

bool rule_applies(const ConstraintRule& rule, const Sentence& sentence,
                  std::size_t index) {
    for (const ContextTest& test : rule.tests) {
        long p = static_cast<long>(index) + test.position;
        if (p < 0 || p >= static_cast<long>(sentence.cohorts.size())) return false;
        const Cohort& cohort = sentence.cohorts[static_cast<std::size_t>(p)];
        if (test.careful && cohort.readings.size() != 1) return false;
        bool match = std::any_of(
            cohort.readings.begin(), cohort.readings.end(),
            [&test](const Reading& r) { return r.contains_all(test.tags); });
        if (test.negate ? match : !match) return false;
    }
    return true;
}

Sentence disambiguate(const Sentence& sentence, const Grammar& grammar,
                      RuleTier max_tier, const TraceSink& trace,
                      std::size_t sentence_index) {
    Sentence out = sentence;
    std::vector<const ConstraintRule*> tier_rules;
    for (const ConstraintRule& rule : grammar.rules)
        if (rule.tier == RuleTier::Grammar) tier_rules.push_back(&rule);
    run_fixpoint(out, tier_rules, trace, sentence_index);
    if (max_tier == RuleTier::Heuristic) {
        std::vector<const ConstraintRule*> all_rules;
        for (const ConstraintRule& rule : grammar.rules) all_rules.push_back(&rule);
        run_fixpoint(out, all_rules, trace, sentence_index);
    }
    return out;
}

}  // namespace hybridtag
