#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hybridtag/core.hpp"

namespace hybridtag {

// Full-form lexicon: surface form to its readings, in file order. Lookup is
// exact first, then ASCII-lowercased when case_folding is on.
struct Lexicon {
    std::map<std::string, std::vector<Reading>> entries;
    Tagset tagset = Tagset::Fine;
    bool case_folding = true;

    const std::vector<Reading>* lookup(const std::string& word) const;
    bool contains(const std::string& word) const { return lookup(word) != nullptr; }
};

// One guesser rule: fires when the word carries the given affixes and is at
// least as long as both combined. A rule assigns one or more readings.
struct AffixRule {
    std::optional<std::string> prefix;
    std::optional<std::string> suffix;
    std::vector<Reading> readings;

    bool matches(std::string_view word) const;
};

// Analyses for words the lexicon does not know: ordered affix rules with
// first-match semantics, falling back to the open-class reading set.
struct GuesserConfig {
    std::vector<AffixRule> rules;
    std::vector<Reading> open_class;
    Tagset tagset = Tagset::Fine;
};

// Lexicon file: "surface<TAB>tags" with one reading per line; repeated
// surfaces accumulate readings. Exact duplicate (surface, reading) pairs are
// dropped with a warning appended to `warnings` when given.
Lexicon load_lexicon(std::istream& in, Tagset tagset = Tagset::Fine,
                     std::vector<std::string>* warnings = nullptr);
Lexicon lexicon_from_text(std::string_view text, Tagset tagset = Tagset::Fine,
                          std::vector<std::string>* warnings = nullptr);
void serialize_lexicon(const Lexicon& lexicon, std::ostream& out);
std::string serialize_lexicon(const Lexicon& lexicon);

// Builds a lexicon covering exactly the cohorts of a corpus.
Lexicon lexicon_from_corpus(const AnnotatedCorpus& corpus);

// Guesser file: "PREFIX:un SUFFIX:al<TAB>tags" rule lines (consecutive lines
// with the same affixes merge into one multi-reading rule) and
// "OPENCLASS<TAB>tags" lines, one reading each. At least one OPENCLASS line
// is required.
GuesserConfig load_guesser(std::istream& in, Tagset tagset = Tagset::Fine);
GuesserConfig guesser_from_text(std::string_view text, Tagset tagset = Tagset::Fine);

// Readings for an unknown word: digit-only words get the fixed numeral
// reading (fine tagset only), otherwise the first matching affix rule,
// otherwise the open class.
std::vector<Reading> guess(const std::string& word, const GuesserConfig& guesser);

// Lexicon lookup with guesser fallback. The guesser is never consulted for
// words the lexicon knows. The resulting cohort always has at least one
// reading.
Cohort analyze(const std::string& word, const Lexicon& lexicon,
               const GuesserConfig& guesser);

// Runs analyze over tokenized text, one sentence per token sentence.
AnnotatedCorpus analyze_tokens(const std::vector<TokenSentence>& sentences,
                               const Lexicon& lexicon, const GuesserConfig& guesser);

}  // namespace hybridtag
