#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hybridtag/errors.hpp"

namespace hybridtag {

// The two tag inventories the toolkit moves between: the fine-grained
// morphological tagset used by the rule component and the coarse tagset
// used by the statistical component.
enum class Tagset { Fine, Coarse };

std::string_view to_string(Tagset tagset);

// A single symbolic label such as "V", "PRES", "-SG3" (fine) or "vb" (coarse).
// Names are non-empty and contain no whitespace.
struct Tag {
    std::string name;
    Tagset tagset = Tagset::Fine;

    Tag() = default;
    Tag(std::string name, Tagset tagset);

    bool operator==(const Tag&) const = default;
    auto operator<=>(const Tag&) const = default;
};

// One morphological analysis: an ordered, duplicate-free bundle of tags,
// e.g. [V, PRES, -SG3, VFIN]. Two readings are equal only if their tag
// sequences are identical.
struct Reading {
    std::vector<Tag> tags;

    Reading() = default;
    explicit Reading(std::vector<Tag> tags);
    Reading(std::initializer_list<Tag> tags);

    bool contains(const Tag& tag) const;
    bool contains_all(const std::vector<Tag>& tags) const;

    // Space-joined tag names, the serialized form used in corpus files
    // and for deterministic tie-breaking.
    std::string str() const;

    bool operator==(const Reading&) const = default;
    auto operator<=>(const Reading&) const = default;
};

// A surface token together with its competing readings. Readings behave as
// a set with stable insertion order. gold_index, when present, marks the
// hand-annotated correct reading.
struct Cohort {
    std::string surface;
    std::vector<Reading> readings;
    std::optional<std::size_t> gold_index;

    bool ambiguous() const { return readings.size() > 1; }
    bool has_reading(const Reading& reading) const;

    // The annotated reading: gold_index if set, else the lone reading of an
    // unambiguous cohort, else nullptr.
    const Reading* gold_reading() const;

    // Copy of this cohort restricted to `kept`, with gold_index remapped to
    // the survivor's new position or cleared if the gold reading was dropped.
    Cohort reduced_to(std::vector<Reading> kept) const;
};

struct Sentence {
    std::vector<Cohort> cohorts;
};

// A surface form with its [begin, end) character span in the source text.
struct Token {
    std::string surface;
    std::size_t begin = 0;
    std::size_t end = 0;
};

using TokenSentence = std::vector<Token>;

// Controls how raw text becomes tokens. Fine mode merges multiword units
// into single tokens and splits contractions into their parts; coarse mode
// keeps contractions whole and multiword units as separate tokens, so the
// two modes produce different token streams over the same text.
struct TokenizationPolicy {
    Tagset mode = Tagset::Fine;
    std::vector<std::string> multiword_units;
    std::map<std::string, std::vector<std::string>> contraction_splits;
};

struct AnnotatedCorpus {
    std::vector<Sentence> sentences;
    Tagset tagset = Tagset::Fine;

    std::size_t token_count() const;
};

// Splits text into sentences of tokens. Sentence boundaries fall after
// ".", "!" or "?" tokens followed by whitespace or end of input. Empty
// input yields no sentences.
std::vector<TokenSentence> tokenize(std::string_view text,
                                    const TokenizationPolicy& policy);

struct AmbiguityMetrics {
    std::size_t total_tokens = 0;
    std::size_t ambiguous_tokens = 0;
    std::size_t total_readings = 0;
    double ambiguous_word_fraction = 0.0;
    double readings_per_word = 0.0;
};

// Corpus-level ambiguity counts. The corpus must contain at least one token.
AmbiguityMetrics ambiguity_metrics(const AnnotatedCorpus& corpus);

// Vertical cohort format: a word line "<surface>" starts a cohort, each
// following tab-indented line holds one reading (optionally ending in the
// reserved gold marker), and a blank line separates sentences. Coarse
// corpora use single-tag readings. parse and serialize round-trip
// byte-exactly on canonical input.
AnnotatedCorpus parse_corpus(std::istream& in, Tagset tagset);
AnnotatedCorpus parse_corpus_text(std::string_view text, Tagset tagset);
void serialize_corpus(const AnnotatedCorpus& corpus, std::ostream& out);
std::string serialize_corpus(const AnnotatedCorpus& corpus);

// Policy file: "MWU<TAB>phrase" and "SPLIT<TAB>surface<TAB>parts..." lines,
// with # comments. The returned policy has mode Fine; callers flip the mode
// per use.
TokenizationPolicy parse_policy(std::istream& in);
TokenizationPolicy parse_policy_text(std::string_view text);

}  // namespace hybridtag
