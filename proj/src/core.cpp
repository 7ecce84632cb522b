#include "hybridtag/core.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

namespace hybridtag {

namespace {

bool is_word_byte(unsigned char c) {
    // Bytes >= 0x80 are parts of multibyte UTF-8 letters.
    return std::isalnum(c) != 0 || c >= 0x80;
}

bool is_space_byte(unsigned char c) {
    return std::isspace(c) != 0;
}

char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

char ascii_upper(char c) {
    return (c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A') : c;
}

std::string lowered(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), ascii_lower);
    return out;
}

// Equality that is case-insensitive in the first character only, used when
// matching policy entries against possibly sentence-initial tokens.
bool loose_equal(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    if (a.empty()) return true;
    if (ascii_lower(a[0]) != ascii_lower(b[0])) return false;
    return a.substr(1) == b.substr(1);
}

std::vector<std::string> split_words(std::string_view s) {
    std::vector<std::string> words;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && s[i] == ' ') ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ') ++j;
        if (j > i) words.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return words;
}

struct MultiwordEntry {
    std::vector<std::string> words;
};

// Merges policy multiword units into single tokens, longest unit first.
TokenSentence merge_multiwords(const TokenSentence& sentence,
                               const std::vector<MultiwordEntry>& units) {
    TokenSentence merged;
    std::size_t k = 0;
    while (k < sentence.size()) {
        const MultiwordEntry* hit = nullptr;
        for (const auto& unit : units) {
            std::size_t m = unit.words.size();
            if (k + m > sentence.size()) continue;
            bool match = true;
            for (std::size_t w = 0; w < m; ++w) {
                const std::string& tok = sentence[k + w].surface;
                match = w == 0 ? loose_equal(tok, unit.words[w])
                               : tok == unit.words[w];
                if (!match) break;
            }
            if (match) {
                hit = &unit;
                break;
            }
        }
        if (hit == nullptr) {
            merged.push_back(sentence[k]);
            ++k;
            continue;
        }
        std::size_t m = hit->words.size();
        Token joined;
        joined.begin = sentence[k].begin;
        joined.end = sentence[k + m - 1].end;
        for (std::size_t w = 0; w < m; ++w) {
            if (w > 0) joined.surface += ' ';
            joined.surface += sentence[k + w].surface;
        }
        merged.push_back(std::move(joined));
        k += m;
    }
    return merged;
}

// Splits contractions listed in the policy; a capitalized surface keeps its
// capital on the first part. All parts share the original token's span.
TokenSentence split_contractions(const TokenSentence& sentence,
                                 const TokenizationPolicy& policy) {
    TokenSentence out;
    for (const Token& token : sentence) {
        const std::vector<std::string>* parts = nullptr;
        bool recapitalize = false;
        auto it = policy.contraction_splits.find(token.surface);
        if (it != policy.contraction_splits.end()) {
            parts = &it->second;
        } else if (!token.surface.empty()) {
            std::string folded = token.surface;
            folded[0] = ascii_lower(folded[0]);
            if (folded != token.surface) {
                it = policy.contraction_splits.find(folded);
                if (it != policy.contraction_splits.end()) {
                    parts = &it->second;
                    recapitalize = true;
                }
            }
        }
        if (parts == nullptr) {
            out.push_back(token);
            continue;
        }
        for (std::size_t p = 0; p < parts->size(); ++p) {
            Token part{(*parts)[p], token.begin, token.end};
            if (p == 0 && recapitalize && !part.surface.empty())
                part.surface[0] = ascii_upper(part.surface[0]);
            out.push_back(std::move(part));
        }
    }
    return out;
}

}  // namespace

std::string_view to_string(Tagset tagset) {
    return tagset == Tagset::Fine ? "fine" : "coarse";
}

Tag::Tag(std::string name, Tagset tagset) : name(std::move(name)), tagset(tagset) {
    if (this->name.empty()) throw DataError("empty tag name");
    for (unsigned char c : this->name)
        if (is_space_byte(c)) throw DataError("tag name contains whitespace: '" + this->name + "'");
}

Reading::Reading(std::vector<Tag> tags_in) : tags(std::move(tags_in)) {
    if (tags.empty()) throw DataError("empty reading");
    for (std::size_t i = 0; i < tags.size(); ++i)
        for (std::size_t j = i + 1; j < tags.size(); ++j)
            if (tags[i] == tags[j])
                throw DataError("duplicate tag in reading: '" + tags[i].name + "'");
}

Reading::Reading(std::initializer_list<Tag> tags_in)
    : Reading(std::vector<Tag>(tags_in)) {}

bool Reading::contains(const Tag& tag) const {
    return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

bool Reading::contains_all(const std::vector<Tag>& wanted) const {
    return std::all_of(wanted.begin(), wanted.end(),
                       [this](const Tag& t) { return contains(t); });
}

std::string Reading::str() const {
    std::string out;
    for (std::size_t i = 0; i < tags.size(); ++i) {
        if (i > 0) out += ' ';
        out += tags[i].name;
    }
    return out;
}

bool Cohort::has_reading(const Reading& reading) const {
    return std::find(readings.begin(), readings.end(), reading) != readings.end();
}

const Reading* Cohort::gold_reading() const {
    if (gold_index) return &readings[*gold_index];
    if (readings.size() == 1) return &readings.front();
    return nullptr;
}

Cohort Cohort::reduced_to(std::vector<Reading> kept) const {
    Cohort out;
    out.surface = surface;
    if (gold_index) {
        const Reading& gold = readings[*gold_index];
        auto it = std::find(kept.begin(), kept.end(), gold);
        if (it != kept.end())
            out.gold_index = static_cast<std::size_t>(it - kept.begin());
    }
    out.readings = std::move(kept);
    return out;
}

std::size_t AnnotatedCorpus::token_count() const {
    std::size_t n = 0;
    for (const Sentence& s : sentences) n += s.cohorts.size();
    return n;
}

std::vector<TokenSentence> tokenize(std::string_view text,
                                    const TokenizationPolicy& policy) {
    std::vector<Token> raw;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (is_space_byte(c)) {
            ++i;
            continue;
        }
        if (is_word_byte(c)) {
            std::size_t j = i + 1;
            while (j < n) {
                unsigned char d = static_cast<unsigned char>(text[j]);
                if (is_word_byte(d)) {
                    ++j;
                } else if (d == '\'' && j + 1 < n &&
                           is_word_byte(static_cast<unsigned char>(text[j + 1]))) {
                    // Word-internal apostrophe, as in "aren't".
                    ++j;
                } else {
                    break;
                }
            }
            raw.push_back({std::string(text.substr(i, j - i)), i, j});
            i = j;
        } else {
            raw.push_back({std::string(1, text[i]), i, i + 1});
            ++i;
        }
    }

    std::vector<TokenSentence> sentences;
    TokenSentence current;
    for (Token& token : raw) {
        bool terminal = token.surface == "." || token.surface == "!" ||
                        token.surface == "?";
        bool boundary =
            terminal && (token.end >= n ||
                         is_space_byte(static_cast<unsigned char>(text[token.end])));
        current.push_back(std::move(token));
        if (boundary) {
            sentences.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) sentences.push_back(std::move(current));

    if (policy.mode == Tagset::Fine) {
        std::vector<MultiwordEntry> units;
        for (const std::string& unit : policy.multiword_units)
            units.push_back({split_words(unit)});
        // Longest unit wins; list order breaks length ties.
        std::stable_sort(units.begin(), units.end(),
                         [](const MultiwordEntry& a, const MultiwordEntry& b) {
                             return a.words.size() > b.words.size();
                         });
        for (TokenSentence& sentence : sentences) {
            sentence = merge_multiwords(sentence, units);
            sentence = split_contractions(sentence, policy);
        }
    }
    return sentences;
}

AmbiguityMetrics ambiguity_metrics(const AnnotatedCorpus& corpus) {
    AmbiguityMetrics m;
    for (const Sentence& sentence : corpus.sentences) {
        for (const Cohort& cohort : sentence.cohorts) {
            m.total_tokens += 1;
            m.total_readings += cohort.readings.size();
            if (cohort.ambiguous()) m.ambiguous_tokens += 1;
        }
    }
    if (m.total_tokens == 0) throw DataError("empty corpus");
    m.ambiguous_word_fraction =
        static_cast<double>(m.ambiguous_tokens) / static_cast<double>(m.total_tokens);
    m.readings_per_word =
        static_cast<double>(m.total_readings) / static_cast<double>(m.total_tokens);
    return m;
}

namespace {

const std::string kGoldMarker = "<Gold>";

}  // namespace

AnnotatedCorpus parse_corpus(std::istream& in, Tagset tagset) {
    AnnotatedCorpus corpus;
    corpus.tagset = tagset;
    Sentence sentence;
    std::string line;
    std::size_t lineno = 0;
    std::size_t cohort_line = 0;

    auto check_open_cohort = [&] {
        if (!sentence.cohorts.empty() && sentence.cohorts.back().readings.empty())
            throw ParseError(cohort_line, "cohort '" + sentence.cohorts.back().surface +
                                              "' has no readings");
    };
    auto flush_sentence = [&] {
        check_open_cohort();
        if (!sentence.cohorts.empty()) {
            corpus.sentences.push_back(std::move(sentence));
            sentence = Sentence{};
        }
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush_sentence();
            continue;
        }
        if (line[0] == '"') {
            if (line.size() < 4 || line[1] != '<' || line[line.size() - 2] != '>' ||
                line.back() != '"')
                throw ParseError(lineno, "malformed word line: " + line);
            std::string surface = line.substr(2, line.size() - 4);
            if (surface.empty()) throw ParseError(lineno, "empty surface form");
            check_open_cohort();
            cohort_line = lineno;
            sentence.cohorts.push_back(Cohort{std::move(surface), {}, std::nullopt});
        } else if (line[0] == '\t') {
            if (sentence.cohorts.empty())
                throw ParseError(lineno, "reading line before any word line");
            std::vector<std::string> fields = split_words(line.substr(1));
            if (!line.substr(1).empty() && (line[1] == ' ' || line.back() == ' '))
                throw ParseError(lineno, "malformed reading line: stray spaces");
            bool gold = !fields.empty() && fields.back() == kGoldMarker;
            if (gold) fields.pop_back();
            if (fields.empty())
                throw ParseError(lineno, "reading line without tags");
            if (tagset == Tagset::Coarse && fields.size() != 1)
                throw ParseError(lineno, "coarse reading must carry exactly one tag");
            std::vector<Tag> tags;
            tags.reserve(fields.size());
            for (std::string& f : fields) {
                if (f == kGoldMarker)
                    throw ParseError(lineno, "reserved token <Gold> inside reading");
                try {
                    tags.emplace_back(std::move(f), tagset);
                } catch (const DataError& e) {
                    throw ParseError(lineno, e.what());
                }
            }
            Cohort& cohort = sentence.cohorts.back();
            Reading reading;
            try {
                reading = Reading(std::move(tags));
            } catch (const DataError& e) {
                throw ParseError(lineno, e.what());
            }
            if (cohort.has_reading(reading))
                throw ParseError(lineno, "duplicate reading: " + reading.str());
            cohort.readings.push_back(std::move(reading));
            if (gold) {
                if (cohort.gold_index)
                    throw ParseError(lineno, "multiple gold readings in one cohort");
                cohort.gold_index = cohort.readings.size() - 1;
            }
        } else {
            throw ParseError(lineno, "unrecognized line: " + line);
        }
    }
    flush_sentence();
    return corpus;
}

AnnotatedCorpus parse_corpus_text(std::string_view text, Tagset tagset) {
    std::istringstream in{std::string(text)};
    return parse_corpus(in, tagset);
}

void serialize_corpus(const AnnotatedCorpus& corpus, std::ostream& out) {
    for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
        if (s > 0) out << '\n';
        for (const Cohort& cohort : corpus.sentences[s].cohorts) {
            out << "\"<" << cohort.surface << ">\"\n";
            for (std::size_t r = 0; r < cohort.readings.size(); ++r) {
                out << '\t' << cohort.readings[r].str();
                if (cohort.gold_index && *cohort.gold_index == r)
                    out << ' ' << kGoldMarker;
                out << '\n';
            }
        }
    }
}

std::string serialize_corpus(const AnnotatedCorpus& corpus) {
    std::ostringstream out;
    serialize_corpus(corpus, out);
    return out.str();
}

TokenizationPolicy parse_policy(std::istream& in) {
    TokenizationPolicy policy;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw ParseError(lineno, "expected TAB-separated policy entry: " + line);
        std::string kind = line.substr(0, tab);
        std::string rest = line.substr(tab + 1);
        if (kind == "MWU") {
            if (split_words(rest).empty())
                throw ParseError(lineno, "empty multiword unit");
            policy.multiword_units.push_back(rest);
        } else if (kind == "SPLIT") {
            std::size_t tab2 = rest.find('\t');
            if (tab2 == std::string::npos)
                throw ParseError(lineno, "SPLIT entry needs surface and parts");
            std::string surface = rest.substr(0, tab2);
            std::vector<std::string> parts = split_words(rest.substr(tab2 + 1));
            if (surface.empty() || parts.empty())
                throw ParseError(lineno, "empty contraction entry");
            policy.contraction_splits[std::move(surface)] = std::move(parts);
        } else {
            throw ParseError(lineno, "unknown policy entry kind: " + kind);
        }
    }
    return policy;
}

TokenizationPolicy parse_policy_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_policy(in);
}

}  // namespace hybridtag
