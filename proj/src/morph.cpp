#include "hybridtag/morph.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

namespace hybridtag {

namespace {

std::string ascii_lowered(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

std::vector<std::string> split_on_space(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && s[i] == ' ') ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ') ++j;
        if (j > i) out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

Reading parse_reading_fields(const std::vector<std::string>& fields, Tagset tagset,
                             std::size_t lineno) {
    if (fields.empty()) throw ParseError(lineno, "missing tags");
    if (tagset == Tagset::Coarse && fields.size() != 1)
        throw ParseError(lineno, "coarse reading must carry exactly one tag");
    std::vector<Tag> tags;
    tags.reserve(fields.size());
    try {
        for (const std::string& f : fields) tags.emplace_back(f, tagset);
        return Reading(std::move(tags));
    } catch (const DataError& e) {
        throw ParseError(lineno, e.what());
    }
}

}  // namespace

const std::vector<Reading>* Lexicon::lookup(const std::string& word) const {
    auto it = entries.find(word);
    if (it != entries.end()) return &it->second;
    if (case_folding) {
        std::string folded = ascii_lowered(word);
        if (folded != word) {
            it = entries.find(folded);
            if (it != entries.end()) return &it->second;
        }
    }
    return nullptr;
}

bool AffixRule::matches(std::string_view word) const {
    std::size_t need = (prefix ? prefix->size() : 0) + (suffix ? suffix->size() : 0);
    if (word.size() < need) return false;
    if (prefix && word.substr(0, prefix->size()) != *prefix) return false;
    if (suffix && word.substr(word.size() - suffix->size()) != *suffix) return false;
    return true;
}

Lexicon load_lexicon(std::istream& in, Tagset tagset,
                     std::vector<std::string>* warnings) {
    Lexicon lexicon;
    lexicon.tagset = tagset;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw ParseError(lineno, "expected 'surface<TAB>tags': " + line);
        std::string surface = line.substr(0, tab);
        if (surface.empty()) throw ParseError(lineno, "empty surface form");
        Reading reading =
            parse_reading_fields(split_on_space(line.substr(tab + 1)), tagset, lineno);
        std::vector<Reading>& readings = lexicon.entries[surface];
        if (std::find(readings.begin(), readings.end(), reading) != readings.end()) {
            if (warnings)
                warnings->push_back("line " + std::to_string(lineno) +
                                    ": duplicate entry for '" + surface +
                                    "': " + reading.str());
            continue;
        }
        readings.push_back(std::move(reading));
    }
    return lexicon;
}

Lexicon lexicon_from_text(std::string_view text, Tagset tagset,
                          std::vector<std::string>* warnings) {
    std::istringstream in{std::string(text)};
    return load_lexicon(in, tagset, warnings);
}

void serialize_lexicon(const Lexicon& lexicon, std::ostream& out) {
    for (const auto& [surface, readings] : lexicon.entries)
        for (const Reading& reading : readings)
            out << surface << '\t' << reading.str() << '\n';
}

std::string serialize_lexicon(const Lexicon& lexicon) {
    std::ostringstream out;
    serialize_lexicon(lexicon, out);
    return out.str();
}

Lexicon lexicon_from_corpus(const AnnotatedCorpus& corpus) {
    Lexicon lexicon;
    lexicon.tagset = corpus.tagset;
    for (const Sentence& sentence : corpus.sentences) {
        for (const Cohort& cohort : sentence.cohorts) {
            std::vector<Reading>& readings = lexicon.entries[cohort.surface];
            for (const Reading& reading : cohort.readings)
                if (std::find(readings.begin(), readings.end(), reading) ==
                    readings.end())
                    readings.push_back(reading);
        }
    }
    return lexicon;
}

GuesserConfig load_guesser(std::istream& in, Tagset tagset) {
    GuesserConfig guesser;
    guesser.tagset = tagset;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw ParseError(lineno, "expected 'affixes<TAB>tags': " + line);
        std::string head = line.substr(0, tab);
        Reading reading =
            parse_reading_fields(split_on_space(line.substr(tab + 1)), tagset, lineno);
        if (head == "OPENCLASS") {
            if (std::find(guesser.open_class.begin(), guesser.open_class.end(),
                          reading) == guesser.open_class.end())
                guesser.open_class.push_back(std::move(reading));
            continue;
        }
        AffixRule rule;
        for (const std::string& part : split_on_space(head)) {
            if (part.rfind("PREFIX:", 0) == 0) {
                if (rule.prefix) throw ParseError(lineno, "duplicate PREFIX");
                rule.prefix = part.substr(7);
                if (rule.prefix->empty()) throw ParseError(lineno, "empty PREFIX");
            } else if (part.rfind("SUFFIX:", 0) == 0) {
                if (rule.suffix) throw ParseError(lineno, "duplicate SUFFIX");
                rule.suffix = part.substr(7);
                if (rule.suffix->empty()) throw ParseError(lineno, "empty SUFFIX");
            } else {
                throw ParseError(lineno, "unknown affix specifier: " + part);
            }
        }
        if (!rule.prefix && !rule.suffix)
            throw ParseError(lineno, "rule without affixes");
        if (!guesser.rules.empty() &&
            guesser.rules.back().prefix == rule.prefix &&
            guesser.rules.back().suffix == rule.suffix) {
            guesser.rules.back().readings.push_back(std::move(reading));
            continue;
        }
        rule.readings.push_back(std::move(reading));
        guesser.rules.push_back(std::move(rule));
    }
    if (guesser.open_class.empty())
        throw DataError("guesser has no OPENCLASS readings");
    return guesser;
}

GuesserConfig guesser_from_text(std::string_view text, Tagset tagset) {
    std::istringstream in{std::string(text)};
    return load_guesser(in, tagset);
}

std::vector<Reading> guess(const std::string& word, const GuesserConfig& guesser) {
    if (guesser.tagset == Tagset::Fine && !word.empty() &&
        std::all_of(word.begin(), word.end(),
                    [](unsigned char c) { return std::isdigit(c) != 0; }))
        return {Reading{Tag("NUM", Tagset::Fine), Tag("CARD", Tagset::Fine)}};
    for (const AffixRule& rule : guesser.rules)
        if (rule.matches(word)) return rule.readings;
    return guesser.open_class;
}

Cohort analyze(const std::string& word, const Lexicon& lexicon,
               const GuesserConfig& guesser) {
    Cohort cohort;
    cohort.surface = word;
    if (const std::vector<Reading>* readings = lexicon.lookup(word))
        cohort.readings = *readings;
    else
        cohort.readings = guess(word, guesser);
    return cohort;
}

AnnotatedCorpus analyze_tokens(const std::vector<TokenSentence>& sentences,
                               const Lexicon& lexicon, const GuesserConfig& guesser) {
    AnnotatedCorpus corpus;
    corpus.tagset = lexicon.tagset;
    for (const TokenSentence& tokens : sentences) {
        if (tokens.empty()) continue;
        Sentence sentence;
        sentence.cohorts.reserve(tokens.size());
        for (const Token& token : tokens)
            sentence.cohorts.push_back(analyze(token.surface, lexicon, guesser));
        corpus.sentences.push_back(std::move(sentence));
    }
    return corpus;
}

}  // namespace hybridtag
