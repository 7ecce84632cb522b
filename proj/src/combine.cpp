#include "hybridtag/combine.hpp"

#include <algorithm>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

namespace hybridtag {

namespace {

char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

char ascii_upper(char c) {
    return (c >= 'a' && c <= 'z') ? static_cast<char>(c - 'a' + 'A') : c;
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

// Contraction parts for a coarse surface: exact key first, then the key
// with its first letter lowercased so sentence-initial forms still match.
// The parts are returned recapitalized when the folded key matched.
std::vector<std::string> contraction_parts(const std::string& surface,
                                           const TokenizationPolicy& policy) {
    auto it = policy.contraction_splits.find(surface);
    if (it != policy.contraction_splits.end()) return it->second;
    if (!surface.empty()) {
        std::string folded = surface;
        folded[0] = ascii_lower(folded[0]);
        if (folded != surface) {
            it = policy.contraction_splits.find(folded);
            if (it != policy.contraction_splits.end()) {
                std::vector<std::string> parts = it->second;
                if (!parts.empty() && !parts[0].empty())
                    parts[0][0] = ascii_upper(parts[0][0]);
                return parts;
            }
        }
    }
    return {};
}

[[noreturn]] void alignment_failure(const Sentence& fine, const Sentence& coarse,
                                    std::size_t i, std::size_t j) {
    std::string fine_side =
        i < fine.cohorts.size() ? "'" + fine.cohorts[i].surface + "'" : "end";
    std::string coarse_side =
        j < coarse.cohorts.size() ? "'" + coarse.cohorts[j].surface + "'" : "end";
    throw DataError("cannot align fine token " + std::to_string(i) + " (" +
                    fine_side + ") with coarse token " + std::to_string(j) + " (" +
                    coarse_side + ")");
}

const Reading& gold_of(const Cohort& cohort, const std::string& which) {
    if (const Reading* gold = cohort.gold_reading()) return *gold;
    throw DataError(which + " cohort '" + cohort.surface +
                    "' has no gold reading");
}

}  // namespace

std::vector<AlignmentLink> align(const Sentence& fine, const Sentence& coarse,
                                 const TokenizationPolicy& policy) {
    std::vector<AlignmentLink> links;
    std::size_t i = 0;
    std::size_t j = 0;
    const std::size_t nf = fine.cohorts.size();
    const std::size_t nc = coarse.cohorts.size();
    while (i < nf || j < nc) {
        if (i >= nf || j >= nc) alignment_failure(fine, coarse, i, j);
        const std::string& fs = fine.cohorts[i].surface;
        const std::string& cs = coarse.cohorts[j].surface;
        if (fs == cs) {
            links.push_back({i, j});
            ++i;
            ++j;
            continue;
        }
        std::vector<std::string> parts = contraction_parts(cs, policy);
        if (!parts.empty() && i + parts.size() <= nf) {
            bool match = true;
            for (std::size_t p = 0; p < parts.size() && match; ++p)
                match = fine.cohorts[i + p].surface == parts[p];
            if (match) {
                for (std::size_t p = 0; p < parts.size(); ++p)
                    links.push_back({i + p, j});
                i += parts.size();
                ++j;
                continue;
            }
        }
        std::vector<std::string> words = split_on_space(fs);
        if (words.size() > 1 && j + words.size() <= nc) {
            bool match = true;
            for (std::size_t w = 0; w < words.size() && match; ++w)
                match = coarse.cohorts[j + w].surface == words[w];
            if (match) {
                for (std::size_t w = 0; w < words.size(); ++w)
                    links.push_back({i, j + w});
                ++i;
                j += words.size();
                continue;
            }
        }
        alignment_failure(fine, coarse, i, j);
    }
    return links;
}

const DecisionList* TagMapping::find(const std::string& coarse_tag) const {
    auto it = lists.find(coarse_tag);
    return it == lists.end() ? nullptr : &it->second;
}

TagMapping build_mapping(const AnnotatedCorpus& fine_gold,
                         const AnnotatedCorpus& coarse_gold,
                         const TokenizationPolicy& policy) {
    if (fine_gold.sentences.size() != coarse_gold.sentences.size())
        throw DataError("parallel corpus sentence counts differ: " +
                        std::to_string(fine_gold.sentences.size()) + " vs " +
                        std::to_string(coarse_gold.sentences.size()));

    std::map<std::string, std::map<Reading, std::size_t>> counts;
    for (std::size_t s = 0; s < fine_gold.sentences.size(); ++s) {
        const Sentence& fine = fine_gold.sentences[s];
        const Sentence& coarse = coarse_gold.sentences[s];
        for (const AlignmentLink& link : align(fine, coarse, policy)) {
            const Reading& fine_reading =
                gold_of(fine.cohorts[link.fine_index], "fine");
            const Reading& coarse_reading =
                gold_of(coarse.cohorts[link.coarse_index], "coarse");
            counts[coarse_reading.tags.front().name][fine_reading] += 1;
        }
    }

    TagMapping mapping;
    for (auto& [coarse_tag, by_reading] : counts) {
        DecisionList list;
        list.coarse_tag = coarse_tag;
        std::size_t total = 0;
        for (const auto& [reading, count] : by_reading) {
            list.alternatives.push_back({reading, count, 0.0});
            total += count;
        }
        std::stable_sort(list.alternatives.begin(), list.alternatives.end(),
                         [](const DecisionAlternative& a, const DecisionAlternative& b) {
                             if (a.count != b.count) return a.count > b.count;
                             return a.reading.str() < b.reading.str();
                         });
        for (DecisionAlternative& alt : list.alternatives)
            alt.fraction = static_cast<double>(alt.count) / static_cast<double>(total);
        mapping.lists.emplace(coarse_tag, std::move(list));
    }
    return mapping;
}

Cohort resolve_careful(const Cohort& cohort, const Tag& coarse_tag,
                       const TagMapping& mapping) {
    const DecisionList* list = mapping.find(coarse_tag.name);
    if (list == nullptr) return cohort;
    std::vector<Reading> kept;
    for (const Reading& reading : cohort.readings) {
        bool listed = std::any_of(
            list->alternatives.begin(), list->alternatives.end(),
            [&reading](const DecisionAlternative& alt) { return alt.reading == reading; });
        if (listed) kept.push_back(reading);
    }
    if (kept.empty()) return cohort;
    return cohort.reduced_to(std::move(kept));
}

ResolveResult resolve_unambiguous(const Cohort& cohort, const Tag& coarse_tag,
                                  const TagMapping& mapping) {
    if (const DecisionList* list = mapping.find(coarse_tag.name)) {
        for (const DecisionAlternative& alt : list->alternatives)
            if (cohort.has_reading(alt.reading))
                return {cohort.reduced_to({alt.reading}), false};
    }
    return {cohort, cohort.ambiguous()};
}

TagMapping parse_mapping(std::istream& in) {
    TagMapping mapping;
    std::string line;
    std::size_t lineno = 0;
    std::string current_tag;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::size_t tab1 = line.find('\t');
        std::size_t tab2 = tab1 == std::string::npos ? std::string::npos
                                                     : line.find('\t', tab1 + 1);
        if (tab2 == std::string::npos)
            throw ParseError(lineno, "expected 'coarse<TAB>reading<TAB>count': " + line);
        std::string coarse_tag = line.substr(0, tab1);
        std::string reading_text = line.substr(tab1 + 1, tab2 - tab1 - 1);
        std::string count_text = line.substr(tab2 + 1);
        if (coarse_tag.empty()) throw ParseError(lineno, "empty coarse tag");

        std::vector<Tag> tags;
        for (const std::string& name : split_on_space(reading_text)) {
            try {
                tags.emplace_back(name, Tagset::Fine);
            } catch (const DataError& e) {
                throw ParseError(lineno, e.what());
            }
        }
        Reading reading;
        try {
            reading = Reading(std::move(tags));
        } catch (const DataError& e) {
            throw ParseError(lineno, e.what());
        }

        char* end = nullptr;
        unsigned long count = std::strtoul(count_text.c_str(), &end, 10);
        if (end != count_text.c_str() + count_text.size() || count_text.empty())
            throw ParseError(lineno, "malformed count: " + count_text);
        if (count == 0) throw ParseError(lineno, "zero count");

        if (coarse_tag != current_tag) {
            if (mapping.lists.count(coarse_tag))
                throw ParseError(lineno, "rows for '" + coarse_tag + "' are not grouped");
            current_tag = coarse_tag;
            DecisionList list;
            list.coarse_tag = coarse_tag;
            mapping.lists.emplace(coarse_tag, std::move(list));
        }
        DecisionList& list = mapping.lists[coarse_tag];
        for (const DecisionAlternative& alt : list.alternatives)
            if (alt.reading == reading)
                throw ParseError(lineno, "duplicate reading under '" + coarse_tag +
                                             "': " + reading.str());
        if (!list.alternatives.empty()) {
            const DecisionAlternative& prev = list.alternatives.back();
            if (prev.count < count ||
                (prev.count == count && prev.reading.str() >= reading.str()))
                throw ParseError(lineno, "rows for '" + coarse_tag +
                                             "' are not in decision-list order");
        }
        list.alternatives.push_back({std::move(reading), count, 0.0});
    }
    for (auto& [tag, list] : mapping.lists) {
        std::size_t total = 0;
        for (const DecisionAlternative& alt : list.alternatives) total += alt.count;
        for (DecisionAlternative& alt : list.alternatives)
            alt.fraction = static_cast<double>(alt.count) / static_cast<double>(total);
    }
    return mapping;
}

TagMapping parse_mapping_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_mapping(in);
}

void serialize_mapping(const TagMapping& mapping, std::ostream& out) {
    for (const auto& [tag, list] : mapping.lists)
        for (const DecisionAlternative& alt : list.alternatives)
            out << tag << '\t' << alt.reading.str() << '\t' << alt.count << '\n';
}

std::string serialize_mapping(const TagMapping& mapping) {
    std::ostringstream out;
    serialize_mapping(mapping, out);
    return out.str();
}

}  // namespace hybridtag
