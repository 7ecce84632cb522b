#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hybridtag/core.hpp"

namespace hybridtag {

// One edge of the token alignment between a fine sentence and the coarse
// sentence over the same text. Contractions link several fine tokens to one
// coarse token; multiword units link one fine token to several coarse ones.
struct AlignmentLink {
    std::size_t fine_index = 0;
    std::size_t coarse_index = 0;

    bool operator==(const AlignmentLink&) const = default;
    auto operator<=>(const AlignmentLink&) const = default;
};

// Monotone alignment covering every token of both sentences, in
// lexicographic order. Streams that cannot be reconciled raise an error
// naming both positions.
std::vector<AlignmentLink> align(const Sentence& fine, const Sentence& coarse,
                                 const TokenizationPolicy& policy);

struct DecisionAlternative {
    Reading reading;
    std::size_t count = 0;
    double fraction = 0.0;
};

// Fine readings observed under one coarse tag, most frequent first; ties
// break on the serialized reading.
struct DecisionList {
    std::string coarse_tag;
    std::vector<DecisionAlternative> alternatives;
};

struct TagMapping {
    std::map<std::string, DecisionList> lists;

    const DecisionList* find(const std::string& coarse_tag) const;
};

// Counts (gold fine reading, coarse tag) pairs over the aligned sentences
// of a parallel corpus. Every aligned fine cohort must have a gold reading
// and every coarse cohort a single (or gold) tag.
TagMapping build_mapping(const AnnotatedCorpus& fine_gold,
                         const AnnotatedCorpus& coarse_gold,
                         const TokenizationPolicy& policy);

// Careful resolution: drops readings that do not occur in the coarse tag's
// decision list, but never all of them; with no list or no overlap the
// cohort is returned unchanged.
Cohort resolve_careful(const Cohort& cohort, const Tag& coarse_tag,
                       const TagMapping& mapping);

struct ResolveResult {
    Cohort cohort;
    bool residual = false;  // still ambiguous because no alternative matched
};

// Forced resolution: picks the first alternative of the coarse tag's
// decision list present in the cohort. When no alternative matches (or the
// tag has no list) the cohort stays as it is and, if still ambiguous, is
// flagged as residual.
ResolveResult resolve_unambiguous(const Cohort& cohort, const Tag& coarse_tag,
                                  const TagMapping& mapping);

// Mapping file: "coarse<TAB>fine tags<TAB>count" rows, grouped by coarse
// tag with counts descending. The loader verifies the ordering and
// recomputes fractions.
TagMapping parse_mapping(std::istream& in);
TagMapping parse_mapping_text(std::string_view text);
void serialize_mapping(const TagMapping& mapping, std::ostream& out);
std::string serialize_mapping(const TagMapping& mapping);

}  // namespace hybridtag
