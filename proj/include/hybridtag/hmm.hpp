#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hybridtag/core.hpp"
#include "hybridtag/morph.hpp"

namespace hybridtag {

// Words are modeled through equivalence classes: all words sharing a set of
// possible coarse tags share one class, so the emission table stays small
// and unseen words fall back on the class of the open tags.
struct EquivalenceClass {
    std::size_t id = 0;
    std::vector<std::string> tags;  // sorted, unique coarse tag names
};

// Additive pseudo-count weights applied before normalization when
// initializing a model, used to seed lexical and contextual preferences.
struct BiasSpec {
    std::map<std::pair<std::string, std::string>, double> transition;
    std::map<std::pair<std::size_t, std::string>, double> symbol;
};

struct TrainingParams {
    std::size_t iterations = 0;
    std::size_t block_size = 1;
    double convergence_epsilon = 0.0;
};

// First-order HMM over coarse tags emitting equivalence classes. Emission
// of class c by tag t is structurally zero unless t is in c's tag set, and
// training preserves those zeros.
struct HmmModel {
    std::vector<std::string> tags;
    std::vector<EquivalenceClass> classes;
    std::vector<double> initial;                   // per tag
    std::vector<std::vector<double>> transition;   // tag x tag
    std::vector<std::vector<double>> emission;     // tag x class

    std::size_t tag_count() const { return tags.size(); }
    std::size_t class_count() const { return classes.size(); }
    std::optional<std::size_t> tag_index(std::string_view name) const;
    std::optional<std::size_t> class_index(const std::vector<std::string>& sorted_tags) const;
    bool tag_in_class(std::size_t tag, std::size_t cls) const;

    // Checks shape, row normalization within 1e-9 and structural zeros.
    void validate() const;
};

using ClassSequence = std::vector<std::size_t>;

// The set of coarse tags a word can carry: lexicon lookup first, else the
// guesser (affix rules, then open class).
std::vector<std::string> equivalence_tags(const std::string& word,
                                          const Lexicon& coarse_lexicon,
                                          const GuesserConfig& coarse_guesser);

// Distinct tag sets observed across the lexicon (in surface order), then the
// guesser rules, then the open class.
std::vector<EquivalenceClass> build_classes(const Lexicon& coarse_lexicon,
                                            const GuesserConfig& coarse_guesser);

// Sorted coarse tag inventory of a lexicon and guesser.
std::vector<std::string> collect_tags(const Lexicon& coarse_lexicon,
                                      const GuesserConfig& coarse_guesser);

// The class of a word. Fails when the word's tag set matches none of the
// model's classes.
const EquivalenceClass& classify(const std::string& word,
                                 const Lexicon& coarse_lexicon,
                                 const GuesserConfig& coarse_guesser,
                                 const std::vector<EquivalenceClass>& classes);

// Uniform initial distribution; transition and emission rows proportional
// to 1 + bias weight, with emission support restricted to each class's tag
// set. Every tag must be emittable, i.e. belong to at least one class.
HmmModel init_model(std::vector<std::string> tags,
                    std::vector<EquivalenceClass> classes,
                    const BiasSpec& biases = {});

struct PosteriorResult {
    std::vector<std::vector<double>> posteriors;  // position x tag
    double log_likelihood = 0.0;
};

// Scaled forward-backward pass over one class sequence.
PosteriorResult forward_backward(const HmmModel& model, const ClassSequence& seq);

struct TrainResult {
    HmmModel model;
    std::vector<double> log_likelihoods;  // corpus log-likelihood per iteration
};

// Batch Baum-Welch re-estimation of transition and emission rows. Counts
// are accumulated per block of block_size sentences and then merged, so
// block size affects results only through floating-point reassociation.
// Rows with zero expected count keep their previous values. Stops early
// when the corpus log-likelihood gain falls below convergence_epsilon.
TrainResult train(const HmmModel& model, const std::vector<ClassSequence>& corpus,
                  const TrainingParams& params);

struct ViterbiResult {
    std::vector<std::size_t> tag_indices;
    double log_probability = 0.0;
};

// Most probable tag sequence, computed in log space. Ties resolve to the
// lowest tag index at every step.
ViterbiResult viterbi(const HmmModel& model, const ClassSequence& seq);
std::vector<std::string> viterbi_tags(const HmmModel& model, const ClassSequence& seq);

// Model file: "HMM v1" header, tag list line, CLASS lines, then INIT, TRANS
// and EMIT sections with one row per tag, probabilities printed with 17
// significant digits. parse and serialize round-trip byte-exactly.
HmmModel parse_model(std::istream& in);
HmmModel parse_model_text(std::string_view text);
void serialize_model(const HmmModel& model, std::ostream& out);
std::string serialize_model(const HmmModel& model);

// Bias file: "TRANS from to weight" and "SYM classId tag weight" lines with
// # comments. References are validated by init_model.
BiasSpec parse_bias(std::istream& in);
BiasSpec parse_bias_text(std::string_view text);

}  // namespace hybridtag
