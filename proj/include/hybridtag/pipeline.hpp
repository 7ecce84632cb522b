#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hybridtag/cg.hpp"
#include "hybridtag/combine.hpp"
#include "hybridtag/core.hpp"
#include "hybridtag/hmm.hpp"
#include "hybridtag/morph.hpp"

namespace hybridtag {

// The evaluation cascade: each configuration is morphological analysis plus
// an optional rule stage and an optional statistical stage.
//
//   D0   analysis only
//   D1   + grammar-tier rules
//   D2   + heuristic-tier rules
//   D3a  D2 + tagger, careful mapping
//   D3b  D2 + tagger, forced mapping
//   D4   D1 + tagger, forced mapping
//   D5   D0 + tagger, forced mapping
enum class StageLabel { D0, D1, D2, D3a, D3b, D4, D5 };

enum class MapMode { Careful, Unambiguous };

struct StageConfig {
    StageLabel label = StageLabel::D0;
    bool use_rules = false;
    RuleTier rule_tier = RuleTier::Grammar;
    bool use_tagger = false;
    MapMode map_mode = MapMode::Unambiguous;

    static StageConfig for_label(StageLabel label);
};

std::string_view to_string(StageLabel label);
std::optional<StageLabel> parse_stage_label(std::string_view text);

struct PipelineResources {
    Lexicon fine_lexicon;
    GuesserConfig fine_guesser;
    TokenizationPolicy policy;
    std::optional<Grammar> grammar;
    std::optional<Lexicon> coarse_lexicon;
    std::optional<GuesserConfig> coarse_guesser;
    std::optional<HmmModel> model;
    std::optional<TagMapping> mapping;
};

// Loads the conventional resource files needed by `config` from a
// directory: fine.lex, guesser.rules and policy.tok always; grammar.cg for
// rule stages; coarse.lex, model.hmm and mapping.map (plus an optional
// coarse.guesser) for tagger stages. A missing or unreadable file raises an
// error naming the stage that needs it.
PipelineResources load_resources(const std::filesystem::path& dir,
                                 const StageConfig& config);

struct RunResult {
    AnnotatedCorpus corpus;
    // Cohorts left ambiguous because forced mapping had no alternative to
    // pick.
    std::size_t residual_cohorts = 0;
};

// Runs one cascade configuration over raw text: fine tokenization and
// analysis, then the enabled rule tier, then tagging of the coarse token
// stream with per-sentence alignment and decision-list resolution of the
// cohorts that are still ambiguous. Unambiguous cohorts are never touched
// by the mapping stage.
RunResult run(const StageConfig& config, std::string_view text,
              const PipelineResources& resources, const TraceSink& trace = nullptr);

struct EvalRow {
    std::string label;
    std::size_t total_tokens = 0;
    std::size_t ambiguous_tokens = 0;
    std::size_t total_readings = 0;
    std::size_t errors = 0;

    double ambiguous_percent() const;
    double readings_per_word() const;
    double error_percent() const;
};

// Compares an output corpus against a gold corpus over the same tokens. A
// cohort counts as an error when the gold reading is absent from its
// readings, so an ambiguous cohort that still contains the gold reading is
// not an error.
EvalRow evaluate(const AnnotatedCorpus& output, const AnnotatedCorpus& gold,
                 std::string label = "");

// Fixed-width summary table (and a tab-separated variant) with one row per
// evaluated output: ambiguous word percentage, total readings, readings per
// word, errors and error rate.
std::string report(const std::vector<EvalRow>& rows);
std::string report_tsv(const std::vector<EvalRow>& rows);

}  // namespace hybridtag
