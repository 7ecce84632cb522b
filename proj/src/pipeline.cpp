#include "hybridtag/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <utility>

namespace hybridtag {

namespace {

std::string stage_name(const StageConfig& config, const std::string& part) {
    return part + " stage for " + std::string(to_string(config.label));
}

std::ifstream open_resource(const std::filesystem::path& path,
                            const std::string& stage) {
    std::ifstream in(path);
    if (!in)
        throw ResourceError(stage + ": cannot open " + path.string());
    return in;
}

// Index of the first coarse token aligned to each fine token.
std::vector<std::size_t> first_coarse_links(const std::vector<AlignmentLink>& links,
                                            std::size_t fine_count) {
    std::vector<std::size_t> first(fine_count, 0);
    std::vector<bool> seen(fine_count, false);
    for (const AlignmentLink& link : links) {
        if (seen[link.fine_index]) continue;
        seen[link.fine_index] = true;
        first[link.fine_index] = link.coarse_index;
    }
    return first;
}

std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

}  // namespace

StageConfig StageConfig::for_label(StageLabel label) {
    StageConfig config;
    config.label = label;
    switch (label) {
        case StageLabel::D0:
            break;
        case StageLabel::D1:
            config.use_rules = true;
            config.rule_tier = RuleTier::Grammar;
            break;
        case StageLabel::D2:
            config.use_rules = true;
            config.rule_tier = RuleTier::Heuristic;
            break;
        case StageLabel::D3a:
            config.use_rules = true;
            config.rule_tier = RuleTier::Heuristic;
            config.use_tagger = true;
            config.map_mode = MapMode::Careful;
            break;
        case StageLabel::D3b:
            config.use_rules = true;
            config.rule_tier = RuleTier::Heuristic;
            config.use_tagger = true;
            config.map_mode = MapMode::Unambiguous;
            break;
        case StageLabel::D4:
            config.use_rules = true;
            config.rule_tier = RuleTier::Grammar;
            config.use_tagger = true;
            config.map_mode = MapMode::Unambiguous;
            break;
        case StageLabel::D5:
            config.use_tagger = true;
            config.map_mode = MapMode::Unambiguous;
            break;
    }
    return config;
}

std::string_view to_string(StageLabel label) {
    switch (label) {
        case StageLabel::D0: return "D0";
        case StageLabel::D1: return "D1";
        case StageLabel::D2: return "D2";
        case StageLabel::D3a: return "D3a";
        case StageLabel::D3b: return "D3b";
        case StageLabel::D4: return "D4";
        case StageLabel::D5: return "D5";
    }
    return "D0";
}

std::optional<StageLabel> parse_stage_label(std::string_view text) {
    for (StageLabel label : {StageLabel::D0, StageLabel::D1, StageLabel::D2,
                             StageLabel::D3a, StageLabel::D3b, StageLabel::D4,
                             StageLabel::D5})
        if (to_string(label) == text) return label;
    return std::nullopt;
}

PipelineResources load_resources(const std::filesystem::path& dir,
                                 const StageConfig& config) {
    PipelineResources resources;
    {
        std::string stage = stage_name(config, "analysis");
        auto lex = open_resource(dir / "fine.lex", stage);
        resources.fine_lexicon = load_lexicon(lex, Tagset::Fine);
        auto rules = open_resource(dir / "guesser.rules", stage);
        resources.fine_guesser = load_guesser(rules, Tagset::Fine);
        auto policy = open_resource(dir / "policy.tok", stage);
        resources.policy = parse_policy(policy);
    }
    if (config.use_rules) {
        std::string stage = stage_name(config, "rule disambiguation");
        auto grammar = open_resource(dir / "grammar.cg", stage);
        resources.grammar = parse_grammar(grammar);
    }
    if (config.use_tagger) {
        std::string stage = stage_name(config, "tagger");
        auto lex = open_resource(dir / "coarse.lex", stage);
        resources.coarse_lexicon = load_lexicon(lex, Tagset::Coarse);
        std::filesystem::path guesser_path = dir / "coarse.guesser";
        if (std::filesystem::exists(guesser_path)) {
            auto guesser = open_resource(guesser_path, stage);
            resources.coarse_guesser = load_guesser(guesser, Tagset::Coarse);
        }
        auto model = open_resource(dir / "model.hmm", stage);
        resources.model = parse_model(model);
        auto mapping = open_resource(dir / "mapping.map", stage);
        resources.mapping = parse_mapping(mapping);
    }
    return resources;
}

RunResult run(const StageConfig& config, std::string_view text,
              const PipelineResources& resources, const TraceSink& trace) {
    TokenizationPolicy fine_policy = resources.policy;
    fine_policy.mode = Tagset::Fine;
    RunResult result;
    result.corpus = analyze_tokens(tokenize(text, fine_policy),
                                   resources.fine_lexicon, resources.fine_guesser);

    if (config.use_rules) {
        if (!resources.grammar)
            throw ResourceError(stage_name(config, "rule disambiguation") +
                                ": grammar not loaded");
        for (std::size_t s = 0; s < result.corpus.sentences.size(); ++s)
            result.corpus.sentences[s] = disambiguate(
                result.corpus.sentences[s], *resources.grammar, config.rule_tier,
                trace, s);
    }

    if (!config.use_tagger) return result;

    std::string stage = stage_name(config, "tagger");
    if (!resources.coarse_lexicon) throw ResourceError(stage + ": coarse lexicon not loaded");
    if (!resources.model) throw ResourceError(stage + ": model not loaded");
    if (!resources.mapping) throw ResourceError(stage + ": mapping not loaded");

    // When no coarse guesser was provided, unknown words fall back on an
    // open class covering every coarse tag of the lexicon.
    GuesserConfig coarse_guesser;
    if (resources.coarse_guesser) {
        coarse_guesser = *resources.coarse_guesser;
    } else {
        coarse_guesser.tagset = Tagset::Coarse;
        for (const std::string& name : collect_tags(*resources.coarse_lexicon, coarse_guesser))
            coarse_guesser.open_class.push_back(Reading{Tag(name, Tagset::Coarse)});
        if (coarse_guesser.open_class.empty())
            throw ResourceError(stage + ": empty coarse lexicon");
    }

    TokenizationPolicy coarse_policy = resources.policy;
    coarse_policy.mode = Tagset::Coarse;
    std::vector<TokenSentence> coarse_sentences = tokenize(text, coarse_policy);
    coarse_sentences.erase(
        std::remove_if(coarse_sentences.begin(), coarse_sentences.end(),
                       [](const TokenSentence& s) { return s.empty(); }),
        coarse_sentences.end());
    if (coarse_sentences.size() != result.corpus.sentences.size())
        throw DataError("fine and coarse tokenization disagree on sentence count");

    const HmmModel& model = *resources.model;
    for (std::size_t s = 0; s < result.corpus.sentences.size(); ++s) {
        Sentence& fine_sentence = result.corpus.sentences[s];
        const TokenSentence& tokens = coarse_sentences[s];

        ClassSequence classes;
        Sentence coarse_sentence;
        classes.reserve(tokens.size());
        for (const Token& token : tokens)
            classes.push_back(classify(token.surface, *resources.coarse_lexicon,
                                       coarse_guesser, model.classes)
                                  .id);
        std::vector<std::size_t> decoded = viterbi(model, classes).tag_indices;
        for (std::size_t j = 0; j < tokens.size(); ++j) {
            Cohort cohort;
            cohort.surface = tokens[j].surface;
            cohort.readings.push_back(
                Reading{Tag(model.tags[decoded[j]], Tagset::Coarse)});
            coarse_sentence.cohorts.push_back(std::move(cohort));
        }

        std::vector<AlignmentLink> links =
            align(fine_sentence, coarse_sentence, resources.policy);
        std::vector<std::size_t> coarse_of =
            first_coarse_links(links, fine_sentence.cohorts.size());

        for (std::size_t i = 0; i < fine_sentence.cohorts.size(); ++i) {
            Cohort& cohort = fine_sentence.cohorts[i];
            if (!cohort.ambiguous()) continue;
            Tag coarse_tag(model.tags[decoded[coarse_of[i]]], Tagset::Coarse);
            if (config.map_mode == MapMode::Careful) {
                cohort = resolve_careful(cohort, coarse_tag, *resources.mapping);
            } else {
                ResolveResult resolved =
                    resolve_unambiguous(cohort, coarse_tag, *resources.mapping);
                cohort = std::move(resolved.cohort);
                if (resolved.residual) result.residual_cohorts += 1;
            }
        }
    }
    return result;
}

double EvalRow::ambiguous_percent() const {
    return total_tokens == 0
               ? 0.0
               : 100.0 * static_cast<double>(ambiguous_tokens) /
                     static_cast<double>(total_tokens);
}

double EvalRow::readings_per_word() const {
    return total_tokens == 0
               ? 0.0
               : static_cast<double>(total_readings) / static_cast<double>(total_tokens);
}

double EvalRow::error_percent() const {
    return total_tokens == 0
               ? 0.0
               : 100.0 * static_cast<double>(errors) / static_cast<double>(total_tokens);
}

EvalRow evaluate(const AnnotatedCorpus& output, const AnnotatedCorpus& gold,
                 std::string label) {
    std::vector<const Cohort*> out_cohorts;
    std::vector<const Cohort*> gold_cohorts;
    for (const Sentence& s : output.sentences)
        for (const Cohort& c : s.cohorts) out_cohorts.push_back(&c);
    for (const Sentence& s : gold.sentences)
        for (const Cohort& c : s.cohorts) gold_cohorts.push_back(&c);

    std::size_t shared = std::min(out_cohorts.size(), gold_cohorts.size());
    for (std::size_t i = 0; i < shared; ++i)
        if (out_cohorts[i]->surface != gold_cohorts[i]->surface)
            throw DataError("tokenization mismatch at token " + std::to_string(i) +
                            ": '" + out_cohorts[i]->surface + "' vs '" +
                            gold_cohorts[i]->surface + "'");
    if (out_cohorts.size() != gold_cohorts.size())
        throw DataError("token count mismatch: output has " +
                        std::to_string(out_cohorts.size()) + " tokens, gold has " +
                        std::to_string(gold_cohorts.size()) +
                        "; first divergence at token " + std::to_string(shared));
    if (out_cohorts.empty()) throw DataError("empty corpus");

    EvalRow row;
    row.label = std::move(label);
    for (std::size_t i = 0; i < out_cohorts.size(); ++i) {
        const Cohort& out = *out_cohorts[i];
        const Cohort& ref = *gold_cohorts[i];
        const Reading* gold_reading = ref.gold_reading();
        if (gold_reading == nullptr)
            throw DataError("gold corpus is ambiguous at token " + std::to_string(i) +
                            " ('" + ref.surface + "')");
        row.total_tokens += 1;
        row.total_readings += out.readings.size();
        if (out.ambiguous()) row.ambiguous_tokens += 1;
        if (!out.has_reading(*gold_reading)) row.errors += 1;
    }
    return row;
}

std::string report(const std::vector<EvalRow>& rows) {
    const std::vector<std::string> headers = {"Amb. words", "Readings",
                                              "Readings / word", "Errors",
                                              "Error rate (%)"};
    std::size_t label_width = 0;
    for (const EvalRow& row : rows) label_width = std::max(label_width, row.label.size());

    std::vector<std::vector<std::string>> cells;
    for (const EvalRow& row : rows)
        cells.push_back({format_fixed(row.ambiguous_percent(), 1) + " %",
                         std::to_string(row.total_readings),
                         format_fixed(row.readings_per_word(), 2),
                         std::to_string(row.errors),
                         format_fixed(row.error_percent(), 2) + " %"});

    std::vector<std::size_t> widths;
    for (std::size_t c = 0; c < headers.size(); ++c) {
        std::size_t w = headers[c].size();
        for (const auto& row : cells) w = std::max(w, row[c].size());
        widths.push_back(w);
    }

    std::ostringstream out;
    out << std::string(label_width, ' ');
    for (std::size_t c = 0; c < headers.size(); ++c)
        out << "  " << std::setw(static_cast<int>(widths[c])) << std::right
            << headers[c];
    out << '\n';
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out << std::setw(static_cast<int>(label_width)) << std::left << rows[r].label
            << std::right;
        for (std::size_t c = 0; c < headers.size(); ++c)
            out << "  " << std::setw(static_cast<int>(widths[c])) << cells[r][c];
        out << '\n';
    }
    return out.str();
}

std::string report_tsv(const std::vector<EvalRow>& rows) {
    std::ostringstream out;
    out << "label\tamb_words_percent\treadings\treadings_per_word\terrors\terror_rate_percent\n";
    for (const EvalRow& row : rows)
        out << row.label << '\t' << format_fixed(row.ambiguous_percent(), 1) << '\t'
            << row.total_readings << '\t' << format_fixed(row.readings_per_word(), 2)
            << '\t' << row.errors << '\t' << format_fixed(row.error_percent(), 2)
            << '\n';
    return out.str();
}

}  // namespace hybridtag
