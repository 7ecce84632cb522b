#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <hybridtag/pipeline.hpp>

#include "helpers.hpp"
#include "synthetic.hpp"

using namespace hybridtag;
using namespace testutil;

namespace {

const char* kDemoText = "The cook was cooling the water.";

PipelineResources demo_resources(const StageConfig& config) {
    StageConfig without_tagger = config;
    without_tagger.use_tagger = false;
    PipelineResources resources =
        load_resources(HYBRIDTAG_DATA_DIR, without_tagger);
    if (!config.use_tagger) return resources;

    std::ifstream coarse(std::string(HYBRIDTAG_DATA_DIR) + "/coarse.lex");
    REQUIRE(coarse.good());
    resources.coarse_lexicon = load_lexicon(coarse, Tagset::Coarse);
    std::ifstream guesser(std::string(HYBRIDTAG_DATA_DIR) + "/coarse.guesser");
    REQUIRE(guesser.good());
    resources.coarse_guesser = load_guesser(guesser, Tagset::Coarse);
    std::ifstream mapping(std::string(HYBRIDTAG_DATA_DIR) + "/mapping.map");
    REQUIRE(mapping.good());
    resources.mapping = parse_mapping(mapping);
    std::ifstream bias_in(std::string(HYBRIDTAG_DATA_DIR) + "/bias.demo");
    REQUIRE(bias_in.good());
    BiasSpec biases = parse_bias(bias_in);

    HmmModel model = init_model(
        collect_tags(*resources.coarse_lexicon, *resources.coarse_guesser),
        build_classes(*resources.coarse_lexicon, *resources.coarse_guesser),
        biases);
    std::ifstream train_in(std::string(HYBRIDTAG_DATA_DIR) + "/train.txt");
    REQUIRE(train_in.good());
    std::stringstream buffer;
    buffer << train_in.rdbuf();
    TokenizationPolicy coarse_policy = resources.policy;
    coarse_policy.mode = Tagset::Coarse;
    std::vector<ClassSequence> corpus;
    for (const TokenSentence& sentence : tokenize(buffer.str(), coarse_policy)) {
        ClassSequence classes;
        for (const Token& token : sentence)
            classes.push_back(classify(token.surface, *resources.coarse_lexicon,
                                       *resources.coarse_guesser, model.classes)
                                  .id);
        corpus.push_back(std::move(classes));
    }
    TrainingParams params;
    params.iterations = 5;
    params.block_size = 8;
    resources.model = train(model, corpus, params).model;
    return resources;
}

std::size_t ambiguous_count(const AnnotatedCorpus& corpus) {
    std::size_t n = 0;
    for (const Sentence& s : corpus.sentences)
        for (const Cohort& c : s.cohorts)
            if (c.ambiguous()) ++n;
    return n;
}

}  // namespace

TEST_CASE("stage labels map to their cascade configurations") {
    StageConfig d0 = StageConfig::for_label(StageLabel::D0);
    CHECK_FALSE(d0.use_rules);
    CHECK_FALSE(d0.use_tagger);

    StageConfig d1 = StageConfig::for_label(StageLabel::D1);
    CHECK(d1.use_rules);
    CHECK(d1.rule_tier == RuleTier::Grammar);
    CHECK_FALSE(d1.use_tagger);

    StageConfig d2 = StageConfig::for_label(StageLabel::D2);
    CHECK(d2.rule_tier == RuleTier::Heuristic);

    StageConfig d3a = StageConfig::for_label(StageLabel::D3a);
    CHECK(d3a.use_rules);
    CHECK(d3a.use_tagger);
    CHECK(d3a.rule_tier == RuleTier::Heuristic);
    CHECK(d3a.map_mode == MapMode::Careful);

    StageConfig d3b = StageConfig::for_label(StageLabel::D3b);
    CHECK(d3b.map_mode == MapMode::Unambiguous);

    StageConfig d4 = StageConfig::for_label(StageLabel::D4);
    CHECK(d4.use_rules);
    CHECK(d4.rule_tier == RuleTier::Grammar);
    CHECK(d4.use_tagger);

    StageConfig d5 = StageConfig::for_label(StageLabel::D5);
    CHECK_FALSE(d5.use_rules);
    CHECK(d5.use_tagger);

    for (StageLabel label : {StageLabel::D0, StageLabel::D1, StageLabel::D2,
                             StageLabel::D3a, StageLabel::D3b, StageLabel::D4,
                             StageLabel::D5})
        CHECK(parse_stage_label(to_string(label)) == label);
    CHECK_FALSE(parse_stage_label("D6").has_value());
    CHECK_FALSE(parse_stage_label("d0").has_value());
}

TEST_CASE("resource loading reports the stage that needs a missing file") {
    try {
        load_resources("/nonexistent-dir", StageConfig::for_label(StageLabel::D0));
        FAIL("expected ResourceError");
    } catch (const ResourceError& e) {
        std::string what = e.what();
        CHECK(what.find("analysis stage for D0") == 0);
        CHECK(what.find("fine.lex") != std::string::npos);
    }

    // The demo directory carries no trained model, so tagger stages fail
    // while rule stages load fine.
    CHECK_NOTHROW(load_resources(HYBRIDTAG_DATA_DIR,
                                 StageConfig::for_label(StageLabel::D2)));
    try {
        load_resources(HYBRIDTAG_DATA_DIR, StageConfig::for_label(StageLabel::D3b));
        FAIL("expected ResourceError");
    } catch (const ResourceError& e) {
        std::string what = e.what();
        CHECK(what.find("tagger stage for D3b") == 0);
        CHECK(what.find("model.hmm") != std::string::npos);
    }
}

TEST_CASE("the morphology-only stage reproduces the analyzer output") {
    StageConfig config = StageConfig::for_label(StageLabel::D0);
    PipelineResources resources = demo_resources(config);
    RunResult result = run(config, kDemoText, resources);
    CHECK(result.residual_cohorts == 0);

    TokenizationPolicy fine_policy = resources.policy;
    fine_policy.mode = Tagset::Fine;
    AnnotatedCorpus expected =
        analyze_tokens(tokenize(kDemoText, fine_policy), resources.fine_lexicon,
                       resources.fine_guesser);
    CHECK(serialize_corpus(result.corpus) == serialize_corpus(expected));

    // "cook" after "The" is fully ambiguous at this stage.
    CHECK(result.corpus.sentences[0].cohorts[1].readings.size() == 5);
}

TEST_CASE("each cascade stage only ever shrinks reading sets") {
    StageConfig d0 = StageConfig::for_label(StageLabel::D0);
    StageConfig d1 = StageConfig::for_label(StageLabel::D1);
    StageConfig d2 = StageConfig::for_label(StageLabel::D2);
    PipelineResources resources = demo_resources(d2);

    AnnotatedCorpus out0 = run(d0, kDemoText, resources).corpus;
    AnnotatedCorpus out1 = run(d1, kDemoText, resources).corpus;
    AnnotatedCorpus out2 = run(d2, kDemoText, resources).corpus;

    auto subset_of = [](const AnnotatedCorpus& a, const AnnotatedCorpus& b) {
        REQUIRE(a.sentences.size() == b.sentences.size());
        for (std::size_t s = 0; s < a.sentences.size(); ++s) {
            REQUIRE(a.sentences[s].cohorts.size() == b.sentences[s].cohorts.size());
            for (std::size_t i = 0; i < a.sentences[s].cohorts.size(); ++i) {
                const Cohort& narrow = a.sentences[s].cohorts[i];
                const Cohort& wide = b.sentences[s].cohorts[i];
                CHECK(!narrow.readings.empty());
                for (const Reading& r : narrow.readings) CHECK(wide.has_reading(r));
            }
        }
    };
    subset_of(out1, out0);
    subset_of(out2, out1);

    // The determiner rule has resolved "cook" down to two readings.
    CHECK(out1.sentences[0].cohorts[1].readings.size() == 2);
}

TEST_CASE("tagger stages resolve what the rules left open") {
    StageConfig d2 = StageConfig::for_label(StageLabel::D2);
    StageConfig d3a = StageConfig::for_label(StageLabel::D3a);
    StageConfig d3b = StageConfig::for_label(StageLabel::D3b);
    PipelineResources resources = demo_resources(d3b);

    AnnotatedCorpus out2 = run(d2, kDemoText, resources).corpus;
    RunResult r3b = run(d3b, kDemoText, resources);

    // Unambiguous cohorts pass through the mapping stage untouched.
    for (std::size_t s = 0; s < out2.sentences.size(); ++s)
        for (std::size_t i = 0; i < out2.sentences[s].cohorts.size(); ++i)
            if (!out2.sentences[s].cohorts[i].ambiguous())
                CHECK(r3b.corpus.sentences[s].cohorts[i].readings ==
                      out2.sentences[s].cohorts[i].readings);

    // Forced mapping leaves ambiguity only in residual cohorts.
    CHECK(ambiguous_count(r3b.corpus) == r3b.residual_cohorts);

    const Cohort& cook = r3b.corpus.sentences[0].cohorts[1];
    REQUIRE(cook.readings.size() == 1);
    bool verbal_or_nominal = cook.readings[0].str() == "V INF" ||
                             cook.readings[0].str() == "N NOM SG";
    CHECK(verbal_or_nominal);

    // Careful mapping is at least as cautious as forced mapping.
    AnnotatedCorpus out3a = run(d3a, kDemoText, resources).corpus;
    for (std::size_t s = 0; s < out3a.sentences.size(); ++s)
        for (std::size_t i = 0; i < out3a.sentences[s].cohorts.size(); ++i) {
            const Cohort& careful = out3a.sentences[s].cohorts[i];
            const Cohort& forced = r3b.corpus.sentences[s].cohorts[i];
            for (const Reading& r : forced.readings)
                CHECK(careful.has_reading(r));
        }
}

TEST_CASE("a rule stage without a grammar is a resource error") {
    StageConfig d1 = StageConfig::for_label(StageLabel::D1);
    PipelineResources resources = demo_resources(StageConfig::for_label(StageLabel::D0));
    try {
        run(d1, kDemoText, resources);
        FAIL("expected ResourceError");
    } catch (const ResourceError& e) {
        CHECK(std::string(e.what()).find("rule disambiguation stage for D1") == 0);
    }
}

TEST_CASE("the synthetic language separates the cascade stages") {
    PipelineResources resources = synthetic::make_resources();
    std::string text = synthetic::text_of(synthetic::eval_templates());
    AnnotatedCorpus gold =
        synthetic::gold_corpus(synthetic::eval_templates(), Tagset::Fine);

    RunResult d2 = run(StageConfig::for_label(StageLabel::D2), text, resources);
    RunResult d3b = run(StageConfig::for_label(StageLabel::D3b), text, resources);
    RunResult d5 = run(StageConfig::for_label(StageLabel::D5), text, resources);

    EvalRow row2 = evaluate(d2.corpus, gold, "D2");
    EvalRow row3b = evaluate(d3b.corpus, gold, "D3b");
    EvalRow row5 = evaluate(d5.corpus, gold, "D5");

    // Rules resolve karn exactly; the tagger's horizon is too short.
    CHECK(row2.errors == 0);
    CHECK(row3b.errors < row5.errors);
    CHECK(row5.errors >= 5);

    // Forced mapping leaves only the unmapped fribble cohorts ambiguous.
    CHECK(row2.ambiguous_tokens == 5);
    CHECK(row3b.ambiguous_tokens == 2);
    CHECK(d3b.residual_cohorts == 2);
    CHECK(ambiguous_count(d3b.corpus) == d3b.residual_cohorts);
}

TEST_CASE("evaluation counts missing gold readings as errors") {
    AnnotatedCorpus gold = parse_corpus_text(
        "\"<the>\"\n"
        "\tDET\n"
        "\"<cook>\"\n"
        "\tV INF\n"
        "\tN NOM SG <Gold>\n"
        "\"<water>\"\n"
        "\tN NOM SG\n"
        "\"<.>\"\n"
        "\tPUNCT\n",
        Tagset::Fine);

    AnnotatedCorpus output = parse_corpus_text(
        "\"<the>\"\n"
        "\tDET\n"
        "\"<cook>\"\n"
        "\tV INF\n"
        "\tN NOM SG\n"
        "\"<water>\"\n"
        "\tV INF\n"
        "\"<.>\"\n"
        "\tPUNCT\n",
        Tagset::Fine);

    EvalRow row = evaluate(output, gold, "demo");
    CHECK(row.label == "demo");
    CHECK(row.total_tokens == 4);
    // "cook" is still ambiguous but keeps the gold reading: not an error.
    // "water" lost its gold reading: one error.
    CHECK(row.ambiguous_tokens == 1);
    CHECK(row.total_readings == 5);
    CHECK(row.errors == 1);
    CHECK(row.ambiguous_percent() == doctest::Approx(25.0));
    CHECK(row.readings_per_word() == doctest::Approx(1.25));
    CHECK(row.error_percent() == doctest::Approx(25.0));
}

TEST_CASE("evaluation rejects corpora over different tokens") {
    AnnotatedCorpus gold = parse_corpus_text("\"<a>\"\n\tDET\n", Tagset::Fine);
    AnnotatedCorpus other = parse_corpus_text("\"<b>\"\n\tDET\n", Tagset::Fine);
    try {
        evaluate(other, gold);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()) ==
              "tokenization mismatch at token 0: 'b' vs 'a'");
    }

    AnnotatedCorpus longer =
        parse_corpus_text("\"<a>\"\n\tDET\n\"<b>\"\n\tDET\n", Tagset::Fine);
    try {
        evaluate(longer, gold);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        std::string what = e.what();
        CHECK(what.find("token count mismatch") != std::string::npos);
        CHECK(what.find("first divergence at token 1") != std::string::npos);
    }

    AnnotatedCorpus ambiguous_gold = parse_corpus_text(
        "\"<a>\"\n\tDET\n\tPRON\n", Tagset::Fine);
    AnnotatedCorpus output = parse_corpus_text("\"<a>\"\n\tDET\n", Tagset::Fine);
    CHECK_THROWS_AS(evaluate(output, ambiguous_gold), DataError);
}

TEST_CASE("the report table renders fixed-width columns") {
    EvalRow row;
    row.label = "D0";
    row.total_tokens = 1000;
    row.ambiguous_tokens = 376;
    row.total_readings = 1770;
    row.errors = 9;

    std::string table = report({row});
    CHECK(table ==
          "    Amb. words  Readings  Readings / word  Errors  Error rate (%)\n"
          "D0      37.6 %      1770             1.77       9          0.90 %\n");

    std::string tsv = report_tsv({row});
    CHECK(tsv ==
          "label\tamb_words_percent\treadings\treadings_per_word\terrors\terror_rate_percent\n"
          "D0\t37.6\t1770\t1.77\t9\t0.90\n");
}
