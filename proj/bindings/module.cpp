#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hybridtag/pipeline.hpp"

namespace py = pybind11;
using namespace hybridtag;

PYBIND11_MODULE(_hybridtag, m) {
    m.doc() = "Hybrid rule-based and statistical part-of-speech disambiguation";

    py::register_exception<DataError>(m, "DataError");
    py::register_exception<ResourceError>(m, "ResourceError");

    py::enum_<Tagset>(m, "Tagset")
        .value("FINE", Tagset::Fine)
        .value("COARSE", Tagset::Coarse);

    py::class_<Tag>(m, "Tag")
        .def(py::init<std::string, Tagset>(), py::arg("name"),
             py::arg("tagset") = Tagset::Fine)
        .def_readonly("name", &Tag::name)
        .def_readonly("tagset", &Tag::tagset)
        .def(py::self == py::self)
        .def("__repr__", [](const Tag& t) { return "Tag('" + t.name + "')"; });

    py::class_<Reading>(m, "Reading")
        .def(py::init<std::vector<Tag>>(), py::arg("tags"))
        .def_readonly("tags", &Reading::tags)
        .def("contains", &Reading::contains)
        .def("str", &Reading::str)
        .def(py::self == py::self)
        .def("__repr__", [](const Reading& r) { return "Reading('" + r.str() + "')"; });

    py::class_<Cohort>(m, "Cohort")
        .def(py::init<>())
        .def_readwrite("surface", &Cohort::surface)
        .def_readwrite("readings", &Cohort::readings)
        .def_readwrite("gold_index", &Cohort::gold_index)
        .def_property_readonly("ambiguous", &Cohort::ambiguous)
        .def("has_reading", &Cohort::has_reading);

    py::class_<Sentence>(m, "Sentence")
        .def(py::init<>())
        .def_readwrite("cohorts", &Sentence::cohorts);

    py::class_<Token>(m, "Token")
        .def_readonly("surface", &Token::surface)
        .def_readonly("begin", &Token::begin)
        .def_readonly("end", &Token::end)
        .def("__repr__", [](const Token& t) { return "Token('" + t.surface + "')"; });

    py::class_<TokenizationPolicy>(m, "TokenizationPolicy")
        .def(py::init<>())
        .def_readwrite("mode", &TokenizationPolicy::mode)
        .def_readwrite("multiword_units", &TokenizationPolicy::multiword_units)
        .def_readwrite("contraction_splits", &TokenizationPolicy::contraction_splits);

    py::class_<AnnotatedCorpus>(m, "AnnotatedCorpus")
        .def(py::init<>())
        .def_readwrite("sentences", &AnnotatedCorpus::sentences)
        .def_readwrite("tagset", &AnnotatedCorpus::tagset)
        .def_property_readonly("token_count", &AnnotatedCorpus::token_count);

    py::class_<AmbiguityMetrics>(m, "AmbiguityMetrics")
        .def_readonly("total_tokens", &AmbiguityMetrics::total_tokens)
        .def_readonly("ambiguous_tokens", &AmbiguityMetrics::ambiguous_tokens)
        .def_readonly("total_readings", &AmbiguityMetrics::total_readings)
        .def_readonly("ambiguous_word_fraction", &AmbiguityMetrics::ambiguous_word_fraction)
        .def_readonly("readings_per_word", &AmbiguityMetrics::readings_per_word);

    m.def("tokenize", &tokenize, py::arg("text"), py::arg("policy"));
    m.def("ambiguity_metrics", &ambiguity_metrics, py::arg("corpus"));
    m.def("parse_corpus", &parse_corpus_text, py::arg("text"), py::arg("tagset"));
    m.def("serialize_corpus",
          py::overload_cast<const AnnotatedCorpus&>(&serialize_corpus),
          py::arg("corpus"));
    m.def("parse_policy", &parse_policy_text, py::arg("text"));

    py::class_<Lexicon>(m, "Lexicon")
        .def(py::init<>())
        .def_readwrite("entries", &Lexicon::entries)
        .def_readwrite("case_folding", &Lexicon::case_folding)
        .def("contains", &Lexicon::contains);

    py::class_<AffixRule>(m, "AffixRule")
        .def_readonly("prefix", &AffixRule::prefix)
        .def_readonly("suffix", &AffixRule::suffix)
        .def_readonly("readings", &AffixRule::readings)
        .def("matches", &AffixRule::matches);

    py::class_<GuesserConfig>(m, "GuesserConfig")
        .def(py::init<>())
        .def_readwrite("rules", &GuesserConfig::rules)
        .def_readwrite("open_class", &GuesserConfig::open_class);

    m.def("load_lexicon",
          [](const std::string& text, Tagset tagset) {
              return lexicon_from_text(text, tagset);
          },
          py::arg("text"), py::arg("tagset") = Tagset::Fine);
    m.def("serialize_lexicon",
          py::overload_cast<const Lexicon&>(&serialize_lexicon), py::arg("lexicon"));
    m.def("lexicon_from_corpus", &lexicon_from_corpus, py::arg("corpus"));
    m.def("load_guesser",
          [](const std::string& text, Tagset tagset) {
              return guesser_from_text(text, tagset);
          },
          py::arg("text"), py::arg("tagset") = Tagset::Fine);
    m.def("guess", &guess, py::arg("word"), py::arg("guesser"));
    m.def("analyze", &analyze, py::arg("word"), py::arg("lexicon"), py::arg("guesser"));
    m.def("analyze_tokens", &analyze_tokens, py::arg("sentences"), py::arg("lexicon"),
          py::arg("guesser"));

    py::enum_<RuleAction>(m, "RuleAction")
        .value("REMOVE", RuleAction::Remove)
        .value("SELECT", RuleAction::Select);

    py::enum_<RuleTier>(m, "RuleTier")
        .value("GRAMMAR", RuleTier::Grammar)
        .value("HEURISTIC", RuleTier::Heuristic);

    py::class_<ContextTest>(m, "ContextTest")
        .def_readonly("position", &ContextTest::position)
        .def_readonly("careful", &ContextTest::careful)
        .def_readonly("negate", &ContextTest::negate)
        .def_readonly("tags", &ContextTest::tags);

    py::class_<ConstraintRule>(m, "ConstraintRule")
        .def_readonly("action", &ConstraintRule::action)
        .def_readonly("target", &ConstraintRule::target)
        .def_readonly("tests", &ConstraintRule::tests)
        .def_readonly("tier", &ConstraintRule::tier)
        .def_readonly("line", &ConstraintRule::line);

    py::class_<Grammar>(m, "Grammar").def_readonly("rules", &Grammar::rules);

    m.def("parse_grammar", &parse_grammar_text, py::arg("text"));
    m.def("serialize_grammar",
          py::overload_cast<const Grammar&>(&serialize_grammar), py::arg("grammar"));
    m.def("rule_applies", &rule_applies, py::arg("rule"), py::arg("sentence"),
          py::arg("index"));
    m.def("disambiguate",
          [](const Sentence& sentence, const Grammar& grammar, RuleTier tier) {
              return disambiguate(sentence, grammar, tier);
          },
          py::arg("sentence"), py::arg("grammar"),
          py::arg("max_tier") = RuleTier::Heuristic);

    py::class_<EquivalenceClass>(m, "EquivalenceClass")
        .def_readonly("id", &EquivalenceClass::id)
        .def_readonly("tags", &EquivalenceClass::tags);

    py::class_<BiasSpec>(m, "BiasSpec")
        .def(py::init<>())
        .def_readwrite("transition", &BiasSpec::transition)
        .def_readwrite("symbol", &BiasSpec::symbol);

    py::class_<TrainingParams>(m, "TrainingParams")
        .def(py::init<>())
        .def_readwrite("iterations", &TrainingParams::iterations)
        .def_readwrite("block_size", &TrainingParams::block_size)
        .def_readwrite("convergence_epsilon", &TrainingParams::convergence_epsilon);

    py::class_<HmmModel>(m, "HmmModel")
        .def_readonly("tags", &HmmModel::tags)
        .def_readonly("classes", &HmmModel::classes)
        .def_readonly("initial", &HmmModel::initial)
        .def_readonly("transition", &HmmModel::transition)
        .def_readonly("emission", &HmmModel::emission)
        .def("validate", &HmmModel::validate);

    py::class_<PosteriorResult>(m, "PosteriorResult")
        .def_readonly("posteriors", &PosteriorResult::posteriors)
        .def_readonly("log_likelihood", &PosteriorResult::log_likelihood);

    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("model", &TrainResult::model)
        .def_readonly("log_likelihoods", &TrainResult::log_likelihoods);

    py::class_<ViterbiResult>(m, "ViterbiResult")
        .def_readonly("tag_indices", &ViterbiResult::tag_indices)
        .def_readonly("log_probability", &ViterbiResult::log_probability);

    m.def("equivalence_tags", &equivalence_tags, py::arg("word"),
          py::arg("coarse_lexicon"), py::arg("coarse_guesser"));
    m.def("build_classes", &build_classes, py::arg("coarse_lexicon"),
          py::arg("coarse_guesser"));
    m.def("collect_tags", &collect_tags, py::arg("coarse_lexicon"),
          py::arg("coarse_guesser"));
    m.def("classify", &classify, py::arg("word"), py::arg("coarse_lexicon"),
          py::arg("coarse_guesser"), py::arg("classes"),
          py::return_value_policy::copy);
    m.def("init_model", &init_model, py::arg("tags"), py::arg("classes"),
          py::arg("biases") = BiasSpec{});
    m.def("forward_backward", &forward_backward, py::arg("model"), py::arg("sequence"));
    m.def("train", &train, py::arg("model"), py::arg("corpus"), py::arg("params"));
    m.def("viterbi", &viterbi, py::arg("model"), py::arg("sequence"));
    m.def("viterbi_tags", &viterbi_tags, py::arg("model"), py::arg("sequence"));
    m.def("parse_model", &parse_model_text, py::arg("text"));
    m.def("serialize_model",
          py::overload_cast<const HmmModel&>(&serialize_model), py::arg("model"));
    m.def("parse_bias", &parse_bias_text, py::arg("text"));

    py::class_<AlignmentLink>(m, "AlignmentLink")
        .def_readonly("fine_index", &AlignmentLink::fine_index)
        .def_readonly("coarse_index", &AlignmentLink::coarse_index)
        .def("__repr__", [](const AlignmentLink& l) {
            return "AlignmentLink(" + std::to_string(l.fine_index) + ", " +
                   std::to_string(l.coarse_index) + ")";
        });

    py::class_<DecisionAlternative>(m, "DecisionAlternative")
        .def_readonly("reading", &DecisionAlternative::reading)
        .def_readonly("count", &DecisionAlternative::count)
        .def_readonly("fraction", &DecisionAlternative::fraction);

    py::class_<DecisionList>(m, "DecisionList")
        .def_readonly("coarse_tag", &DecisionList::coarse_tag)
        .def_readonly("alternatives", &DecisionList::alternatives);

    py::class_<TagMapping>(m, "TagMapping")
        .def(py::init<>())
        .def_readonly("lists", &TagMapping::lists);

    py::class_<ResolveResult>(m, "ResolveResult")
        .def_readonly("cohort", &ResolveResult::cohort)
        .def_readonly("residual", &ResolveResult::residual);

    m.def("align", &align, py::arg("fine"), py::arg("coarse"), py::arg("policy"));
    m.def("build_mapping", &build_mapping, py::arg("fine_gold"), py::arg("coarse_gold"),
          py::arg("policy"));
    m.def("resolve_careful", &resolve_careful, py::arg("cohort"), py::arg("coarse_tag"),
          py::arg("mapping"));
    m.def("resolve_unambiguous", &resolve_unambiguous, py::arg("cohort"),
          py::arg("coarse_tag"), py::arg("mapping"));
    m.def("parse_mapping", &parse_mapping_text, py::arg("text"));
    m.def("serialize_mapping",
          py::overload_cast<const TagMapping&>(&serialize_mapping), py::arg("mapping"));

    py::enum_<StageLabel>(m, "StageLabel")
        .value("D0", StageLabel::D0)
        .value("D1", StageLabel::D1)
        .value("D2", StageLabel::D2)
        .value("D3a", StageLabel::D3a)
        .value("D3b", StageLabel::D3b)
        .value("D4", StageLabel::D4)
        .value("D5", StageLabel::D5);

    py::enum_<MapMode>(m, "MapMode")
        .value("CAREFUL", MapMode::Careful)
        .value("UNAMBIGUOUS", MapMode::Unambiguous);

    py::class_<StageConfig>(m, "StageConfig")
        .def_static("for_label", &StageConfig::for_label, py::arg("label"))
        .def_readonly("label", &StageConfig::label)
        .def_readonly("use_rules", &StageConfig::use_rules)
        .def_readonly("rule_tier", &StageConfig::rule_tier)
        .def_readonly("use_tagger", &StageConfig::use_tagger)
        .def_readonly("map_mode", &StageConfig::map_mode);

    py::class_<PipelineResources>(m, "PipelineResources")
        .def(py::init<>())
        .def_readwrite("fine_lexicon", &PipelineResources::fine_lexicon)
        .def_readwrite("fine_guesser", &PipelineResources::fine_guesser)
        .def_readwrite("policy", &PipelineResources::policy)
        .def_readwrite("grammar", &PipelineResources::grammar)
        .def_readwrite("coarse_lexicon", &PipelineResources::coarse_lexicon)
        .def_readwrite("coarse_guesser", &PipelineResources::coarse_guesser)
        .def_readwrite("model", &PipelineResources::model)
        .def_readwrite("mapping", &PipelineResources::mapping);

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("corpus", &RunResult::corpus)
        .def_readonly("residual_cohorts", &RunResult::residual_cohorts);

    py::class_<EvalRow>(m, "EvalRow")
        .def_readonly("label", &EvalRow::label)
        .def_readonly("total_tokens", &EvalRow::total_tokens)
        .def_readonly("ambiguous_tokens", &EvalRow::ambiguous_tokens)
        .def_readonly("total_readings", &EvalRow::total_readings)
        .def_readonly("errors", &EvalRow::errors)
        .def_property_readonly("ambiguous_percent", &EvalRow::ambiguous_percent)
        .def_property_readonly("readings_per_word", &EvalRow::readings_per_word)
        .def_property_readonly("error_percent", &EvalRow::error_percent);

    m.def("load_resources", &load_resources, py::arg("directory"), py::arg("config"));
    m.def("run",
          [](const StageConfig& config, const std::string& text,
             const PipelineResources& resources) {
              return run(config, text, resources);
          },
          py::arg("config"), py::arg("text"), py::arg("resources"));
    m.def("evaluate", &evaluate, py::arg("output"), py::arg("gold"),
          py::arg("label") = std::string());
    m.def("report", &report, py::arg("rows"));
    m.def("report_tsv", &report_tsv, py::arg("rows"));
}
