#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hybridtag/pipeline.hpp"

namespace {

using namespace hybridtag;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ResourceError("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string read_input(const std::string& path) {
    if (path.empty()) {
        std::ostringstream out;
        out << std::cin.rdbuf();
        return out.str();
    }
    return read_text_file(path);
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ResourceError("cannot open " + path + " for writing");
    out << content;
    if (!out) throw ResourceError("cannot write " + path);
}

TraceSink stderr_trace(bool enabled) {
    if (!enabled) return nullptr;
    return [](const TraceEvent& event) {
        std::cerr << "rule line " << event.rule_line << ": sentence "
                  << event.sentence_index << " cohort " << event.cohort_index
                  << " removed";
        for (const Reading& reading : event.removed)
            std::cerr << " [" << reading.str() << "]";
        std::cerr << '\n';
    };
}

TokenizationPolicy load_policy_or_default(const std::string& path) {
    if (path.empty()) return TokenizationPolicy{};
    std::ifstream in(path);
    if (!in) throw ResourceError("cannot open " + path);
    return parse_policy(in);
}

struct AnalyzeArgs {
    std::string lexicon, guesser, policy, in, out;
};

int run_analyze(const AnalyzeArgs& args) {
    std::ifstream lex_in(args.lexicon);
    if (!lex_in) throw ResourceError("cannot open " + args.lexicon);
    std::vector<std::string> warnings;
    Lexicon lexicon = load_lexicon(lex_in, Tagset::Fine, &warnings);
    for (const std::string& w : warnings) std::cerr << args.lexicon << ": " << w << '\n';
    std::ifstream guess_in(args.guesser);
    if (!guess_in) throw ResourceError("cannot open " + args.guesser);
    GuesserConfig guesser = load_guesser(guess_in, Tagset::Fine);
    TokenizationPolicy policy = load_policy_or_default(args.policy);
    policy.mode = Tagset::Fine;

    AnnotatedCorpus corpus =
        analyze_tokens(tokenize(read_input(args.in), policy), lexicon, guesser);
    write_output(args.out, serialize_corpus(corpus));
    return 0;
}

struct DisambiguateArgs {
    std::string grammar, tier = "heuristic", in, out;
    bool trace = false;
};

int run_disambiguate(const DisambiguateArgs& args) {
    std::ifstream grammar_in(args.grammar);
    if (!grammar_in) throw ResourceError("cannot open " + args.grammar);
    Grammar grammar = parse_grammar(grammar_in);
    RuleTier tier = args.tier == "grammar" ? RuleTier::Grammar : RuleTier::Heuristic;
    AnnotatedCorpus corpus = parse_corpus_text(read_input(args.in), Tagset::Fine);
    TraceSink trace = stderr_trace(args.trace);
    for (std::size_t s = 0; s < corpus.sentences.size(); ++s)
        corpus.sentences[s] = disambiguate(corpus.sentences[s], grammar, tier, trace, s);
    write_output(args.out, serialize_corpus(corpus));
    return 0;
}

struct TrainArgs {
    std::string coarse_lexicon, coarse_guesser, bias, corpus, policy, out;
    std::size_t iterations = 0;
    std::size_t block = 8;
    double epsilon = 0.0;
};

int run_train(const TrainArgs& args) {
    std::ifstream lex_in(args.coarse_lexicon);
    if (!lex_in) throw ResourceError("cannot open " + args.coarse_lexicon);
    Lexicon lexicon = load_lexicon(lex_in, Tagset::Coarse);

    GuesserConfig guesser;
    guesser.tagset = Tagset::Coarse;
    if (!args.coarse_guesser.empty()) {
        std::ifstream guess_in(args.coarse_guesser);
        if (!guess_in) throw ResourceError("cannot open " + args.coarse_guesser);
        guesser = load_guesser(guess_in, Tagset::Coarse);
    } else {
        for (const std::string& name : collect_tags(lexicon, guesser))
            guesser.open_class.push_back(Reading{Tag(name, Tagset::Coarse)});
        if (guesser.open_class.empty())
            throw ResourceError("coarse lexicon " + args.coarse_lexicon + " is empty");
    }

    BiasSpec biases;
    if (!args.bias.empty()) {
        std::ifstream bias_in(args.bias);
        if (!bias_in) throw ResourceError("cannot open " + args.bias);
        biases = parse_bias(bias_in);
    }

    TokenizationPolicy policy = load_policy_or_default(args.policy);
    policy.mode = Tagset::Coarse;

    std::vector<EquivalenceClass> classes = build_classes(lexicon, guesser);
    HmmModel model = init_model(collect_tags(lexicon, guesser), classes, biases);

    std::vector<ClassSequence> sequences;
    for (const TokenSentence& sentence : tokenize(read_text_file(args.corpus), policy)) {
        ClassSequence seq;
        seq.reserve(sentence.size());
        for (const Token& token : sentence)
            seq.push_back(classify(token.surface, lexicon, guesser, model.classes).id);
        if (!seq.empty()) sequences.push_back(std::move(seq));
    }
    if (sequences.empty()) throw DataError("training corpus has no sentences");

    TrainingParams params;
    params.iterations = args.iterations;
    params.block_size = args.block;
    params.convergence_epsilon = args.epsilon;
    TrainResult result = train(model, sequences, params);
    for (std::size_t i = 0; i < result.log_likelihoods.size(); ++i)
        std::cerr << "iteration " << (i + 1) << " log-likelihood "
                  << result.log_likelihoods[i] << '\n';

    write_output(args.out, serialize_model(result.model));
    return 0;
}

struct TagArgs {
    std::string config, resources, in, out;
    bool trace = false;
};

int run_tag(const TagArgs& args) {
    std::optional<StageLabel> label = parse_stage_label(args.config);
    if (!label) throw DataError("unknown configuration: " + args.config);
    StageConfig config = StageConfig::for_label(*label);
    PipelineResources resources = load_resources(args.resources, config);
    RunResult result =
        run(config, read_input(args.in), resources, stderr_trace(args.trace));
    if (result.residual_cohorts > 0)
        std::cerr << result.residual_cohorts << " cohorts left ambiguous\n";
    write_output(args.out, serialize_corpus(result.corpus));
    return 0;
}

struct EvalArgs {
    std::string gold;
    std::vector<std::string> outputs;
    std::string format = "table";
};

int run_eval(const EvalArgs& args) {
    AnnotatedCorpus gold = parse_corpus_text(read_text_file(args.gold), Tagset::Fine);
    std::vector<EvalRow> rows;
    for (const std::string& path : args.outputs) {
        AnnotatedCorpus output = parse_corpus_text(read_text_file(path), Tagset::Fine);
        rows.push_back(evaluate(output, gold,
                                std::filesystem::path(path).stem().string()));
    }
    std::cout << (args.format == "tsv" ? report_tsv(rows) : report(rows));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid rule-based and statistical part-of-speech disambiguation"};
    app.require_subcommand(1);

    AnalyzeArgs analyze_args;
    CLI::App* analyze_cmd =
        app.add_subcommand("analyze", "Tokenize text and attach lexical readings");
    analyze_cmd->add_option("--lexicon", analyze_args.lexicon, "Fine lexicon file")
        ->required();
    analyze_cmd->add_option("--guesser", analyze_args.guesser, "Guesser rule file")
        ->required();
    analyze_cmd->add_option("--policy", analyze_args.policy, "Tokenization policy file");
    analyze_cmd->add_option("--in", analyze_args.in, "Input text (default stdin)");
    analyze_cmd->add_option("--out", analyze_args.out, "Output corpus (default stdout)");

    DisambiguateArgs disambiguate_args;
    CLI::App* disambiguate_cmd =
        app.add_subcommand("disambiguate", "Apply constraint rules to a corpus");
    disambiguate_cmd->add_option("--grammar", disambiguate_args.grammar, "Rule file")
        ->required();
    disambiguate_cmd
        ->add_option("--tier", disambiguate_args.tier, "Highest rule tier to apply")
        ->check(CLI::IsMember({"grammar", "heuristic"}));
    disambiguate_cmd->add_option("--in", disambiguate_args.in, "Input corpus")
        ->required();
    disambiguate_cmd->add_option("--out", disambiguate_args.out, "Output corpus")
        ->required();
    disambiguate_cmd->add_flag("--trace", disambiguate_args.trace,
                               "Log every rule application to stderr");

    TrainArgs train_args;
    CLI::App* train_cmd =
        app.add_subcommand("train-hmm", "Estimate a tagging model from raw text");
    train_cmd
        ->add_option("--coarse-lexicon", train_args.coarse_lexicon, "Coarse lexicon file")
        ->required();
    train_cmd->add_option("--coarse-guesser", train_args.coarse_guesser,
                          "Coarse guesser file for unknown words");
    train_cmd->add_option("--bias", train_args.bias, "Bias weight file");
    train_cmd->add_option("--corpus", train_args.corpus, "Training text")->required();
    train_cmd->add_option("--policy", train_args.policy, "Tokenization policy file");
    train_cmd->add_option("--iterations", train_args.iterations, "Re-estimation passes")
        ->required();
    train_cmd->add_option("--block", train_args.block, "Sentences per accumulation block");
    train_cmd->add_option("--epsilon", train_args.epsilon,
                          "Stop when log-likelihood gain drops below this");
    train_cmd->add_option("--out", train_args.out, "Model file to write")->required();

    TagArgs tag_args;
    CLI::App* tag_cmd = app.add_subcommand("tag", "Run a cascade configuration over text");
    tag_cmd->add_option("--config", tag_args.config, "One of D0 D1 D2 D3a D3b D4 D5")
        ->required();
    tag_cmd->add_option("--resources", tag_args.resources, "Resource directory")
        ->required();
    tag_cmd->add_option("--in", tag_args.in, "Input text (default stdin)");
    tag_cmd->add_option("--out", tag_args.out, "Output corpus (default stdout)");
    tag_cmd->add_flag("--trace", tag_args.trace, "Log every rule application to stderr");

    EvalArgs eval_args;
    CLI::App* eval_cmd =
        app.add_subcommand("eval", "Score tagged outputs against a gold corpus");
    eval_cmd->add_option("--gold", eval_args.gold, "Gold corpus")->required();
    eval_cmd->add_option("--out", eval_args.outputs, "Tagged output corpora")
        ->required()
        ->take_all();
    eval_cmd->add_option("--format", eval_args.format, "Report format")
        ->check(CLI::IsMember({"table", "tsv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (analyze_cmd->parsed()) return run_analyze(analyze_args);
        if (disambiguate_cmd->parsed()) return run_disambiguate(disambiguate_args);
        if (train_cmd->parsed()) return run_train(train_args);
        if (tag_cmd->parsed()) return run_tag(tag_args);
        if (eval_cmd->parsed()) return run_eval(eval_args);
    } catch (const hybridtag::ResourceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const hybridtag::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
