#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <hybridtag/core.hpp>
#include <hybridtag/hmm.hpp>

namespace {

namespace fs = std::filesystem;

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

const fs::path& work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "hybridtag-cli-tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

CliResult run_cli(const std::string& args, const std::string& stdin_text = "") {
    fs::path out_path = work_dir() / "stdout.txt";
    fs::path err_path = work_dir() / "stderr.txt";
    fs::path in_path = work_dir() / "stdin.txt";
    spit(in_path, stdin_text);

    std::string command = std::string(HYBRIDTAG_CLI_PATH) + " " + args + " < " +
                          in_path.string() + " > " + out_path.string() + " 2> " +
                          err_path.string();
    int status = std::system(command.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_path);
    result.err = slurp(err_path);
    return result;
}

std::string data_file(const char* name) {
    return std::string(HYBRIDTAG_DATA_DIR) + "/" + name;
}

std::string analyze_args() {
    return "analyze --lexicon " + data_file("fine.lex") + " --guesser " +
           data_file("guesser.rules") + " --policy " + data_file("policy.tok");
}

// Resource directory with a model trained by the CLI itself; built once.
const fs::path& resource_dir() {
    static const fs::path dir = [] {
        fs::path d = work_dir() / "resources";
        fs::create_directories(d);
        for (const char* name : {"fine.lex", "guesser.rules", "policy.tok",
                                 "grammar.cg", "coarse.lex", "coarse.guesser",
                                 "mapping.map"})
            fs::copy_file(data_file(name), d / name,
                          fs::copy_options::overwrite_existing);
        CliResult trained = run_cli(
            "train-hmm --coarse-lexicon " + data_file("coarse.lex") +
            " --coarse-guesser " + data_file("coarse.guesser") + " --bias " +
            data_file("bias.demo") + " --corpus " + data_file("train.txt") +
            " --policy " + data_file("policy.tok") +
            " --iterations 5 --block 4 --out " + (d / "model.hmm").string());
        REQUIRE(trained.exit_code == 0);
        return d;
    }();
    return dir;
}

}  // namespace

TEST_CASE("usage errors exit with status 1") {
    CHECK(run_cli("").exit_code == 1);
    CHECK(run_cli("bogus-subcommand").exit_code == 1);
    CHECK(run_cli("analyze").exit_code == 1);
    CHECK(run_cli("tag --config D0").exit_code == 1);
    CHECK(run_cli("eval --gold x --out y --format xml").exit_code == 1);

    CliResult help = run_cli("--help");
    CHECK(help.exit_code == 0);
    CHECK(help.out.find("analyze") != std::string::npos);
    CHECK(help.out.find("train-hmm") != std::string::npos);
}

TEST_CASE("analyze reads stdin and writes a parsable corpus") {
    CliResult result = run_cli(analyze_args(), "The cook was cooling the water.");
    REQUIRE(result.exit_code == 0);

    hybridtag::AnnotatedCorpus corpus =
        hybridtag::parse_corpus_text(result.out, hybridtag::Tagset::Fine);
    REQUIRE(corpus.sentences.size() == 1);
    CHECK(corpus.sentences[0].cohorts.size() == 7);
    CHECK(corpus.sentences[0].cohorts[1].readings.size() == 5);

    CliResult again = run_cli(analyze_args(), "The cook was cooling the water.");
    CHECK(again.out == result.out);
}

TEST_CASE("analyze reports duplicate lexicon lines on stderr") {
    fs::path lex = work_dir() / "dup.lex";
    spit(lex, "cook\tV INF\ncook\tV INF\n");
    fs::path guesser = work_dir() / "mini.rules";
    spit(guesser, "OPENCLASS\tN NOM SG\n");
    CliResult result = run_cli(
        "analyze --lexicon " + lex.string() + " --guesser " + guesser.string(),
        "cook");
    CHECK(result.exit_code == 0);
    CHECK(result.err.find("duplicate entry for 'cook'") != std::string::npos);
}

TEST_CASE("missing files exit 3, malformed content exits 2") {
    CliResult missing = run_cli(
        "analyze --lexicon /nonexistent.lex --guesser " + data_file("guesser.rules"));
    CHECK(missing.exit_code == 3);
    CHECK(missing.err.find("cannot open") != std::string::npos);

    fs::path bad = work_dir() / "bad.lex";
    spit(bad, "no tab separator here\n");
    CliResult malformed = run_cli(
        "analyze --lexicon " + bad.string() + " --guesser " +
        data_file("guesser.rules"));
    CHECK(malformed.exit_code == 2);
    CHECK(malformed.err.find("error: line 1:") != std::string::npos);

    CliResult unknown_config = run_cli(
        "tag --config D9 --resources " + resource_dir().string());
    CHECK(unknown_config.exit_code == 2);

    fs::path partial = work_dir() / "partial";
    fs::create_directories(partial);
    for (const char* name : {"fine.lex", "guesser.rules", "policy.tok",
                             "grammar.cg", "coarse.lex", "coarse.guesser",
                             "mapping.map"})
        fs::copy_file(resource_dir() / name, partial / name,
                      fs::copy_options::overwrite_existing);
    CliResult no_model = run_cli(
        "tag --config D3b --resources " + partial.string());
    CHECK(no_model.exit_code == 3);
    CHECK(no_model.err.find("tagger stage for D3b") != std::string::npos);
}

TEST_CASE("disambiguate applies the requested tier and traces to stderr") {
    CliResult analyzed = run_cli(analyze_args(), "The cook was cooling the water.");
    REQUIRE(analyzed.exit_code == 0);
    fs::path corpus = work_dir() / "analyzed.txt";
    spit(corpus, analyzed.out);
    fs::path out = work_dir() / "rules.txt";

    CliResult result = run_cli("disambiguate --grammar " + data_file("grammar.cg") +
                               " --tier grammar --in " + corpus.string() +
                               " --out " + out.string() + " --trace");
    REQUIRE(result.exit_code == 0);
    CHECK(result.err.find("rule line") != std::string::npos);
    CHECK(result.err.find("removed [V PRES -SG3 VFIN]") != std::string::npos);

    hybridtag::AnnotatedCorpus tagged =
        hybridtag::parse_corpus_text(slurp(out), hybridtag::Tagset::Fine);
    CHECK(tagged.sentences[0].cohorts[1].readings.size() == 2);
}

TEST_CASE("train-hmm writes a model that parses and reports progress") {
    fs::path model_path = resource_dir() / "model.hmm";
    std::string text = slurp(model_path);
    CHECK(text.rfind("HMM v1\n", 0) == 0);
    hybridtag::HmmModel model = hybridtag::parse_model_text(text);
    CHECK(model.tags.size() >= 2);
    CHECK(hybridtag::serialize_model(model) == text);

    CliResult retrained = run_cli(
        "train-hmm --coarse-lexicon " + data_file("coarse.lex") +
        " --coarse-guesser " + data_file("coarse.guesser") + " --bias " +
        data_file("bias.demo") + " --corpus " + data_file("train.txt") +
        " --policy " + data_file("policy.tok") +
        " --iterations 5 --block 4 --out " +
        (work_dir() / "model2.hmm").string());
    REQUIRE(retrained.exit_code == 0);
    CHECK(retrained.err.find("iteration 1 log-likelihood") != std::string::npos);
    CHECK(retrained.err.find("iteration 5 log-likelihood") != std::string::npos);

    // Training is deterministic: the same invocation yields the same bytes.
    CHECK(slurp(work_dir() / "model2.hmm") == text);
}

TEST_CASE("tag runs a cascade configuration end to end") {
    std::string text = "The cook was cooling the water.";
    CliResult d0 = run_cli(
        "tag --config D0 --resources " + resource_dir().string(), text);
    REQUIRE(d0.exit_code == 0);
    hybridtag::AnnotatedCorpus corpus0 =
        hybridtag::parse_corpus_text(d0.out, hybridtag::Tagset::Fine);
    CHECK(corpus0.sentences[0].cohorts[1].readings.size() == 5);

    CliResult d3b = run_cli(
        "tag --config D3b --resources " + resource_dir().string(), text);
    REQUIRE(d3b.exit_code == 0);
    hybridtag::AnnotatedCorpus corpus3 =
        hybridtag::parse_corpus_text(d3b.out, hybridtag::Tagset::Fine);
    for (const hybridtag::Cohort& cohort : corpus3.sentences[0].cohorts)
        CHECK(cohort.readings.size() == 1);

    CliResult rerun = run_cli(
        "tag --config D3b --resources " + resource_dir().string(), text);
    CHECK(rerun.out == d3b.out);
}

TEST_CASE("eval scores outputs against gold and labels rows by file stem") {
    std::string text = "The cook was cooling the water.";
    CliResult d3b = run_cli(
        "tag --config D3b --resources " + resource_dir().string(), text);
    REQUIRE(d3b.exit_code == 0);
    fs::path gold = work_dir() / "gold.txt";
    spit(gold, d3b.out);
    fs::path d0_out = work_dir() / "D0.txt";
    CliResult d0 = run_cli(
        "tag --config D0 --resources " + resource_dir().string(), text);
    spit(d0_out, d0.out);
    fs::path d3b_out = work_dir() / "D3b.txt";
    spit(d3b_out, d3b.out);

    CliResult table = run_cli("eval --gold " + gold.string() + " --out " +
                              d0_out.string() + " " + d3b_out.string());
    REQUIRE(table.exit_code == 0);
    CHECK(table.out.find("Amb. words") != std::string::npos);
    CHECK(table.out.find("D0") != std::string::npos);
    CHECK(table.out.find("D3b") != std::string::npos);

    CliResult tsv = run_cli("eval --format tsv --gold " + gold.string() +
                            " --out " + d3b_out.string());
    REQUIRE(tsv.exit_code == 0);
    CHECK(tsv.out.rfind("label\tamb_words_percent", 0) == 0);
    CHECK(tsv.out.find("D3b\t0.0\t") != std::string::npos);
}
