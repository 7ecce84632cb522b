"""End-to-end smoke checks of the Python bindings."""

import os

import pytest

import hybridtag as ht

DATA_DIR = os.environ.get("HYBRIDTAG_DATA_DIR")


def read(name):
    with open(os.path.join(DATA_DIR, name), encoding="utf-8") as handle:
        return handle.read()


def test_corpus_round_trip():
    text = '"<the>"\n\tDET <Gold>\n"<cook>"\n\tV INF\n\tN NOM SG <Gold>\n'
    corpus = ht.parse_corpus(text, ht.Tagset.FINE)
    assert corpus.token_count == 2
    assert corpus.sentences[0].cohorts[1].gold_index == 1
    assert ht.serialize_corpus(corpus) == text


def test_analysis_and_rules():
    lexicon = ht.load_lexicon(read("fine.lex"))
    guesser = ht.load_guesser(read("guesser.rules"))
    policy = ht.parse_policy(read("policy.tok"))
    tokens = ht.tokenize("The cook was cooling the water.", policy)
    corpus = ht.analyze_tokens(tokens, lexicon, guesser)
    cook = corpus.sentences[0].cohorts[1]
    assert cook.surface == "cook"
    assert len(cook.readings) == 5

    grammar = ht.parse_grammar(read("grammar.cg"))
    sentence = ht.disambiguate(corpus.sentences[0], grammar, ht.RuleTier.HEURISTIC)
    assert 1 <= len(sentence.cohorts[1].readings) < 5


def test_model_training_and_decoding():
    coarse_lexicon = ht.load_lexicon(read("coarse.lex"), ht.Tagset.COARSE)
    coarse_guesser = ht.load_guesser(read("coarse.guesser"), ht.Tagset.COARSE)
    classes = ht.build_classes(coarse_lexicon, coarse_guesser)
    tags = ht.collect_tags(coarse_lexicon, coarse_guesser)
    model = ht.init_model(tags, classes, ht.parse_bias(read("bias.demo")))
    model.validate()

    policy = ht.parse_policy(read("policy.tok"))
    policy.mode = ht.Tagset.COARSE
    corpus = []
    for sentence in ht.tokenize(read("train.txt"), policy):
        corpus.append(
            [
                ht.classify(t.surface, coarse_lexicon, coarse_guesser, classes).id
                for t in sentence
            ]
        )
    params = ht.TrainingParams()
    params.iterations = 3
    params.block_size = 4
    result = ht.train(model, corpus, params)
    assert len(result.log_likelihoods) <= 3
    lls = result.log_likelihoods
    assert all(b - a >= -1e-9 for a, b in zip(lls, lls[1:]))

    decoded = ht.viterbi_tags(result.model, corpus[0])
    assert len(decoded) == len(corpus[0])

    round_tripped = ht.parse_model(ht.serialize_model(result.model))
    assert ht.serialize_model(round_tripped) == ht.serialize_model(result.model)


def test_full_cascade():
    config = ht.StageConfig.for_label(ht.StageLabel.D2)
    resources = ht.load_resources(DATA_DIR, config)
    result = ht.run(config, "The cook was cooling the water.", resources)
    assert result.corpus.token_count == 7

    gold_text = (
        '"<The>"\n\tDET\n'
        '"<cook>"\n\tN NOM SG\n'
        '"<was>"\n\tV PAST SG1,3 VFIN\n'
        '"<cooling>"\n\tPCP1\n'
        '"<the>"\n\tDET\n'
        '"<water>"\n\tN NOM SG\n'
        '"<.>"\n\tPUNCT\n'
    )
    gold = ht.parse_corpus(gold_text, ht.Tagset.FINE)
    row = ht.evaluate(result.corpus, gold, "D2")
    assert row.errors == 0
    assert row.ambiguous_tokens == 2
    assert "D2" in ht.report([row])


def test_errors_surface_as_exceptions():
    with pytest.raises(ht.DataError):
        ht.parse_corpus("bad corpus\n", ht.Tagset.FINE)
    with pytest.raises(ht.DataError):
        ht.load_lexicon("no tab here\n")
