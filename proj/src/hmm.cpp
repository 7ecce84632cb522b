#include "hybridtag/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

namespace hybridtag {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kRowSumTolerance = 1e-9;

std::string format_probability(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string field;
    while (in >> field) out.push_back(std::move(field));
    return out;
}

double parse_number(const std::string& field, std::size_t lineno) {
    const char* begin = field.c_str();
    char* end = nullptr;
    double value = std::strtod(begin, &end);
    if (end != begin + field.size() || !std::isfinite(value))
        throw ParseError(lineno, "malformed number: " + field);
    return value;
}

std::vector<std::string> sorted_unique(std::vector<std::string> names) {
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    return names;
}

// Scaled forward-backward intermediates shared by posterior computation
// and training.
struct ForwardBackward {
    std::vector<std::vector<double>> alpha;  // scaled, rows sum to 1
    std::vector<std::vector<double>> beta;
    std::vector<double> scale;
    double log_likelihood = 0.0;
};

ForwardBackward run_forward_backward(const HmmModel& model, const ClassSequence& seq) {
    const std::size_t N = seq.size();
    const std::size_t T = model.tag_count();
    if (N == 0) throw DataError("empty class sequence");
    for (std::size_t c : seq)
        if (c >= model.class_count())
            throw DataError("class id out of range: " + std::to_string(c));

    ForwardBackward fb;
    fb.alpha.assign(N, std::vector<double>(T, 0.0));
    fb.beta.assign(N, std::vector<double>(T, 0.0));
    fb.scale.assign(N, 0.0);

    for (std::size_t t = 0; t < T; ++t)
        fb.alpha[0][t] = model.initial[t] * model.emission[t][seq[0]];
    double scale0 = 0.0;
    for (std::size_t t = 0; t < T; ++t) scale0 += fb.alpha[0][t];
    if (scale0 <= 0.0) throw DataError("impossible class sequence at position 0");
    fb.scale[0] = scale0;
    for (std::size_t t = 0; t < T; ++t) fb.alpha[0][t] /= scale0;
    for (std::size_t i = 1; i < N; ++i) {
        for (std::size_t t = 0; t < T; ++t) {
            double sum = 0.0;
            for (std::size_t s = 0; s < T; ++s)
                sum += fb.alpha[i - 1][s] * model.transition[s][t];
            fb.alpha[i][t] = sum * model.emission[t][seq[i]];
        }
        double scale = 0.0;
        for (std::size_t t = 0; t < T; ++t) scale += fb.alpha[i][t];
        if (scale <= 0.0)
            throw DataError("impossible class sequence at position " + std::to_string(i));
        fb.scale[i] = scale;
        for (std::size_t t = 0; t < T; ++t) fb.alpha[i][t] /= scale;
    }

    for (std::size_t t = 0; t < T; ++t) fb.beta[N - 1][t] = 1.0;
    for (std::size_t i = N - 1; i-- > 0;) {
        for (std::size_t t = 0; t < T; ++t) {
            double sum = 0.0;
            for (std::size_t s = 0; s < T; ++s)
                sum += model.transition[t][s] * model.emission[s][seq[i + 1]] *
                       fb.beta[i + 1][s];
            fb.beta[i][t] = sum / fb.scale[i + 1];
        }
    }

    fb.log_likelihood = 0.0;
    for (double s : fb.scale) fb.log_likelihood += std::log(s);
    return fb;
}

}  // namespace

std::optional<std::size_t> HmmModel::tag_index(std::string_view name) const {
    for (std::size_t t = 0; t < tags.size(); ++t)
        if (tags[t] == name) return t;
    return std::nullopt;
}

std::optional<std::size_t> HmmModel::class_index(
    const std::vector<std::string>& sorted_tags) const {
    for (const EquivalenceClass& cls : classes)
        if (cls.tags == sorted_tags) return cls.id;
    return std::nullopt;
}

bool HmmModel::tag_in_class(std::size_t tag, std::size_t cls) const {
    const std::vector<std::string>& names = classes[cls].tags;
    return std::binary_search(names.begin(), names.end(), tags[tag]);
}

void HmmModel::validate() const {
    const std::size_t T = tags.size();
    const std::size_t C = classes.size();
    if (T == 0) throw DataError("model without tags");
    if (C == 0) throw DataError("model without classes");
    if (sorted_unique(tags).size() != T) throw DataError("duplicate model tags");
    for (std::size_t c = 0; c < C; ++c) {
        const EquivalenceClass& cls = classes[c];
        if (cls.id != c) throw DataError("class ids must be sequential");
        if (cls.tags.empty()) throw DataError("empty equivalence class");
        if (sorted_unique(cls.tags) != cls.tags)
            throw DataError("class tags must be sorted and unique");
        for (const std::string& name : cls.tags)
            if (!tag_index(name))
                throw DataError("class references unknown tag: " + name);
    }
    auto check_row = [](const std::vector<double>& row, const std::string& what) {
        double sum = 0.0;
        for (double v : row) {
            if (!(v >= 0.0) || v > 1.0 + kRowSumTolerance)
                throw DataError(what + " probability out of range");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance)
            throw DataError(what + " row does not sum to 1");
    };
    if (initial.size() != T) throw DataError("initial vector has wrong size");
    check_row(initial, "initial");
    if (transition.size() != T) throw DataError("transition matrix has wrong size");
    for (const auto& row : transition) {
        if (row.size() != T) throw DataError("transition row has wrong size");
        check_row(row, "transition");
    }
    if (emission.size() != T) throw DataError("emission matrix has wrong size");
    for (std::size_t t = 0; t < T; ++t) {
        if (emission[t].size() != C) throw DataError("emission row has wrong size");
        check_row(emission[t], "emission");
        for (std::size_t c = 0; c < C; ++c)
            if (!tag_in_class(t, c) && emission[t][c] != 0.0)
                throw DataError("emission outside class tag set must be zero");
    }
}

std::vector<std::string> equivalence_tags(const std::string& word,
                                          const Lexicon& coarse_lexicon,
                                          const GuesserConfig& coarse_guesser) {
    std::vector<std::string> names;
    if (const std::vector<Reading>* readings = coarse_lexicon.lookup(word)) {
        for (const Reading& reading : *readings)
            for (const Tag& tag : reading.tags) names.push_back(tag.name);
    } else {
        for (const Reading& reading : guess(word, coarse_guesser))
            for (const Tag& tag : reading.tags) names.push_back(tag.name);
    }
    return sorted_unique(std::move(names));
}

std::vector<EquivalenceClass> build_classes(const Lexicon& coarse_lexicon,
                                            const GuesserConfig& coarse_guesser) {
    std::vector<EquivalenceClass> classes;
    std::set<std::vector<std::string>> seen;
    auto add = [&](std::vector<std::string> tags) {
        if (tags.empty()) return;
        if (!seen.insert(tags).second) return;
        classes.push_back({classes.size(), std::move(tags)});
    };
    for (const auto& [surface, readings] : coarse_lexicon.entries) {
        std::vector<std::string> names;
        for (const Reading& reading : readings)
            for (const Tag& tag : reading.tags) names.push_back(tag.name);
        add(sorted_unique(std::move(names)));
    }
    for (const AffixRule& rule : coarse_guesser.rules) {
        std::vector<std::string> names;
        for (const Reading& reading : rule.readings)
            for (const Tag& tag : reading.tags) names.push_back(tag.name);
        add(sorted_unique(std::move(names)));
    }
    std::vector<std::string> open;
    for (const Reading& reading : coarse_guesser.open_class)
        for (const Tag& tag : reading.tags) open.push_back(tag.name);
    add(sorted_unique(std::move(open)));
    return classes;
}

std::vector<std::string> collect_tags(const Lexicon& coarse_lexicon,
                                      const GuesserConfig& coarse_guesser) {
    std::vector<std::string> names;
    for (const auto& [surface, readings] : coarse_lexicon.entries)
        for (const Reading& reading : readings)
            for (const Tag& tag : reading.tags) names.push_back(tag.name);
    for (const AffixRule& rule : coarse_guesser.rules)
        for (const Reading& reading : rule.readings)
            for (const Tag& tag : reading.tags) names.push_back(tag.name);
    for (const Reading& reading : coarse_guesser.open_class)
        for (const Tag& tag : reading.tags) names.push_back(tag.name);
    return sorted_unique(std::move(names));
}

const EquivalenceClass& classify(const std::string& word,
                                 const Lexicon& coarse_lexicon,
                                 const GuesserConfig& coarse_guesser,
                                 const std::vector<EquivalenceClass>& classes) {
    std::vector<std::string> tags =
        equivalence_tags(word, coarse_lexicon, coarse_guesser);
    for (const EquivalenceClass& cls : classes)
        if (cls.tags == tags) return cls;
    std::string names;
    for (const std::string& t : tags) {
        if (!names.empty()) names += ' ';
        names += t;
    }
    throw ResourceError("no equivalence class covers '" + word + "' (tags: " + names + ")");
}

HmmModel init_model(std::vector<std::string> tags,
                    std::vector<EquivalenceClass> classes, const BiasSpec& biases) {
    HmmModel model;
    model.tags = std::move(tags);
    model.classes = std::move(classes);
    const std::size_t T = model.tag_count();
    const std::size_t C = model.class_count();
    if (T == 0) throw DataError("cannot initialize a model without tags");
    if (C == 0) throw DataError("cannot initialize a model without classes");

    for (const auto& [key, weight] : biases.transition) {
        if (!model.tag_index(key.first))
            throw ResourceError("transition bias references unknown tag: " + key.first);
        if (!model.tag_index(key.second))
            throw ResourceError("transition bias references unknown tag: " + key.second);
        if (!(weight >= 0.0))
            throw DataError("negative bias weight for " + key.first + " " + key.second);
    }
    for (const auto& [key, weight] : biases.symbol) {
        if (key.first >= C)
            throw ResourceError("symbol bias references unknown class: " +
                                std::to_string(key.first));
        if (!model.tag_index(key.second))
            throw ResourceError("symbol bias references unknown tag: " + key.second);
        if (!(weight >= 0.0))
            throw DataError("negative bias weight for class " +
                            std::to_string(key.first) + " " + key.second);
    }

    for (std::size_t t = 0; t < T; ++t) {
        bool emittable = false;
        for (std::size_t c = 0; c < C && !emittable; ++c)
            emittable = model.tag_in_class(t, c);
        if (!emittable)
            throw ResourceError("unemittable tag: " + model.tags[t]);
    }

    model.initial.assign(T, 1.0 / static_cast<double>(T));
    model.transition.assign(T, std::vector<double>(T, 0.0));
    model.emission.assign(T, std::vector<double>(C, 0.0));

    for (std::size_t a = 0; a < T; ++a) {
        double sum = 0.0;
        for (std::size_t b = 0; b < T; ++b) {
            double weight = 0.0;
            auto it = biases.transition.find({model.tags[a], model.tags[b]});
            if (it != biases.transition.end()) weight = it->second;
            model.transition[a][b] = 1.0 + weight;
            sum += model.transition[a][b];
        }
        for (std::size_t b = 0; b < T; ++b) model.transition[a][b] /= sum;
    }

    for (std::size_t t = 0; t < T; ++t) {
        double sum = 0.0;
        for (std::size_t c = 0; c < C; ++c) {
            if (!model.tag_in_class(t, c)) continue;
            double weight = 0.0;
            auto it = biases.symbol.find({c, model.tags[t]});
            if (it != biases.symbol.end()) weight = it->second;
            model.emission[t][c] = 1.0 + weight;
            sum += model.emission[t][c];
        }
        for (std::size_t c = 0; c < C; ++c) model.emission[t][c] /= sum;
    }
    model.validate();
    return model;
}

PosteriorResult forward_backward(const HmmModel& model, const ClassSequence& seq) {
    ForwardBackward fb = run_forward_backward(model, seq);
    const std::size_t N = seq.size();
    const std::size_t T = model.tag_count();
    PosteriorResult result;
    result.posteriors.assign(N, std::vector<double>(T, 0.0));
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t t = 0; t < T; ++t)
            result.posteriors[i][t] = fb.alpha[i][t] * fb.beta[i][t];
    result.log_likelihood = fb.log_likelihood;
    return result;
}

TrainResult train(const HmmModel& model, const std::vector<ClassSequence>& corpus,
                  const TrainingParams& params) {
    if (params.block_size == 0) throw DataError("block size must be positive");
    TrainResult result;
    result.model = model;
    const std::size_t T = model.tag_count();
    const std::size_t C = model.class_count();

    for (std::size_t iteration = 0; iteration < params.iterations; ++iteration) {
        std::vector<std::vector<double>> trans_count(T, std::vector<double>(T, 0.0));
        std::vector<std::vector<double>> emit_count(T, std::vector<double>(C, 0.0));
        double log_likelihood = 0.0;

        for (std::size_t begin = 0; begin < corpus.size(); begin += params.block_size) {
            std::size_t end = std::min(begin + params.block_size, corpus.size());
            std::vector<std::vector<double>> block_trans(T, std::vector<double>(T, 0.0));
            std::vector<std::vector<double>> block_emit(T, std::vector<double>(C, 0.0));
            for (std::size_t s = begin; s < end; ++s) {
                const ClassSequence& seq = corpus[s];
                ForwardBackward fb = run_forward_backward(result.model, seq);
                log_likelihood += fb.log_likelihood;
                const std::size_t N = seq.size();
                for (std::size_t i = 0; i < N; ++i)
                    for (std::size_t t = 0; t < T; ++t)
                        block_emit[t][seq[i]] += fb.alpha[i][t] * fb.beta[i][t];
                for (std::size_t i = 0; i + 1 < N; ++i)
                    for (std::size_t a = 0; a < T; ++a) {
                        if (fb.alpha[i][a] == 0.0) continue;
                        for (std::size_t b = 0; b < T; ++b)
                            block_trans[a][b] +=
                                fb.alpha[i][a] * result.model.transition[a][b] *
                                result.model.emission[b][seq[i + 1]] *
                                fb.beta[i + 1][b] / fb.scale[i + 1];
                    }
            }
            for (std::size_t a = 0; a < T; ++a)
                for (std::size_t b = 0; b < T; ++b)
                    trans_count[a][b] += block_trans[a][b];
            for (std::size_t t = 0; t < T; ++t)
                for (std::size_t c = 0; c < C; ++c)
                    emit_count[t][c] += block_emit[t][c];
        }

        for (std::size_t a = 0; a < T; ++a) {
            double sum = 0.0;
            for (double v : trans_count[a]) sum += v;
            if (sum <= 0.0) continue;
            for (std::size_t b = 0; b < T; ++b)
                result.model.transition[a][b] = trans_count[a][b] / sum;
        }
        for (std::size_t t = 0; t < T; ++t) {
            double sum = 0.0;
            for (double v : emit_count[t]) sum += v;
            if (sum <= 0.0) continue;
            for (std::size_t c = 0; c < C; ++c)
                result.model.emission[t][c] =
                    result.model.tag_in_class(t, c) ? emit_count[t][c] / sum : 0.0;
        }

        result.log_likelihoods.push_back(log_likelihood);
        std::size_t k = result.log_likelihoods.size();
        if (k >= 2 &&
            result.log_likelihoods[k - 1] - result.log_likelihoods[k - 2] <
                params.convergence_epsilon)
            break;
    }
    return result;
}

ViterbiResult viterbi(const HmmModel& model, const ClassSequence& seq) {
    const std::size_t N = seq.size();
    const std::size_t T = model.tag_count();
    if (N == 0) throw DataError("empty class sequence");
    for (std::size_t c : seq)
        if (c >= model.class_count())
            throw DataError("class id out of range: " + std::to_string(c));

    std::vector<std::vector<double>> score(N, std::vector<double>(T, kNegInf));
    std::vector<std::vector<std::size_t>> back(N, std::vector<std::size_t>(T, 0));

    for (std::size_t t = 0; t < T; ++t)
        score[0][t] =
            std::log(model.initial[t]) + std::log(model.emission[t][seq[0]]);
    for (std::size_t i = 1; i < N; ++i) {
        for (std::size_t t = 0; t < T; ++t) {
            double emit = std::log(model.emission[t][seq[i]]);
            double best = kNegInf;
            std::size_t best_prev = 0;
            for (std::size_t s = 0; s < T; ++s) {
                double candidate = score[i - 1][s] + std::log(model.transition[s][t]);
                // Strict improvement keeps the lowest previous index on ties.
                if (candidate > best) {
                    best = candidate;
                    best_prev = s;
                }
            }
            score[i][t] = best + emit;
            back[i][t] = best_prev;
        }
    }

    double best = kNegInf;
    std::size_t best_tag = 0;
    for (std::size_t t = 0; t < T; ++t)
        if (score[N - 1][t] > best) {
            best = score[N - 1][t];
            best_tag = t;
        }
    if (best == kNegInf)
        throw DataError("impossible class sequence");

    ViterbiResult result;
    result.log_probability = best;
    result.tag_indices.assign(N, 0);
    result.tag_indices[N - 1] = best_tag;
    for (std::size_t i = N - 1; i-- > 0;)
        result.tag_indices[i] = back[i + 1][result.tag_indices[i + 1]];
    return result;
}

std::vector<std::string> viterbi_tags(const HmmModel& model, const ClassSequence& seq) {
    ViterbiResult result = viterbi(model, seq);
    std::vector<std::string> names;
    names.reserve(result.tag_indices.size());
    for (std::size_t t : result.tag_indices) names.push_back(model.tags[t]);
    return names;
}

void serialize_model(const HmmModel& model, std::ostream& out) {
    out << "HMM v1\n";
    for (std::size_t t = 0; t < model.tags.size(); ++t) {
        if (t > 0) out << ' ';
        out << model.tags[t];
    }
    out << '\n';
    for (const EquivalenceClass& cls : model.classes) {
        out << "CLASS " << cls.id << ':';
        for (const std::string& tag : cls.tags) out << ' ' << tag;
        out << '\n';
    }
    out << "INIT\n";
    for (double v : model.initial) out << format_probability(v) << '\n';
    out << "TRANS\n";
    for (const auto& row : model.transition) {
        for (std::size_t b = 0; b < row.size(); ++b) {
            if (b > 0) out << ' ';
            out << format_probability(row[b]);
        }
        out << '\n';
    }
    out << "EMIT\n";
    for (const auto& row : model.emission) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out << ' ';
            out << format_probability(row[c]);
        }
        out << '\n';
    }
}

std::string serialize_model(const HmmModel& model) {
    std::ostringstream out;
    serialize_model(model, out);
    return out.str();
}

HmmModel parse_model(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) return false;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    };

    if (!next_line() || line != "HMM v1")
        throw ParseError(lineno == 0 ? 1 : lineno, "expected 'HMM v1' header");
    if (!next_line()) throw ParseError(lineno + 1, "missing tag list");
    HmmModel model;
    model.tags = split_fields(line);
    if (model.tags.empty()) throw ParseError(lineno, "empty tag list");

    while (next_line() && line.rfind("CLASS ", 0) == 0) {
        std::vector<std::string> fields = split_fields(line);
        if (fields.size() < 3 || fields[1].empty() || fields[1].back() != ':')
            throw ParseError(lineno, "malformed class line: " + line);
        std::string id_text = fields[1].substr(0, fields[1].size() - 1);
        char* end = nullptr;
        unsigned long id = std::strtoul(id_text.c_str(), &end, 10);
        if (end != id_text.c_str() + id_text.size())
            throw ParseError(lineno, "malformed class id: " + id_text);
        if (id != model.classes.size())
            throw ParseError(lineno, "class ids must be sequential");
        EquivalenceClass cls;
        cls.id = id;
        cls.tags.assign(fields.begin() + 2, fields.end());
        model.classes.push_back(std::move(cls));
    }
    if (model.classes.empty()) throw ParseError(lineno, "model without classes");

    const std::size_t T = model.tags.size();
    const std::size_t C = model.classes.size();
    auto read_row = [&](std::size_t width) {
        if (!next_line()) throw ParseError(lineno + 1, "truncated probability section");
        std::vector<std::string> fields = split_fields(line);
        if (fields.size() != width)
            throw ParseError(lineno, "expected " + std::to_string(width) +
                                         " probabilities, got " +
                                         std::to_string(fields.size()));
        std::vector<double> row;
        row.reserve(width);
        for (const std::string& f : fields) row.push_back(parse_number(f, lineno));
        return row;
    };

    if (line != "INIT") throw ParseError(lineno, "expected INIT section");
    for (std::size_t t = 0; t < T; ++t) model.initial.push_back(read_row(1)[0]);
    if (!next_line() || line != "TRANS") throw ParseError(lineno, "expected TRANS section");
    for (std::size_t t = 0; t < T; ++t) model.transition.push_back(read_row(T));
    if (!next_line() || line != "EMIT") throw ParseError(lineno, "expected EMIT section");
    for (std::size_t t = 0; t < T; ++t) model.emission.push_back(read_row(C));
    while (next_line())
        if (!line.empty()) throw ParseError(lineno, "trailing content: " + line);

    try {
        model.validate();
    } catch (const DataError& e) {
        throw DataError("invalid model file: " + std::string(e.what()));
    }
    return model;
}

HmmModel parse_model_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_model(in);
}

BiasSpec parse_bias(std::istream& in) {
    BiasSpec spec;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields = split_fields(line);
        if (fields.size() != 4)
            throw ParseError(lineno, "expected 'TRANS from to weight' or 'SYM class tag weight'");
        double weight = parse_number(fields[3], lineno);
        if (weight < 0.0) throw ParseError(lineno, "negative bias weight");
        if (fields[0] == "TRANS") {
            auto key = std::make_pair(fields[1], fields[2]);
            if (spec.transition.count(key))
                throw ParseError(lineno, "duplicate transition bias: " + fields[1] + " " + fields[2]);
            spec.transition[key] = weight;
        } else if (fields[0] == "SYM") {
            char* end = nullptr;
            unsigned long cls = std::strtoul(fields[1].c_str(), &end, 10);
            if (end != fields[1].c_str() + fields[1].size())
                throw ParseError(lineno, "malformed class id: " + fields[1]);
            auto key = std::make_pair(static_cast<std::size_t>(cls), fields[2]);
            if (spec.symbol.count(key))
                throw ParseError(lineno, "duplicate symbol bias: " + fields[1] + " " + fields[2]);
            spec.symbol[key] = weight;
        } else {
            throw ParseError(lineno, "unknown bias kind: " + fields[0]);
        }
    }
    return spec;
}

BiasSpec parse_bias_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_bias(in);
}

}  // namespace hybridtag
