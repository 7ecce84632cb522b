#pragma once

#include <hybridtag/cg.hpp>
#include <hybridtag/core.hpp>
#include <hybridtag/hmm.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace testutil {

using namespace hybridtag;

inline Tag ft(const std::string& name) { return Tag(name, Tagset::Fine); }
inline Tag ct(const std::string& name) { return Tag(name, Tagset::Coarse); }

inline Reading freading(const std::vector<std::string>& names) {
    std::vector<Tag> tags;
    for (const auto& n : names) tags.push_back(ft(n));
    return Reading(tags);
}

inline Reading creading(const std::string& name) {
    return Reading({ct(name)});
}

inline Cohort cohort(std::string surface, std::vector<Reading> readings) {
    Cohort c;
    c.surface = std::move(surface);
    c.readings = std::move(readings);
    return c;
}

// Exhaustive path enumeration over all tag sequences. Used as the ground
// truth the dynamic-programming routines are checked against.

struct ExhaustiveResult {
    double best_log = -std::numeric_limits<double>::infinity();
    double total = 0.0;
    std::vector<std::vector<double>> occupancy;
};

inline ExhaustiveResult enumerate_paths(const HmmModel& model,
                                        const std::vector<size_t>& classes) {
    const size_t n = classes.size();
    const size_t t = model.tags.size();
    ExhaustiveResult result;
    result.occupancy.assign(n, std::vector<double>(t, 0.0));
    std::vector<size_t> path(n, 0);
    double best_prob = 0.0;

    auto walk = [&](auto&& self, size_t pos, double prob) -> void {
        if (pos == n) {
            result.total += prob;
            if (prob > best_prob) best_prob = prob;
            for (size_t i = 0; i < n; ++i)
                result.occupancy[i][path[i]] += prob;
            return;
        }
        for (size_t tag = 0; tag < t; ++tag) {
            double step;
            if (pos == 0)
                step = model.initial[tag] * model.emission[tag][classes[0]];
            else
                step = model.transition[path[pos - 1]][tag] *
                       model.emission[tag][classes[pos]];
            if (step <= 0.0) continue;
            path[pos] = tag;
            self(self, pos + 1, prob * step);
        }
    };
    walk(walk, 0, 1.0);
    if (best_prob > 0.0) result.best_log = std::log(best_prob);
    return result;
}

// Log probability of one specific path, accumulated left to right.
inline double path_log_prob(const HmmModel& model,
                            const std::vector<size_t>& classes,
                            const std::vector<size_t>& path) {
    double lp = std::log(model.initial[path[0]]) +
                std::log(model.emission[path[0]][classes[0]]);
    for (size_t i = 1; i < classes.size(); ++i)
        lp += std::log(model.transition[path[i - 1]][path[i]]) +
              std::log(model.emission[path[i]][classes[i]]);
    return lp;
}

// Random model over t tags and c classes with every class emittable by at
// least one tag and every tag emitting at least one class.
inline HmmModel random_model(std::mt19937& rng, size_t t, size_t c) {
    if (t < 6) c = std::min(c, (size_t{1} << t) - 1);
    std::vector<std::string> tags;
    for (size_t i = 0; i < t; ++i)
        tags.push_back("t" + std::to_string(i));

    std::uniform_int_distribution<size_t> pick_tag(0, t - 1);
    std::vector<EquivalenceClass> classes;
    while (true) {
        classes.clear();
        std::vector<bool> used(t, false);
        std::set<std::vector<std::string>> seen;
        for (size_t i = 0; i < c; ++i) {
            std::set<std::string> members;
            members.insert(tags[pick_tag(rng)]);
            for (size_t j = 0; j < t; ++j)
                if (rng() % 3 == 0) members.insert(tags[j]);
            std::vector<std::string> sorted(members.begin(), members.end());
            if (!seen.insert(sorted).second) { --i; continue; }
            EquivalenceClass klass;
            klass.id = classes.size();
            klass.tags = sorted;
            for (const auto& tag : sorted)
                for (size_t j = 0; j < t; ++j)
                    if (tags[j] == tag) used[j] = true;
            classes.push_back(klass);
        }
        bool all = true;
        for (bool u : used) all = all && u;
        if (all) break;
    }

    HmmModel model = init_model(tags, classes, BiasSpec{});
    std::uniform_real_distribution<double> weight(0.1, 1.0);
    auto renormalize = [&](std::vector<double>& row) {
        double sum = 0.0;
        for (double& v : row) {
            if (v > 0.0) v = weight(rng);
            sum += v;
        }
        for (double& v : row) v /= sum;
    };
    renormalize(model.initial);
    for (auto& row : model.transition) renormalize(row);
    for (auto& row : model.emission) renormalize(row);
    model.validate();
    return model;
}

// Random class sequence that is reachable under the model's structural zeros.
inline std::vector<size_t> random_sequence(std::mt19937& rng,
                                           const HmmModel& model,
                                           size_t length) {
    std::uniform_int_distribution<size_t> pick(0, model.classes.size() - 1);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<size_t> seq(length);
        for (auto& id : seq) id = pick(rng);
        auto brute = enumerate_paths(model, seq);
        if (brute.total > 0.0) return seq;
    }
    return std::vector<size_t>(length, 0);
}

}  // namespace testutil
