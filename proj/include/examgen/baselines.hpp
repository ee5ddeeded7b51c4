#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <unordered_set>
#include <vector>

#include "examgen/agent.hpp"
#include "examgen/corpus.hpp"
#include "examgen/errors.hpp"
#include "examgen/evaluator.hpp"
#include "examgen/rng.hpp"

namespace examgen {

struct BaselineConfig {
    long trials = 10000;         // rsf
    int population = 50;         // ga
    int generations = 200;       // ga
    double mutation_rate = 0.05; // ga
    int tournament = 3;          // ga
    long iterations = 10000;     // sa
    double initial_temperature = 0.02;
    double cooling_factor = 0.995;
    std::uint64_t seed = 1;

    void validate() const {
        if (trials < 1 || population < 2 || generations < 0 || iterations < 1) {
            throw ConfigError("baseline counts must be positive");
        }
        if (cooling_factor <= 0.0 || cooling_factor >= 1.0) throw ConfigError("cooling factor must lie in (0,1)");
        if (initial_temperature <= 0.0) throw ConfigError("initial temperature must be positive");
        if (mutation_rate < 0.0 || mutation_rate > 1.0) throw ConfigError("mutation rate out of [0,1]");
    }
};

struct BaselineResult {
    std::optional<ExamPaper> paper;
    double best_reward = -std::numeric_limits<double>::infinity();
    long reward_evaluations = 0;
    std::vector<double> trace;  // best-so-far reward, one entry per iteration/generation
};

// Random selection with best-of retention.
inline BaselineResult rsf_generate(const RewardEvaluator& evaluator, const ExamSpec& spec,
                                   const BaselineConfig& cfg) {
    cfg.validate();
    Rng rng(mix_seed(cfg.seed, 11));
    evaluator.reset_evaluations();
    BaselineResult result;
    for (long t = 0; t < cfg.trials; ++t) {
        ExamPaper paper = random_paper(evaluator.bank(), spec, rng);
        const double r = evaluator.evaluate_paper(paper).combined;
        if (r > result.best_reward) {
            result.best_reward = r;
            result.paper = std::move(paper);
        }
        result.trace.push_back(result.best_reward);
    }
    result.reward_evaluations = evaluator.evaluations();
    return result;
}

namespace detail {

inline double fitness(const RewardEvaluator& evaluator, const std::vector<int>& genes, const ExamSpec& spec) {
    return evaluator.evaluate_paper(ExamPaper(genes, spec)).combined;
}

// Uniform crossover over two distinct-question parents; duplicate genes are
// repaired from the parents' union, then from the whole bank.
inline std::vector<int> crossover(const std::vector<int>& a, const std::vector<int>& b, int bank_size, Rng& rng) {
    const std::size_t n = a.size();
    std::unordered_set<int> used;
    std::vector<int> child;
    child.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int gene = rng.uniform01() < 0.5 ? a[i] : b[i];
        if (used.insert(gene).second) child.push_back(gene);
    }
    std::vector<int> pool;
    for (const auto& parent : {a, b}) {
        for (int g : parent) {
            if (!used.count(g)) pool.push_back(g);
        }
    }
    for (int g : pool) {
        if (child.size() == n) break;
        if (used.insert(g).second) child.push_back(g);
    }
    while (child.size() < n) {
        const int g = rng.uniform_int(bank_size);
        if (used.insert(g).second) child.push_back(g);
    }
    return child;
}

inline void mutate(std::vector<int>& genes, int bank_size, double rate, Rng& rng) {
    if (rng.uniform01() >= rate) return;
    const std::size_t pos = rng.uniform_index(genes.size());
    for (;;) {
        const int g = rng.uniform_int(bank_size);
        if (std::find(genes.begin(), genes.end(), g) == genes.end()) {
            genes[pos] = g;
            return;
        }
    }
}

}  // namespace detail

// Generic genetic algorithm: tournament selection, uniform crossover with
// duplicate repair, single-swap mutation, elitism of one.
inline BaselineResult ga_generate(const RewardEvaluator& evaluator, const ExamSpec& spec,
                                  const BaselineConfig& cfg) {
    cfg.validate();
    Rng rng(mix_seed(cfg.seed, 12));
    evaluator.reset_evaluations();
    const int bank_size = evaluator.bank().question_count();

    std::vector<std::vector<int>> population;
    std::vector<double> fitness;
    for (int i = 0; i < cfg.population; ++i) {
        population.push_back(random_paper(evaluator.bank(), spec, rng).questions());
        fitness.push_back(detail::fitness(evaluator, population.back(), spec));
    }

    BaselineResult result;
    auto record_best = [&] {
        const std::size_t best = static_cast<std::size_t>(
            std::max_element(fitness.begin(), fitness.end()) - fitness.begin());
        if (fitness[best] > result.best_reward) {
            result.best_reward = fitness[best];
            result.paper = ExamPaper(population[best], spec);
        }
        result.trace.push_back(result.best_reward);
    };
    record_best();

    auto tournament_pick = [&]() -> const std::vector<int>& {
        std::size_t best = rng.uniform_index(population.size());
        for (int k = 1; k < cfg.tournament; ++k) {
            const std::size_t c = rng.uniform_index(population.size());
            if (fitness[c] > fitness[best]) best = c;
        }
        return population[best];
    };

    for (int gen = 0; gen < cfg.generations; ++gen) {
        std::vector<std::vector<int>> next;
        std::vector<double> next_fitness;
        // elitism of 1
        const std::size_t elite = static_cast<std::size_t>(
            std::max_element(fitness.begin(), fitness.end()) - fitness.begin());
        next.push_back(population[elite]);
        next_fitness.push_back(fitness[elite]);
        while (static_cast<int>(next.size()) < cfg.population) {
            std::vector<int> child = detail::crossover(tournament_pick(), tournament_pick(), bank_size, rng);
            detail::mutate(child, bank_size, cfg.mutation_rate, rng);
            next_fitness.push_back(detail::fitness(evaluator, child, spec));
            next.push_back(std::move(child));
        }
        population = std::move(next);
        fitness = std::move(next_fitness);
        record_best();
    }
    result.reward_evaluations = evaluator.evaluations();
    return result;
}

// Metropolis acceptance for a reward delta at temperature T.
inline double metropolis_accept_probability(double delta, double temperature) {
    if (delta >= 0.0) return 1.0;
    if (temperature <= 0.0) return 0.0;
    return std::exp(delta / temperature);
}

// Simulated annealing over single-question swaps with geometric cooling.
inline BaselineResult sa_generate(const RewardEvaluator& evaluator, const ExamSpec& spec,
                                  const BaselineConfig& cfg) {
    cfg.validate();
    Rng rng(mix_seed(cfg.seed, 13));
    evaluator.reset_evaluations();
    const int bank_size = evaluator.bank().question_count();

    ExamPaper current = random_paper(evaluator.bank(), spec, rng);
    double current_reward = evaluator.evaluate_paper(current).combined;

    BaselineResult result;
    result.best_reward = current_reward;
    result.paper = current;
    result.trace.push_back(current_reward);

    double temperature = cfg.initial_temperature;
    for (long it = 0; it < cfg.iterations; ++it) {
        const int pos = rng.uniform_int(spec.n);
        int candidate;
        do {
            candidate = rng.uniform_int(bank_size);
        } while (current.contains(candidate));

        ExamPaper neighbor = current;
        neighbor.replace_at(pos, candidate);
        const double r = evaluator.evaluate_paper(neighbor).combined;
        if (rng.uniform01() < metropolis_accept_probability(r - current_reward, temperature)) {
            current = std::move(neighbor);
            current_reward = r;
        }
        if (current_reward > result.best_reward) {
            result.best_reward = current_reward;
            result.paper = current;
        }
        result.trace.push_back(result.best_reward);
        temperature *= cfg.cooling_factor;
    }
    result.reward_evaluations = evaluator.evaluations();
    return result;
}

}  // namespace examgen
