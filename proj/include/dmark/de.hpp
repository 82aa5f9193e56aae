#pragma once

// Differential evolution (DE/rand/1/bin) over genomes of (mark, position)
// pairs, minimizing a black-box fitness. The RNG draw order is part of the
// contract: seed-identical runs must produce byte-identical results.
//
// Draw order, all from one mt19937_64 stream:
//   init:    per member, per gene: d then i (i skipped when budget == 0)
//   per gen: F once, then per member: partners a, b, c by rejection,
//            forced index R, then one uniform per gene.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dmark/alphabet.hpp"
#include "dmark/unicode.hpp"

namespace dmark {

struct DEParams {
  std::size_t population_size = 32;
  std::size_t generations = 10;
  double crossover = 0.7;
  double f_min = 0.5;
  double f_max = 1.0;
  std::size_t budget = 5;
  std::uint64_t seed = 0;
  unsigned eval_threads = 1;

  void validate() const {
    if (population_size < 4)
      throw std::invalid_argument("population_size must be >= 4");
    if (crossover < 0.0 || crossover > 1.0)
      throw std::invalid_argument("crossover must lie in [0,1]");
    if (!(0.0 <= f_min && f_min <= f_max && f_max <= 2.0))
      throw std::invalid_argument("differential weight range must satisfy 0 <= min <= max <= 2");
    if (eval_threads == 0) throw std::invalid_argument("eval_threads must be >= 1");
  }
};

// Lower fitness is better everywhere in this library. Exactly one of the two
// callables is set: `evaluate` sees the perturbed text (the normal black-box
// path, memoized on the string), `genome_evaluate` sees the raw genome and
// bypasses text entirely (numeric self-tests; never memoized, since distinct
// genomes can share a perturbed string).
struct FitnessObjective {
  std::function<double(const std::string&)> evaluate;
  std::function<double(const Genome&)> genome_evaluate;
  std::string descriptor;
  bool concurrent_safe = true;
};

struct OptimizationTrace {
  std::vector<double> best_fitness;      // one entry per generation, index 0 = init
  std::vector<std::size_t> evaluations;  // cumulative objective calls, same indexing
  std::size_t evaluation_count = 0;
  Genome best_genome;
  std::string best_text;
};

struct OptimizeResult {
  std::string perturbed;
  OptimizationTrace trace;
};

namespace de_detail {

inline double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

inline double clamp(double v, double lo, double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

// Evaluates the fitness of each trial exactly once, deduplicating repeated
// perturbed strings against the cache. Splitting the unique batch across
// threads changes neither the values nor the evaluation count, so parallel
// runs merge identically to sequential ones.
class Evaluator {
 public:
  Evaluator(const FitnessObjective& obj, const DiacriticAlphabet& alphabet,
            std::string_view input, unsigned threads)
      : obj_(obj), alphabet_(alphabet), input_(input),
        threads_(obj.concurrent_safe ? threads : 1) {
    if (!obj_.evaluate && !obj_.genome_evaluate)
      throw std::invalid_argument("objective has no evaluate function");
  }

  // Returns (fitness, perturbed text) per genome, in population order.
  std::vector<std::pair<double, std::string>> evaluate_batch(
      const std::vector<Genome>& genomes) {
    std::vector<std::pair<double, std::string>> out(genomes.size());
    if (obj_.genome_evaluate) {
      for (std::size_t j = 0; j < genomes.size(); ++j) {
        out[j].second = perturb(input_, genomes[j], alphabet_);
        out[j].first = obj_.genome_evaluate(genomes[j]);
        ++count_;
      }
      return out;
    }

    std::vector<std::string> texts(genomes.size());
    std::vector<std::string> fresh;  // first-occurrence order
    for (std::size_t j = 0; j < genomes.size(); ++j) {
      texts[j] = perturb(input_, genomes[j], alphabet_);
      if (!cache_.count(texts[j]) &&
          std::find(fresh.begin(), fresh.end(), texts[j]) == fresh.end())
        fresh.push_back(texts[j]);
    }

    std::vector<double> values(fresh.size());
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(threads_, fresh.size()));
    if (workers <= 1) {
      for (std::size_t i = 0; i < fresh.size(); ++i) values[i] = obj_.evaluate(fresh[i]);
    } else {
      std::exception_ptr first_error;
      std::mutex error_mutex;
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t i = w; i < fresh.size(); i += workers)
              values[i] = obj_.evaluate(fresh[i]);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        });
      }
      for (std::thread& t : pool) t.join();
      if (first_error) std::rethrow_exception(first_error);
    }

    for (std::size_t i = 0; i < fresh.size(); ++i) cache_.emplace(fresh[i], values[i]);
    count_ += fresh.size();

    for (std::size_t j = 0; j < genomes.size(); ++j)
      out[j] = {cache_.at(texts[j]), texts[j]};
    return out;
  }

  std::size_t count() const { return count_; }

 private:
  const FitnessObjective& obj_;
  const DiacriticAlphabet& alphabet_;
  std::string input_;
  unsigned threads_;
  std::unordered_map<std::string, double> cache_;
  std::size_t count_ = 0;
};

}  // namespace de_detail

inline OptimizeResult optimize(std::string_view input, const FitnessObjective& objective,
                               const DEParams& params, const DiacriticAlphabet& alphabet) {
  params.validate();
  const std::size_t s = params.population_size;
  const std::size_t genes = params.budget + 1;
  const double d_max = static_cast<double>(alphabet.size());
  // Budget 0 collapses the position domain to {-1}: every gene is skipped and
  // the perturbation is the identity, while the genome keeps its unit length.
  const double i_max = params.budget == 0
                           ? -1.0
                           : static_cast<double>(scalar_length(input));

  std::mt19937_64 rng(params.seed);
  de_detail::Evaluator evaluator(objective, alphabet, input, params.eval_threads);

  std::vector<Genome> population(s);
  for (Genome& g : population) {
    g.genes.resize(genes);
    for (Gene& gene : g.genes) {
      gene.mark_selector = de_detail::u01(rng) * d_max;
      gene.position =
          params.budget == 0 ? -1.0 : -1.0 + de_detail::u01(rng) * (i_max + 1.0);
    }
  }

  auto evaluated = evaluator.evaluate_batch(population);
  std::vector<double> fitness(s);
  std::vector<std::string> texts(s);
  for (std::size_t j = 0; j < s; ++j) {
    fitness[j] = evaluated[j].first;
    texts[j] = evaluated[j].second;
  }

  OptimizationTrace trace;
  auto record_generation = [&] {
    double best = fitness[0];
    for (std::size_t j = 1; j < s; ++j) best = std::min(best, fitness[j]);
    trace.best_fitness.push_back(best);
    trace.evaluations.push_back(evaluator.count());
  };
  record_generation();

  for (std::size_t gen = 0; gen < params.generations; ++gen) {
    const double f_weight =
        params.f_min + de_detail::u01(rng) * (params.f_max - params.f_min);
    const std::vector<Genome> snapshot = population;

    std::vector<Genome> trials(s);
    for (std::size_t j = 0; j < s; ++j) {
      std::size_t a, b, c;
      do a = de_detail::uniform_index(rng, s); while (a == j);
      do b = de_detail::uniform_index(rng, s); while (b == j || b == a);
      do c = de_detail::uniform_index(rng, s); while (c == j || c == a || c == b);
      const std::size_t forced = de_detail::uniform_index(rng, genes);

      Genome trial = snapshot[j];
      for (std::size_t k = 0; k < genes; ++k) {
        const double r = de_detail::u01(rng);
        if (r < params.crossover || k == forced) {
          const Gene& pa = snapshot[a].genes[k];
          const Gene& pb = snapshot[b].genes[k];
          const Gene& pc = snapshot[c].genes[k];
          trial.genes[k].mark_selector = de_detail::clamp(
              pa.mark_selector + f_weight * (pb.mark_selector - pc.mark_selector),
              0.0, d_max);
          trial.genes[k].position = de_detail::clamp(
              pa.position + f_weight * (pb.position - pc.position), -1.0, i_max);
        }
      }
      trials[j] = std::move(trial);
    }

    auto trial_eval = evaluator.evaluate_batch(trials);
    for (std::size_t j = 0; j < s; ++j) {
      if (trial_eval[j].first < fitness[j]) {
        population[j] = std::move(trials[j]);
        fitness[j] = trial_eval[j].first;
        texts[j] = std::move(trial_eval[j].second);
      }
    }
    record_generation();
  }

  std::size_t best_index = 0;
  for (std::size_t j = 1; j < s; ++j)
    if (fitness[j] < fitness[best_index]) best_index = j;

  trace.evaluation_count = evaluator.count();
  trace.best_genome = population[best_index];
  trace.best_text = texts[best_index];
  return {texts[best_index], std::move(trace)};
}

// One JSONL record per generation, evaluations cumulative.
inline std::string trace_to_jsonl(const OptimizationTrace& trace) {
  std::string out;
  for (std::size_t g = 0; g < trace.best_fitness.size(); ++g) {
    nlohmann::ordered_json line;
    line["generation"] = g;
    line["best_fitness"] = trace.best_fitness[g];
    line["evaluations"] = trace.evaluations[g];
    out += line.dump();
    out += '\n';
  }
  return out;
}

} // namespace dmark
