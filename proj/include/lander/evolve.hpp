#ifndef LANDER_EVOLVE_HPP
#define LANDER_EVOLVE_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "lander/rng.hpp"
#include "lander/swarm_coverage.hpp"

namespace lander::evolve {

inline constexpr int kGenotypeBits = 19;

// MSB-first fields: [0,7) lander count, [7,10) degree, [10,14) repulsion gain,
// [14,19) spring gain.
using Genotype = std::array<std::uint8_t, kGenotypeBits>;

struct Phenotype {
    int n = 0;        // lander count, [2,127]
    int degree = 0;   // required links, [1,8]
    double c_cov = 0; // [0.5, 8.0] in steps of 0.5
    double c_com = 0; // [0.05, 1.6] in steps of 0.05
    double c_obs = 0; // tied to c_cov
};

Phenotype decode(const Genotype& g);
Genotype random_genotype(Rng& rng);

struct FitnessVector {
    double area_n = 0;    // [0,1]
    double degree_n = 0;  // [0,1]
    double time_n = 0;    // [0,1]
    double energy_n = 0;  // [0,1]
};

// 0.5/0.25/0.125/0.125 weighted sum.
double overall_fitness(const FitnessVector& f);

struct Baseline {
    double t_ref = 0;  // settling steps, both phases, 40-lander reference
    double e_ref = 0;  // per-lander hops, both phases
};

struct EvalOptions {
    double area_side = 30;
    double r_c = 5;
    double r_s = 2.5;
    double attrition = 0.10;
    swarm::RunOptions run;  // dt, max_steps, settle thresholds
};

// One full evaluation: coverage run from a clustered start, uniform kill of
// ceil(attrition*N), re-settle, fitness on the post-attrition swarm. Each seed
// drives placement and attrition; components average across seeds.
FitnessVector evaluate(const Phenotype& p, const Baseline& baseline,
                       const std::vector<std::uint64_t>& seeds, const EvalOptions& opt);

// Reference cost of the 40-lander default swarm through the same pipeline.
Baseline compute_baseline(const std::vector<std::uint64_t>& seeds, const EvalOptions& opt);

struct Individual {
    Genotype genotype{};
    Phenotype phenotype;
    FitnessVector fitness;
    double overall = 0;
    int rank = 0;        // 1 = non-dominated
    double crowding = 0;
};

// Fast non-dominated sort over the four maximization objectives; returns
// fronts as index lists and stamps rank on each individual.
std::vector<std::vector<int>> non_dominated_sort(std::vector<Individual>& pop);

// Crowding distances for one front (indices into pop); boundary individuals
// get +inf. Stamps crowding on each individual and returns the values.
std::vector<double> crowding_distance(std::vector<Individual>& pop, const std::vector<int>& front);

// Binary tournament on (rank, crowding), single-point crossover, then
// per-child mutation flipping one uniformly chosen bit.
std::vector<Genotype> make_offspring(const std::vector<Individual>& parents, double p_cross,
                                     double p_mut, Rng& rng);

struct EvolveConfig {
    int pop_size = 20;
    int generations = 15;
    double p_crossover = 0.8;
    double p_mutation = 0.2;
    int eval_seeds = 3;
    std::uint64_t master_seed = 1;
    EvalOptions eval;
    bool parallel_eval = true;
};

struct GenerationStats {
    int gen = 0;
    double mean_area_n = 0, mean_degree_n = 0, mean_time_n = 0, mean_energy_n = 0;
    double best_overall = 0;
    Phenotype best;
};

struct EvolveResult {
    std::vector<GenerationStats> history;  // one row per generation
    Individual best;                       // best overall across the whole run
    std::vector<Individual> front;         // rank-1 set of the final population
    Baseline baseline;
    double initial_best = 0;               // best overall of the random start
};

// mu+lambda NSGA-II loop. Selection is front-by-front with crowding; the
// best-overall individual of parents+offspring is always retained, so the
// scalar best never regresses.
EvolveResult run_nsga2(const EvolveConfig& cfg);

// Population evaluation, one derived seed list per individual (pure per
// individual, so the parallel variant matches the serial one exactly).
std::vector<FitnessVector> evaluate_population_serial(const std::vector<Genotype>& genotypes,
                                                      const Baseline& baseline,
                                                      const EvolveConfig& cfg, int generation);
std::vector<FitnessVector> evaluate_population_parallel(const std::vector<Genotype>& genotypes,
                                                        const Baseline& baseline,
                                                        const EvolveConfig& cfg, int generation);

}  // namespace lander::evolve

#endif
