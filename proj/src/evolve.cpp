#include "lander/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace lander::evolve {

namespace {

constexpr std::uint64_t kStreamPlace = 0x706c616365ULL;
constexpr std::uint64_t kStreamKill = 0x6b696c6cULL;
constexpr std::uint64_t kStreamBaseline = 0x62617365ULL;
constexpr std::uint64_t kStreamInit = 0x696e6974ULL;
constexpr std::uint64_t kStreamOffspring = 0x6f666673ULL;
constexpr std::uint64_t kStreamEval = 0x6576616cULL;

constexpr double kInf = std::numeric_limits<double>::infinity();

int bit_field(const Genotype& g, int lo, int hi) {
    int v = 0;
    for (int k = lo; k < hi; ++k) v = (v << 1) | (g[k] & 1);
    return v;
}

double component(const FitnessVector& f, int c) {
    switch (c) {
        case 0: return f.area_n;
        case 1: return f.degree_n;
        case 2: return f.time_n;
        default: return f.energy_n;
    }
}

bool dominates(const FitnessVector& a, const FitnessVector& b) {
    bool strictly = false;
    for (int c = 0; c < 4; ++c) {
        double va = component(a, c), vb = component(b, c);
        if (va < vb) return false;
        if (va > vb) strictly = true;
    }
    return strictly;
}

struct PipelineOutcome {
    double area = 0;
    double mean_degree = 0;
    double t_total = 0;
    double e_total = 0;
    bool both_settled = false;
};

// settle, kill, re-settle: the shared path behind evaluate() and the baseline
PipelineOutcome run_pipeline(const Phenotype& p, std::uint64_t seed, const EvalOptions& opt) {
    if (p.n < 1) throw std::invalid_argument("phenotype needs at least one lander");
    if (p.degree < 1) throw std::invalid_argument("phenotype degree must be at least 1");
    if (!(opt.area_side > 0)) throw std::invalid_argument("area side must be positive");
    if (!(opt.attrition >= 0 && opt.attrition < 1))
        throw std::invalid_argument("attrition must lie in [0, 1)");

    swarm::VirtualForceParams vp;
    vp.c_cov = p.c_cov;
    vp.c_com = p.c_com;
    vp.c_obs = p.c_obs;
    vp.r_c = opt.r_c;
    vp.r_s = opt.r_s;
    vp.degree_target = p.degree;

    swarm::RunOptions ro = opt.run;
    ro.area_side = opt.area_side;
    ro.record_trace = false;
    ro.sensing_cells = 0;  // the disk-union estimate is far too slow in this loop

    Rng place(derive_seed(seed, kStreamPlace));
    swarm::SwarmState init = swarm::random_cluster(p.n, opt.area_side / 6, place);
    swarm::CoverageRun r1 = swarm::run_coverage(init, vp, ro);

    int n_kill = static_cast<int>(std::ceil(opt.attrition * p.n));
    n_kill = std::min(n_kill, p.n - 1);
    std::vector<int> idx(p.n);
    std::iota(idx.begin(), idx.end(), 0);
    Rng kill(derive_seed(seed, kStreamKill));
    for (int k = 0; k < n_kill; ++k)
        std::swap(idx[k], idx[k + static_cast<int>(kill.below(p.n - k))]);
    std::sort(idx.begin() + n_kill, idx.end());

    swarm::SwarmState survivors;
    survivors.pos.reserve(p.n - n_kill);
    for (int q = n_kill; q < p.n; ++q) survivors.pos.push_back(r1.final_state.pos[idx[q]]);
    survivors.vel.assign(survivors.pos.size(), Vec2{});
    survivors.obstacles = r1.final_state.obstacles;
    swarm::CoverageRun r2 = swarm::run_coverage(survivors, vp, ro);

    const double cap = static_cast<double>(ro.max_steps);
    PipelineOutcome out;
    out.area = r2.metrics.area;
    out.mean_degree = r2.metrics.mean_degree;
    out.t_total = (r1.metrics.settled ? r1.metrics.t_settle : cap) +
                  (r2.metrics.settled ? r2.metrics.t_settle : cap);
    out.both_settled = r1.metrics.settled && r2.metrics.settled;
    out.e_total = static_cast<double>(r1.metrics.hops_total) / p.n +
                  static_cast<double>(r2.metrics.hops_total) / survivors.pos.size();
    return out;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

int argmax_overall(const std::vector<Individual>& pop) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(pop.size()); ++i)
        if (pop[i].overall > pop[best].overall) best = i;
    return best;
}

void stamp_fronts(std::vector<Individual>& pop) {
    auto fronts = non_dominated_sort(pop);
    for (const auto& f : fronts) crowding_distance(pop, f);
}

int tournament(const std::vector<Individual>& pop, Rng& rng) {
    int a = static_cast<int>(rng.below(pop.size()));
    int b = static_cast<int>(rng.below(pop.size()));
    if (pop[b].rank < pop[a].rank) return b;
    if (pop[a].rank < pop[b].rank) return a;
    if (pop[b].crowding > pop[a].crowding) return b;
    return a;  // ties keep the first draw
}

std::vector<std::uint64_t> eval_seeds_for(const EvolveConfig& cfg, int generation, int i) {
    std::vector<std::uint64_t> seeds(cfg.eval_seeds);
    for (int k = 0; k < cfg.eval_seeds; ++k)
        seeds[k] = derive_seed(cfg.master_seed, kStreamEval,
                               (static_cast<std::uint64_t>(generation) << 24) ^
                                   (static_cast<std::uint64_t>(i) << 8) ^
                                   static_cast<std::uint64_t>(k));
    return seeds;
}

}  // namespace

Phenotype decode(const Genotype& g) {
    Phenotype p;
    p.n = std::max(2, bit_field(g, 0, 7));
    p.degree = bit_field(g, 7, 10) + 1;
    p.c_cov = 0.5 * (bit_field(g, 10, 14) + 1);
    p.c_com = 0.05 * (bit_field(g, 14, 19) + 1);
    p.c_obs = p.c_cov;
    return p;
}

Genotype random_genotype(Rng& rng) {
    Genotype g{};
    for (auto& b : g) b = static_cast<std::uint8_t>(rng.below(2));
    return g;
}

double overall_fitness(const FitnessVector& f) {
    return 0.5 * f.area_n + 0.25 * f.degree_n + 0.125 * f.time_n + 0.125 * f.energy_n;
}

FitnessVector evaluate(const Phenotype& p, const Baseline& baseline,
                       const std::vector<std::uint64_t>& seeds, const EvalOptions& opt) {
    if (seeds.empty()) throw std::invalid_argument("evaluate needs at least one seed");
    if (!(baseline.t_ref > 0) || !(baseline.e_ref > 0))
        throw std::invalid_argument("baseline references must be positive");
    FitnessVector acc;
    const double side2 = opt.area_side * opt.area_side;
    for (std::uint64_t seed : seeds) {
        PipelineOutcome o = run_pipeline(p, seed, opt);
        acc.area_n += clamp01(o.area / side2);
        acc.degree_n += std::min(1.0, o.mean_degree / p.degree);
        acc.time_n +=
            o.both_settled ? clamp01((2 * baseline.t_ref - o.t_total) / baseline.t_ref) : 0.0;
        acc.energy_n += clamp01((2 * baseline.e_ref - o.e_total) / baseline.e_ref);
    }
    const double inv = 1.0 / seeds.size();
    return {acc.area_n * inv, acc.degree_n * inv, acc.time_n * inv, acc.energy_n * inv};
}

Baseline compute_baseline(const std::vector<std::uint64_t>& seeds, const EvalOptions& opt) {
    if (seeds.empty()) throw std::invalid_argument("baseline needs at least one seed");
    Phenotype ref;
    ref.n = 40;
    ref.degree = 3;
    ref.c_cov = 1.0;
    ref.c_com = 0.1;
    ref.c_obs = 1.0;
    Baseline b;
    for (std::uint64_t seed : seeds) {
        PipelineOutcome o = run_pipeline(ref, seed, opt);
        b.t_ref += o.t_total;
        b.e_ref += o.e_total;
    }
    b.t_ref /= seeds.size();
    b.e_ref /= seeds.size();
    return b;
}

std::vector<std::vector<int>> non_dominated_sort(std::vector<Individual>& pop) {
    const int n = static_cast<int>(pop.size());
    std::vector<std::vector<int>> dominated(n);
    std::vector<int> count(n, 0);
    std::vector<std::vector<int>> fronts(1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (dominates(pop[i].fitness, pop[j].fitness))
                dominated[i].push_back(j);
            else if (dominates(pop[j].fitness, pop[i].fitness))
                ++count[i];
        }
        if (count[i] == 0) {
            pop[i].rank = 1;
            fronts[0].push_back(i);
        }
    }
    int f = 0;
    while (!fronts[f].empty()) {
        std::vector<int> next;
        for (int i : fronts[f]) {
            for (int j : dominated[i]) {
                if (--count[j] == 0) {
                    pop[j].rank = f + 2;
                    next.push_back(j);
                }
            }
        }
        fronts.push_back(std::move(next));
        ++f;
    }
    fronts.pop_back();
    return fronts;
}

std::vector<double> crowding_distance(std::vector<Individual>& pop,
                                      const std::vector<int>& front) {
    const int m = static_cast<int>(front.size());
    std::vector<double> d(m, 0.0);
    if (m == 0) return d;
    if (m <= 2) {
        std::fill(d.begin(), d.end(), kInf);
        for (int k = 0; k < m; ++k) pop[front[k]].crowding = kInf;
        return d;
    }
    std::vector<int> ord(m);
    for (int c = 0; c < 4; ++c) {
        std::iota(ord.begin(), ord.end(), 0);
        std::sort(ord.begin(), ord.end(), [&](int a, int b) {
            double va = component(pop[front[a]].fitness, c);
            double vb = component(pop[front[b]].fitness, c);
            if (va != vb) return va < vb;
            return front[a] < front[b];
        });
        d[ord[0]] = kInf;
        d[ord[m - 1]] = kInf;
        double span = component(pop[front[ord[m - 1]]].fitness, c) -
                      component(pop[front[ord[0]]].fitness, c);
        if (span > 0) {
            for (int k = 1; k < m - 1; ++k) {
                double gap = component(pop[front[ord[k + 1]]].fitness, c) -
                             component(pop[front[ord[k - 1]]].fitness, c);
                d[ord[k]] += gap / span;
            }
        }
    }
    for (int k = 0; k < m; ++k) pop[front[k]].crowding = d[k];
    return d;
}

std::vector<Genotype> make_offspring(const std::vector<Individual>& parents, double p_cross,
                                     double p_mut, Rng& rng) {
    if (parents.empty()) throw std::invalid_argument("offspring need parents");
    std::vector<Genotype> kids;
    kids.reserve(parents.size());
    while (kids.size() < parents.size()) {
        const Genotype& pa = parents[tournament(parents, rng)].genotype;
        const Genotype& pb = parents[tournament(parents, rng)].genotype;
        Genotype child = pa;
        if (rng.bernoulli(p_cross)) {
            int cut = static_cast<int>(rng.below(kGenotypeBits - 1)) + 1;
            for (int k = cut; k < kGenotypeBits; ++k) child[k] = pb[k];
        }
        if (rng.bernoulli(p_mut)) child[rng.below(kGenotypeBits)] ^= 1;
        kids.push_back(child);
    }
    return kids;
}

std::vector<FitnessVector> evaluate_population_serial(const std::vector<Genotype>& genotypes,
                                                      const Baseline& baseline,
                                                      const EvolveConfig& cfg, int generation) {
    std::vector<FitnessVector> out(genotypes.size());
    for (int i = 0; i < static_cast<int>(genotypes.size()); ++i)
        out[i] = evaluate(decode(genotypes[i]), baseline, eval_seeds_for(cfg, generation, i),
                          cfg.eval);
    return out;
}

std::vector<FitnessVector> evaluate_population_parallel(const std::vector<Genotype>& genotypes,
                                                        const Baseline& baseline,
                                                        const EvolveConfig& cfg, int generation) {
    std::vector<FitnessVector> out(genotypes.size());
    const int n = static_cast<int>(genotypes.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (int i = 0; i < n; ++i)
        out[i] = evaluate(decode(genotypes[i]), baseline, eval_seeds_for(cfg, generation, i),
                          cfg.eval);
    return out;
}

EvolveResult run_nsga2(const EvolveConfig& cfg) {
    if (cfg.pop_size < 4 || cfg.pop_size % 2 != 0)
        throw std::invalid_argument("population size must be even and at least 4");
    if (cfg.generations < 1) throw std::invalid_argument("need at least one generation");
    if (cfg.eval_seeds < 1) throw std::invalid_argument("need at least one evaluation seed");
    if (cfg.p_crossover < 0 || cfg.p_crossover > 1 || cfg.p_mutation < 0 || cfg.p_mutation > 1)
        throw std::invalid_argument("probabilities must lie in [0, 1]");

    EvolveResult res;
    std::vector<std::uint64_t> bseeds(cfg.eval_seeds);
    for (int k = 0; k < cfg.eval_seeds; ++k)
        bseeds[k] = derive_seed(cfg.master_seed, kStreamBaseline, k);
    res.baseline = compute_baseline(bseeds, cfg.eval);

    auto eval_pop = [&](const std::vector<Genotype>& gs, int gen) {
        return cfg.parallel_eval ? evaluate_population_parallel(gs, res.baseline, cfg, gen)
                                 : evaluate_population_serial(gs, res.baseline, cfg, gen);
    };

    Rng init_rng(derive_seed(cfg.master_seed, kStreamInit));
    std::vector<Genotype> genos(cfg.pop_size);
    for (auto& g : genos) g = random_genotype(init_rng);

    std::vector<Individual> pop(cfg.pop_size);
    {
        auto fits = eval_pop(genos, 0);
        for (int i = 0; i < cfg.pop_size; ++i) {
            pop[i].genotype = genos[i];
            pop[i].phenotype = decode(genos[i]);
            pop[i].fitness = fits[i];
            pop[i].overall = overall_fitness(fits[i]);
        }
    }
    stamp_fronts(pop);
    res.initial_best = pop[argmax_overall(pop)].overall;
    Individual best = pop[argmax_overall(pop)];

    for (int gen = 1; gen <= cfg.generations; ++gen) {
        Rng off_rng(derive_seed(cfg.master_seed, kStreamOffspring, gen));
        auto kids = make_offspring(pop, cfg.p_crossover, cfg.p_mutation, off_rng);
        auto kfits = eval_pop(kids, gen);

        std::vector<Individual> uni = pop;  // parents keep their scores
        uni.reserve(pop.size() + kids.size());
        for (int j = 0; j < static_cast<int>(kids.size()); ++j) {
            Individual c;
            c.genotype = kids[j];
            c.phenotype = decode(kids[j]);
            c.fitness = kfits[j];
            c.overall = overall_fitness(kfits[j]);
            uni.push_back(c);
        }

        auto fronts = non_dominated_sort(uni);
        std::vector<int> chosen;
        chosen.reserve(cfg.pop_size);
        for (const auto& front : fronts) {
            crowding_distance(uni, front);
            if (static_cast<int>(chosen.size() + front.size()) <= cfg.pop_size) {
                chosen.insert(chosen.end(), front.begin(), front.end());
                if (static_cast<int>(chosen.size()) == cfg.pop_size) break;
            } else {
                std::vector<int> part = front;
                std::sort(part.begin(), part.end(), [&](int a, int b) {
                    if (uni[a].crowding != uni[b].crowding)
                        return uni[a].crowding > uni[b].crowding;
                    return uni[a].genotype < uni[b].genotype;
                });
                part.resize(cfg.pop_size - chosen.size());
                chosen.insert(chosen.end(), part.begin(), part.end());
                break;
            }
        }

        // keep the scalar champion even when the fronts would crowd it out
        int star = 0;
        for (int i = 1; i < static_cast<int>(uni.size()); ++i)
            if (uni[i].overall > uni[star].overall) star = i;
        if (std::find(chosen.begin(), chosen.end(), star) == chosen.end()) chosen.back() = star;

        std::vector<Individual> next;
        next.reserve(cfg.pop_size);
        for (int idx : chosen) next.push_back(uni[idx]);
        pop = std::move(next);
        stamp_fronts(pop);

        GenerationStats st;
        st.gen = gen;
        for (const auto& ind : pop) {
            st.mean_area_n += ind.fitness.area_n;
            st.mean_degree_n += ind.fitness.degree_n;
            st.mean_time_n += ind.fitness.time_n;
            st.mean_energy_n += ind.fitness.energy_n;
        }
        st.mean_area_n /= pop.size();
        st.mean_degree_n /= pop.size();
        st.mean_time_n /= pop.size();
        st.mean_energy_n /= pop.size();
        int pb = argmax_overall(pop);
        st.best_overall = pop[pb].overall;
        st.best = pop[pb].phenotype;
        res.history.push_back(st);
        if (pop[pb].overall > best.overall) best = pop[pb];
    }

    res.best = best;
    for (const auto& ind : pop)
        if (ind.rank == 1) res.front.push_back(ind);
    return res;
}

}  // namespace lander::evolve
