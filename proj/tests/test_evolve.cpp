#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "lander/evolve.hpp"
#include "lander/rng.hpp"

using namespace lander;
using namespace lander::evolve;

namespace {

Genotype from_string(const std::string& bits) {
    REQUIRE(bits.size() == static_cast<size_t>(kGenotypeBits));
    Genotype g{};
    for (int k = 0; k < kGenotypeBits; ++k) g[k] = bits[k] == '1';
    return g;
}

Individual with_fitness(double a, double d, double t, double e) {
    Individual ind;
    ind.fitness = {a, d, t, e};
    ind.overall = overall_fitness(ind.fitness);
    return ind;
}

// independent peel-based ranking oracle
std::vector<int> oracle_ranks(const std::vector<Individual>& pop) {
    auto dom = [](const FitnessVector& x, const FitnessVector& y) {
        const double xv[4] = {x.area_n, x.degree_n, x.time_n, x.energy_n};
        const double yv[4] = {y.area_n, y.degree_n, y.time_n, y.energy_n};
        bool ge = true, gt = false;
        for (int c = 0; c < 4; ++c) {
            ge = ge && xv[c] >= yv[c];
            gt = gt || xv[c] > yv[c];
        }
        return ge && gt;
    };
    const int n = static_cast<int>(pop.size());
    std::vector<int> rank(n, 0);
    std::vector<char> done(n, 0);
    int assigned = 0;
    for (int r = 1; assigned < n; ++r) {
        std::vector<int> level;
        for (int i = 0; i < n; ++i) {
            if (done[i]) continue;
            bool beaten = false;
            for (int j = 0; j < n && !beaten; ++j)
                if (!done[j] && j != i && dom(pop[j].fitness, pop[i].fitness)) beaten = true;
            if (!beaten) level.push_back(i);
        }
        for (int i : level) {
            rank[i] = r;
            done[i] = 1;
        }
        assigned += static_cast<int>(level.size());
    }
    return rank;
}

}  // namespace

TEST_CASE("genotype decode") {
    SUBCASE("lander-count field is MSB-first") {
        Phenotype p = decode(from_string("1000001" "000" "0000" "00000"));
        CHECK(p.n == 65);
    }
    SUBCASE("all zeros hits the low rail of every field") {
        Phenotype p = decode(from_string("0000000" "000" "0000" "00000"));
        CHECK(p.n == 2);  // raw 0 lifted to the minimum crew
        CHECK(p.degree == 1);
        CHECK(p.c_cov == 0.5);
        CHECK(p.c_com == doctest::Approx(0.05).epsilon(1e-15));
        CHECK(p.c_obs == p.c_cov);
    }
    SUBCASE("all ones hits the high rail") {
        Phenotype p = decode(from_string("1111111" "111" "1111" "11111"));
        CHECK(p.n == 127);
        CHECK(p.degree == 8);
        CHECK(p.c_cov == 8.0);
        CHECK(p.c_com == doctest::Approx(1.6).epsilon(1e-15));
        CHECK(p.c_obs == 8.0);
    }
    SUBCASE("random genotypes stay in range and decode deterministically") {
        Rng rng(99);
        for (int k = 0; k < 200; ++k) {
            Genotype g = random_genotype(rng);
            Phenotype p = decode(g);
            CHECK(p.n >= 2);
            CHECK(p.n <= 127);
            CHECK(p.degree >= 1);
            CHECK(p.degree <= 8);
            CHECK(p.c_cov >= 0.5);
            CHECK(p.c_cov <= 8.0);
            CHECK(p.c_com >= 0.05);
            CHECK(p.c_com <= 1.6 + 1e-12);
            CHECK(p.c_obs == p.c_cov);
            Phenotype q = decode(g);
            CHECK(q.n == p.n);
            CHECK(q.c_com == p.c_com);
        }
    }
}

TEST_CASE("overall fitness is the fixed weighted sum") {
    CHECK(overall_fitness({0.8, 1.0, 0.5, 0.5}) == doctest::Approx(0.775).epsilon(1e-15));
    CHECK(overall_fitness({1, 1, 1, 1}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(overall_fitness({0, 0, 0, 0}) == 0.0);
    // area dominates the weighting
    CHECK(overall_fitness({1, 0, 0, 0}) > overall_fitness({0, 1, 1, 1}) - 1e-12);
}

TEST_CASE("non-dominated sort") {
    SUBCASE("chain of dominated points peels into singleton fronts") {
        std::vector<Individual> pop{with_fitness(1, 1, 0.5, 0.5), with_fitness(1, 0, 0.5, 0.5),
                                    with_fitness(0, 0, 0.5, 0.5)};
        auto fronts = non_dominated_sort(pop);
        REQUIRE(fronts.size() == 3);
        CHECK(fronts[0] == std::vector<int>{0});
        CHECK(fronts[1] == std::vector<int>{1});
        CHECK(fronts[2] == std::vector<int>{2});
        CHECK(pop[0].rank == 1);
        CHECK(pop[1].rank == 2);
        CHECK(pop[2].rank == 3);
    }
    SUBCASE("trade-off pair shares the first front") {
        std::vector<Individual> pop{with_fitness(1, 0, 0.5, 0.5), with_fitness(0, 1, 0.5, 0.5)};
        auto fronts = non_dominated_sort(pop);
        REQUIRE(fronts.size() == 1);
        CHECK(fronts[0].size() == 2);
    }
    SUBCASE("equal fitness never dominates") {
        std::vector<Individual> pop{with_fitness(0.5, 0.5, 0.5, 0.5),
                                    with_fitness(0.5, 0.5, 0.5, 0.5)};
        auto fronts = non_dominated_sort(pop);
        REQUIRE(fronts.size() == 1);
        CHECK(fronts[0].size() == 2);
    }
    SUBCASE("matches the exhaustive peel oracle on random populations") {
        Rng rng(4242);
        const double grid[5] = {0, 0.25, 0.5, 0.75, 1.0};
        for (int trial = 0; trial < 100; ++trial) {
            const int m = 2 + static_cast<int>(rng.below(49));
            std::vector<Individual> pop;
            for (int i = 0; i < m; ++i)
                pop.push_back(with_fitness(grid[rng.below(5)], grid[rng.below(5)],
                                           grid[rng.below(5)], grid[rng.below(5)]));
            auto fronts = non_dominated_sort(pop);
            auto want = oracle_ranks(pop);
            int covered = 0;
            for (size_t f = 0; f < fronts.size(); ++f) {
                for (int idx : fronts[f]) {
                    CHECK(want[idx] == static_cast<int>(f) + 1);
                    CHECK(pop[idx].rank == want[idx]);
                    ++covered;
                }
            }
            CHECK(covered == m);  // fronts partition the population
        }
    }
}

TEST_CASE("crowding distance") {
    SUBCASE("tiny fronts are all boundary") {
        std::vector<Individual> pop{with_fitness(1, 0, 0, 0), with_fitness(0, 1, 0, 0)};
        auto d = crowding_distance(pop, {0, 1});
        CHECK(d[0] == std::numeric_limits<double>::infinity());
        CHECK(d[1] == std::numeric_limits<double>::infinity());
        CHECK(pop[0].crowding == d[0]);
    }
    SUBCASE("equally spaced middle point accrues one span per varying objective") {
        std::vector<Individual> pop{with_fitness(0, 0, 0.3, 0.3), with_fitness(0.5, 0.5, 0.3, 0.3),
                                    with_fitness(1, 1, 0.3, 0.3)};
        auto d = crowding_distance(pop, {0, 1, 2});
        CHECK(d[0] == std::numeric_limits<double>::infinity());
        CHECK(d[2] == std::numeric_limits<double>::infinity());
        CHECK(d[1] == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("an uneven gap splits the middle weights") {
        // middle sits near the low end: gap (0.8 - 0) over span 1 in one objective
        std::vector<Individual> pop{with_fitness(0, 0.3, 0.3, 0.3), with_fitness(0.2, 0.3, 0.3, 0.3),
                                    with_fitness(1, 0.3, 0.3, 0.3)};
        auto d = crowding_distance(pop, {0, 1, 2});
        CHECK(d[1] == doctest::Approx(1.0).epsilon(1e-12));  // (1.0 - 0.0) / 1.0
    }
}

TEST_CASE("offspring generation") {
    std::vector<Individual> parents;
    parents.push_back(with_fitness(0.9, 0.9, 0.9, 0.9));
    parents.back().genotype = from_string("0000000" "000" "0000" "00000");
    parents.push_back(with_fitness(0.8, 0.8, 0.8, 0.8));
    parents.back().genotype = from_string("1111111" "111" "1111" "11111");
    non_dominated_sort(parents);

    SUBCASE("no crossover, no mutation: children copy parents") {
        Rng rng(5);
        auto kids = make_offspring(parents, 0.0, 0.0, rng);
        REQUIRE(kids.size() == parents.size());
        for (const auto& k : kids) {
            bool is_copy = k == parents[0].genotype || k == parents[1].genotype;
            CHECK(is_copy);
        }
    }
    SUBCASE("single-point crossover leaves at most one block transition") {
        Rng rng(6);
        auto kids = make_offspring(parents, 1.0, 0.0, rng);
        for (const auto& k : kids) {
            int transitions = 0;
            for (int b = 1; b < kGenotypeBits; ++b)
                if (k[b] != k[b - 1]) ++transitions;
            CHECK(transitions <= 1);
        }
    }
    SUBCASE("forced mutation flips exactly one bit") {
        // identical parents isolate the mutation operator
        std::vector<Individual> same(4, parents[0]);
        non_dominated_sort(same);
        Rng rng(7);
        auto kids = make_offspring(same, 0.0, 1.0, rng);
        for (const auto& k : kids) {
            int dist = 0;
            for (int b = 0; b < kGenotypeBits; ++b)
                if (k[b] != parents[0].genotype[b]) ++dist;
            CHECK(dist == 1);
        }
    }
    SUBCASE("same seed, same brood") {
        Rng a(11), b(11);
        auto k1 = make_offspring(parents, 0.7, 0.3, a);
        auto k2 = make_offspring(parents, 0.7, 0.3, b);
        CHECK(k1 == k2);
    }
    SUBCASE("no parents is an error") {
        Rng rng(1);
        std::vector<Individual> none;
        CHECK_THROWS_AS(make_offspring(none, 0.5, 0.5, rng), std::invalid_argument);
    }
}

TEST_CASE("fitness evaluation against the reference baseline") {
    EvalOptions opt;  // defaults: 30x30, r_c 5, attrition 10%
    std::vector<std::uint64_t> seeds{derive_seed(3, 0xb)};

    Baseline base = compute_baseline(seeds, opt);
    CHECK(base.t_ref > 0);
    CHECK(base.e_ref > 0);

    Phenotype ref;
    ref.n = 40;
    ref.degree = 3;
    ref.c_cov = 1.0;
    ref.c_com = 0.1;
    ref.c_obs = 1.0;

    SUBCASE("the reference phenotype scores par time and energy") {
        FitnessVector f = evaluate(ref, base, seeds, opt);
        CHECK(f.time_n == 1.0);    // t_total == t_ref exactly, same pipeline
        CHECK(f.energy_n == 1.0);
        CHECK(f.area_n > 0.0);
        CHECK(f.area_n <= 1.0);
        CHECK(f.degree_n > 0.0);
        CHECK(f.degree_n <= 1.0);
    }
    SUBCASE("evaluation is deterministic") {
        FitnessVector a = evaluate(ref, base, seeds, opt);
        FitnessVector b = evaluate(ref, base, seeds, opt);
        CHECK(a.area_n == b.area_n);
        CHECK(a.degree_n == b.degree_n);
        CHECK(a.time_n == b.time_n);
        CHECK(a.energy_n == b.energy_n);
    }
    SUBCASE("bad arguments are rejected") {
        CHECK_THROWS_AS(evaluate(ref, base, {}, opt), std::invalid_argument);
        Baseline zero;
        CHECK_THROWS_AS(evaluate(ref, zero, seeds, opt), std::invalid_argument);
        CHECK_THROWS_AS(compute_baseline({}, opt), std::invalid_argument);
    }
}

TEST_CASE("campaign config validation is cheap and strict") {
    EvolveConfig cfg;
    cfg.pop_size = 3;
    CHECK_THROWS_AS(run_nsga2(cfg), std::invalid_argument);
    cfg.pop_size = 5;
    CHECK_THROWS_AS(run_nsga2(cfg), std::invalid_argument);
    cfg.pop_size = 4;
    cfg.generations = 0;
    CHECK_THROWS_AS(run_nsga2(cfg), std::invalid_argument);
    cfg.generations = 1;
    cfg.eval_seeds = 0;
    CHECK_THROWS_AS(run_nsga2(cfg), std::invalid_argument);
    cfg.eval_seeds = 1;
    cfg.p_mutation = 1.5;
    CHECK_THROWS_AS(run_nsga2(cfg), std::invalid_argument);
}

TEST_CASE("small campaign improves monotonically and stays deterministic") {
    EvolveConfig cfg;
    cfg.pop_size = 4;
    cfg.generations = 2;
    cfg.eval_seeds = 1;
    cfg.master_seed = 7;
    cfg.eval.run.max_steps = 1500;  // keep the unit test quick; slow settlers score T_n 0

    EvolveResult res = run_nsga2(cfg);
    REQUIRE(res.history.size() == 2);
    CHECK(res.history[0].gen == 1);
    CHECK(res.history[1].gen == 2);
    CHECK(res.baseline.t_ref > 0);
    CHECK(res.history[0].best_overall >= res.initial_best);
    CHECK(res.history[1].best_overall >= res.history[0].best_overall);
    CHECK(res.best.overall == res.history[1].best_overall);
    CHECK_FALSE(res.front.empty());
    for (const auto& ind : res.front) CHECK(ind.rank == 1);
    for (const auto& st : res.history) {
        CHECK(st.mean_area_n >= 0);
        CHECK(st.mean_area_n <= 1);
        CHECK(st.best.n >= 2);
        CHECK(st.best.n <= 127);
    }
}
