#include <catch_amalgamated.hpp>

#include <arena/analysis.hpp>

using namespace arena;

namespace {

Params base_params() {
    return {{"v_dep", 100}, {"v_col", 50}, {"k", 4}, {"br", 2}, {"f_dep_b", 1}, {"f_c_bob", 1},
            {"f_col_b", 1}, {"eps", 13},   {"k_i", 1}};
}

Scenario theorem_base() {
    Scenario sc;
    sc.protocol = Protocol::he;
    sc.v_dep = 100;
    sc.v_col = 60;
    sc.T = 3;
    sc.t_pub = 0;
    sc.l = 2;
    sc.f = 0;
    sc.br = 2;
    sc.f_dep_a = 1;
    sc.f_dep_b = 1;
    sc.split = BribeSplit::per_block;
    sc.miners = {{"M1", Rational(1, 2), true, true}, {"M2", Rational(3, 10), true, true}, {"M3", Rational(1, 5)}};
    return sc;
}

FeeSchedule paid(std::int64_t a, std::int64_t a2, std::int64_t aa2, Rational alpha = Rational(1, 2)) {
    return make_fee_schedule(a, a2, aa2, a, alpha, 3);
}

} // namespace

TEST_CASE("closed forms") {
    auto p = base_params();
    // 100 - (5*2 + 1 + 1)
    CHECK(closed_form(Attack::naive_bribery, p).at("bob") == 88);
    Params eq{{"v_col", 60}, {"k", 4}, {"k_i", 1}};
    CHECK(closed_form(Attack::m2mba_equal, eq).at("miner") == 15);
    Params solo{{"v_col", 60}, {"k", 4}, {"k_i", 4}, {"br", 2}};
    CHECK(closed_form(Attack::m2mba_perblock, solo).at("miner") == 60);
    p.erase("br");
    CHECK_THROWS_AS(closed_form(Attack::naive_bribery, p), Error);
}

TEST_CASE("attack drivers agree with the closed forms") {
    auto p = base_params();
    for (auto a : {Attack::naive_bribery, Attack::b3a_case1, Attack::b3a_case2, Attack::hydra_bob, Attack::sdrba_worst,
                   Attack::m2mba_perblock}) {
        auto cf = closed_form(a, p);
        INFO(name_of(a));
        CHECK(simulate_attack(a, p) == cf.begin()->second);
    }
    Params eq = p;
    eq["v_col"] = 60;
    CHECK(simulate_attack(Attack::m2mba_equal, eq) == 15);
    CHECK_THROWS_AS(simulate_attack(Attack::hydra_alice, p), Error);
}

TEST_CASE("lemma 1 example") {
    Scenario sc = he_lemma_base();
    REQUIRE(sc.miners[0].power == Rational(3, 10));
    REQUIRE(sc.lambda_col() == Rational(3, 5));
    auto v = verify_m2mba_lemma(1, sc, 0);
    // k br x = 4 * 2 * 1/2
    CHECK(v.lhs == 4);
    CHECK(v.rhs == 1);
    CHECK(v.hypothesis);
    CHECK(v.conclusion);
    CHECK(v.consistent);
}

TEST_CASE("lemma 5 boundary at eps = 0") {
    Scenario sc = he_lemma_base();
    sc.f_dep_a = 2;  // x k = 2 divides it, so br_i has no rounding slack
    sc.eps = 0;
    auto v = verify_m2mba_lemma(5, sc, 0);
    CHECK(v.margin == 0);
    CHECK_FALSE(v.conclusion);
    CHECK_FALSE(v.hypothesis);
    CHECK(v.consistent);
    sc.eps = 1;
    v = verify_m2mba_lemma(5, sc, 0);
    CHECK(v.hypothesis);
    CHECK(v.conclusion);
    CHECK(v.margin == 2);
}

TEST_CASE("lemma 4 deferral") {
    Scenario sc = he_lemma_base();
    sc.l = 3;
    auto now = verify_m2mba_lemma(4, sc, 0, sc.T + 1);
    CHECK(now.margin == 0);
    CHECK(now.consistent);
    auto later = verify_m2mba_lemma(4, sc, 0, sc.T + 3);
    CHECK(later.hypothesis);
    CHECK(later.margin > 0);
    CHECK_THROWS_AS(verify_m2mba_lemma(4, sc, 0, sc.T + 4), Error);
}

TEST_CASE("lemma grids sample") {
    for (int n = 1; n <= 8; ++n) {
        auto grid = lemma_grid(n);
        CHECK(grid.size() >= 100);
        for (std::size_t i = 0; i < grid.size(); i += 17) {
            auto v = verify_lemma(n, grid[i]);
            INFO("lemma " << n << " point " << i);
            CHECK(v.consistent);
        }
    }
}

TEST_CASE("theorem 1 base and flips") {
    auto t = verify_theorem_m2mba(theorem_base());
    CHECK(t.hypotheses_hold);
    CHECK(t.ok);
    REQUIRE(t.rows.size() == 3);
    for (const auto& r : t.rows) CHECK(r.dominance.verdict == Dominance::strict);

    // lemma 3 inverted for the passive miner: v_col * 1/5 = 12 < 13
    auto sc = theorem_base();
    sc.f_dep_b = 0;
    sc.f_dep_a = 13;
    t = verify_theorem_m2mba(sc);
    CHECK_FALSE(t.hypotheses_hold);
    CHECK(t.rows[2].dominance.verdict == Dominance::none);
    CHECK(t.rows[2].dominance.margin == Rational(-61, 125));
    CHECK_FALSE(t.rows[2].dominance.witness.empty());

    // lemma 2 inverted for both colluders
    sc = theorem_base();
    sc.f_dep_a = 40;
    t = verify_theorem_m2mba(sc);
    CHECK_FALSE(t.ok);
    CHECK(t.rows[0].dominance.verdict == Dominance::none);
    CHECK(t.rows[1].dominance.verdict == Dominance::none);
}

TEST_CASE("theorem 1 with a lone confiscator") {
    Scenario sc = theorem_base();
    sc.miners = {{"M1", Rational(1), true, true}};
    auto t = verify_theorem_m2mba(sc);
    CHECK(t.ok);
    CHECK(t.rows[0].dominance.verdict != Dominance::none);
}

TEST_CASE("demba honest nets and deviation losses") {
    Scenario sc = demba_base();
    auto d = verify_demba(sc);
    CHECK(d.ok);
    CHECK(d.profitable == 0);
    auto row = [&](const std::string& who, const std::string& pol) {
        for (const auto& r : d.rows)
            if (r.player == who && r.policy == pol) return r.utility;
        FAIL("no row " << who << ":" << pol);
        return Rational(0);
    };
    CHECK(row("alice", "honest") == sc.v_dep + sc.v_col_a - sc.fee_pre_a);
    CHECK(row("bob", "honest") == sc.v_col_b - sc.v_dep - sc.fee_pre_b);
    Rational dpaid = sc.fee_pre_aa2 - sc.fee_pre_a;
    CHECK(d.grief_collateral_loss == sc.v_ded + dpaid);
    CHECK(d.grief_loss == sc.v_dep + sc.v_ded + dpaid);
    CHECK(row("alice", "honest") - row("alice", "grief-double-reveal") == d.grief_loss);
    CHECK(d.delay_loss == sc.v_ded);

    auto l7 = verify_demba_lemma7(sc, 2);
    CHECK(l7.consistent);
    CHECK(l7.margin == sc.v_ded);
}

TEST_CASE("pool math") {
    PoolParams p;
    p.N = 25;
    auto r = pool_math(p);
    CHECK(r.ratio == 1);
    CHECK(r.E_solo == r.E_pool);
    CHECK(r.E_solo == 10);
    p.f_pool = Rational(1, 50);
    r = pool_math(p);
    CHECK(r.ratio == Rational(50, 49));
    CHECK(r.Var_pool * p.N == r.Var_solo);
    p.alpha_risk = 1;
    p.h = Rational(1, 100);
    p.lambda_net = 144;
    CHECK(pool_math(p).dU > 0);
    p.N = 1;
    r = pool_math(p);
    CHECK(r.Var_pool == r.Var_solo);
    CHECK(r.dU < 0);
    double fee_term = -std::exp(-to_double(r.E_solo)) * to_double(p.f_pool * r.E_solo);
    CHECK(r.dU == Catch::Approx(fee_term).epsilon(1e-12));
    p.f_pool = 1;
    CHECK_THROWS_AS(pool_math(p), Error);
}

TEST_CASE("pool monte carlo") {
    PoolParams p;
    auto s = pool_mc(p, 100000, 42);
    CHECK(std::abs(s.mean_solo - 10) <= 3 * s.se_mean_solo);
    p.N = 25;
    auto s25 = pool_mc(p, 100000, 42);
    CHECK(s25.var_pool / s.var_pool == Catch::Approx(1.0 / 25).epsilon(0.1));
    p.h = Rational(0);
    CHECK_THROWS_AS(pool_mc(p, 10, 1), Error);
    PoolParams z;
    z.lambda_net = 0;
    auto s0 = pool_mc(z, 100, 1);
    CHECK(s0.mean_solo == 0);
    CHECK(s0.var_pool == 0);
}

TEST_CASE("fee schedule check") {
    CHECK(fee_schedule_check(paid(2, 3, 5), 10).ok);
    auto v = fee_schedule_check(paid(3, 3, 5), 10);
    CHECK_FALSE(v.ok);
    CHECK(v.violation.rfind("Eq.1", 0) == 0);
    auto w = fee_schedule_check(paid(2, 3, 5, Rational(1)), 10);
    CHECK_FALSE(w.warnings.empty());
    CHECK_THROWS_AS(fee_schedule_check(paid(2, 3, 5), 3), Error);
}
