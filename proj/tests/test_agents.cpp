#include <catch_amalgamated.hpp>

#include <arena/analysis.hpp>

using namespace arena;

namespace {

Scenario naive(std::int64_t f_dep_a) {
    Scenario sc;
    sc.protocol = Protocol::naive;
    sc.v_dep = 100;
    sc.T = 3;
    sc.f = 1;
    sc.f_dep_a = f_dep_a;
    sc.miners = {{"M1", Rational(1, 2)}, {"M2", Rational(1, 2)}};
    return sc;
}

int count_label(const Block& b, const std::string& l) {
    return static_cast<int>(std::count_if(b.txs.begin(), b.txs.end(), [&](const TxRecord& t) { return t.label == l; }));
}

Schedule fixed(const Scenario& sc, int mi) {
    Schedule s;
    s.miners.assign(sc.effective_horizon(), mi);
    return s;
}

} // namespace

TEST_CASE("honest miner fills the block greedily") {
    auto sc = naive(3);
    auto prof = sc.honest_profile();
    auto g = setup_game(sc, prof);
    g.keep_trace = true;
    step(g, 1, 0);
    REQUIRE(g.trace.size() == 1);
    CHECK(count_label(g.trace[0], "tx^dep_A") == 1);
    CHECK(g.trace[0].unrelated == 7);
    CHECK(g.s.balances[g.lay.miners[0]].value() == sc.endowment + 3 + 7);
}

TEST_CASE("empty mempool gives unrelated only") {
    auto sc = naive(3);
    auto prof = sc.honest_profile();
    prof.alice.kind = AliceKind::silent;
    auto g = setup_game(sc, prof);
    g.keep_trace = true;
    step(g, 1, 1);
    CHECK(g.trace[0].txs.empty());
    CHECK(g.trace[0].unrelated == sc.capacity);
    CHECK(g.s.balances[g.lay.miners[1]].value() == sc.endowment + sc.capacity * sc.f);
}

TEST_CASE("equal fees break ties by tx id") {
    Scenario sc = naive(3);
    sc.protocol = Protocol::mad;
    sc.v_col = 50;
    sc.f_dep_b = 2;
    sc.f_col_b = 2;
    auto prof = sc.honest_profile();
    prof.alice.kind = AliceKind::silent;
    auto g = setup_game(sc, prof);
    g.keep_trace = true;
    for (Round r = 1; r <= sc.T + 1; ++r) step(g, r, 0);
    const auto& b = g.trace.back();
    REQUIRE(b.txs.size() == 2);
    CHECK(b.txs[0].label == "tx^dep_B");
    CHECK(b.txs[1].label == "tx^col_B");
    CHECK(b.txs[0].id < b.txs[1].id);
}

TEST_CASE("m2mba active miner censors and then confiscates") {
    Scenario sc = he_lemma_base();
    sc.miners = {{"M1", Rational(1, 2), true, true}, {"M2", Rational(1, 2), true, true}};
    StrategyProfile prof;
    prof.miners = {{MinerKind::m2mba_active}, {MinerKind::m2mba_active}};
    auto g = setup_game(sc, prof);
    g.keep_trace = true;
    step(g, sc.t_pub + 1, 0);
    CHECK(count_label(g.trace[0], "call:requestBribe") == 1);
    CHECK(count_label(g.trace[0], "tx^dep_A") == 0);
    for (Round r = sc.t_pub + 2; r <= sc.T + 1; ++r) step(g, r, 1);
    const auto& last = g.trace.back();
    auto pos = [&](const std::string& l) {
        for (std::size_t i = 0; i < last.txs.size(); ++i)
            if (last.txs[i].label == l) return static_cast<int>(i);
        return -1;
    };
    REQUIRE(pos("tx^dep_B") >= 0);
    REQUIRE(pos("tx^col_M") >= 0);
    CHECK(pos("tx^dep_B") < pos("tx^col_M"));
}

TEST_CASE("b3a net gain for both cases") {
    Params p{{"v_dep", 100}, {"v_col", 50}, {"k", 4}, {"br", 2}, {"f_col_b", 1}, {"f_c_bob", 1}, {"f_dep_b", 1}};
    Rational case1 = 100 - ((4 + 2) * 2 + 1 + 1);
    Rational case2 = 100 - ((4 + 2) * 2 + 2 + 1);
    CHECK(closed_form(Attack::b3a_case1, p).at("bob") == case1);
    CHECK(closed_form(Attack::b3a_case2, p).at("bob") == case2);
    CHECK(simulate_attack(Attack::b3a_case1, p) == case1);
    CHECK(simulate_attack(Attack::b3a_case2, p) == case2);
}

TEST_CASE("b3a partial block without the coinbase bribe is refused") {
    Params p{{"v_dep", 100}, {"v_col", 50}, {"k", 4}, {"br", 2}, {"f_col_b", 1}, {"f_c_bob", 1}, {"f_dep_b", 1}};
    auto run = attack_run(Attack::b3a_case1, p);
    auto g = setup_game(run.sc, run.prof);
    for (Round r = 1; r <= run.sc.T; ++r) step(g, r, 1);
    auto prop = b3a_block(g, run.sc.T + 1, g.lay.miners[1], 1);
    Block b;
    for (const auto& c : prop.txs) b.txs.push_back(c.tx);
    b.coinbase = prop.coinbase;
    CHECK(b3a_accepts(b, 1, run.sc, g.lay));
    b.coinbase.clear();
    CHECK_FALSE(b3a_accepts(b, 1, run.sc, g.lay));
    b.coinbase = prop.coinbase;
    b.coinbase[0].second = b.coinbase[0].second + TokenAmount(1);
    CHECK_FALSE(b3a_accepts(b, 1, run.sc, g.lay));
}

TEST_CASE("demba party policies") {
    Scenario sc = demba_base();
    auto prof = sc.honest_profile();
    prof.alice.t_pub = 2;
    auto o = play(sc, prof, fixed(sc, 0));
    CHECK(o.resolution == "to-Alice");
    CHECK(o.delta[0] + sc.v_col_a == sc.v_dep + sc.v_col_a - sc.fee_pre_a);

    auto refund = sc.honest_profile();
    refund.alice.kind = AliceKind::offline_then_refund;
    o = play(sc, refund, fixed(sc, 0), true);
    CHECK(o.resolution == "to-Bob");
    CHECK(o.redeemed.at("dep") > sc.T);

    auto late = sc.honest_profile();
    late.bob.kind = BobKind::delay;
    late.bob.delay = 1;
    auto honest = play(sc, sc.honest_profile(), fixed(sc, 0));
    o = play(sc, late, fixed(sc, 0));
    // bob's collateral comes back as v_col_B - v_ded
    CHECK(o.delta[1] - honest.delta[1] == -sc.v_ded);
}

TEST_CASE("policies are deterministic") {
    Scenario sc = he_lemma_base();
    auto prof = m2mba_attack_profile(sc);
    Schedule s = fixed(sc, 0);
    for (std::size_t i = 0; i < s.miners.size(); ++i) s.miners[i] = static_cast<int>(i % sc.miners.size());
    auto a = play(sc, prof, s, true), b = play(sc, prof, s, true);
    CHECK(a.delta == b.delta);
    REQUIRE(a.blocks.size() == b.blocks.size());
    for (std::size_t i = 0; i < a.blocks.size(); ++i) CHECK(a.blocks[i].txs.size() == b.blocks[i].txs.size());
}
