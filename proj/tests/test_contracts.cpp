#include <catch_amalgamated.hpp>

#include "common.hpp"

using namespace arena;
using namespace fx;

TEST_CASE("naive htlc paths") {
    auto w = world();
    auto& s = w.s;
    s.deploy(build_naive_htlc(w.alice, w.bob, 100, kA, 10), w.bob);
    REQUIRE(s.balances[w.bob] == TokenAmount(900));

    SECTION("alice redeems before T") {
        skip_to(s, 3, w.miners[0]);
        apply_block_inplace(s, block(3, w.miners[0], {redeem(1, w.alice, 0, "dep-A", {{kPreA, kA}}, 2)}));
        CHECK(s.balances[w.alice] == TokenAmount(1000 + 98));
        CHECK(s.balances[w.miners[0]] == TokenAmount(1002));
    }
    SECTION("bob refund after T") {
        skip_to(s, 11, w.miners[0]);
        apply_block_inplace(s, block(11, w.miners[1], {redeem(1, w.bob, 0, "dep-B", {}, 1)}));
        CHECK(s.balances[w.bob] == TokenAmount(999));
        CHECK(s.balances[w.miners[1]] == TokenAmount(1001));
    }
    SECTION("wrong preimage") {
        auto v = validate_tx(s, redeem(1, w.alice, 0, "dep-A", {{kPreA, 7}}, 1), 3);
        CHECK_FALSE(v.ok);
        CHECK(v.kind == "predicate-failed");
        CHECK(v.detail.find("hashlock") != std::string::npos);
    }
    SECTION("refund before timeout") {
        auto v = validate_tx(s, redeem(1, w.bob, 0, "dep-B", {}, 1), 9);
        CHECK(v.kind == "predicate-failed");
        CHECK(v.detail == "timelock");
    }
    CHECK_THROWS_AS(build_naive_htlc(w.alice, w.bob, 0, kA, 10), Error);
}

TEST_CASE("mad htlc paths") {
    auto w = world();
    auto& s = w.s;
    auto [dep, col] = build_mad_htlc(w.alice, w.bob, 100, 40, digests(), 5);
    s.deploy(dep, w.bob);
    s.deploy(col, w.bob);
    skip_to(s, 6, w.miners[0]);

    SECTION("dep-M with both preimages") {
        apply_block_inplace(s, block(6, w.miners[1], {redeem(1, w.miners[1], 0, "dep-M", {{kPreA, kA}, {kPreB, kB}}, 0)}));
        CHECK(s.balances[w.miners[1]] == TokenAmount(1100));
    }
    SECTION("dep-B refund") {
        apply_block_inplace(s, block(6, w.miners[1], {redeem(1, w.bob, 0, "dep-B", {}, 0)}));
        CHECK(s.balances[w.bob] == TokenAmount(1000 - 40));
    }
    SECTION("col-M needs both") {
        auto v = validate_tx(s, redeem(1, w.miners[0], 1, "col-M", {{kPreA, kA}}, 0), 6);
        CHECK(v.kind == "predicate-failed");
    }
}

TEST_CASE("he htlc paths") {
    auto w = world();
    auto& s = w.s;
    const Round T = 5, l = 3;
    auto [dep, col] = build_he_htlc(w.alice, w.bob, 100, 40, digests(), T, l);
    s.deploy(dep, w.bob);
    s.deploy(col, w.bob);
    REQUIRE(s.balances[w.bob] == TokenAmount(860));

    SECTION("dep-A pays both") {
        skip_to(s, 2, w.miners[0]);
        apply_block_inplace(s, block(2, w.miners[0], {redeem(1, w.alice, 0, "dep-A", {{kPreA, kA}}, 1)}));
        CHECK(s.balances[w.alice] == TokenAmount(1099));
        CHECK(s.balances[w.bob] == TokenAmount(900));
    }
    SECTION("refund through the delay") {
        skip_to(s, T + 1, w.miners[0]);
        apply_block_inplace(s, block(T + 1, w.miners[0], {redeem(1, w.bob, 0, "dep-B", {{kPreB, kB}}, 1)}));
        CHECK(s.contracts[1].deposit == TokenAmount(139));
        CHECK(validate_tx(s, redeem(2, w.bob, 1, "col-B", {}, 1), T + l).detail == "timelock");
        skip_to(s, T + l + 1, w.miners[0]);
        apply_block_inplace(s, block(T + l + 1, w.miners[0], {redeem(2, w.bob, 1, "col-B", {}, 1)}));
        CHECK(s.balances[w.bob] == TokenAmount(860 + 140 - 2));
    }
    SECTION("col-M burns the deposit") {
        skip_to(s, T + 1, w.miners[0]);
        apply_block_inplace(s, block(T + 1, w.miners[0], {redeem(1, w.bob, 0, "dep-B", {{kPreB, kB}}, 0)}));
        apply_block_inplace(s, block(T + 2, w.miners[1], {redeem(2, w.miners[1], 1, "col-M", {{kPreA, kA}, {kPreB, kB}}, 0)}));
        CHECK(s.balances[w.miners[1]] == TokenAmount(1040));
        CHECK(s.burned == TokenAmount(100));
    }
    CHECK_THROWS_AS(build_he_htlc(w.alice, w.bob, 100, 40, digests(), T, 0), Error);
}

TEST_CASE("he delay from kappa") {
    // kappa = v_dep/(v_col - f) + 1, rounded up by hand
    CHECK(derive_he_delay(100, 100, 1) == 3);
    CHECK(derive_he_delay(200, 100, 1) == 4);
    CHECK(derive_he_delay(400, 100, 1) == 6);
    CHECK(derive_he_delay(99, 100, 1) == 2);
}

TEST_CASE("fee split") {
    auto fs = make_fee_schedule(8, 9, 11, 4, Rational(1, 2), 10);
    CHECK(fee_split(kFeePreB, 4, 9, fs).earned == TokenAmount(4));
    CHECK(fee_split(kFeePreB, 4, 9, fs).burned == TokenAmount(0));
    // 8 * (1/2)^2 = 2
    auto sp = fee_split(kFeePreA, 8, 12, fs);
    CHECK(sp.earned == TokenAmount(2));
    CHECK(sp.burned == TokenAmount(6));
    CHECK(fee_split(kFeePreA, 0, 12, fs).earned == TokenAmount(0));
    CHECK(fee_split(kFeePreA, 0, 12, fs).burned == TokenAmount(0));
    CHECK_THROWS_AS(fee_split(kFeePreA, 5, 3, fs), Error);
}

TEST_CASE("fee schedule check") {
    CHECK(check_fee_schedule(make_fee_schedule(2, 3, 5, 2, Rational(1, 2), 4), 10).ok);
    auto bad = check_fee_schedule(make_fee_schedule(3, 3, 5, 2, Rational(1, 2), 4), 10);
    CHECK_FALSE(bad.ok);
    CHECK(bad.violation.find("Eq.1") == 0);
    auto flat = check_fee_schedule(make_fee_schedule(2, 3, 5, 2, Rational(1), 4), 10);
    CHECK(flat.ok);
    REQUIRE(flat.warnings.size() == 1);
    CHECK(flat.warnings[0].find("deterrence-void") == 0);
    for (Round t = 5; t < 10; ++t) CHECK(fee_split(kFeePreA, 2, t, make_fee_schedule(2, 3, 5, 2, 1, 4)).burned.value() == 0);
}

namespace {

struct DembaWorld {
    World w;
    Demba d;
    Round T = 5;
    FeeSchedule fs = make_fee_schedule(2, 3, 5, 2, Rational(1, 2), 5);
};

DembaWorld demba_world() {
    DembaWorld dw{world(), {}};
    dw.d = build_demba(dw.w.alice, dw.w.bob, 100, 50, 50, 10, digests(), dw.T, dw.fs);
    auto& s = dw.w.s;
    s.fees = dw.fs;
    s.deploy(dw.d.dep, dw.w.bob);
    s.deploy(dw.d.col_a, dw.w.alice);
    s.deploy(dw.d.col_b, dw.w.bob);
    return dw;
}

} // namespace

TEST_CASE("demba collateral paths") {
    auto dw = demba_world();
    auto& s = dw.w.s;
    auto m = dw.w.miners[0];
    SECTION("pre_A before T") {
        skip_to(s, 4, m);
        apply_block_inplace(s, block(4, m, {redeem(1, dw.w.alice, 1, "col-pre_A", {{kPreA, kA}}, 2)}));
        CHECK(s.balances[dw.w.alice] == TokenAmount(950 + 48));
    }
    SECTION("double reveal after T") {
        skip_to(s, dw.T + 2, m);
        apply_block_inplace(s, block(dw.T + 2, m, {redeem(1, dw.w.alice, 1, "col-pre_AA'", {{kPreA, kA}, {kPreA2, kA2}}, 5)}));
        CHECK(s.balances[dw.w.alice] == TokenAmount(950 + 50 - 10 - 5));
        CHECK(resolve_demba_dep(s, 0) == Resolution::burn);
    }
    SECTION("late pre_B") {
        skip_to(s, dw.T + 3, m);
        apply_block_inplace(s, block(dw.T + 3, m, {redeem(1, dw.w.bob, 2, "col-pre_B", {{kPreB, kB}}, 2)}));
        CHECK(s.balances[dw.w.bob] == TokenAmount(850 + 50 - 10 - 2));
    }
}

TEST_CASE("demba resolution") {
    SECTION("to alice once both land") {
        auto dw = demba_world();
        auto& s = dw.w.s;
        auto m = dw.w.miners[0];
        skip_to(s, 3, m);
        apply_block_inplace(s, block(3, m, {redeem(1, dw.w.alice, 1, "col-pre_A", {{kPreA, kA}}, 2)}));
        CHECK(resolve_demba_dep(s, 0) == Resolution::pending);
        apply_block_inplace(s, block(4, m));
        apply_block_inplace(s, block(5, m, {redeem(2, dw.w.bob, 2, "col-pre_B", {{kPreB, kB}}, 2)}));
        CHECK(resolve_demba_dep(s, 0) == Resolution::to_alice);
        CHECK(s.contracts[0].redeemed_round == 5);
    }
    SECTION("to bob after T") {
        auto dw = demba_world();
        auto& s = dw.w.s;
        auto m = dw.w.miners[0];
        skip_to(s, 2, m);
        apply_block_inplace(s, block(2, m, {redeem(2, dw.w.bob, 2, "col-pre_B", {{kPreB, kB}}, 2)}));
        skip_to(s, dw.T + 2, m);
        apply_block_inplace(s, block(dw.T + 2, m, {redeem(1, dw.w.alice, 1, "col-pre_A'", {{kPreA2, kA2}}, 3)}));
        CHECK(resolve_demba_dep(s, 0) == Resolution::to_bob);
    }

    // all 8 subsets of reveals, as registry entries
    for (int mask = 0; mask < 8; ++mask) {
        for (Round r : {Round(3), Round(7)}) {
            auto dw = demba_world();
            Registry reg;
            if (mask & 1) reg.reveal(1, kPreA, kA, 1);
            if (mask & 2) reg.reveal(1, kPreA2, kA2, 1);
            if (mask & 4) reg.reveal(2, kPreB, kB, 1);
            int fired = 0;
            for (const auto& p : dw.d.dep.paths)
                if (r >= p.earliest && r <= p.latest && reads_hold(p, reg)) ++fired;
            CHECK(fired <= 1);
            auto res = resolve_demba_dep(dw.d.dep, reg, r);
            Resolution want = Resolution::pending;
            if ((mask & 3) == 3 && r > dw.T) want = Resolution::burn;
            else if (mask == 5) want = Resolution::to_alice;
            else if (mask == 6 && r > dw.T) want = Resolution::to_bob;
            CHECK(res == want);
        }
    }
}

TEST_CASE("c_bob contract") {
    auto w = world(5);
    auto& s = w.s;
    const Round T = 6;
    s.deploy(build_naive_htlc(w.alice, w.bob, 100, kA, T), w.bob);
    int cb = s.add_bribery(make_c_bob(w.bob, 2, T, kA, 0, 0, "dep-B", 1, 1));
    apply_block_inplace(s, block(1, w.miners[0], {call(1, w.bob, cb, "init", 100)}));
    for (int i = 0; i < 4; ++i)
        apply_block_inplace(s, block(2 + i, w.miners[i], {call(10 + i, w.miners[i], cb, "requestBribe")}));
    CHECK(s.bribery[cb].bal_left == TokenAmount(92));

    SECTION("claim pays each requester and the includer") {
        skip_to(s, T + 1, w.miners[4]);
        apply_block_inplace(s, block(T + 1, w.miners[4], {redeem(20, w.bob, 0, "dep-B", {}, 0)}));
        auto before = s.balances;
        apply_block_inplace(s, block(T + 2, w.miners[4], {call(21, w.bob, cb, "claimBribe", 0, kA)}));
        for (int i = 0; i < 4; ++i) CHECK(s.balances[w.miners[i]] == before[w.miners[i]] + TokenAmount(2));
        CHECK(s.balances[w.miners[4]] == before[w.miners[4]] + TokenAmount(2));
        CHECK(s.balances[w.bob] == before[w.bob] + TokenAmount(100 - 5 * 2));
        CHECK(s.bribery[cb].status == BriberyContract::claimed);
    }
    SECTION("wrong preimage is a no-op") {
        skip_to(s, T + 1, w.miners[4]);
        apply_block_inplace(s, block(T + 1, w.miners[4], {redeem(20, w.bob, 0, "dep-B", {}, 0)}));
        auto snap = s.bribery[cb];
        auto [next, eff] = bribery_contract_step(snap, ContractCall{cb, "claimBribe", 0, 5}, T + 2, w.bob, w.miners[4], s);
        CHECK_FALSE(eff.applied);
        CHECK(next == snap);
    }
    SECTION("request from a non block miner") {
        auto snap = s.bribery[cb];
        auto [next, eff] = bribery_contract_step(snap, ContractCall{cb, "requestBribe"}, 6, w.miners[0], w.miners[1], s);
        CHECK_FALSE(eff.applied);
        CHECK(next == snap);
    }
    SECTION("refund when alice got through") {
        apply_block_inplace(s, block(6, w.miners[4], {redeem(20, w.alice, 0, "dep-A", {{kPreA, kA}}, 0)}));
        apply_block_inplace(s, block(7, w.miners[4], {call(21, w.bob, cb, "refundToBob")}));
        CHECK(s.bribery[cb].status == BriberyContract::refunded);
        CHECK(s.balances[w.bob] == TokenAmount(1000 - 100 - 100 + 100));
    }
}

TEST_CASE("c_m2m contract") {
    auto w = world(3, 1000);
    auto& s = w.s;
    const Round T = 5;
    auto [dep, col] = build_he_htlc(w.alice, w.bob, 100, 60, digests(), T, 3);
    s.deploy(dep, w.bob);
    s.deploy(col, w.bob);
    auto M1 = w.miners[0], M2 = w.miners[1], M3 = w.miners[2];

    SECTION("per-block split, k=4 with one own block") {
        int c = s.add_bribery(make_c_m2m(2, T, kA, 0, 1, 60, BribeSplit::per_block));
        apply_block_inplace(s, block(1, M1, {call(1, M1, c, "lockCollateral", 60)}));
        // rounds 2..5 censored: M1 once, M2 twice, M3 once
        PartyId seq[] = {M1, M2, M2, M3};
        for (int i = 0; i < 4; ++i) apply_block_inplace(s, block(2 + i, seq[i], {call(10 + i, seq[i], c, "requestBribe")}));
        auto before = s.balances;
        apply_block_inplace(s, block(T + 1, M1,
                                     {redeem(20, w.bob, 0, "dep-B", {{kPreB, kB}}, 0),
                                      redeem(21, M1, 1, "col-M", {{kPreA, kA}, {kPreB, kB}}, 0),
                                      call(22, M1, c, "claimBribe", 0, kA)}));
        // M1: +v_col from col-M, pays 3 foreign blocks, keeps own bribe and the caller bribe
        std::int64_t m1 = s.balances[M1].value() - before[M1].value();
        CHECK(m1 == 60 + 60 - 2 * 3);
        CHECK(s.balances[M2] == before[M2] + TokenAmount(4));
        CHECK(s.balances[M3] == before[M3] + TokenAmount(2));
        CHECK(s.burned == TokenAmount(100));
    }
    SECTION("equal split") {
        int c = s.add_bribery(make_c_m2m(2, T, kA, 0, 1, 60, BribeSplit::equal));
        apply_block_inplace(s, block(1, M1, {call(1, M1, c, "lockCollateral", 60)}));
        PartyId seq[] = {M1, M2, M2, M3};
        for (int i = 0; i < 4; ++i) apply_block_inplace(s, block(2 + i, seq[i], {call(10 + i, seq[i], c, "requestBribe")}));
        auto before = s.balances;
        apply_block_inplace(s, block(T + 1, M1,
                                     {redeem(20, w.bob, 0, "dep-B", {{kPreB, kB}}, 0),
                                      redeem(21, M1, 1, "col-M", {{kPreA, kA}, {kPreB, kB}}, 0),
                                      call(22, M1, c, "claimBribe", 0, kA)}));
        CHECK(s.balances[M1] == before[M1] + TokenAmount(60 + 15));
        CHECK(s.balances[M2] == before[M2] + TokenAmount(30));
        CHECK(s.balances[M3] == before[M3] + TokenAmount(15));
    }
    SECTION("refund to miners after alice redeems") {
        int c = s.add_bribery(make_c_m2m(2, T, kA, 0, 1, 60, BribeSplit::per_block));
        apply_block_inplace(s, block(1, M1, {call(1, M1, c, "lockCollateral", 60)}));
        apply_block_inplace(s, block(2, M2, {redeem(2, w.alice, 0, "dep-A", {{kPreA, kA}}, 0)}));
        apply_block_inplace(s, block(3, M2, {call(3, M1, c, "refundToMiners")}));
        CHECK(s.balances[M1] == TokenAmount(1000));
        CHECK(s.bribery[c].status == BriberyContract::refunded);
    }
}
