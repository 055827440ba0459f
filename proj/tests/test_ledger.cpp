#include <catch_amalgamated.hpp>

#include "common.hpp"

using namespace arena;
using namespace fx;

TEST_CASE("token amounts") {
    CHECK_THROWS_AS(TokenAmount(-1), Error);
    CHECK_THROWS_AS(TokenAmount(3) - TokenAmount(4), Error);
    CHECK((TokenAmount(3) + TokenAmount(4)).value() == 7);
    CHECK(to_string(Rational(4)) == "4/1");
    CHECK(parse_rational("0.25") == Rational(1, 4));
    CHECK(parse_rational("3/9") == Rational(1, 3));
    CHECK(parse_rational("010") == Rational(10));
    CHECK_THROWS_AS(parse_rational("1/0"), Error);
}

TEST_CASE("empty block only moves height") {
    auto w = world();
    w.s.deploy(build_naive_htlc(w.alice, w.bob, 100, kA, 5), w.bob);
    auto next = apply_block(w.s, block(1, w.miners[0]));
    CHECK(next.height == 1);
    CHECK(next.balances == w.s.balances);
    CHECK(next.burned == w.s.burned);
}

TEST_CASE("dep-A on naive htlc") {
    auto w = world();
    auto& s = w.s;
    s.deploy(build_naive_htlc(w.alice, w.bob, 100, kA, 5), w.bob);
    auto total = conserved_total(s);
    auto next = apply_block(s, block(1, w.miners[1], {redeem(1, w.alice, 0, "dep-A", {{kPreA, kA}}, 3)}));
    // hand ledger: Alice +97, miner +3
    CHECK(next.balances[w.alice].value() - s.balances[w.alice].value() == 97);
    CHECK(next.balances[w.miners[1]].value() - s.balances[w.miners[1]].value() == 3);
    REQUIRE(next.revealed.find(0, kPreA));
    CHECK(next.revealed.find(0, kPreA)->value == kA);
    CHECK(next.revealed.find(0, kPreA)->round == 1);
    CHECK(conserved_total(next) == total);
    CHECK(next.flows[w.alice][kFlowPayout] == 97);
}

TEST_CASE("he col-M burns") {
    auto w = world();
    auto& s = w.s;
    auto [dep, col] = build_he_htlc(w.alice, w.bob, 100, 30, digests(), 2, 2);
    s.deploy(dep, w.bob);
    s.deploy(col, w.bob);
    auto total = conserved_total(s);
    skip_to(s, 3, w.miners[0]);
    apply_block_inplace(s, block(3, w.miners[0], {redeem(1, w.bob, 0, "dep-B", {{kPreB, kB}}, 2)}));
    apply_block_inplace(s, block(4, w.miners[1], {redeem(2, w.miners[1], 1, "col-M", {{kPreA, kA}, {kPreB, kB}}, 0)}));
    CHECK(s.burned == TokenAmount(100));
    CHECK(s.balances[w.miners[1]] == TokenAmount(1000 + 30 - 2));
    CHECK(conserved_total(s) == total);
}

TEST_CASE("block errors") {
    auto w = world();
    auto& s = w.s;
    s.deploy(build_naive_htlc(w.alice, w.bob, 100, kA, 5), w.bob);
    try {
        apply_block(s, block(2, w.miners[0]));
        FAIL("expected stale-round");
    } catch (const Error& e) {
        CHECK(e.kind() == "stale-round");
    }
    try {
        apply_block(s, block(1, w.miners[0], {call(1, w.miners[0], 0, "requestBribe"), redeem(2, w.bob, 0, "dep-B", {}, 1)}));
        FAIL("expected invalid-tx");
    } catch (const Error& e) {
        CHECK(e.kind() == "invalid-tx");
        CHECK(std::string(e.what()).find("#0 unknown-output") != std::string::npos);
    }
    try {
        apply_block(s, block(1, w.miners[0],
                             {redeem(1, w.alice, 0, "dep-A", {{kPreA, kA}}, 1), redeem(2, w.alice, 0, "dep-A", {{kPreA, kA}}, 1)}));
        FAIL("expected duplicate spend");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("#1 duplicate-spend-in-block") != std::string::npos);
    }
    auto v = validate_tx(s, redeem(1, w.alice, 0, "dep-A", {{kPreA, kA}}, 101), 1);
    CHECK(v.kind == "over-spend");
    auto a = apply_block(s, block(1, w.miners[0], {redeem(1, w.alice, 0, "dep-A", {{kPreA, kA}}, 1)}));
    auto again = validate_tx(a, redeem(2, w.alice, 0, "dep-A", {{kPreA, kA}}, 1), 2);
    CHECK(again.kind == "unknown-output");
    Block big = block(1, w.miners[0], {}, 9);
    CHECK_THROWS_AS(apply_block(s, big), Error);
}

TEST_CASE("unrelated fees") {
    auto w = world(1, 0, 1);
    auto s = apply_block(w.s, block(1, w.miners[0], {}, 8));
    CHECK(s.balances[w.miners[0]] == TokenAmount(8));
    CHECK(s.flows[w.miners[0]][kFlowUnrelated] == 8);
    CHECK(conserved_total(s) == conserved_total(w.s));
}

TEST_CASE("mint") {
    auto w = world();
    auto z = mint(w.s, w.bob, 0, "coinbase");
    CHECK(z.balances == w.s.balances);
    CHECK(z.mint_log.size() == 1);
    auto ab = mint(mint(w.s, w.bob, 5, "coinbase"), w.alice, 7, "coinbase");
    CHECK(ab.balance_total().value() - w.s.balance_total().value() == 12);
    CHECK(ab.burned == w.s.burned);
    CHECK(conserved_total(ab) == conserved_total(w.s));
    Block b = block(1, w.miners[0]);
    b.coinbase.push_back({w.bob, 40});
    auto c = apply_block(w.s, b);
    CHECK(c.balances[w.bob] == TokenAmount(1040));
    CHECK(c.minted == TokenAmount(40));
    CHECK(conserved_total(c) == conserved_total(w.s));
}

TEST_CASE("burn sink never spends") {
    auto w = world();
    w.s.credit(w.burn, 5, kFlowPayout);
    CHECK(w.s.burned == TokenAmount(5));
    CHECK_THROWS_AS(w.s.debit(w.burn, 1, kFlowFeeOut), Error);
}

TEST_CASE("replay determinism and registry monotonicity") {
    auto w = world();
    auto [dep, col] = build_mad_htlc(w.alice, w.bob, 100, 20, digests(), 3);
    w.s.deploy(dep, w.bob);
    w.s.deploy(col, w.bob);
    std::vector<Block> seq{block(1, w.miners[0], {}, 3), block(2, w.miners[1], {redeem(1, w.alice, 0, "dep-A", {{kPreA, kA}}, 2)}, 2),
                           block(3, w.miners[0]), block(4, w.miners[1], {redeem(2, w.bob, 1, "col-B", {}, 1)})};
    auto run = [&] {
        auto s = w.s;
        std::vector<std::size_t> sizes;
        for (const auto& b : seq) {
            auto before = s.revealed.entries();
            s = apply_block(s, b);
            for (std::size_t i = 0; i < before.size(); ++i) CHECK(s.revealed.entries()[i] == before[i]);
            sizes.push_back(s.revealed.entries().size());
        }
        return s;
    };
    auto a = run(), b = run();
    CHECK(a == b);
    CHECK(a.height == 4);
    CHECK_THROWS_AS(a.revealed.reveal(0, kPreA, kA, 5), Error);
}
