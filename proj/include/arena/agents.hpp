#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ledger.hpp"
#include "scenario.hpp"

namespace arena {

// Preimages held by the parties; digests equal them under exact matching.
constexpr std::uint64_t kSecretA = 0xA11CE001, kSecretA2 = 0xA11CE002, kSecretB = 0xB0B00001;
inline Digests secret_digests() { return {kSecretA, kSecretA2, kSecretB}; }
inline std::uint64_t secret_of(Slot s) { return s == kPreA ? kSecretA : s == kPreA2 ? kSecretA2 : kSecretB; }

struct Layout {
    PartyId alice = kNobody, bob = kNobody, burn = kNobody, users = kNobody;
    std::vector<PartyId> miners;
    int dep = -1, col = -1, col_a = -1, col_b = -1;  // protocol contracts
    int c_bob = -1, c_m2m = -1;                       // bribery contracts
};

enum Sent : std::uint32_t {
    kSentReveal = 1,
    kSentFallback = 2,
    kSentDepB = 4,
    kSentColB = 8,
    kSentInit = 16,
    kSentClaim = 32,
    kSentRefund = 64,
    kSentColPreB = 128
};

// Everything a round needs: chain plus the parties' private memory.
struct GameState {
    const Scenario* sc = nullptr;
    const StrategyProfile* prof = nullptr;
    ChainState s;
    Layout lay;
    std::vector<std::int64_t> start;
    std::vector<std::int64_t> funded;
    std::uint64_t next_id = 1;
    std::uint32_t sent = 0;
    bool deal_done = false;  // B3A block / reverse-bribe exchange happened
    std::vector<std::uint8_t> labels;
    bool keep_trace = false;
    std::vector<Block> trace;
    std::map<int, Round> leaked;  // slot -> round first broadcast

    const Scenario& scen() const { return *sc; }
    const StrategyProfile& profile() const { return *prof; }
    bool live(int c) const { return c >= 0 && s.contracts[c].live(); }
};

// ---- knowledge -------------------------------------------------------------

// A preimage is public once it was broadcast before round r or sits in the registry.
inline bool public_preimage(const GameState& g, Slot sl, Round r) {
    for (const auto& e : g.s.revealed.entries())
        if (e.slot == sl) return true;
    auto it = g.leaked.find(sl);
    return it != g.leaked.end() && it->second < r;
}

// ---- transaction builders --------------------------------------------------

struct Candidate {
    TxRecord tx;
    bool conditional = false;  // bribery call, dropped if it would be a no-op
};

inline TxRecord make_redeem(GameState& g, PartyId by, int contract, std::string path, std::uint8_t slots,
                            std::int64_t fee, std::string label) {
    TxRecord t;
    t.id = g.next_id++;
    t.kind = TxRecord::related;
    t.creator = by;
    t.contract = contract;
    t.path = std::move(path);
    for (Slot sl : kAllSlots)
        if (slots & sl) t.witness.preimages.push_back({sl, secret_of(sl)});
    t.witness.signers.push_back(by);
    t.fee = fee;
    t.label = std::move(label);
    return t;
}

inline TxRecord make_call(GameState& g, PartyId by, int target, std::string method, std::int64_t value = 0,
                          std::int64_t fee = 0) {
    TxRecord t;
    t.id = g.next_id++;
    t.kind = TxRecord::contract_call;
    t.creator = by;
    t.call = ContractCall{target, method, value, method == "claimBribe" ? kSecretA : 0};
    t.fee = fee;
    t.label = "call:" + method;
    return t;
}

inline TxRecord alice_reveal(GameState& g) {
    const auto& sc = g.scen();
    if (sc.protocol == Protocol::demba)
        return make_redeem(g, g.lay.alice, g.lay.col_a, "col-pre_A", kPreA, sc.fee_pre_a, "tx^col_pre_A");
    return make_redeem(g, g.lay.alice, g.lay.dep, "dep-A", kPreA, sc.f_dep_a, "tx^dep_A");
}
inline TxRecord alice_refund(GameState& g) {
    return make_redeem(g, g.lay.alice, g.lay.col_a, "col-pre_A'", kPreA2, g.scen().fee_pre_a2, "tx^col_pre_A'");
}
inline TxRecord alice_double(GameState& g) {
    return make_redeem(g, g.lay.alice, g.lay.col_a, "col-pre_AA'", kPreA | kPreA2, g.scen().fee_pre_aa2,
                       "tx^col_pre_AA'");
}
inline TxRecord bob_dep_b(GameState& g) {
    std::uint8_t slots = g.scen().protocol == Protocol::he ? kPreB : 0;
    return make_redeem(g, g.lay.bob, g.lay.dep, "dep-B", slots, g.scen().f_dep_b, "tx^dep_B");
}
inline TxRecord bob_col_b(GameState& g) {
    return make_redeem(g, g.lay.bob, g.lay.col, "col-B", 0, g.scen().f_col_b, "tx^col_B");
}
inline TxRecord bob_col_pre_b(GameState& g) {
    return make_redeem(g, g.lay.bob, g.lay.col_b, "col-pre_B", kPreB, g.scen().fee_pre_b, "tx^col_pre_B");
}
inline TxRecord miner_claim(GameState& g, PartyId m, int contract, std::string path) {
    TxRecord t = make_redeem(g, m, contract, path, kPreA | kPreB, 0, "tx^" + path.substr(0, 3) + "_M");
    t.witness.signers.clear();
    return t;
}

// ---- honest selection ------------------------------------------------------

inline std::int64_t earned_fee(const ChainState& s, const TxRecord& t, Round r) {
    if (t.kind == TxRecord::related && t.contract >= 0 && t.contract < static_cast<int>(s.contracts.size()) && s.fees) {
        const RedeemPath* p = s.contracts[t.contract].path(t.path);
        if (p && !p->fee_path.empty()) {
            try {
                return fee_split(p->fee_path, t.fee, r, *s.fees).earned.value();
            } catch (const Error&) {
                return 0;
            }
        }
    }
    return t.fee.value();
}

inline bool eligible(const TxRecord& t, Round r) { return t.broadcast < r; }

// Pending contract calls first, then related transactions by miner-earned fee
// (ties by tx-id) as long as they earn at least an unrelated slot.
template <class Skip>
std::vector<Candidate> honest_candidates(const GameState& g, Round r, Skip skip) {
    std::vector<Candidate> calls, rel;
    for (const auto& t : g.s.mempool) {
        if (!eligible(t, r) || skip(t)) continue;
        if (t.kind == TxRecord::contract_call) calls.push_back({t});
        else if (t.kind == TxRecord::related && earned_fee(g.s, t, r) >= g.scen().f) rel.push_back({t});
    }
    std::sort(calls.begin(), calls.end(), [](const Candidate& a, const Candidate& b) { return a.tx.id < b.tx.id; });
    std::stable_sort(rel.begin(), rel.end(), [&](const Candidate& a, const Candidate& b) {
        auto fa = earned_fee(g.s, a.tx, r), fb = earned_fee(g.s, b.tx, r);
        return fa != fb ? fa > fb : a.tx.id < b.tx.id;
    });
    calls.insert(calls.end(), rel.begin(), rel.end());
    return calls;
}

struct Proposal {
    std::vector<Candidate> txs;
    std::vector<std::pair<PartyId, TokenAmount>> coinbase;
    std::vector<Block::Side> side;
    enum Deal { none, b3a, reverse } deal = none;  // atomic block that needs Bob's consent
};

inline Proposal honest_miner_select(const GameState& g, Round r) {
    return {honest_candidates(g, r, [](const TxRecord&) { return false; })};
}

// ---- miner policies --------------------------------------------------------

inline bool is_target(const TxRecord& t) { return t.label == "tx^dep_A"; }

inline bool target_pending(const GameState& g, Round r) {
    return std::any_of(g.s.mempool.begin(), g.s.mempool.end(),
                       [&](const TxRecord& t) { return is_target(t) && eligible(t, r); });
}

inline bool both_public(const GameState& g, Round r) {
    return public_preimage(g, kPreA, r) && public_preimage(g, kPreB, r);
}

// dep-M/col-M for whoever knows both preimages; invalid ones are skipped at assembly.
inline void add_confiscations(GameState& g, Round r, PartyId m, std::vector<Candidate>& out) {
    if (!both_public(g, r)) return;
    if (g.scen().protocol == Protocol::mad) {
        if (g.live(g.lay.dep)) out.push_back({miner_claim(g, m, g.lay.dep, "dep-M")});
        out.push_back({miner_claim(g, m, g.lay.col, "col-M")});
    } else if (g.scen().protocol == Protocol::he) {
        out.push_back({miner_claim(g, m, g.lay.col, "col-M")});
    }
}

inline void censor_and_request(GameState& g, Round r, PartyId m, int contract, Proposal& p) {
    p.txs = honest_candidates(g, r, is_target);
    if (contract < 0 || !target_pending(g, r)) return;
    // after pending calls so an init in the same block funds the request
    auto at = std::find_if(p.txs.begin(), p.txs.end(), [](const Candidate& c) { return c.tx.kind != TxRecord::contract_call; });
    p.txs.insert(at, {make_call(g, m, contract, "requestBribe"), true});
}

// Coalition behaviour after T: include dep-B, confiscate, then settle C_M2M.
inline void m2mba_after_T(GameState& g, Round r, PartyId m, Round defer_to, Proposal& p) {
    p.txs = honest_candidates(g, r, [](const TxRecord&) { return false; });
    if (r >= defer_to) {
        std::vector<Candidate> conf;
        add_confiscations(g, r, m, conf);
        p.txs.insert(p.txs.end(), conf.begin(), conf.end());
        if (g.lay.c_m2m >= 0) p.txs.push_back({make_call(g, m, g.lay.c_m2m, "claimBribe"), true});
    }
    if (g.lay.c_m2m >= 0) p.txs.push_back({make_call(g, m, g.lay.c_m2m, "refundToMiners"), true});
}

inline Proposal m2mba_active_policy(GameState& g, Round r, int mi) {
    Proposal p;
    PartyId m = g.lay.miners[mi];
    const auto& pol = g.profile().miners[mi];
    if (r <= g.scen().T) censor_and_request(g, r, m, g.lay.c_m2m, p);
    else m2mba_after_T(g, r, m, pol.defer_to, p);
    return p;
}

inline Proposal b3a_block(GameState& g, Round r, PartyId m, int which) {
    const auto& sc = g.scen();
    Proposal p;
    p.deal = Proposal::b3a;
    if (which == 1) p.coinbase.push_back({g.lay.bob, sc.v_dep - sc.br});
    else p.coinbase.push_back({g.lay.bob, sc.v_dep + sc.v_col - 2 * sc.br});
    p.txs.push_back({miner_claim(g, m, g.lay.dep, "dep-M")});
    if (which == 1) p.txs.push_back({bob_col_b(g)});
    else p.txs.push_back({miner_claim(g, m, g.lay.col, "col-M")});
    p.txs.push_back({make_call(g, g.lay.bob, g.lay.c_bob, "claimBribe")});
    (void)r;
    return p;
}

// Bob completes the partial block only if it carries exactly what his case needs.
inline bool b3a_accepts(const Block& b, int which, const Scenario& sc, const Layout& lay) {
    std::int64_t want = which == 1 ? sc.v_dep - sc.br : sc.v_dep + sc.v_col - 2 * sc.br;
    bool paid = std::any_of(b.coinbase.begin(), b.coinbase.end(),
                            [&](const auto& c) { return c.first == lay.bob && c.second.value() == want; });
    auto has = [&](int contract, const char* path) {
        return std::any_of(b.txs.begin(), b.txs.end(), [&](const TxRecord& t) {
            return t.kind == TxRecord::related && t.contract == contract && t.path == path;
        });
    };
    bool claim = std::any_of(b.txs.begin(), b.txs.end(), [&](const TxRecord& t) {
        return t.kind == TxRecord::contract_call && t.call->target == lay.c_bob && t.call->method == "claimBribe";
    });
    bool second = which == 1 ? has(lay.col, "col-B") : has(lay.col, "col-M");
    return paid && has(lay.dep, "dep-M") && second && claim;
}

// Reverse bribe: the miner buys pre_B for v_col + eps and redeems through dep-M.
inline Proposal reverse_bribe_block(GameState& g, Round r, PartyId m, bool with_claim) {
    const auto& sc = g.scen();
    Proposal p;
    p.deal = Proposal::reverse;
    p.side.push_back({m, g.lay.bob, sc.v_col + sc.eps});
    p.txs = honest_candidates(g, r, is_target);
    p.txs.push_back({miner_claim(g, m, g.lay.dep, "dep-M")});
    if (r > sc.T) p.txs.push_back({miner_claim(g, m, g.lay.col, "col-M")});
    if (with_claim) p.txs.push_back({make_call(g, g.lay.bob, g.lay.c_bob, "claimBribe")});
    return p;
}

inline Proposal miner_policy(GameState& g, Round r, int mi) {
    const auto& sc = g.scen();
    const auto& pol = g.profile().miners[mi];
    PartyId m = g.lay.miners[mi];
    BobKind bob = g.profile().bob.kind;
    Proposal p;
    switch (pol.kind) {
        case MinerKind::honest_fee_max: return honest_miner_select(g, r);
        case MinerKind::lagging: return p;
        case MinerKind::censor_related:
            if (r <= sc.T) censor_and_request(g, r, m, g.lay.c_bob, p);
            else p = honest_miner_select(g, r);
            return p;
        case MinerKind::m2mba_active: return m2mba_active_policy(g, r, mi);
        case MinerKind::m2mba_include:
            if (r <= sc.T) return honest_miner_select(g, r);
            m2mba_after_T(g, r, m, pol.defer_to, p);
            return p;
        case MinerKind::m2mba_accept:
            if (r <= sc.T) censor_and_request(g, r, m, g.lay.c_m2m, p);
            else p = honest_miner_select(g, r);
            return p;
        case MinerKind::m2mba_passive:
            if (r <= sc.T) {
                p.txs = honest_candidates(g, r, is_target);
            } else {
                add_confiscations(g, r, m, p.txs);
                auto h = honest_candidates(g, r, [](const TxRecord&) { return false; });
                p.txs.insert(p.txs.end(), h.begin(), h.end());
                add_confiscations(g, r, m, p.txs);
            }
            return p;
        case MinerKind::include_confiscate:
            // no censorship, but takes the collateral once both preimages are out
            if (r <= sc.T) return honest_miner_select(g, r);
            add_confiscations(g, r, m, p.txs);
            {
                auto h = honest_candidates(g, r, [](const TxRecord&) { return false; });
                p.txs.insert(p.txs.end(), h.begin(), h.end());
            }
            add_confiscations(g, r, m, p.txs);  // again: He col-M only opens after dep-B
            return p;
        case MinerKind::b3a_accomplice:
            if (r > sc.T && bob == BobKind::b3a && g.live(g.lay.dep) && !g.deal_done && public_preimage(g, kPreA, r))
                return b3a_block(g, r, m, g.profile().bob.b3a_case);
            if (r <= sc.T) censor_and_request(g, r, m, g.lay.c_bob, p);
            else p = honest_miner_select(g, r);
            return p;
        case MinerKind::hydra_accomplice:
            if (r > sc.T && bob == BobKind::hydra_briber && g.live(g.lay.dep) && !g.deal_done &&
                public_preimage(g, kPreA, r))
                return reverse_bribe_block(g, r, m, true);
            if (r <= sc.T) censor_and_request(g, r, m, g.lay.c_bob, p);
            else p = honest_miner_select(g, r);
            return p;
        case MinerKind::sdrba_briber:
            if (bob == BobKind::sdrba_seller && g.live(g.lay.dep) && !g.deal_done && public_preimage(g, kPreA, r))
                return reverse_bribe_block(g, r, m, false);
            if (r > sc.T) add_confiscations(g, r, m, p.txs);
            {
                auto h = honest_candidates(g, r, [](const TxRecord&) { return false; });
                p.txs.insert(p.txs.end(), h.begin(), h.end());
            }
            return p;
        case MinerKind::censor_alice:
        case MinerKind::censor_bob: {
            PartyId who = pol.kind == MinerKind::censor_alice ? g.lay.alice : g.lay.bob;
            if (r <= sc.T) p.txs = honest_candidates(g, r, [&](const TxRecord& t) { return t.creator == who; });
            else p = honest_miner_select(g, r);
            return p;
        }
    }
    return p;
}

// ---- party policies --------------------------------------------------------

inline void broadcast(GameState& g, TxRecord t, Round r) {
    t.broadcast = r;
    for (const auto& p : t.witness.preimages) g.leaked.emplace(p.slot, r);
    g.s.mempool.push_back(std::move(t));
}

inline bool once(GameState& g, Sent flag) {
    if (g.sent & flag) return false;
    g.sent |= flag;
    return true;
}

inline void alice_acts(GameState& g, Round r) {
    const auto& sc = g.scen();
    const auto& pol = g.profile().alice;
    Round t_pub = pol.t_pub >= 0 ? pol.t_pub : sc.t_pub;
    bool demba = sc.protocol == Protocol::demba;
    switch (pol.kind) {
        case AliceKind::honest:
        case AliceKind::censored_fallback:
            if (r >= t_pub && r <= sc.T && once(g, kSentReveal)) broadcast(g, alice_reveal(g), r);
            if (pol.kind == AliceKind::censored_fallback && demba && r >= sc.T && g.live(g.lay.col_a) &&
                once(g, kSentFallback))
                broadcast(g, alice_double(g), r);
            break;
        case AliceKind::offline_then_refund:
            if (demba && r >= sc.T && once(g, kSentFallback)) broadcast(g, alice_refund(g), r);
            break;
        case AliceKind::grief_double_reveal:
            if (demba && r >= sc.T && once(g, kSentFallback)) broadcast(g, alice_double(g), r);
            break;
        case AliceKind::silent: break;
    }
}

// Refund path of the non-DEMBA protocols, starting at round `from`.
inline void bob_refunds(GameState& g, Round r, Round from) {
    const auto& sc = g.scen();
    if (r < from) return;
    if (g.live(g.lay.dep) && once(g, kSentDepB)) broadcast(g, bob_dep_b(g), r);
    if (sc.protocol == Protocol::mad && g.live(g.lay.col) && once(g, kSentColB)) broadcast(g, bob_col_b(g), r);
    if (sc.protocol == Protocol::he && r >= from + sc.delay_l() && g.live(g.lay.col) && once(g, kSentColB))
        broadcast(g, bob_col_b(g), r);
}

inline void bob_bribery_upkeep(GameState& g, Round r) {
    if (g.lay.c_bob < 0) return;
    const auto& sc = g.scen();
    const auto& b = g.s.bribery[g.lay.c_bob];
    if (r == 0 && once(g, kSentInit)) {
        std::int64_t deposit = g.profile().bob.kind == BobKind::bribe_censor ? sc.br * (sc.T + 1) : sc.v_dep;
        broadcast(g, make_call(g, g.lay.bob, g.lay.c_bob, "init", deposit, sc.f_c_bob), r);
        return;
    }
    if (b.status != BriberyContract::open || b.deposit.value() == 0) return;
    CallContext ctx{r, g.lay.bob, kNobody, &g.s.contracts};
    if (ctx.redeemed_via(b.target_contract, b.target_path, b.T)) {
        if (once(g, kSentRefund)) broadcast(g, make_call(g, g.lay.bob, g.lay.c_bob, "refundToBob"), r);
    } else if (ctx.redeemed_via(b.success_contract, b.success_path) && public_preimage(g, kPreA, r + 1)) {
        if (once(g, kSentClaim)) broadcast(g, make_call(g, g.lay.bob, g.lay.c_bob, "claimBribe"), r);
    }
}

inline void bob_acts(GameState& g, Round r) {
    const auto& sc = g.scen();
    const auto& pol = g.profile().bob;
    bool demba = sc.protocol == Protocol::demba;
    bob_bribery_upkeep(g, r);
    switch (pol.kind) {
        case BobKind::silent: return;
        case BobKind::honest:
        case BobKind::bribe_censor:
        case BobKind::naive_briber:
        case BobKind::sdrba_seller:
            if (demba) {
                if (r >= pol.reveal && g.live(g.lay.col_b) && once(g, kSentColPreB)) broadcast(g, bob_col_pre_b(g), r);
            } else {
                bob_refunds(g, r, sc.T);
            }
            return;
        case BobKind::delay:
            if (demba) {
                if (r >= sc.T + pol.delay - 1 && g.live(g.lay.col_b) && once(g, kSentColPreB))
                    broadcast(g, bob_col_pre_b(g), r);
            } else {
                bob_refunds(g, r, sc.T + pol.delay - 1);
            }
            return;
        case BobKind::b3a:
        case BobKind::hydra_briber:
            // hold pre_B back for the deal; fall back to the refund path one round after T
            if (!g.deal_done) bob_refunds(g, r, g.live(g.lay.dep) ? sc.T + 1 : sc.T);
            return;
    }
}

// DEMBA-facing name for the combined party step.
inline void demba_party_policies(GameState& g, Round r) {
    alice_acts(g, r);
    bob_acts(g, r);
}

} // namespace arena
