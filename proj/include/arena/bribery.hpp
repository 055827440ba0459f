#pragma once

#include <map>
#include <string>
#include <vector>

#include "contracts.hpp"

namespace arena {

enum class BribeSplit { per_block, equal };

struct ContractCall {
    int target = -1;  // index into ChainState::bribery
    std::string method;
    TokenAmount value{};
    std::uint64_t preimage = 0;
};

// C_Bob (naive-bribery contract) and C_M2M (miner-to-miner contract) share
// one state record; `kind` selects the method semantics.
struct BriberyContract {
    enum Kind { c_bob, c_m2m };
    enum Status { open, claimed, refunded };

    Kind kind = c_bob;
    Status status = open;
    PartyId owner = kNobody;
    Round T = 0;
    std::uint64_t pre_a = 0;

    // censorship target and the redemption that proves the attack landed
    int target_contract = -1;
    std::string target_path = "dep-A";
    int success_contract = -1;
    std::string success_path;

    TokenAmount br{};                       // constant bribe per reserved block
    std::map<PartyId, TokenAmount> br_for;  // per-recipient override (C_M2M)
    TokenAmount f_success{};                // fee terms of the C_Bob guard
    TokenAmount f_call{};
    TokenAmount v_col{};
    BribeSplit split = BribeSplit::per_block;

    TokenAmount deposit{};  // C_Bob: v_dep; C_M2M: sum of locks
    TokenAmount bal_left{};
    std::map<PartyId, std::int64_t> bal;  // reserved block counts
    std::int64_t count = 0;
    std::map<PartyId, TokenAmount> lock;
    Round last_request = -1;

    TokenAmount balance() const {
        if (kind == c_bob) return deposit;
        TokenAmount s{};
        for (const auto& [p, v] : lock) s += v;
        return s;
    }
    TokenAmount bribe_for(PartyId p) const {
        auto it = br_for.find(p);
        return it == br_for.end() ? br : it->second;
    }
    bool operator==(const BriberyContract&) const = default;
};

// What the ledger tells a bribery contract about the current call.
struct CallContext {
    Round round = 0;
    PartyId caller = kNobody;
    PartyId block_miner = kNobody;
    const std::vector<ContractInstance>* contracts = nullptr;

    const ContractInstance* contract(int id) const {
        if (!contracts || id < 0 || id >= static_cast<int>(contracts->size())) return nullptr;
        return &(*contracts)[id];
    }
    bool redeemed_via(int id, const std::string& path, Round by = kForever) const {
        auto* c = contract(id);
        return c && c->status == ContractStatus::redeemed && c->redeemed_path == path && c->redeemed_round <= by;
    }
};

struct CallEffects {
    bool applied = false;  // false: guard failed, state unchanged
    std::string note;
    TokenAmount pulled{};  // moved from caller into the contract
    std::vector<std::pair<PartyId, TokenAmount>> bribes;  // censorship and caller bribes
    std::vector<std::pair<PartyId, TokenAmount>> paid;    // refunds and leftovers
};

namespace detail {

inline CallEffects reject(std::string why) {
    CallEffects e;
    e.note = std::move(why);
    return e;
}

inline CallEffects request_bribe(BriberyContract& s, const CallContext& ctx) {
    if (ctx.caller != ctx.block_miner) return reject("caller is not the miner of the current block");
    if (s.last_request == ctx.round) return reject("already requested in this block");
    if (s.status != BriberyContract::open) return reject("contract closed");
    if (s.kind == BriberyContract::c_bob) {
        if (ctx.round > s.T) return reject("height above T");
        if (s.bal_left < s.br) return reject("deposit exhausted");
        s.bal_left -= s.br;
    }
    s.last_request = ctx.round;
    s.bal[ctx.caller] += 1;
    s.count += 1;
    CallEffects e;
    e.applied = true;
    return e;
}

inline CallEffects claim_bob(BriberyContract& s, const ContractCall& call, const CallContext& ctx) {
    if (s.status != BriberyContract::open) return reject("contract closed");
    if (call.preimage != s.pre_a) return reject("wrong preimage");
    if (ctx.redeemed_via(s.target_contract, s.target_path)) return reject("target transaction was included");
    if (!ctx.redeemed_via(s.success_contract, s.success_path)) return reject("refund not included yet");
    std::int64_t need = s.br.value() + s.f_success.value() + s.f_call.value();
    if (s.bal_left.value() - need < 0) return reject("balance insufficient");
    CallEffects e;
    e.applied = true;
    TokenAmount out{};
    for (const auto& [addr, n] : s.bal) {
        TokenAmount b = s.br * n;
        e.bribes.push_back({addr, b});
        out += b;
    }
    e.bribes.push_back({ctx.block_miner, s.br});
    out += s.br;
    e.paid.push_back({s.owner, s.deposit - out});
    s.deposit = 0;
    s.bal_left = 0;
    s.bal.clear();
    s.status = BriberyContract::claimed;
    return e;
}

inline CallEffects claim_m2m(BriberyContract& s, const ContractCall& call, const CallContext& ctx) {
    if (s.status != BriberyContract::open) return reject("contract closed");
    if (call.preimage != s.pre_a) return reject("wrong preimage");
    if (ctx.redeemed_via(s.target_contract, s.target_path, s.T)) return reject("target transaction was included");
    auto* col = ctx.contract(s.success_contract);
    if (!col || !ctx.redeemed_via(s.success_contract, s.success_path)) return reject("collateral not confiscated");
    PartyId m = col->redeemed_in_block_of;
    TokenAmount locked = s.lock.count(m) ? s.lock.at(m) : TokenAmount{};

    std::vector<std::pair<PartyId, TokenAmount>> bribes;
    TokenAmount total{};
    if (s.split == BribeSplit::per_block) {
        std::int64_t owed = 0;
        for (const auto& [addr, n] : s.bal) {
            TokenAmount b = s.bribe_for(addr) * n;
            bribes.push_back({addr, b});
            total += b;
            if (addr != m) owed += b.value();
        }
        if (s.v_col.value() - owed < 0) return reject("collateral cannot cover bribes");
        bribes.push_back({ctx.block_miner, s.br});
        total += s.br;
    } else {
        if (s.count == 0) return reject("no censoring blocks reserved");
        for (const auto& [addr, n] : s.bal) {
            TokenAmount b = (s.v_col * n).value() / s.count;
            bribes.push_back({addr, b});
            total += b;
        }
    }
    if (locked < total) return reject("confiscating miner has not locked enough");

    CallEffects e;
    e.applied = true;
    s.lock[m] = locked - total;
    e.bribes = std::move(bribes);
    for (const auto& [addr, v] : s.lock)
        if (v.value() > 0) e.paid.push_back({addr, v});
    s.lock.clear();
    s.bal.clear();
    s.status = BriberyContract::claimed;
    return e;
}

} // namespace detail

inline CallEffects bribery_contract_step(BriberyContract& s, const ContractCall& call, const CallContext& ctx) {
    using detail::reject;
    const std::string& m = call.method;
    if (m == "init") {
        if (s.kind != BriberyContract::c_bob || ctx.caller != s.owner) return reject("init by non-owner");
        if (s.deposit.value() != 0 || s.status != BriberyContract::open) return reject("already initialised");
        s.deposit = call.value;
        s.bal_left = call.value;
        CallEffects e;
        e.applied = true;
        e.pulled = call.value;
        return e;
    }
    if (m == "lockCollateral") {
        if (s.kind != BriberyContract::c_m2m || s.status != BriberyContract::open) return reject("not lockable");
        s.lock[ctx.caller] += call.value;
        CallEffects e;
        e.applied = true;
        e.pulled = call.value;
        return e;
    }
    if (m == "requestBribe") return detail::request_bribe(s, ctx);
    if (m == "claimBribe")
        return s.kind == BriberyContract::c_bob ? detail::claim_bob(s, call, ctx) : detail::claim_m2m(s, call, ctx);
    if (m == "refundToBob") {
        if (s.kind != BriberyContract::c_bob || s.status != BriberyContract::open) return reject("not refundable");
        if (!ctx.redeemed_via(s.target_contract, s.target_path, s.T)) return reject("target not included by T");
        CallEffects e;
        e.applied = true;
        e.paid.push_back({s.owner, s.deposit});
        s.deposit = 0;
        s.bal_left = 0;
        s.status = BriberyContract::refunded;
        return e;
    }
    if (m == "refundToMiners") {
        if (s.kind != BriberyContract::c_m2m || s.status != BriberyContract::open) return reject("not refundable");
        bool target_in = ctx.redeemed_via(s.target_contract, s.target_path, s.T);
        auto* col = ctx.contract(s.success_contract);
        // also released once the collateral is gone and the claim can no longer succeed
        bool col_gone = col && col->status != ContractStatus::dormant && !col->live();
        if (col_gone && !target_in) {
            BriberyContract probe = s;
            col_gone = !detail::claim_m2m(probe, ContractCall{call.target, "claimBribe", 0, s.pre_a}, ctx).applied;
        }
        if (!target_in && !col_gone) return reject("attack still possible");
        CallEffects e;
        e.applied = true;
        for (const auto& [addr, v] : s.lock)
            if (v.value() > 0) e.paid.push_back({addr, v});
        s.lock.clear();
        s.status = BriberyContract::refunded;
        return e;
    }
    return reject("unknown method " + m);
}

inline BriberyContract make_c_bob(PartyId bob, std::int64_t br, Round T, std::uint64_t pre_a, int target,
                                  int success_contract, std::string success_path, std::int64_t f_success,
                                  std::int64_t f_call) {
    BriberyContract c;
    c.kind = BriberyContract::c_bob;
    c.owner = bob;
    c.br = br;
    c.T = T;
    c.pre_a = pre_a;
    c.target_contract = target;
    c.success_contract = success_contract;
    c.success_path = std::move(success_path);
    c.f_success = f_success;
    c.f_call = f_call;
    return c;
}

inline BriberyContract make_c_m2m(std::int64_t br, Round T, std::uint64_t pre_a, int he_dep, int he_col,
                                  std::int64_t v_col, BribeSplit split) {
    BriberyContract c;
    c.kind = BriberyContract::c_m2m;
    c.br = br;
    c.T = T;
    c.pre_a = pre_a;
    c.target_contract = he_dep;
    c.success_contract = he_col;
    c.success_path = "col-M";
    c.v_col = v_col;
    c.split = split;
    return c;
}

} // namespace arena
