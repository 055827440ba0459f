#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bribery.hpp"
#include "contracts.hpp"

namespace arena {

// Per-party income/outgo buckets; their sum equals the party's balance change.
enum Flow : int {
    kFlowSetup,
    kFlowUnrelated,
    kFlowFeeIn,
    kFlowFeeOut,
    kFlowPayout,
    kFlowBribeIn,
    kFlowEscrow,  // bribery-contract deposits, locks, refunds, leftovers
    kFlowSide,    // off-contract payments between parties
    kFlowMint,
    kFlowCount
};

struct TxRecord {
    enum Kind { related, unrelated, contract_call };

    std::uint64_t id = 0;
    Kind kind = related;
    PartyId creator = kNobody;
    int contract = -1;  // redeemed contract
    std::string path;
    Witness witness;
    TokenAmount fee{};
    std::optional<ContractCall> call;
    Round broadcast = 0;  // includable from broadcast + 1 on
    std::string label;
};

struct Block {
    Round round = 0;
    PartyId miner = kNobody;
    std::vector<TxRecord> txs;
    int unrelated = 0;  // filler transactions, each paying the unrelated fee
    int capacity = 8;
    std::vector<std::pair<PartyId, TokenAmount>> coinbase;  // minted to others by the block producer
    struct Side {
        PartyId from, to;
        TokenAmount amount;
    };
    std::vector<Side> side;  // payments settled alongside the block (reverse bribes)
};

struct MintRecord {
    PartyId to;
    TokenAmount amount;
    std::string reason;
    Round round;
};

struct ChainState {
    Round height = 0;
    std::vector<std::string> names;
    std::vector<Role> roles;
    std::vector<TokenAmount> balances;
    std::vector<std::array<std::int64_t, kFlowCount>> flows;
    std::vector<ContractInstance> contracts;
    std::vector<BriberyContract> bribery;
    TokenAmount burned{};
    TokenAmount minted{};
    std::vector<MintRecord> mint_log;
    Registry revealed;
    std::vector<TxRecord> mempool;
    std::optional<FeeSchedule> fees;
    TokenAmount unrelated_fee{};
    PartyId external = kNobody;
    PartyId burn_sink = kNobody;

    PartyId add_party(std::string name, Role role, TokenAmount balance = {}) {
        names.push_back(std::move(name));
        roles.push_back(role);
        balances.push_back(balance);
        flows.push_back({});
        PartyId id = static_cast<PartyId>(balances.size() - 1);
        if (role == Role::external_user) external = id;
        if (role == Role::burn_sink) burn_sink = id;
        return id;
    }

    // Moves a party's funds into a contract before round 1.
    int deploy(ContractInstance c, PartyId funder) {
        if (c.id != static_cast<int>(contracts.size())) throw Error("bad-contract-id", c.name);
        if (c.deposit.value() > 0) debit(funder, c.deposit, kFlowSetup);
        contracts.push_back(std::move(c));
        return contracts.back().id;
    }
    int add_bribery(BriberyContract b) {
        bribery.push_back(std::move(b));
        return static_cast<int>(bribery.size() - 1);
    }

    void credit(PartyId p, TokenAmount a, Flow f) {
        if (p == burn_sink) {
            burned += a;
            return;
        }
        balances.at(p) += a;
        flows[p][f] += a.value();
    }
    void debit(PartyId p, TokenAmount a, Flow f) {
        if (p == burn_sink) throw Error("burn-sink", "burn sink cannot spend");
        balances.at(p) -= a;
        flows[p][f] -= a.value();
    }

    TokenAmount live_deposits() const {
        TokenAmount s{};
        for (const auto& c : contracts)
            if (c.status == ContractStatus::redeemable || c.status == ContractStatus::dormant) s += c.deposit;
        for (const auto& b : bribery) s += b.balance();
        return s;
    }
    TokenAmount balance_total() const {
        TokenAmount s{};
        for (auto b : balances) s += b;
        return s;
    }
    bool operator==(const ChainState& o) const {
        return height == o.height && balances == o.balances && flows == o.flows && burned == o.burned &&
               minted == o.minted && revealed == o.revealed && bribery == o.bribery && contract_states() == o.contract_states();
    }

private:
    std::vector<std::tuple<ContractStatus, std::int64_t, std::string, Round>> contract_states() const {
        std::vector<std::tuple<ContractStatus, std::int64_t, std::string, Round>> v;
        for (const auto& c : contracts) v.emplace_back(c.status, c.deposit.value(), c.redeemed_path, c.redeemed_round);
        return v;
    }
};

// Σ balances + Σ live deposits + burned − minted; constant across blocks.
inline BigInt conserved_total(const ChainState& s) {
    return BigInt(s.balance_total().value()) + s.live_deposits().value() + s.burned.value() - s.minted.value();
}

struct Validity {
    bool ok = true;
    std::string kind;
    std::string detail;
    explicit operator bool() const { return ok; }
};

namespace detail {

inline Validity invalid(std::string kind, std::string detail) { return {false, std::move(kind), std::move(detail)}; }

inline Validity check_redeem(const ChainState& s, const TxRecord& tx, Round round) {
    if (tx.contract < 0 || tx.contract >= static_cast<int>(s.contracts.size()))
        return invalid("unknown-output", "no contract " + std::to_string(tx.contract));
    const auto& c = s.contracts[tx.contract];
    if (!c.live()) return invalid("unknown-output", c.name + " is not redeemable");
    if (c.automatic) return invalid("predicate-failed", "automatic contract");
    const RedeemPath* p = c.path(tx.path);
    if (!p) return invalid("predicate-failed", "no path " + tx.path);
    if (round < p->earliest || round > p->latest) return invalid("predicate-failed", "timelock");
    if (p->signer != kNobody && (tx.creator != p->signer || !tx.witness.signed_by(p->signer)))
        return invalid("predicate-failed", "signature");
    for (Slot sl : kAllSlots) {
        if (!(p->slots & sl)) continue;
        auto v = tx.witness.get(sl);
        if (!v || *v != c.digests.of(sl)) return invalid("predicate-failed", std::string("hashlock ") + slot_name(sl));
    }
    if (!reads_hold(*p, s.revealed)) return invalid("predicate-failed", "cross-read");
    if (!p->fee_path.empty()) {
        if (!s.fees) return invalid("predicate-failed", "no fee schedule");
        if (tx.fee.value() != 0 && tx.fee != s.fees->paid_of(p->fee_path)) return invalid("predicate-failed", "fee");
    }
    try {
        compute_payouts(*p, c.deposit, tx.fee, round);
    } catch (const Error& e) {
        return invalid("over-spend", e.what());
    }
    return {};
}

} // namespace detail

inline Validity validate_tx(const ChainState& s, const TxRecord& tx, Round round) {
    switch (tx.kind) {
        case TxRecord::unrelated: return {};
        case TxRecord::contract_call: {
            if (!tx.call || tx.call->target < 0 || tx.call->target >= static_cast<int>(s.bribery.size()))
                return detail::invalid("unknown-output", "no bribery contract");
            if (tx.creator < 0 || tx.creator >= static_cast<int>(s.balances.size()))
                return detail::invalid("unknown-output", "unknown caller");
            if (s.balances[tx.creator] < tx.fee + tx.call->value) return detail::invalid("over-spend", "caller balance");
            return {};
        }
        default: return detail::check_redeem(s, tx, round);
    }
}

namespace detail {

inline void execute_path(ChainState& s, ContractInstance& c, const RedeemPath& p, const Witness& w, TokenAmount fee,
                         Round round, PartyId miner) {
    auto payouts = compute_payouts(p, c.deposit, fee, round);
    if (fee.value() > 0) {
        if (!p.fee_path.empty()) {
            auto split = fee_split(p.fee_path, fee, round, *s.fees);
            s.credit(miner, split.earned, kFlowFeeIn);
            s.burned += split.burned;
        } else {
            s.credit(miner, fee, kFlowFeeIn);
        }
    }
    c.deposit = 0;
    c.status = ContractStatus::redeemed;
    c.redeemed_path = p.name;
    c.redeemed_round = round;
    c.redeemed_in_block_of = miner;
    for (const auto& po : payouts) {
        switch (po.kind) {
            case Effect::transfer: s.credit(po.to == kBlockMiner ? miner : po.to, po.amount, kFlowPayout); break;
            case Effect::burn: s.burned += po.amount; break;
            case Effect::forward: {
                auto& t = s.contracts.at(po.contract);
                t.deposit += po.amount;
                if (t.status == ContractStatus::dormant) t.status = ContractStatus::redeemable;
                break;
            }
        }
    }
    if (p.name == "dep-Burn") c.status = ContractStatus::burned;
    for (Slot sl : kAllSlots)
        if (p.slots & sl) s.revealed.reveal(c.id, sl, *w.get(sl), round);
}

inline void execute_call(ChainState& s, const TxRecord& tx, Round round, PartyId miner) {
    if (tx.fee.value() > 0) {
        s.debit(tx.creator, tx.fee, kFlowFeeOut);
        s.credit(miner, tx.fee, kFlowFeeIn);
    }
    auto& b = s.bribery.at(tx.call->target);
    CallContext ctx{round, tx.creator, miner, &s.contracts};
    auto eff = bribery_contract_step(b, *tx.call, ctx);
    if (!eff.applied) return;
    if (eff.pulled.value() > 0) s.debit(tx.creator, eff.pulled, kFlowEscrow);
    for (const auto& [to, amt] : eff.bribes) s.credit(to, amt, kFlowBribeIn);
    for (const auto& [to, amt] : eff.paid) s.credit(to, amt, kFlowEscrow);
}

} // namespace detail

// Fires every automatic contract whose condition holds at `round`.
inline void resolve_automatic(ChainState& s, Round round) {
    for (auto& c : s.contracts) {
        const RedeemPath* p = auto_path(c, s.revealed, round);
        if (p) detail::execute_path(s, c, *p, Witness{}, 0, round, kNobody);
    }
}

// Applies one transaction inside the block being built. `spent` tracks
// contracts consumed earlier in the same block.
inline Validity apply_tx(ChainState& s, const TxRecord& tx, Round round, PartyId miner, std::vector<int>& spent) {
    if (tx.kind == TxRecord::related && std::find(spent.begin(), spent.end(), tx.contract) != spent.end())
        return detail::invalid("duplicate-spend-in-block", "contract " + std::to_string(tx.contract));
    auto v = validate_tx(s, tx, round);
    if (!v) return v;
    if (tx.kind == TxRecord::related) {
        spent.push_back(tx.contract);
        auto& c = s.contracts[tx.contract];
        detail::execute_path(s, c, *c.path(tx.path), tx.witness, tx.fee, round, miner);
    } else if (tx.kind == TxRecord::contract_call) {
        detail::execute_call(s, tx, round, miner);
    }
    return v;
}

// Unrelated fees, coinbase, side payments, automatic resolution, height, mempool.
inline void finish_block(ChainState& s, const Block& b) {
    if (b.unrelated > 0) {
        TokenAmount total = s.unrelated_fee * b.unrelated;
        s.debit(s.external, total, kFlowFeeOut);
        s.credit(b.miner, total, kFlowUnrelated);
    }
    for (const auto& [to, amt] : b.coinbase) {
        s.credit(to, amt, kFlowMint);
        s.minted += amt;
        s.mint_log.push_back({to, amt, "coinbase", b.round});
    }
    for (const auto& p : b.side) {
        s.debit(p.from, p.amount, kFlowSide);
        s.credit(p.to, p.amount, kFlowSide);
    }
    resolve_automatic(s, b.round);
    s.height = b.round;
    if (!b.txs.empty()) {
        s.mempool.erase(std::remove_if(s.mempool.begin(), s.mempool.end(),
                                       [&](const TxRecord& m) {
                                           return std::any_of(b.txs.begin(), b.txs.end(),
                                                              [&](const TxRecord& t) { return t.id == m.id; });
                                       }),
                        s.mempool.end());
    }
}

inline void check_header(const ChainState& s, const Block& b) {
    if (b.round != s.height + 1)
        throw Error("stale-round", "block " + std::to_string(b.round) + " on height " + std::to_string(s.height));
    if (static_cast<int>(b.txs.size()) + b.unrelated > b.capacity) throw Error("over-capacity", "block too large");
}

// In-place variant used by the game loop; apply_block() is the snapshot form.
inline void apply_block_inplace(ChainState& s, const Block& b) {
    check_header(s, b);
    std::vector<int> spent;
    for (std::size_t i = 0; i < b.txs.size(); ++i) {
        auto v = apply_tx(s, b.txs[i], b.round, b.miner, spent);
        if (!v) throw Error("invalid-tx", "#" + std::to_string(i) + " " + v.kind + " (" + v.detail + ")");
    }
    finish_block(s, b);
}

inline ChainState apply_block(const ChainState& s, const Block& b) {
    ChainState out = s;
    apply_block_inplace(out, b);
    return out;
}

inline Resolution resolve_demba_dep(const ChainState& s, int dep) {
    const auto& c = s.contracts.at(dep);
    if (c.status == ContractStatus::burned) return Resolution::burn;
    if (c.status == ContractStatus::redeemed)
        return c.redeemed_path == "dep-A" ? Resolution::to_alice : Resolution::to_bob;
    return resolve_demba_dep(c, s.revealed, s.height);
}

inline ChainState mint(const ChainState& s, PartyId to, TokenAmount amount, std::string reason) {
    ChainState out = s;
    out.credit(to, amount, kFlowMint);
    out.minted += amount;
    out.mint_log.push_back({to, amount, std::move(reason), s.height});
    return out;
}

// Wrapper: run one bribery-contract call against a chain snapshot.
inline std::pair<BriberyContract, CallEffects> bribery_contract_step(const BriberyContract& s, const ContractCall& call,
                                                                     Round round, PartyId caller, PartyId block_miner,
                                                                     const ChainState& chain) {
    BriberyContract next = s;
    CallContext ctx{round, caller, block_miner, &chain.contracts};
    auto eff = bribery_contract_step(next, call, ctx);
    return {eff.applied ? next : s, eff};
}

} // namespace arena
