#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "token.hpp"

namespace arena {

using PartyId = int;
constexpr PartyId kNobody = -2;
constexpr PartyId kBlockMiner = -1;  // recipient placeholder: whoever mines the including block

enum class Role { alice, bob, miner, external_user, burn_sink };

// Hashlock slots, used as a bitmask.
enum Slot : std::uint8_t { kPreA = 1, kPreA2 = 2, kPreB = 4 };

inline int slot_index(Slot s) { return s == kPreA ? 0 : s == kPreA2 ? 1 : 2; }
inline const char* slot_name(Slot s) { return s == kPreA ? "pre_A" : s == kPreA2 ? "pre_A'" : "pre_B"; }
constexpr std::array<Slot, 3> kAllSlots{kPreA, kPreA2, kPreB};

struct Preimage {
    Slot slot;
    std::uint64_t value;
};

struct Witness {
    std::vector<Preimage> preimages;
    std::vector<PartyId> signers;

    std::optional<std::uint64_t> get(Slot s) const {
        for (const auto& p : preimages)
            if (p.slot == s) return p.value;
        return std::nullopt;
    }
    bool signed_by(PartyId p) const {
        for (auto s : signers)
            if (s == p) return true;
        return false;
    }
};

struct Digests {
    std::uint64_t pre_A = 0;
    std::uint64_t pre_A2 = 0;
    std::uint64_t pre_B = 0;

    std::uint64_t of(Slot s) const { return s == kPreA ? pre_A : s == kPreA2 ? pre_A2 : pre_B; }
};

struct Effect {
    enum Kind { transfer, burn, forward };
    Kind kind = transfer;
    PartyId to = kNobody;
    int contract = -1;       // forward target
    bool remainder = false;  // takes whatever is left after fee and fixed effects
    TokenAmount amount{};
    Round min_round = 0;     // effect applies only when included at or after this round
};

// Condition over what another contract has published through its redemption.
struct CrossRead {
    int contract = -1;
    std::uint8_t slots = 0;
    bool exact = true;  // published set must equal `slots` (otherwise superset is enough)
};

struct RedeemPath {
    std::string name;
    std::uint8_t slots = 0;
    PartyId signer = kNobody;  // kNobody: any claimant
    Round earliest = 0;
    Round latest = kForever;
    std::vector<CrossRead> reads;
    std::vector<Effect> effects;
    std::string fee_path;  // non-empty: the fee is split per FeeSchedule
};

enum class ContractStatus { dormant, redeemable, redeemed, burned };

struct ContractInstance {
    int id = -1;
    std::string name;
    TokenAmount deposit{};
    std::vector<RedeemPath> paths;
    ContractStatus status = ContractStatus::redeemable;
    std::string redeemed_path;
    Round redeemed_round = -1;
    PartyId redeemed_in_block_of = kNobody;
    Digests digests;
    std::uint8_t exposed = 0;
    bool automatic = false;  // resolved by the ledger itself, never by a transaction

    const RedeemPath* path(const std::string& n) const {
        for (const auto& p : paths)
            if (p.name == n) return &p;
        return nullptr;
    }
    bool live() const { return status == ContractStatus::redeemable; }
};

// Append-only record of preimages published by contract redemptions.
class Registry {
public:
    struct Entry {
        int contract;
        Slot slot;
        std::uint64_t value;
        Round round;
    };

    void reveal(int contract, Slot slot, std::uint64_t value, Round round) {
        if (find(contract, slot)) throw Error("registry", "slot already revealed");
        entries_.push_back({contract, slot, value, round});
    }
    const Entry* find(int contract, Slot slot) const {
        for (const auto& e : entries_)
            if (e.contract == contract && e.slot == slot) return &e;
        return nullptr;
    }
    std::uint8_t published(int contract) const {
        std::uint8_t m = 0;
        for (const auto& e : entries_)
            if (e.contract == contract) m |= e.slot;
        return m;
    }
    const std::vector<Entry>& entries() const { return entries_; }
    bool operator==(const Registry&) const = default;

private:
    std::vector<Entry> entries_;
};

inline bool operator==(const Registry::Entry& a, const Registry::Entry& b) {
    return a.contract == b.contract && a.slot == b.slot && a.value == b.value && a.round == b.round;
}

// ---- DEMBA fee schedule --------------------------------------------------

inline const std::string kFeePreA = "pre_A";
inline const std::string kFeePreA2 = "pre_A'";
inline const std::string kFeePreAA2 = "pre_AA'";
inline const std::string kFeePreB = "pre_B";

struct FeeSchedule {
    std::map<std::string, TokenAmount> paid;
    std::map<std::string, TokenAmount> base;  // the miner-earned amount (fm) before decay
    Rational alpha{1, 2};
    Round T = 0;

    TokenAmount paid_of(const std::string& p) const {
        auto it = paid.find(p);
        if (it == paid.end()) throw Error("missing-parameter", "paid fee for " + p);
        return it->second;
    }
    TokenAmount base_of(const std::string& p) const {
        auto it = base.find(p);
        return it == base.end() ? paid_of(p) : it->second;
    }
};

// Defaults the miner-earned bases: honest paths earn what they pay, the two
// post-timeout Alice paths earn one and two units less than pre_A.
inline FeeSchedule make_fee_schedule(std::int64_t pre_a, std::int64_t pre_a2, std::int64_t pre_aa2,
                                     std::int64_t pre_b, Rational alpha, Round T) {
    FeeSchedule s;
    s.paid = {{kFeePreA, pre_a}, {kFeePreA2, pre_a2}, {kFeePreAA2, pre_aa2}, {kFeePreB, pre_b}};
    s.base = {{kFeePreA, pre_a},
              {kFeePreA2, std::max<std::int64_t>(pre_a - 1, 0)},
              {kFeePreAA2, std::max<std::int64_t>(pre_a - 2, 0)},
              {kFeePreB, pre_b}};
    s.alpha = std::move(alpha);
    s.T = T;
    return s;
}

struct FeeSplit {
    TokenAmount earned;
    TokenAmount burned;
};

inline FeeSplit fee_split(const std::string& path, TokenAmount declared, Round round, const FeeSchedule& s) {
    if (declared.value() == 0) return {0, 0};
    if (declared != s.paid_of(path))
        throw Error("fee-mismatch", path + " declares " + std::to_string(declared.value()));
    if (round <= s.T) return {declared, 0};
    std::int64_t e = floor_to_int(pow(s.alpha, round - s.T) * Rational(s.base_of(path).value()));
    e = std::min(e, declared.value());
    return {e, declared - TokenAmount(e)};
}

struct ScheduleVerdict {
    bool ok = true;
    std::string violation;
    std::vector<std::string> warnings;
};

// Exact-rational check of the paid ordering, the earned ordering at every
// round, zero burn up to T and non-decreasing burn afterwards.
inline ScheduleVerdict check_fee_schedule(const FeeSchedule& s, Round horizon) {
    ScheduleVerdict v;
    auto fail = [&](std::string what) {
        if (v.ok) v.violation = std::move(what);
        v.ok = false;
    };
    if (s.alpha <= 0 || s.alpha > 1) fail("alpha outside (0,1]");
    for (const auto& p : {kFeePreA, kFeePreA2, kFeePreAA2, kFeePreB})
        if (!s.paid.count(p)) fail("missing paid fee for " + p);
    if (!v.ok) return v;
    if (!(s.paid_of(kFeePreA) < s.paid_of(kFeePreA2) && s.paid_of(kFeePreA2) < s.paid_of(kFeePreAA2)))
        fail("Eq.1: paid[pre_A] < paid[pre_A'] < paid[pre_AA'] violated");
    for (const auto& [p, b] : s.base)
        if (b > s.paid_of(p)) fail("earned base exceeds paid fee for " + p);
    for (const auto& p : {kFeePreA, kFeePreB})
        if (s.base_of(p) != s.paid_of(p)) fail("honest path " + p + " must earn its full fee before T");
    auto earned = [&](const std::string& p, Round t) {
        Rational b = t <= s.T && (p == kFeePreA || p == kFeePreB) ? Rational(s.paid_of(p).value())
                                                                  : Rational(s.base_of(p).value());
        return t <= s.T ? b : pow(s.alpha, t - s.T) * b;
    };
    for (Round t = 0; t <= horizon && v.ok; ++t) {
        if (!(earned(kFeePreA, t) > earned(kFeePreA2, t) && earned(kFeePreA2, t) > earned(kFeePreAA2, t)))
            fail("Eq.2: earned ordering violated at round " + std::to_string(t));
    }
    for (const auto& p : {kFeePreA, kFeePreA2, kFeePreAA2, kFeePreB}) {
        std::int64_t prev = 0;
        for (Round t = 0; t <= horizon; ++t) {
            std::int64_t burned = fee_split(p, s.paid_of(p), t, s).burned.value();
            if (t <= s.T && (p == kFeePreA || p == kFeePreB) && burned != 0) fail("burn before T on " + p);
            if (t > s.T && burned < prev) fail("burn decreases after T on " + p);
            prev = burned;
        }
    }
    if (s.alpha == 1) v.warnings.push_back("deterrence-void: alpha = 1 leaves post-T miner earnings undecayed");
    return v;
}

// ---- payouts -------------------------------------------------------------

struct Payout {
    Effect::Kind kind;
    PartyId to;
    int contract;
    TokenAmount amount;
};

// Resolves a path's effects against a deposit, after the fee is set aside.
inline std::vector<Payout> compute_payouts(const RedeemPath& p, TokenAmount deposit, TokenAmount fee, Round round) {
    if (fee > deposit) throw Error("over-spend", p.name + ": fee exceeds deposit");
    TokenAmount left = deposit - fee;
    std::vector<Payout> out;
    int remainder_at = -1;
    for (const auto& e : p.effects) {
        if (round < e.min_round) continue;
        if (e.remainder) {
            remainder_at = static_cast<int>(out.size());
            out.push_back({e.kind, e.to, e.contract, 0});
            continue;
        }
        if (e.amount > left) throw Error("over-spend", p.name + ": effects exceed deposit");
        left -= e.amount;
        out.push_back({e.kind, e.to, e.contract, e.amount});
    }
    if (remainder_at >= 0)
        out[remainder_at].amount = left;
    else if (left.value() != 0)
        out.push_back({Effect::burn, kNobody, -1, left});  // nothing may vanish
    return out;
}

// ---- builders ------------------------------------------------------------

inline Effect pay(PartyId to, std::int64_t amount) { return {Effect::transfer, to, -1, false, amount, 0}; }
inline Effect pay_rest(PartyId to) { return {Effect::transfer, to, -1, true, 0, 0}; }
inline Effect burn(std::int64_t amount, Round from = 0) { return {Effect::burn, kNobody, -1, false, amount, from}; }
inline Effect forward_rest(int contract) { return {Effect::forward, kNobody, contract, true, 0, 0}; }

inline void require_positive(std::int64_t v, const char* what) {
    if (v <= 0) throw Error("non-positive-amount", what);
}

inline ContractInstance build_naive_htlc(PartyId alice, PartyId bob, std::int64_t v_dep, std::uint64_t digest_a,
                                         Round T, int id = 0) {
    require_positive(v_dep, "v_dep");
    if (T <= 0) throw Error("bad-timeout", "T must be positive");
    ContractInstance c;
    c.id = id;
    c.name = "htlc";
    c.deposit = v_dep;
    c.digests.pre_A = digest_a;
    c.paths.push_back({"dep-A", kPreA, alice, 0, T, {}, {pay_rest(alice)}, {}});
    c.paths.push_back({"dep-B", 0, bob, T + 1, kForever, {}, {pay_rest(bob)}, {}});
    return c;
}

// MH-Dep and MH-Col. col-M opens only after T.
inline std::pair<ContractInstance, ContractInstance> build_mad_htlc(PartyId alice, PartyId bob, std::int64_t v_dep,
                                                                     std::int64_t v_col, Digests d, Round T,
                                                                     int base_id = 0) {
    require_positive(v_dep, "v_dep");
    require_positive(v_col, "v_col");
    ContractInstance dep;
    dep.id = base_id;
    dep.name = "mh-dep";
    dep.deposit = v_dep;
    dep.digests = d;
    dep.paths.push_back({"dep-A", kPreA, alice, 0, T, {}, {pay_rest(alice)}, {}});
    dep.paths.push_back({"dep-B", 0, bob, T + 1, kForever, {}, {pay_rest(bob)}, {}});
    dep.paths.push_back({"dep-M", kPreA | kPreB, kNobody, 0, kForever, {}, {pay_rest(kBlockMiner)}, {}});
    ContractInstance col;
    col.id = base_id + 1;
    col.name = "mh-col";
    col.deposit = v_col;
    col.digests = d;
    col.paths.push_back({"col-B", 0, bob, T + 1, kForever, {}, {pay_rest(bob)}, {}});
    col.paths.push_back({"col-M", kPreA | kPreB, kNobody, T + 1, kForever, {}, {pay_rest(kBlockMiner)}, {}});
    return {dep, col};
}

// Smallest integer delay satisfying v_col >= v_dep / (kappa - 1) + f.
inline Round derive_he_delay(std::int64_t v_dep, std::int64_t v_col, std::int64_t f) {
    if (v_col <= f) throw Error("bad-parameters", "v_col must exceed the unrelated fee to derive l");
    Rational kappa = Rational(v_dep, v_col - f) + 1;
    return std::max<Round>(1, ceil_to_int(kappa));
}

inline std::pair<ContractInstance, ContractInstance> build_he_htlc(PartyId alice, PartyId bob, std::int64_t v_dep,
                                                                    std::int64_t v_col, Digests d, Round T, Round l,
                                                                    int base_id = 0) {
    require_positive(v_dep, "v_dep");
    require_positive(v_col, "v_col");
    if (l < 1) throw Error("bad-delay", "l must be at least 1");
    ContractInstance dep;
    dep.id = base_id;
    dep.name = "he-dep";
    dep.deposit = v_dep + v_col;
    dep.digests = d;
    dep.paths.push_back({"dep-A", kPreA, alice, 0, T, {}, {pay(bob, v_col), pay_rest(alice)}, {}});
    dep.paths.push_back({"dep-B", kPreB, bob, T + 1, kForever, {}, {forward_rest(base_id + 1)}, {}});
    ContractInstance col;
    col.id = base_id + 1;
    col.name = "he-col";
    col.deposit = 0;
    col.status = ContractStatus::dormant;
    col.digests = d;
    col.paths.push_back({"col-B", 0, bob, T + l + 1, kForever, {}, {pay_rest(bob)}, {}});
    col.paths.push_back({"col-M", kPreA | kPreB, kNobody, 0, kForever, {}, {burn(v_dep), pay_rest(kBlockMiner)}, {}});
    return {dep, col};
}

struct Demba {
    ContractInstance dep, col_a, col_b;
};

inline Demba build_demba(PartyId alice, PartyId bob, std::int64_t v_dep, std::int64_t v_col_a, std::int64_t v_col_b,
                         std::int64_t v_ded, Digests d, Round T, const FeeSchedule& fees, int base_id = 0,
                         bool allow_zero_deduction = false) {
    require_positive(v_dep, "v_dep");
    require_positive(v_col_a, "v_col_A");
    require_positive(v_col_b, "v_col_B");
    if (allow_zero_deduction ? v_ded < 0 : v_ded <= 0) throw Error("non-positive-amount", "v_ded");
    if (fees.T != T) throw Error("bad-schedule", "fee schedule timeout differs from T");
    auto verdict = check_fee_schedule(fees, T + 2);
    if (!verdict.ok) throw Error("bad-schedule", verdict.violation);

    Demba out;
    int dep_id = base_id, a_id = base_id + 1, b_id = base_id + 2;

    auto& ca = out.col_a;
    ca.id = a_id;
    ca.name = "demba-col-A";
    ca.deposit = v_col_a;
    ca.digests = d;
    ca.exposed = kPreA | kPreA2;
    ca.paths.push_back({"col-pre_A", kPreA, alice, 0, T, {}, {pay_rest(alice)}, kFeePreA});
    ca.paths.push_back({"col-pre_A'", kPreA2, alice, T + 1, kForever, {}, {pay_rest(alice)}, kFeePreA2});
    ca.paths.push_back(
        {"col-pre_AA'", kPreA | kPreA2, alice, T + 1, kForever, {}, {burn(v_ded), pay_rest(alice)}, kFeePreAA2});

    auto& cb = out.col_b;
    cb.id = b_id;
    cb.name = "demba-col-B";
    cb.deposit = v_col_b;
    cb.digests = d;
    cb.exposed = kPreB;
    cb.paths.push_back({"col-pre_B", kPreB, bob, 0, kForever, {}, {burn(v_ded, T + 1), pay_rest(bob)}, kFeePreB});

    auto& dep = out.dep;
    dep.id = dep_id;
    dep.name = "demba-dep";
    dep.deposit = v_dep;
    dep.digests = d;
    dep.automatic = true;
    dep.paths.push_back({"dep-Burn", 0, kNobody, T + 1, kForever, {{a_id, kPreA | kPreA2, false}}, {burn(v_dep)}, {}});
    dep.paths.push_back({"dep-A", 0, kNobody, 0, kForever, {{a_id, kPreA, true}, {b_id, kPreB, true}}, {pay(alice, v_dep)}, {}});
    dep.paths.push_back(
        {"dep-B", 0, kNobody, T + 1, kForever, {{a_id, kPreA2, true}, {b_id, kPreB, true}}, {pay(bob, v_dep)}, {}});
    return out;
}

// ---- automatic resolution ------------------------------------------------

enum class Resolution { pending, to_alice, to_bob, burn };

inline const char* resolution_name(Resolution r) {
    switch (r) {
        case Resolution::to_alice: return "to-Alice";
        case Resolution::to_bob: return "to-Bob";
        case Resolution::burn: return "burn";
        default: return "pending";
    }
}

inline bool reads_hold(const RedeemPath& p, const Registry& reg) {
    for (const auto& r : p.reads) {
        std::uint8_t got = reg.published(r.contract);
        if (r.exact ? got != r.slots : (got & r.slots) != r.slots) return false;
    }
    return true;
}

// Returns the first automatic path whose window and cross-reads hold.
inline const RedeemPath* auto_path(const ContractInstance& c, const Registry& reg, Round round) {
    if (!c.automatic || !c.live()) return nullptr;
    for (const auto& p : c.paths)
        if (round >= p.earliest && round <= p.latest && reads_hold(p, reg)) return &p;
    return nullptr;
}

inline Resolution resolve_demba_dep(const ContractInstance& dep, const Registry& reg, Round round) {
    const RedeemPath* p = auto_path(dep, reg, round);
    if (!p) return Resolution::pending;
    if (p->name == "dep-A") return Resolution::to_alice;
    if (p->name == "dep-B") return Resolution::to_bob;
    return Resolution::burn;
}

} // namespace arena
