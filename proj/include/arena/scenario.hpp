#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bribery.hpp"
#include "contracts.hpp"

namespace arena {

enum class Protocol { naive, mad, he, demba };

enum class MinerKind {
    honest_fee_max,
    censor_related,
    m2mba_active,
    m2mba_passive,
    m2mba_accept,
    m2mba_include,
    b3a_accomplice,
    sdrba_briber,
    hydra_accomplice,
    lagging,
    censor_alice,
    censor_bob,
    include_confiscate
};
enum class AliceKind { honest, offline_then_refund, grief_double_reveal, censored_fallback, silent };
enum class BobKind { honest, delay, silent, naive_briber, b3a, hydra_briber, sdrba_seller, bribe_censor };

namespace detail {

template <class E>
struct Names;

template <>
struct Names<Protocol> {
    static constexpr const char* v[] = {"naive", "mad", "he", "demba"};
};
template <>
struct Names<MinerKind> {
    static constexpr const char* v[] = {"honest-fee-max", "censor-related", "m2mba-active",  "m2mba-passive",
                                        "m2mba-accept",   "m2mba-include",  "b3a-accomplice", "sdrba-briber",
                                        "hydra-accomplice", "lagging",      "censor-alice",   "censor-bob",
                                        "include-confiscate"};
};
template <>
struct Names<AliceKind> {
    static constexpr const char* v[] = {"honest", "offline-then-refund", "grief-double-reveal", "censored-fallback",
                                        "silent"};
};
template <>
struct Names<BobKind> {
    static constexpr const char* v[] = {"honest", "delay", "silent", "naive-briber", "b3a", "hydra-briber",
                                        "sdrba-seller", "bribe-censor"};
};

} // namespace detail

template <class E>
const char* name_of(E e) {
    return detail::Names<E>::v[static_cast<int>(e)];
}

template <class E>
E parse_enum(const std::string& s) {
    const auto& v = detail::Names<E>::v;
    for (std::size_t i = 0; i < std::size(v); ++i)
        if (s == v[i]) return static_cast<E>(i);
    throw Error("unknown-policy", s);
}

struct MinerProfile {
    std::string name;
    Rational power;
    bool active = false;
    bool colluding = false;
};

struct MinerPolicy {
    MinerKind kind = MinerKind::honest_fee_max;
    Round defer_to = 0;  // earliest round for col-M (m2mba-active)
};
struct AlicePolicy {
    AliceKind kind = AliceKind::honest;
    Round t_pub = -1;  // -1: scenario t_pub
};
struct BobPolicy {
    BobKind kind = BobKind::honest;
    Round reveal = 1;  // DEMBA reveal round for honest
    Round delay = 1;   // delay(d): included from T+d
    int b3a_case = 1;
};

struct StrategyProfile {
    AlicePolicy alice;
    BobPolicy bob;
    std::vector<MinerPolicy> miners;
};

inline std::string describe(const StrategyProfile& p) {
    std::string s = std::string("alice=") + name_of(p.alice.kind) + " bob=" + name_of(p.bob.kind);
    if (p.bob.kind == BobKind::delay) s += "(" + std::to_string(p.bob.delay) + ")";
    if (p.bob.kind == BobKind::b3a) s += "(" + std::to_string(p.bob.b3a_case) + ")";
    for (std::size_t i = 0; i < p.miners.size(); ++i) {
        s += " M" + std::to_string(i + 1) + "=" + name_of(p.miners[i].kind);
        if (p.miners[i].defer_to > 0) s += "@" + std::to_string(p.miners[i].defer_to);
    }
    return s;
}

// Restricts who may mine some rounds. Inside [from, to] with colluders_only,
// the miner is drawn among colluding miners proportionally to power.
struct Conditioning {
    Round from = 0;
    Round to = -1;
    bool colluders_only = false;
    std::map<Round, int> pins;  // round -> miner index
};

struct Scenario {
    Protocol protocol = Protocol::naive;

    std::int64_t v_dep = 0, v_col = 0, v_col_a = 0, v_col_b = 0, v_ded = 0;

    std::int64_t f = 1;  // unrelated transaction fee
    std::int64_t f_dep_a = 0, f_dep_b = 0, f_col_b = 0, f_c_bob = 0;
    std::int64_t fee_pre_a = 0, fee_pre_a2 = 0, fee_pre_aa2 = 0, fee_pre_b = 0;
    std::map<std::string, std::int64_t> fee_base;  // overrides of the earned bases
    Rational alpha{1, 2};

    Round T = 0, l = 0, t_pub = 0, horizon = 0;

    std::vector<MinerProfile> miners;

    std::int64_t br = 0, eps = 0;
    std::map<int, std::int64_t> br_for;  // miner index -> per-recipient bribe
    BribeSplit split = BribeSplit::per_block;

    int capacity = 8;
    std::uint64_t seed = 1;
    bool exact = true;
    std::int64_t trials = 10000;
    std::int64_t enum_cap = 10'000'000;
    std::int64_t endowment = 1'000'000;

    Conditioning cond;
    std::optional<StrategyProfile> profile;

    Round delay_l() const {
        if (protocol != Protocol::he) return 0;
        return l > 0 ? l : derive_he_delay(v_dep, v_col, f);
    }
    Round effective_horizon() const { return horizon > 0 ? horizon : T + delay_l() + 2; }
    FeeSchedule fee_schedule() const {
        auto s = make_fee_schedule(fee_pre_a, fee_pre_a2, fee_pre_aa2, fee_pre_b, alpha, T);
        for (const auto& [k, v] : fee_base) s.base[k] = v;
        return s;
    }
    Rational lambda_col() const {
        Rational s = 0;
        for (const auto& m : miners)
            if (m.colluding) s += m.power;
        return s;
    }
    StrategyProfile honest_profile() const {
        StrategyProfile p;
        p.miners.assign(miners.size(), MinerPolicy{});
        return p;
    }
};

inline std::string protocol_name(Protocol p) { return name_of(p); }

} // namespace arena
