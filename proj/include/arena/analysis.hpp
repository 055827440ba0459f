#pragma once

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "game.hpp"

namespace arena {

// ---- closed forms ----------------------------------------------------------

enum class Attack { naive_bribery, b3a_case1, b3a_case2, sdrba_worst, hydra_bob, hydra_alice, m2mba_perblock, m2mba_equal };

namespace detail {
template <>
struct Names<Attack> {
    static constexpr const char* v[] = {"naive-bribery", "b3a-case1",   "b3a-case2",      "sdrba-worst",
                                        "hydra-bob",     "hydra-alice", "m2mba-perblock", "m2mba-equal"};
};
} // namespace detail

using Params = std::map<std::string, Rational>;

inline Rational need(const Params& p, const char* key) {
    auto it = p.find(key);
    if (it == p.end()) throw Error("missing-parameter", key);
    return it->second;
}

// Predicted utility per party name.
inline std::map<std::string, Rational> closed_form(Attack a, const Params& p) {
    auto v = [&](const char* k) { return need(p, k); };
    switch (a) {
        case Attack::naive_bribery:
            return {{"bob", v("v_dep") - ((v("k") + 1) * v("br") + v("f_dep_b") + v("f_c_bob"))}};
        case Attack::b3a_case1:
            return {{"bob", v("v_dep") - ((v("k") + 2) * v("br") + v("f_col_b") + v("f_c_bob"))}};
        case Attack::b3a_case2:
            return {{"bob", v("v_dep") - ((v("k") + 2) * v("br") + v("br") + v("f_c_bob"))}};
        case Attack::sdrba_worst: return {{"miner", v("v_dep") - (v("v_col") + v("eps"))}};
        case Attack::hydra_bob: return {{"bob", v("v_col") + v("eps") - ((v("k") + 1) * v("br") + v("f_c_bob"))}};
        case Attack::hydra_alice: return {{"alice", v("v_dep") + v("eps") - ((v("k") + 1) * v("br") + v("f_c_alice"))}};
        case Attack::m2mba_perblock: return {{"miner", v("v_col") - (v("k") - v("k_i")) * v("br")}};
        case Attack::m2mba_equal: {
            if (v("k") == 0) throw Error("missing-parameter", "k must be positive");
            return {{"miner", v("v_col") * v("k_i") / v("k")}};
        }
    }
    return {};
}

// HyDRA only pays off for Bob when eps covers the censorship bill.
inline bool hydra_profitable(const Params& p) {
    return need(p, "eps") > (need(p, "k") + 1) * need(p, "br") + need(p, "f_c_bob");
}

// ---- attack drivers ----------------------------------------------------------

struct AttackRun {
    Scenario sc;
    StrategyProfile prof;
    Schedule sched;
    std::string party;   // key used by closed_form
    PartyId who = 1;
    std::int64_t offset = 0;  // gain = delta + offset
};

// Deterministic desk-scale instance of each attack: t_pub = 0 and T = k so
// every round up to T is a censoring block.
inline AttackRun attack_run(Attack a, const Params& p) {
    auto i64 = [&](const char* k) { return floor_to_int(need(p, k)); };
    auto opt = [&](const char* k) { return p.count(k) ? floor_to_int(p.at(k)) : std::int64_t(0); };
    AttackRun run;
    auto& sc = run.sc;
    sc.v_dep = i64("v_dep");
    sc.T = i64("k");
    sc.t_pub = 0;
    sc.br = opt("br");
    sc.f_dep_a = 1;
    sc.f_dep_b = opt("f_dep_b");
    sc.f_col_b = opt("f_col_b");
    sc.f_c_bob = opt("f_c_bob");
    sc.eps = opt("eps");
    sc.miners = {{"M1", Rational(1, 2)}, {"M2", Rational(1, 2)}};
    Round H = 0;
    switch (a) {
        case Attack::naive_bribery:
            sc.protocol = Protocol::naive;
            run.prof.bob.kind = BobKind::naive_briber;
            run.prof.miners = {{MinerKind::censor_related}, {MinerKind::censor_related}};
            run.party = "bob";
            run.offset = sc.v_dep;
            break;
        case Attack::b3a_case1:
        case Attack::b3a_case2:
            sc.protocol = Protocol::mad;
            sc.v_col = i64("v_col");
            run.prof.bob.kind = BobKind::b3a;
            run.prof.bob.b3a_case = a == Attack::b3a_case1 ? 1 : 2;
            run.prof.miners = {{MinerKind::b3a_accomplice}, {MinerKind::b3a_accomplice}};
            run.party = "bob";
            run.offset = sc.v_dep;
            break;
        case Attack::hydra_bob:
            sc.protocol = Protocol::mad;
            sc.v_col = i64("v_col");
            run.prof.bob.kind = BobKind::hydra_briber;
            run.prof.miners = {{MinerKind::hydra_accomplice}, {MinerKind::hydra_accomplice}};
            run.party = "bob";
            run.offset = sc.v_dep + sc.v_col;
            break;
        case Attack::sdrba_worst:
            sc.protocol = Protocol::mad;
            sc.v_col = i64("v_col");
            sc.f = 0;
            sc.f_col_b = 0;
            run.prof.bob.kind = BobKind::sdrba_seller;
            run.prof.miners = {{MinerKind::sdrba_briber}, {MinerKind::honest_fee_max}};
            run.party = "miner";
            run.who = 4;
            break;
        case Attack::m2mba_perblock:
        case Attack::m2mba_equal: {
            sc.protocol = Protocol::he;
            sc.v_col = i64("v_col");
            sc.l = 2;
            sc.f = 0;
            sc.f_dep_a = 0;
            sc.f_dep_b = 0;
            sc.split = a == Attack::m2mba_perblock ? BribeSplit::per_block : BribeSplit::equal;
            sc.miners = {{"M1", Rational(1, 2), true, true}, {"M2", Rational(1, 2), true, true}};
            run.prof.miners = {{MinerKind::m2mba_active}, {MinerKind::m2mba_active}};
            run.party = "miner";
            run.who = 4;
            std::int64_t ki = i64("k_i");
            if (ki < 0 || ki > sc.T) throw Error("bad-parameters", "need 0 <= k_i <= k");
            H = sc.effective_horizon();
            run.sched.miners.clear();
            for (Round r = 1; r <= H; ++r) run.sched.miners.push_back(r <= ki || r > sc.T ? 0 : 1);
            return run;
        }
        case Attack::hydra_alice: throw Error("not-simulated", "Alice-side reverse bribery has no engine policy");
    }
    // M2 mines throughout; in SDRBA the briber M1 takes round 1
    H = sc.effective_horizon();
    run.sched.miners.assign(H, 1);
    if (a == Attack::sdrba_worst) run.sched.miners[0] = 0;
    return run;
}

inline Rational simulate_attack(Attack a, const Params& p) {
    auto run = attack_run(a, p);
    auto o = play(run.sc, run.prof, run.sched);
    std::int64_t v = o.delta[run.who] + run.offset;
    if (run.party == "miner") v -= o.unrelated[run.who];
    return v;
}

// ---- verdicts --------------------------------------------------------------

struct LemmaVerdict {
    std::string id;
    bool hypothesis = false;
    bool conclusion = false;
    bool consistent = false;
    Rational margin;  // simulated difference the conclusion is about
    Rational lhs, rhs;  // the hypothesis inequality, both sides

    void close() { consistent = !hypothesis || conclusion; }
};

namespace detail {

inline Metric miner_metric() { return Metric{1, 0, 0, 0, 0}; }

inline Rational utility(const Scenario& sc, const StrategyProfile& p, PartyId who, const Metric& m = {}) {
    return expected_utilities(sc, p, m).mean.at(who);
}

inline PartyId miner_party(int i) { return 4 + i; }  // alice, bob, burn, users, miners...

inline StrategyProfile with_all(const Scenario& sc, MinerKind colluder, MinerKind other) {
    StrategyProfile p;
    for (const auto& m : sc.miners) p.miners.push_back({m.colluding ? colluder : other});
    return p;
}

inline void require_he(const Scenario& sc) {
    if (sc.protocol != Protocol::he) throw Error("protocol-mismatch", "M2MBA lemmas need an he scenario");
}

} // namespace detail

// Lemma n for miner `focus`; t_y is the deferral round for Lemma 4 (0: T+2).
inline LemmaVerdict verify_m2mba_lemma(int n, const Scenario& base, int focus = 0, Round t_y = 0) {
    detail::require_he(base);
    if (focus < 0 || focus >= static_cast<int>(base.miners.size())) throw Error("bad-focus", "no such miner");
    Scenario sc = base;
    sc.exact = true;
    sc.cond = {};
    const Round k = sc.T - sc.t_pub;
    const Rational li = sc.miners[focus].power;
    const Rational lc = sc.lambda_col();
    const PartyId me = detail::miner_party(focus);
    LemmaVerdict v;
    v.id = "lemma" + std::to_string(n);
    auto x = [&] { return lc == 0 ? Rational(0) : li / lc; };

    switch (n) {
        case 1:
        case 2: {
            if (!sc.miners[focus].colluding) throw Error("bad-focus", "focus miner must collude");
            sc.cond = {sc.t_pub + 1, sc.T + 1, true, {}};
            auto attack = detail::with_all(sc, MinerKind::m2mba_active, MinerKind::honest_fee_max);
            auto alt = attack;
            alt.miners[focus].kind = n == 1 ? MinerKind::m2mba_include : MinerKind::honest_fee_max;
            alt.alice.t_pub = attack.alice.t_pub = sc.t_pub;
            v.lhs = n == 1 ? Rational(k) * sc.br * x() : Rational(sc.v_col) * x() + Rational(k) * sc.br * (2 * x() - 1);
            v.rhs = sc.f_dep_a;
            v.margin = detail::utility(sc, attack, me) - detail::utility(sc, alt, me);
            break;
        }
        case 3: {
            auto attack = detail::with_all(sc, MinerKind::m2mba_passive, MinerKind::m2mba_passive);
            auto alt = attack;
            alt.miners[focus].kind = MinerKind::include_confiscate;
            v.lhs = Rational(sc.v_col) * li;
            v.rhs = sc.f_dep_a;
            v.margin = detail::utility(sc, attack, me) - detail::utility(sc, alt, me);
            break;
        }
        case 4: {
            Round ty = t_y > 0 ? t_y : sc.T + 2;
            Round l = sc.delay_l();
            if (ty < sc.T + 1 || ty > sc.T + l) throw Error("bad-parameters", "t_y outside [T+1, T+l]");
            sc.cond.pins[sc.T + 1] = focus;
            auto now = detail::with_all(sc, MinerKind::m2mba_passive, MinerKind::m2mba_passive);
            now.miners[focus] = {MinerKind::m2mba_active, sc.T + 1};
            auto later = now;
            later.miners[focus].defer_to = ty;
            // z: confiscation net of Bob's refund fee and the displaced unrelated slot
            Rational z = Rational(sc.v_col - sc.f_dep_b) - sc.f;
            v.lhs = z;
            v.rhs = sc.f_dep_a;
            v.margin = detail::utility(sc, now, me) - detail::utility(sc, later, me);
            // decreasing in t_y needs x < 1 once t_y > T+1
            bool decays = ty == sc.T + 1 || li < 1;
            v.hypothesis = z > sc.f_dep_a && decays;
            v.conclusion = ty == sc.T + 1 ? v.margin >= 0 : v.margin > 0;
            v.close();
            return v;
        }
        case 5: {
            if (!sc.miners[focus].colluding) throw Error("bad-focus", "focus miner must collude");
            int pin = -1;
            for (int i = 0; i < static_cast<int>(sc.miners.size()); ++i)
                if (i != focus && sc.miners[i].colluding) pin = i;
            if (pin < 0) throw Error("bad-parameters", "Lemma 5 needs a second colluder");
            sc.cond = {sc.t_pub + 1, sc.T, true, {{sc.T + 1, pin}}};
            // br_i = f_dep_A / (x k) rounded up, plus eps
            Rational need_br = k > 0 && x() > 0 ? Rational(sc.f_dep_a) / (x() * k) : Rational(0);
            std::int64_t br_i = ceil_to_int(need_br) + sc.eps;
            sc.br_for[focus] = br_i;
            auto prof = detail::with_all(sc, MinerKind::m2mba_active, MinerKind::honest_fee_max);
            prof.miners[focus].kind = MinerKind::m2mba_accept;
            Metric bribes{0, 0, 0, 1, 0};
            Rational got = detail::utility(sc, prof, me, bribes);
            v.lhs = Rational(sc.f_dep_a) + x() * k * sc.eps;
            v.rhs = sc.f_dep_a;
            v.margin = got - sc.f_dep_a;
            v.hypothesis = sc.eps > 0;
            v.conclusion = got > sc.f_dep_a && got == x() * k * br_i;
            v.close();
            return v;
        }
        default: throw Error("bad-lemma", "M2MBA lemmas are 1..5");
    }
    v.hypothesis = v.lhs > v.rhs;
    v.conclusion = v.margin > 0;
    v.close();
    return v;
}

// ---- Theorem 1 ---------------------------------------------------------------

struct MinerRow {
    int miner = 0;
    bool active = false;
    std::vector<std::pair<std::string, bool>> hypotheses;  // lemma id -> holds
    DominanceVerdict dominance;
};

struct TheoremVerdict {
    bool ok = true;
    bool hypotheses_hold = true;
    std::vector<MinerRow> rows;
};

// Per-miner best response against the attack profile: active colluders run
// the bribing policy, everyone else waits and confiscates.
inline StrategyProfile m2mba_attack_profile(const Scenario& sc) {
    StrategyProfile p;
    for (const auto& m : sc.miners) p.miners.push_back({m.active && m.colluding ? MinerKind::m2mba_active : MinerKind::m2mba_passive});
    p.alice.t_pub = sc.t_pub;
    return p;
}

inline TheoremVerdict verify_theorem_m2mba(const Scenario& base, const std::vector<MinerKind>& active_space = {},
                                           const std::vector<MinerKind>& passive_space = {}) {
    detail::require_he(base);
    Scenario sc = base;
    sc.exact = true;
    sc.cond = {};
    std::vector<MinerKind> act = active_space.empty()
                                     ? std::vector<MinerKind>{MinerKind::m2mba_active, MinerKind::m2mba_include,
                                                              MinerKind::honest_fee_max}
                                     : active_space;
    std::vector<MinerKind> pas = passive_space.empty()
                                     ? std::vector<MinerKind>{MinerKind::m2mba_passive, MinerKind::include_confiscate,
                                                              MinerKind::honest_fee_max}
                                     : passive_space;
    TheoremVerdict out;
    auto attack = m2mba_attack_profile(sc);
    const Round k = sc.T - sc.t_pub;
    const Rational lc = sc.lambda_col();
    for (int i = 0; i < static_cast<int>(sc.miners.size()); ++i) {
        MinerRow row;
        row.miner = i;
        row.active = sc.miners[i].active && sc.miners[i].colluding;
        Rational li = sc.miners[i].power;
        if (row.active) {
            Rational x = li / lc;
            row.hypotheses.push_back({"lemma1", Rational(k) * sc.br * x > sc.f_dep_a});
            row.hypotheses.push_back({"lemma2", Rational(sc.v_col) * x + Rational(k) * sc.br * (2 * x - 1) > sc.f_dep_a});
        } else {
            row.hypotheses.push_back({"lemma3", Rational(sc.v_col) * li > sc.f_dep_a});
        }
        for (const auto& [id, ok] : row.hypotheses) out.hypotheses_hold = out.hypotheses_hold && ok;
        std::vector<StrategyProfile> own;
        for (auto kind : row.active ? act : pas) {
            auto p = attack;
            p.miners[i].kind = kind;
            own.push_back(p);
        }
        row.dominance = dominance_check(sc, Player{Player::miner, i}, own, {attack});
        if (row.dominance.verdict == Dominance::none) out.ok = false;
        out.rows.push_back(std::move(row));
    }
    return out;
}

// ---- DEMBA ---------------------------------------------------------------------

struct DembaSpaces {
    std::vector<AlicePolicy> alice;
    std::vector<BobPolicy> bob;
    std::vector<MinerPolicy> miner;  // for miner 0; the rest stay honest
};

inline DembaSpaces default_demba_spaces() {
    DembaSpaces d;
    d.alice = {{AliceKind::honest}, {AliceKind::offline_then_refund}, {AliceKind::grief_double_reveal},
               {AliceKind::censored_fallback}, {AliceKind::silent}};
    BobPolicy delay1{BobKind::delay};
    delay1.delay = 1;
    d.bob = {{BobKind::honest}, delay1, {BobKind::silent}, {BobKind::bribe_censor}};
    d.miner = {{MinerKind::honest_fee_max}, {MinerKind::censor_alice}, {MinerKind::censor_bob}, {MinerKind::lagging}};
    return d;
}

struct DeviationRow {
    std::string player;
    std::string policy;
    Rational utility;   // net: own payouts minus own funding of the deposit
    Rational gain;      // versus honest
    std::string state;  // most likely final label
};

struct DembaVerdict {
    bool ok = true;
    bool alice_best_ab = true;   // (a)
    bool bob_best_b = true;      // (b)
    bool fees_decay = true;      // (c)
    int profitable = 0;          // (d)
    bool collusion_bound = true; // (e)
    Rational grief_loss, grief_collateral_loss, delay_loss;
    std::vector<DeviationRow> rows;
    std::vector<std::string> notes;
};

namespace detail {

// Net as the parties see it: deltas plus their own collateral back at par.
inline Rational demba_net(const Scenario& sc, const UtilityVector& u, PartyId p) {
    if (p == 0) return u.mean[0] + sc.v_col_a;
    if (p == 1) return u.mean[1] + sc.v_col_b;
    return u.mean[p];
}

inline std::string final_state(const Scenario& sc, const StrategyProfile& prof) {
    Schedule s;
    s.miners.assign(sc.effective_horizon(), 0);
    auto o = play(sc, prof, s, true);
    return o.labels.empty() ? "" : label_name(o.labels.back());
}

} // namespace detail

// Does including a DEMBA path by T always out-earn including it later?
inline bool demba_fees_decay(const FeeSchedule& fs, Round horizon) {
    for (const auto& [p, paid] : fs.paid) {
        if (paid.value() == 0) continue;
        auto e_by_t = fee_split(p, paid, fs.T, fs).earned;
        for (Round t = fs.T + 1; t <= horizon; ++t)
            if (!(fee_split(p, paid, t, fs).earned < e_by_t)) return false;
    }
    return true;
}

inline DembaVerdict verify_demba(const Scenario& base, const DembaSpaces& spaces = default_demba_spaces()) {
    if (base.protocol != Protocol::demba) throw Error("protocol-mismatch", "verify_demba needs a demba scenario");
    auto fs = base.fee_schedule();
    auto sv = check_fee_schedule(fs, base.effective_horizon());
    if (!sv.ok) throw Error("invalid-schedule", sv.violation);
    Scenario sc = base;
    sc.exact = true;
    DembaVerdict out;
    StrategyProfile honest = sc.honest_profile();
    auto u_h = expected_utilities(sc, honest);
    Rational a_h = detail::demba_net(sc, u_h, 0), b_h = detail::demba_net(sc, u_h, 1), m_h = u_h.mean[4];

    auto row = [&](const std::string& who, const std::string& pol, Rational u, Rational ref, const StrategyProfile& p) {
        out.rows.push_back({who, pol, u, u - ref, detail::final_state(sc, p)});
        if (u > ref) ++out.profitable;
    };

    for (const auto& a : spaces.alice) {
        auto p = honest;
        p.alice = a;
        auto u = expected_utilities(sc, p);
        Rational na = detail::demba_net(sc, u, 0);
        row("alice", name_of(a.kind), na, a_h, p);
        bool ab = out.rows.back().state == "nred-AB" || out.rows.back().state == "nred-ABT";
        if (na > a_h || (!ab && !(na < a_h))) out.alice_best_ab = false;
        if (a.kind == AliceKind::grief_double_reveal) {
            out.grief_loss = a_h - na;
            // the deposit goes to the burn; what is left is the collateral-side loss
            out.grief_collateral_loss = out.grief_loss - sc.v_dep;
        }
        if (detail::demba_net(sc, u, 1) > sc.v_col_b) out.collusion_bound = false;
    }
    for (const auto& b : spaces.bob) {
        auto p = honest;
        p.bob = b;
        auto u = expected_utilities(sc, p);
        Rational nb = detail::demba_net(sc, u, 1);
        std::string name = name_of(b.kind);
        if (b.kind == BobKind::delay) name += "(" + std::to_string(b.delay) + ")";
        row("bob", name, nb, b_h, p);
        const auto& st = out.rows.back().state;
        bool in_b = st == "nred-AB" || st == "nred-A'B" || st == "nred-AA'B";
        if (nb > b_h || (!in_b && !(nb < b_h))) out.bob_best_b = false;
        if (b.kind == BobKind::delay) out.delay_loss = b_h - nb;
        if (detail::demba_net(sc, u, 0) > Rational(sc.v_dep + sc.v_col_a)) out.collusion_bound = false;
    }
    for (const auto& m : spaces.miner) {
        auto p = honest;
        p.miners[0] = m;
        auto u = expected_utilities(sc, p);
        row("M1", name_of(m.kind), u.mean[4], m_h, p);
    }
    out.fees_decay = demba_fees_decay(fs, sc.effective_horizon());
    if (fs.alpha == 1) out.notes.push_back("alpha = 1: post-T inclusion is not penalised");
    out.ok = out.profitable == 0 && out.alice_best_ab && out.bob_best_b && out.collusion_bound;
    return out;
}

// Lemma 6: Alice's honest redemption beats her two post-T choices.
inline LemmaVerdict verify_demba_lemma6(const Scenario& base) {
    Scenario sc = base;
    sc.exact = true;
    LemmaVerdict v;
    v.id = "lemma6";
    auto honest = sc.honest_profile();
    Rational h = expected_utilities(sc, honest).mean[0];
    Rational best_alt;
    bool first = true;
    for (auto k : {AliceKind::offline_then_refund, AliceKind::grief_double_reveal}) {
        auto p = honest;
        p.alice.kind = k;
        Rational u = expected_utilities(sc, p).mean[0];
        if (first || u > best_alt) best_alt = u;
        first = false;
    }
    v.lhs = sc.v_ded;
    v.rhs = 0;
    v.hypothesis = sc.v_ded > 0;
    v.margin = h - best_alt;
    v.conclusion = v.margin > 0;
    v.close();
    return v;
}

// Lemma 7: revealing pre_B by T beats delay(d) by exactly v_ded.
inline LemmaVerdict verify_demba_lemma7(const Scenario& base, Round d = 1) {
    Scenario sc = base;
    sc.exact = true;
    LemmaVerdict v;
    v.id = "lemma7";
    auto honest = sc.honest_profile();
    auto late = honest;
    late.bob.kind = BobKind::delay;
    late.bob.delay = d;
    v.margin = expected_utilities(sc, honest).mean[1] - expected_utilities(sc, late).mean[1];
    v.lhs = sc.v_ded;
    v.rhs = 0;
    v.hypothesis = sc.v_ded > 0;
    v.conclusion = v.margin > 0;
    v.close();
    return v;
}

// Lemma 8: with alpha < 1 a miner earns more by including on time than by
// censoring Alice into her post-T fallback.
inline LemmaVerdict verify_demba_lemma8(const Scenario& base) {
    Scenario sc = base;
    sc.exact = true;
    LemmaVerdict v;
    v.id = "lemma8";
    auto honest = sc.honest_profile();
    honest.alice.kind = AliceKind::censored_fallback;
    auto censor = honest;
    for (auto& m : censor.miners) m.kind = MinerKind::censor_alice;
    Rational uh = 0, uc = 0;
    auto a = expected_utilities(sc, honest), b = expected_utilities(sc, censor);
    for (std::size_t i = 0; i < sc.miners.size(); ++i) {
        uh += a.mean[4 + i];
        uc += b.mean[4 + i];
    }
    v.lhs = sc.alpha;
    v.rhs = 1;
    v.hypothesis = sc.alpha < 1;
    v.margin = uh - uc;
    v.conclusion = v.margin > 0 && demba_fees_decay(sc.fee_schedule(), sc.effective_horizon());
    v.close();
    return v;
}

// ---- lemma grids ----------------------------------------------------------------

inline Scenario he_lemma_base() {
    Scenario sc;
    sc.protocol = Protocol::he;
    sc.v_dep = 100;
    sc.v_col = 60;
    sc.T = 4;
    sc.t_pub = 0;
    sc.l = 2;
    sc.f = 0;
    sc.br = 2;
    sc.f_dep_a = 1;
    sc.f_dep_b = 1;
    sc.f_col_b = 0;
    sc.split = BribeSplit::per_block;
    sc.miners = {{"M1", Rational(3, 10), true, true}, {"M2", Rational(3, 10), true, true}, {"M3", Rational(2, 5)}};
    return sc;
}

inline Scenario demba_base() {
    Scenario sc;
    sc.protocol = Protocol::demba;
    sc.v_dep = 100;
    sc.v_col_a = 40;
    sc.v_col_b = 40;
    sc.v_ded = 5;
    sc.f = 1;
    sc.fee_pre_a = 8;
    sc.fee_pre_a2 = 9;
    sc.fee_pre_aa2 = 10;
    sc.fee_pre_b = 8;
    sc.alpha = Rational(1, 2);
    sc.T = 3;
    sc.miners = {{"M1", Rational(1, 2)}, {"M2", Rational(1, 2)}};
    return sc;
}

struct GridPoint {
    Scenario sc;
    int focus = 0;
    Round t_y = 0;
    Round d = 1;  // Bob's delay for Lemma 7
};

inline std::vector<GridPoint> lemma_grid(int n) {
    std::vector<GridPoint> out;
    const std::vector<std::pair<Rational, Rational>> col_powers = {
        {Rational(1, 10), Rational(3, 10)}, {Rational(3, 10), Rational(3, 10)}, {Rational(1, 2), Rational(1, 4)},
        {Rational(1, 5), Rational(3, 5)}};
    auto three = [](Scenario& sc, Rational a, Rational b, bool collude) {
        sc.miners = {{"M1", a, collude, collude}, {"M2", b, collude, collude}, {"M3", 1 - a - b}};
    };
    if (n == 1 || n == 2) {
        for (auto [a, b] : col_powers)
            for (std::int64_t br : {0, 1, 2, 5})
                for (std::int64_t fa : {0, 1, 3, 8, 20})
                    for (Round T : {2, 4})
                        for (std::int64_t vc : {30, 60}) {
                            GridPoint g{he_lemma_base()};
                            three(g.sc, a, b, true);
                            g.sc.br = br;
                            g.sc.f_dep_a = fa;
                            g.sc.T = T;
                            g.sc.v_col = vc;
                            out.push_back(g);
                        }
    } else if (n == 3) {
        for (Rational a : {Rational(1, 10), Rational(1, 5), Rational(3, 10), Rational(1, 2)})
            for (std::int64_t vc : {10, 30, 60})
                for (std::int64_t fa : {0, 1, 3, 6, 12, 25})
                    for (Round T : {2, 4}) {
                        GridPoint g{he_lemma_base()};
                        three(g.sc, a, (1 - a) / 2, false);
                        g.sc.v_col = vc;
                        g.sc.f_dep_a = fa;
                        g.sc.T = T;
                        out.push_back(g);
                    }
    } else if (n == 4) {
        for (Rational a : {Rational(1, 5), Rational(1, 2), Rational(1)})
            for (std::int64_t vc : {5, 20, 60})
                for (std::int64_t fa : {0, 2, 10, 30})
                    for (std::int64_t f : {0, 1})
                        for (Round l : {2, 3})
                            for (Round dy = 0; dy < l; ++dy) {
                                GridPoint g{he_lemma_base()};
                                if (a == 1) g.sc.miners = {{"M1", Rational(1), true, true}};
                                else three(g.sc, a, (1 - a) / 2, false);
                                g.sc.T = 2;
                                g.sc.v_col = vc;
                                g.sc.f_dep_a = fa;
                                g.sc.f = f;
                                g.sc.l = l;
                                g.t_y = g.sc.T + 1 + dy;
                                out.push_back(g);
                            }
    } else if (n == 5) {
        for (auto [a, b] : col_powers)
            for (std::int64_t fa : {0, 1, 3, 7})
                for (std::int64_t eps : {0, 1, 2})
                    for (Round T : {2, 3, 4}) {
                        GridPoint g{he_lemma_base()};
                        three(g.sc, a, b, true);
                        g.sc.f_dep_a = fa;
                        g.sc.eps = eps;
                        g.sc.T = T;
                        g.sc.v_col = 200;
                        out.push_back(g);
                    }
    } else if (n >= 6 && n <= 8) {
        struct Fees { std::int64_t a, a2, aa2, b; };
        for (std::int64_t vd : {50, 100})
            for (std::int64_t ca : {20, 40})
                for (std::int64_t cb : {20, 40})
                    for (std::int64_t ded : {0, 1, 5})
                        for (Rational al : {Rational(1, 2), n == 8 ? Rational(1) : Rational(3, 4)})
                            for (Round T : {2, 3})
                                for (Fees fs : {Fees{8, 9, 10, 8}, Fees{4, 6, 9, 3}}) {
                                    GridPoint g{demba_base()};
                                    g.sc.v_dep = vd;
                                    g.sc.v_col_a = ca;
                                    g.sc.v_col_b = cb;
                                    g.sc.v_ded = ded;
                                    g.sc.alpha = al;
                                    g.sc.T = T;
                                    g.sc.fee_pre_a = fs.a;
                                    g.sc.fee_pre_a2 = fs.a2;
                                    g.sc.fee_pre_aa2 = fs.aa2;
                                    g.sc.fee_pre_b = fs.b;
                                    g.d = 1 + (ded % 2);
                                    out.push_back(g);
                                }
    } else {
        throw Error("bad-lemma", "lemmas are 1..8");
    }
    return out;
}

inline LemmaVerdict verify_lemma(int n, const GridPoint& g) {
    switch (n) {
        case 6: return verify_demba_lemma6(g.sc);
        case 7: return verify_demba_lemma7(g.sc, g.d);
        case 8: return verify_demba_lemma8(g.sc);
        default: return verify_m2mba_lemma(n, g.sc, g.focus, g.t_y);
    }
}

// ---- solo vs pool ----------------------------------------------------------------

struct PoolParams {
    Rational h{1, 10}, H{1};
    std::int64_t N = 1;
    Rational R{1};
    Rational f_pool{0};
    Rational lambda_net{100};
    double alpha_risk = 1.0;
};

struct PoolReport {
    Rational lambda_i, E_solo, E_pool, ratio, Var_solo, Var_pool;
    double dU = 0, EU_solo = 0, EU_pool = 0;
};

inline void check_pool(const PoolParams& p) {
    if (!(p.h > 0 && p.h <= p.H)) throw Error("bad-parameters", "need 0 < h <= H");
    if (p.N < 1) throw Error("bad-parameters", "N must be at least 1");
    if (p.f_pool < 0) throw Error("bad-parameters", "f_pool must be non-negative");
    if (p.f_pool >= 1) throw Error("bad-parameters", "f_pool must be below 1");
}

inline PoolReport pool_math(const PoolParams& p) {
    check_pool(p);
    PoolReport r;
    r.lambda_i = p.h / p.H * p.lambda_net;
    r.E_solo = r.lambda_i * p.R;
    r.E_pool = (1 - p.f_pool) * r.E_solo;
    r.ratio = 1 / (1 - p.f_pool);
    r.Var_solo = r.lambda_i * p.R * p.R;
    r.Var_pool = r.Var_solo / p.N;
    double a = p.alpha_risk, E = to_double(r.E_solo), V = to_double(r.Var_solo), f = to_double(p.f_pool);
    double n = double(p.N);
    r.dU = -std::exp(-a * E) * (a * f * E - a * a * V / 2 + a * a * V / (2 * n));
    r.EU_solo = -std::exp(-a * E) * (1 - a * a * V / 2);
    r.EU_pool = -std::exp(-a * to_double(r.E_pool)) * (1 - a * a * to_double(r.Var_pool) / 2);
    return r;
}

struct PoolSample {
    double mean_solo = 0, var_solo = 0, mean_pool = 0, var_pool = 0;
    double se_mean_solo = 0, se_var_solo = 0, se_mean_pool = 0, se_var_pool = 0;
};

namespace detail {
struct Moments {
    double n = 0, mean = 0, m2 = 0, m3 = 0, m4 = 0;
    void add(double x) {  // streaming central moments
        double n1 = n;
        n += 1;
        double d = x - mean, dn = d / n, dn2 = dn * dn, t = d * dn * n1;
        mean += dn;
        m4 += t * dn2 * (n * n - 3 * n + 3) + 6 * dn2 * m2 - 4 * dn * m3;
        m3 += t * dn * (n - 2) - 3 * dn * m2;
        m2 += t;
    }
    double var() const { return n > 1 ? m2 / (n - 1) : 0; }
    double se_mean() const { return std::sqrt(var() / n); }
    double se_var() const {
        double mu4 = m4 / n, s2 = m2 / n;
        return std::sqrt(std::max(0.0, mu4 - s2 * s2) / n);
    }
};
} // namespace detail

// Solo: X ~ Poisson(lambda_i) blocks. Pool of N equal members: the pool finds
// Y ~ Poisson(N lambda_i); each member gets Y R / N less a flat fee f E_solo.
inline PoolSample pool_mc(const PoolParams& p, std::int64_t trials, std::uint64_t seed) {
    check_pool(p);
    if (trials < 1) throw Error("bad-parameters", "trials must be at least 1");
    double li = to_double(p.h / p.H * p.lambda_net), R = to_double(p.R), f = to_double(p.f_pool);
    detail::Moments solo, pool;
    std::mt19937_64 rng(seed);
    if (li > 0) {
        std::poisson_distribution<std::int64_t> xs(li), ys(li * double(p.N));
        for (std::int64_t t = 0; t < trials; ++t) {
            solo.add(double(xs(rng)) * R);
            pool.add(double(ys(rng)) * R / double(p.N) - f * li * R);
        }
    } else {
        for (std::int64_t t = 0; t < trials; ++t) {
            solo.add(0);
            pool.add(0);
        }
    }
    return {solo.mean, solo.var(), pool.mean, pool.var(), solo.se_mean(), solo.se_var(), pool.se_mean(), pool.se_var()};
}

// ---- fee schedule -------------------------------------------------------------------

inline ScheduleVerdict fee_schedule_check(const FeeSchedule& s, Round horizon) {
    if (horizon <= s.T) throw Error("bad-parameters", "horizon must exceed T");
    return check_fee_schedule(s, horizon);
}

} // namespace arena
