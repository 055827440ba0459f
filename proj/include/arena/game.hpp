#pragma once

#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "agents.hpp"

namespace arena {

// ---- state labels ----------------------------------------------------------

enum class GameStateLabel : std::uint8_t {
    red,
    nred_nrev,
    nred_rev,
    nred_a,
    all_red,
    nred_ab,
    nred_a2b,
    nred_aa2b,
    nred_abt,
    nred_a2bt,
    nred_aa2bt
};

inline const char* label_name(GameStateLabel l) {
    static const char* n[] = {"red",     "nred-nrev", "nred-rev",   "nred-A",    "all-red",   "nred-AB",
                              "nred-A'B", "nred-AA'B", "nred-ABT", "nred-A'BT", "nred-AA'BT"};
    return n[static_cast<int>(l)];
}

inline GameStateLabel state_label(const GameState& g, Round round) {
    const auto& s = g.s;
    const auto& lay = g.lay;
    Protocol p = g.scen().protocol;
    Round T = g.scen().T;
    if (p == Protocol::demba) {
        const auto& a = s.contracts[lay.col_a];
        const auto& b = s.contracts[lay.col_b];
        if (a.status != ContractStatus::redeemed || b.status != ContractStatus::redeemed) return GameStateLabel::all_red;
        bool late = b.redeemed_round > T;
        int which = a.redeemed_path == "col-pre_A" ? 0 : a.redeemed_path == "col-pre_A'" ? 1 : 2;
        return static_cast<GameStateLabel>(static_cast<int>(GameStateLabel::nred_ab) + which + (late ? 3 : 0));
    }
    const auto& d = s.contracts[lay.dep];
    if (d.live()) return GameStateLabel::red;
    if (d.redeemed_path == "dep-A") return GameStateLabel::nred_a;
    return public_preimage(g, kPreA, round + 1) ? GameStateLabel::nred_rev : GameStateLabel::nred_nrev;
}

// ---- outcome ---------------------------------------------------------------

// Linear utility: a*delta + b*funded + c*unrelated + d*bribes + k.
struct Metric {
    std::int64_t delta = 1, funded = 0, unrelated = 0, bribes = 0, constant = 0;
};

struct Outcome {
    std::vector<std::string> names;
    std::vector<std::int64_t> delta, funded, unrelated, bribes;
    std::int64_t burned = 0, minted = 0;
    std::vector<GameStateLabel> labels;
    std::string resolution = "pending";
    Round final_transfer = -1;
    std::map<std::string, Round> redeemed;  // "dep", "col", "col_a", "col_b" -> round
    std::vector<Block> blocks;

    std::int64_t metric(const Metric& m, PartyId p) const {
        return m.delta * delta[p] + m.funded * funded[p] + m.unrelated * unrelated[p] + m.bribes * bribes[p] +
               m.constant;
    }
};

struct Schedule {
    std::vector<int> miners;  // miner index per round, rounds 1..n
    Rational weight = 1;
};

// ---- setup -----------------------------------------------------------------

namespace detail {

inline bool he_only(MinerKind k) {
    return k == MinerKind::m2mba_active || k == MinerKind::m2mba_accept || k == MinerKind::m2mba_include;
}
inline bool mad_only(MinerKind k) {
    return k == MinerKind::b3a_accomplice || k == MinerKind::sdrba_briber || k == MinerKind::hydra_accomplice;
}

inline void check_profile(const Scenario& sc, const StrategyProfile& p) {
    auto bad = [](std::string why) { throw Error("inconsistent-profile", why); };
    if (p.miners.size() != sc.miners.size()) bad("one miner policy per miner");
    for (const auto& m : p.miners) {
        if (he_only(m.kind) && sc.protocol != Protocol::he) bad(std::string(name_of(m.kind)) + " needs he");
        if (mad_only(m.kind) && sc.protocol != Protocol::mad) bad(std::string(name_of(m.kind)) + " needs mad");
        if ((m.kind == MinerKind::m2mba_passive || m.kind == MinerKind::include_confiscate) &&
            sc.protocol != Protocol::he && sc.protocol != Protocol::mad)
            bad(std::string(name_of(m.kind)) + " needs he or mad");
    }
    auto bk = p.bob.kind;
    if ((bk == BobKind::b3a || bk == BobKind::hydra_briber || bk == BobKind::sdrba_seller) && sc.protocol != Protocol::mad)
        bad(std::string(name_of(bk)) + " needs mad");
    if (bk == BobKind::naive_briber && sc.protocol != Protocol::naive) bad("naive-briber needs naive");
    if (bk == BobKind::bribe_censor && sc.protocol != Protocol::demba) bad("bribe-censor needs demba");
    auto ak = p.alice.kind;
    if ((ak == AliceKind::grief_double_reveal || ak == AliceKind::offline_then_refund) && sc.protocol != Protocol::demba)
        bad(std::string(name_of(ak)) + " needs demba");
}

} // namespace detail

inline GameState setup_game(const Scenario& sc, const StrategyProfile& prof) {
    detail::check_profile(sc, prof);
    GameState g;
    g.sc = &sc;
    g.prof = &prof;
    auto& s = g.s;
    auto& lay = g.lay;
    lay.alice = s.add_party("alice", Role::alice, sc.endowment);
    lay.bob = s.add_party("bob", Role::bob, sc.endowment);
    lay.burn = s.add_party("burn", Role::burn_sink);
    lay.users = s.add_party("users", Role::external_user, std::int64_t(1) << 50);
    for (std::size_t i = 0; i < sc.miners.size(); ++i)
        lay.miners.push_back(s.add_party(sc.miners[i].name.empty() ? "M" + std::to_string(i + 1) : sc.miners[i].name,
                                         Role::miner, sc.endowment));
    s.unrelated_fee = sc.f;
    for (auto b : s.balances) g.start.push_back(b.value());

    Digests d = secret_digests();
    switch (sc.protocol) {
        case Protocol::naive: lay.dep = s.deploy(build_naive_htlc(lay.alice, lay.bob, sc.v_dep, d.pre_A, sc.T), lay.bob); break;
        case Protocol::mad: {
            auto [dep, col] = build_mad_htlc(lay.alice, lay.bob, sc.v_dep, sc.v_col, d, sc.T);
            lay.dep = s.deploy(dep, lay.bob);
            lay.col = s.deploy(col, lay.bob);
            break;
        }
        case Protocol::he: {
            auto [dep, col] = build_he_htlc(lay.alice, lay.bob, sc.v_dep, sc.v_col, d, sc.T, sc.delay_l());
            lay.dep = s.deploy(dep, lay.bob);
            lay.col = s.deploy(col, lay.bob);
            break;
        }
        case Protocol::demba: {
            auto fs = sc.fee_schedule();
            auto dm = build_demba(lay.alice, lay.bob, sc.v_dep, sc.v_col_a, sc.v_col_b, sc.v_ded, d, sc.T, fs, 0, true);
            s.fees = fs;
            lay.dep = s.deploy(dm.dep, lay.bob);
            lay.col_a = s.deploy(dm.col_a, lay.alice);
            lay.col_b = s.deploy(dm.col_b, lay.bob);
            break;
        }
    }
    for (std::size_t p = 0; p < s.balances.size(); ++p) g.funded.push_back(g.start[p] - s.balances[p].value());

    switch (prof.bob.kind) {
        case BobKind::naive_briber:
            lay.c_bob = s.add_bribery(make_c_bob(lay.bob, sc.br, sc.T, d.pre_A, lay.dep, lay.dep, "dep-B", sc.f_dep_b, 0));
            break;
        case BobKind::b3a:
        case BobKind::hydra_briber:
            lay.c_bob = s.add_bribery(make_c_bob(lay.bob, sc.br, sc.T, d.pre_A, lay.dep, lay.dep, "dep-M", 0, 0));
            break;
        case BobKind::bribe_censor: {
            auto c = make_c_bob(lay.bob, sc.br, sc.T, d.pre_A, lay.col_a, lay.col_b, "col-pre_B", 0, 0);
            c.target_path = "col-pre_A";
            lay.c_bob = s.add_bribery(c);
            break;
        }
        default: break;
    }
    bool coalition = std::any_of(prof.miners.begin(), prof.miners.end(), [](const MinerPolicy& m) {
        return m.kind == MinerKind::m2mba_active || m.kind == MinerKind::m2mba_include || m.kind == MinerKind::m2mba_accept;
    });
    if (coalition) {
        auto c = make_c_m2m(sc.br, sc.T, d.pre_A, lay.dep, lay.col, sc.v_col, sc.split);
        for (const auto& [idx, v] : sc.br_for) c.br_for[lay.miners.at(idx)] = v;
        lay.c_m2m = s.add_bribery(c);
        for (std::size_t i = 0; i < prof.miners.size(); ++i) {
            auto k = prof.miners[i].kind;
            if (k != MinerKind::m2mba_active && k != MinerKind::m2mba_include) continue;
            s.debit(lay.miners[i], sc.v_col, kFlowEscrow);
            s.bribery[lay.c_m2m].lock[lay.miners[i]] += sc.v_col;
        }
    }
    alice_acts(g, 0);
    bob_acts(g, 0);
    return g;
}

// ---- one round -------------------------------------------------------------

namespace detail {

inline bool call_applies(const ChainState& s, const TxRecord& t, Round r, PartyId miner) {
    if (t.kind != TxRecord::contract_call || !t.call) return true;
    const auto& b = s.bribery.at(t.call->target);
    BriberyContract probe = b;
    CallContext ctx{r, t.creator, miner, &s.contracts};
    return bribery_contract_step(probe, *t.call, ctx).applied;
}

// Fills `b` from the candidates; false if a required (deal) transaction fails.
inline bool assemble(ChainState& s, Block& b, const std::vector<Candidate>& cands, bool all_required) {
    check_header(s, b);
    std::vector<int> spent;
    for (const auto& c : cands) {
        if (static_cast<int>(b.txs.size()) >= b.capacity) return !all_required;
        if (c.conditional && !call_applies(s, c.tx, b.round, b.miner)) continue;
        auto v = apply_tx(s, c.tx, b.round, b.miner, spent);
        if (v) b.txs.push_back(c.tx);
        else if (all_required) return false;
    }
    b.unrelated = b.capacity - static_cast<int>(b.txs.size());
    return true;
}

inline void prune_mempool(GameState& g, Round r) {
    auto& s = g.s;
    s.mempool.erase(std::remove_if(s.mempool.begin(), s.mempool.end(),
                                   [&](const TxRecord& t) {
                                       if (t.kind == TxRecord::related) {
                                           const auto& c = s.contracts[t.contract];
                                           if (c.status != ContractStatus::redeemable && c.status != ContractStatus::dormant)
                                               return true;
                                           const RedeemPath* p = c.path(t.path);
                                           return !p || p->latest <= r;
                                       }
                                       if (t.kind == TxRecord::contract_call)
                                           return s.bribery[t.call->target].status != BriberyContract::open &&
                                                  t.call->method != "init";
                                       return false;
                                   }),
                    s.mempool.end());
}

} // namespace detail

inline void step(GameState& g, Round r, int mi) {
    const auto& sc = g.scen();
    Proposal p = miner_policy(g, r, mi);
    Block b;
    b.round = r;
    b.miner = g.lay.miners[mi];
    b.capacity = sc.capacity;
    bool done = false;
    if (p.deal != Proposal::none) {
        Block trial = b;
        for (const auto& c : p.txs) trial.txs.push_back(c.tx);
        trial.coinbase = p.coinbase;
        bool consent = p.deal != Proposal::b3a || b3a_accepts(trial, g.profile().bob.b3a_case, sc, g.lay);
        if (consent) {
            ChainState copy = g.s;
            Block built = b;
            if (detail::assemble(copy, built, p.txs, true)) {
                built.coinbase = p.coinbase;
                built.side = p.side;
                finish_block(copy, built);
                g.s = std::move(copy);
                g.deal_done = true;
                b = std::move(built);
                done = true;
            }
        }
        if (!done) p = honest_miner_select(g, r);
    }
    if (!done) {
        detail::assemble(g.s, b, p.txs, false);
        b.coinbase = p.coinbase;
        b.side = p.side;
        finish_block(g.s, b);
    }
    if (g.keep_trace) g.trace.push_back(b);
    alice_acts(g, r);
    bob_acts(g, r);
    detail::prune_mempool(g, r);
    g.labels.push_back(static_cast<std::uint8_t>(state_label(g, r)));
}

inline bool terminal(const GameState& g) {
    const auto& s = g.s;
    if (!s.mempool.empty()) return false;
    for (int c : {g.lay.dep, g.lay.col, g.lay.col_a, g.lay.col_b}) {
        if (c < 0) continue;
        auto st = s.contracts[c].status;
        if (st == ContractStatus::redeemable) return false;
        if (st == ContractStatus::dormant && g.live(g.lay.dep)) return false;
    }
    if (g.lay.c_bob >= 0) {
        const auto& b = s.bribery[g.lay.c_bob];
        if (b.status == BriberyContract::open && b.deposit.value() > 0) return false;
    }
    if (g.lay.c_m2m >= 0) {
        const auto& b = s.bribery[g.lay.c_m2m];
        if (b.status == BriberyContract::open && b.balance().value() > 0) return false;
    }
    return true;
}

// After the last round: release bribery escrow whose refund guard holds.
inline void settle(GameState& g) {
    Round r = g.s.height + 1;
    for (int id : {g.lay.c_bob, g.lay.c_m2m}) {
        if (id < 0) continue;
        auto& b = g.s.bribery[id];
        if (b.status != BriberyContract::open) continue;
        ContractCall call{id, id == g.lay.c_bob ? "refundToBob" : "refundToMiners"};
        CallContext ctx{r, id == g.lay.c_bob ? g.lay.bob : kNobody, kNobody, &g.s.contracts};
        auto eff = bribery_contract_step(b, call, ctx);
        for (const auto& [to, amt] : eff.paid) g.s.credit(to, amt, kFlowEscrow);
    }
}

// Rounds after a terminal state only carry unrelated fees.
inline void credit_idle_round(GameState& g, Round r, int mi) {
    const auto& sc = g.scen();
    TokenAmount total = TokenAmount(sc.f) * sc.capacity;
    g.s.debit(g.s.external, total, kFlowFeeOut);
    g.s.credit(g.lay.miners[mi], total, kFlowUnrelated);
    g.s.height = r;
    g.labels.push_back(g.labels.empty() ? static_cast<std::uint8_t>(state_label(g, r))
                                        : g.labels.back());
}

inline Outcome make_outcome(const GameState& g) {
    const auto& s = g.s;
    Outcome o;
    o.names = s.names;
    for (std::size_t p = 0; p < s.balances.size(); ++p) {
        o.delta.push_back(s.balances[p].value() - g.start[p]);
        o.funded.push_back(g.funded[p]);
        o.unrelated.push_back(s.flows[p][kFlowUnrelated]);
        o.bribes.push_back(s.flows[p][kFlowBribeIn]);
    }
    o.burned = s.burned.value();
    o.minted = s.minted.value();
    for (auto l : g.labels) o.labels.push_back(static_cast<GameStateLabel>(l));
    const auto& dep = s.contracts[g.lay.dep];
    if (g.scen().protocol == Protocol::demba) o.resolution = resolution_name(resolve_demba_dep(s, g.lay.dep));
    else if (dep.status == ContractStatus::redeemed) o.resolution = dep.redeemed_path;
    const std::pair<const char*, int> roles[] = {{"dep", g.lay.dep}, {"col", g.lay.col}, {"col_a", g.lay.col_a}, {"col_b", g.lay.col_b}};
    for (const auto& [name, c] : roles) {
        if (c < 0 || s.contracts[c].redeemed_round < 0) continue;
        o.redeemed[name] = s.contracts[c].redeemed_round;
        o.final_transfer = std::max(o.final_transfer, s.contracts[c].redeemed_round);
    }
    o.blocks = g.trace;
    return o;
}

inline Outcome play(const Scenario& sc, const StrategyProfile& prof, const Schedule& sched, bool keep_trace = false) {
    Round H = sc.effective_horizon();
    if (static_cast<Round>(sched.miners.size()) != H)
        throw Error("bad-schedule", "schedule length " + std::to_string(sched.miners.size()) + " != horizon " + std::to_string(H));
    GameState g = setup_game(sc, prof);
    g.keep_trace = keep_trace;
    for (Round r = 1; r <= H; ++r) {
        int mi = sched.miners[r - 1];
        if (mi < 0 || mi >= static_cast<int>(sc.miners.size())) throw Error("bad-schedule", "unknown miner");
        if (!keep_trace && terminal(g)) credit_idle_round(g, r, mi);
        else step(g, r, mi);
    }
    settle(g);
    return make_outcome(g);
}

// ---- schedule distribution ---------------------------------------------------

struct RoundDist {
    std::vector<int> who;
    std::vector<Rational> p;
};

inline std::vector<RoundDist> round_dists(const Scenario& sc) {
    Round H = sc.effective_horizon();
    Rational total = 0;
    for (const auto& m : sc.miners) {
        if (m.power < 0) throw Error("validation-error", "negative power");
        total += m.power;
    }
    if (sc.miners.empty() || total != 1) throw Error("validation-error", "power-sum: miner powers must sum to 1");
    Rational lc = sc.lambda_col();
    std::vector<RoundDist> out(H + 1);
    for (Round r = 1; r <= H; ++r) {
        auto& d = out[r];
        auto pin = sc.cond.pins.find(r);
        if (pin != sc.cond.pins.end()) {
            d.who.push_back(pin->second);
            d.p.push_back(1);
            continue;
        }
        bool cond = sc.cond.colluders_only && r >= sc.cond.from && r <= sc.cond.to;
        if (cond && lc == 0) throw Error("validation-error", "conditioning on colluders without any");
        for (std::size_t i = 0; i < sc.miners.size(); ++i) {
            const auto& m = sc.miners[i];
            Rational p = cond ? (m.colluding ? m.power / lc : Rational(0)) : m.power;
            if (p > 0) {
                d.who.push_back(static_cast<int>(i));
                d.p.push_back(p);
            }
        }
    }
    return out;
}

inline std::vector<Schedule> enumerate_schedules(const Scenario& sc) {
    auto dists = round_dists(sc);
    std::vector<Schedule> out{Schedule{}};
    for (std::size_t r = 1; r < dists.size(); ++r) {
        std::vector<Schedule> next;
        for (const auto& s : out)
            for (std::size_t k = 0; k < dists[r].who.size(); ++k) {
                Schedule t = s;
                t.miners.push_back(dists[r].who[k]);
                t.weight *= dists[r].p[k];
                next.push_back(std::move(t));
            }
        out = std::move(next);
        if (static_cast<std::int64_t>(out.size()) > sc.enum_cap) throw Error("enumeration-cap-exceeded", "use monte-carlo mode");
    }
    return out;
}

inline Schedule sample_schedule(const std::vector<RoundDist>& dists, std::mt19937_64& rng) {
    Schedule s;
    for (std::size_t r = 1; r < dists.size(); ++r) {
        const auto& d = dists[r];
        if (d.who.size() == 1) {
            s.miners.push_back(d.who[0]);
            continue;
        }
        std::vector<double> w;
        for (const auto& p : d.p) w.push_back(to_double(p));
        std::discrete_distribution<int> pick(w.begin(), w.end());
        s.miners.push_back(d.who[pick(rng)]);
    }
    return s;
}

inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    return std::mt19937_64(seq);
}

// ---- expectations ------------------------------------------------------------

struct UtilityVector {
    std::vector<std::string> names;
    std::vector<Rational> mean;
    std::vector<double> half_width;  // 95% normal half-width (0 when exact)
    bool exact = true;
    std::int64_t samples = 0;

    double mean_d(PartyId p) const { return to_double(mean[p]); }
};

namespace detail {

// Depth-first over miner choices; a terminal state closes its whole subtree
// with the expected unrelated income of the remaining rounds.
struct ExactWalk {
    const Scenario& sc;
    const Metric& metric;
    std::vector<RoundDist> dists;
    std::vector<std::vector<BigInt>> num;  // per round, per choice
    std::vector<BigInt> den, suffix;       // suffix[r] = prod den[r..H]
    std::vector<std::vector<BigInt>> tail;  // tail[r][miner] = E[#blocks in r..H] * suffix[r]
    Round H;
    std::vector<BigInt> acc;
    std::int64_t leaves = 0;

    ExactWalk(const Scenario& s, const Metric& m) : sc(s), metric(m), dists(round_dists(s)), H(s.effective_horizon()) {
        num.resize(H + 2);
        den.assign(H + 2, 1);
        BigInt count = 1;
        for (Round r = 1; r <= H; ++r) {
            BigInt d = 1;
            for (const auto& p : dists[r].p) d = boost::multiprecision::lcm(d, BigInt(boost::multiprecision::denominator(p)));
            den[r] = d;
            for (const auto& p : dists[r].p) {
                Rational q = p * Rational(d);
                num[r].push_back(boost::multiprecision::numerator(q));
            }
            count *= dists[r].who.size();
        }
        if (count > sc.enum_cap) throw Error("enumeration-cap-exceeded", "use monte-carlo mode");
        suffix.assign(H + 2, 1);
        for (Round r = H; r >= 1; --r) suffix[r] = suffix[r + 1] * den[r];
        std::size_t n = sc.miners.size();
        tail.assign(H + 2, std::vector<BigInt>(n, 0));
        for (Round r = H; r >= 1; --r)
            for (std::size_t j = 0; j < n; ++j) {
                BigInt here = 0;
                for (std::size_t k = 0; k < dists[r].who.size(); ++k)
                    if (dists[r].who[k] == static_cast<int>(j)) here = num[r][k];
                tail[r][j] = here * suffix[r + 1] + den[r] * tail[r + 1][j];
            }
    }

    void leaf(GameState& g, const BigInt& w, Round next) {
        ++leaves;
        if (next > H) settle(g);
        Outcome o = make_outcome(g);
        if (acc.empty()) acc.assign(o.delta.size(), 0);
        BigInt full = w * suffix[next];
        std::int64_t per_block = sc.f * sc.capacity * (metric.delta + metric.unrelated);
        for (std::size_t p = 0; p < o.delta.size(); ++p) acc[p] += full * o.metric(metric, static_cast<PartyId>(p));
        if (next <= H && sc.f != 0)
            for (std::size_t j = 0; j < sc.miners.size(); ++j) {
                acc[g.lay.miners[j]] += w * per_block * tail[next][j];
                acc[g.lay.users] -= w * (sc.f * sc.capacity * metric.delta) * tail[next][j];
            }
    }

    void walk(GameState& g, Round r, const BigInt& w) {
        if (r > H || terminal(g)) return leaf(g, w, r);
        const auto& d = dists[r];
        for (std::size_t k = 0; k < d.who.size(); ++k) {
            if (k + 1 == d.who.size()) {
                step(g, r, d.who[k]);
                walk(g, r + 1, w * num[r][k]);
            } else {
                GameState child = g;
                step(child, r, d.who[k]);
                walk(child, r + 1, w * num[r][k]);
            }
        }
    }
};

} // namespace detail

inline UtilityVector expected_utilities(const Scenario& sc, const StrategyProfile& prof, const Metric& metric = {}) {
    UtilityVector u;
    if (sc.exact) {
        detail::ExactWalk w(sc, metric);
        GameState g = setup_game(sc, prof);
        w.walk(g, 1, 1);
        u.names = g.s.names;
        for (const auto& a : w.acc) u.mean.push_back(Rational(a, w.suffix[1]));
        u.half_width.assign(u.mean.size(), 0.0);
        u.samples = w.leaves;
        return u;
    }
    if (sc.trials < 1) throw Error("validation-error", "trials must be at least 1");
    auto dists = round_dists(sc);
    std::vector<BigInt> sum;
    std::vector<double> sumsq;
    for (std::int64_t t = 0; t < sc.trials; ++t) {
        auto rng = trial_rng(sc.seed, static_cast<std::uint64_t>(t));
        Outcome o = play(sc, prof, sample_schedule(dists, rng));
        if (sum.empty()) {
            sum.assign(o.delta.size(), 0);
            sumsq.assign(o.delta.size(), 0.0);
            u.names = o.names;
        }
        for (std::size_t p = 0; p < o.delta.size(); ++p) {
            auto v = o.metric(metric, static_cast<PartyId>(p));
            sum[p] += v;
            sumsq[p] += double(v) * double(v);
        }
    }
    double n = double(sc.trials);
    for (std::size_t p = 0; p < sum.size(); ++p) {
        Rational m(sum[p], BigInt(sc.trials));
        double md = to_double(m);
        double var = sc.trials > 1 ? std::max(0.0, (sumsq[p] - n * md * md) / (n - 1)) : 0.0;
        u.mean.push_back(m);
        u.half_width.push_back(1.96 * std::sqrt(var / n));
    }
    u.exact = false;
    u.samples = sc.trials;
    return u;
}

// ---- dominance -----------------------------------------------------------------

struct Player {
    enum Kind { alice, bob, miner } kind = miner;
    int index = 0;

    PartyId party(const Layout& lay) const { return kind == alice ? lay.alice : kind == bob ? lay.bob : lay.miners[index]; }
    PartyId party(std::size_t) const { return kind == alice ? 0 : kind == bob ? 1 : 4 + index; }
};

inline void assign_slot(StrategyProfile& to, const StrategyProfile& from, const Player& p) {
    if (p.kind == Player::alice) to.alice = from.alice;
    else if (p.kind == Player::bob) to.bob = from.bob;
    else to.miners.at(p.index) = from.miners.at(p.index);
}

enum class Dominance { strict, weak, none };
inline const char* dominance_name(Dominance d) { return d == Dominance::strict ? "strict" : d == Dominance::weak ? "weak" : "none"; }

struct DominanceVerdict {
    Dominance verdict = Dominance::strict;
    std::string witness;  // profile where the comparison is tightest or fails
    Rational margin;      // min over comparisons of u(candidate) - u(alternative)
    std::vector<std::pair<std::string, Rational>> table;
};

// Candidate is own[0]; utilities use `metric` for the player's party.
inline DominanceVerdict dominance_check(const Scenario& sc, const Player& player, const std::vector<StrategyProfile>& own,
                                        const std::vector<StrategyProfile>& opponents, const Metric& metric = {}) {
    if (own.empty() || opponents.empty()) throw Error("empty-space", "strategy spaces must be non-empty");
    DominanceVerdict v;
    PartyId party = player.party(sc.miners.size());
    bool first = true, any_strict = false, all_ge = true;
    for (const auto& opp : opponents) {
        StrategyProfile cand = opp;
        assign_slot(cand, own[0], player);
        Rational uc = expected_utilities(sc, cand, metric).mean[party];
        v.table.push_back({describe(cand), uc});
        for (std::size_t k = 1; k < own.size(); ++k) {
            StrategyProfile alt = opp;
            assign_slot(alt, own[k], player);
            Rational ua = expected_utilities(sc, alt, metric).mean[party];
            v.table.push_back({describe(alt), ua});
            Rational diff = uc - ua;
            if (first || diff < v.margin) {
                v.margin = diff;
                v.witness = describe(alt);
                first = false;
            }
            if (diff > 0) any_strict = true;
            if (diff < 0) all_ge = false;
        }
    }
    if (own.size() == 1) {
        v.verdict = Dominance::strict;
        v.witness = "no alternative";
        v.margin = 0;
        return v;
    }
    v.verdict = v.margin > 0 ? Dominance::strict : (all_ge && any_strict) ? Dominance::weak : Dominance::none;
    return v;
}

} // namespace arena
