#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "analysis.hpp"

namespace arena {

constexpr const char* kToolVersion = "arena 0.1.0";

// ---- scenario files ----------------------------------------------------------

namespace detail {

using Json = nlohmann::json;

inline std::string line_of(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return std::to_string(line);
}

struct Reader {
    std::string path;  // field path for messages

    [[noreturn]] void fail(const std::string& field, const std::string& why) const {
        throw Error("parse-error", "field " + field + ": " + why);
    }
    std::int64_t i64(const Json& j, const std::string& field) const {
        if (!j.is_number_integer()) fail(field, "expected an integer");
        return j.get<std::int64_t>();
    }
    Rational rational(const Json& j, const std::string& field) const {
        if (j.is_number_integer()) return j.get<std::int64_t>();
        if (j.is_string()) {
            try {
                return parse_rational(j.get<std::string>());
            } catch (const Error&) {
                fail(field, "not a rational: " + j.get<std::string>());
            }
        }
        if (j.is_number_float()) fail(field, "write fractions as strings (\"3/10\" or \"0.3\")");
        fail(field, "expected a number or rational string");
    }
    bool boolean(const Json& j, const std::string& field) const {
        if (!j.is_boolean()) fail(field, "expected true or false");
        return j.get<bool>();
    }
    std::string str(const Json& j, const std::string& field) const {
        if (!j.is_string()) fail(field, "expected a string");
        return j.get<std::string>();
    }
    template <class E>
    E enumeration(const Json& j, const std::string& field) const {
        std::string s = str(j, field);
        try {
            return parse_enum<E>(s);
        } catch (const Error&) {
            fail(field, "unknown value '" + s + "'");
        }
    }
    void known(const Json& obj, const std::string& field, std::initializer_list<const char*> keys) const {
        if (!obj.is_object()) fail(field, "expected an object");
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            bool ok = false;
            for (auto k : keys) ok = ok || it.key() == k;
            if (!ok) fail(field + "." + it.key(), "unknown key");
        }
    }
};

inline MinerPolicy read_miner_policy(const Reader& rd, const Json& j, const std::string& f) {
    MinerPolicy p;
    if (j.is_string()) {
        p.kind = rd.enumeration<MinerKind>(j, f);
        return p;
    }
    rd.known(j, f, {"kind", "defer_to"});
    p.kind = rd.enumeration<MinerKind>(j.at("kind"), f + ".kind");
    if (j.contains("defer_to")) p.defer_to = rd.i64(j["defer_to"], f + ".defer_to");
    return p;
}

inline AlicePolicy read_alice(const Reader& rd, const Json& j, const std::string& f) {
    AlicePolicy p;
    if (j.is_string()) {
        p.kind = rd.enumeration<AliceKind>(j, f);
        return p;
    }
    rd.known(j, f, {"kind", "t_pub"});
    p.kind = rd.enumeration<AliceKind>(j.at("kind"), f + ".kind");
    if (j.contains("t_pub")) p.t_pub = rd.i64(j["t_pub"], f + ".t_pub");
    return p;
}

inline BobPolicy read_bob(const Reader& rd, const Json& j, const std::string& f) {
    BobPolicy p;
    if (j.is_string()) {
        p.kind = rd.enumeration<BobKind>(j, f);
        return p;
    }
    rd.known(j, f, {"kind", "reveal", "delay", "case"});
    p.kind = rd.enumeration<BobKind>(j.at("kind"), f + ".kind");
    if (j.contains("reveal")) p.reveal = rd.i64(j["reveal"], f + ".reveal");
    if (j.contains("delay")) p.delay = rd.i64(j["delay"], f + ".delay");
    if (j.contains("case")) p.b3a_case = static_cast<int>(rd.i64(j["case"], f + ".case"));
    return p;
}

} // namespace detail

// Sections a command may need besides the game itself.
struct ScenarioFile {
    Scenario sc;
    std::string digest;
    int focus = 0;
    Round t_y = 0;
    std::string ttc_variant, ttc_path;
    std::optional<PoolParams> pool;
    std::string dominance_player;  // "alice", "bob" or "M<i>"
    std::vector<StrategyProfile> dominance_own;
};

inline std::string fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline void validate_scenario(const Scenario& sc) {
    auto bad = [](const std::string& c, const std::string& why) { throw Error("validation-error", c + ": " + why); };
    if (sc.miners.empty()) bad("miners", "at least one miner");
    Rational sum = 0;
    for (const auto& m : sc.miners) {
        if (m.power < 0) bad("power", "negative power for " + m.name);
        sum += m.power;
    }
    if (sum != 1) bad("power-sum", "miner powers sum to " + to_string(sum));
    if (sc.T <= 0) bad("timing", "T must be positive");
    if (sc.t_pub < 0 || sc.t_pub > sc.T) bad("timing", "t_pub must lie in [0, T]");
    if (sc.capacity < 1) bad("capacity", "capacity must be at least 1");
    Round l = sc.delay_l();
    if (sc.horizon != 0 && sc.horizon < sc.T + l + 2) bad("horizon", "horizon must be at least T + l + 2");
    if (!sc.exact && sc.trials < 1) bad("trials", "trials must be at least 1");
    if (sc.protocol == Protocol::demba) {
        auto v = check_fee_schedule(sc.fee_schedule(), sc.effective_horizon());
        if (!v.ok) bad(v.violation.substr(0, v.violation.find(':')), v.violation);
    }
    if (sc.profile) {
        if (sc.profile->miners.size() != sc.miners.size()) bad("policies", "one miner policy per miner");
    }
}

inline ScenarioFile parse_scenario(const std::string& text) {
    using detail::Json;
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw Error("parse-error", "line " + detail::line_of(text, e.byte) + ": " + e.what());
    }
    detail::Reader rd;
    rd.known(j, "$", {"protocol", "amounts", "fees", "timing", "miners", "bribery", "policies", "conditioning", "mode",
                      "trials", "seed", "capacity", "enum_cap", "endowment", "lemmas", "ttc", "pool", "dominance"});
    ScenarioFile out;
    Scenario& sc = out.sc;
    if (!j.contains("protocol")) rd.fail("protocol", "missing");
    sc.protocol = rd.enumeration<Protocol>(j["protocol"], "protocol");

    if (j.contains("amounts")) {
        const auto& a = j["amounts"];
        rd.known(a, "amounts", {"v_dep", "v_col", "v_col_a", "v_col_b", "v_ded"});
        auto get = [&](const char* k, std::int64_t& to) {
            if (a.contains(k)) to = rd.i64(a[k], std::string("amounts.") + k);
        };
        get("v_dep", sc.v_dep);
        get("v_col", sc.v_col);
        get("v_col_a", sc.v_col_a);
        get("v_col_b", sc.v_col_b);
        get("v_ded", sc.v_ded);
    }
    if (j.contains("fees")) {
        const auto& f = j["fees"];
        rd.known(f, "fees", {"f", "f_dep_a", "f_dep_b", "f_col_b", "f_c_bob", "pre_A", "pre_A'", "pre_AA'", "pre_B",
                             "alpha", "base"});
        auto get = [&](const char* k, std::int64_t& to) {
            if (f.contains(k)) to = rd.i64(f[k], std::string("fees.") + k);
        };
        get("f", sc.f);
        get("f_dep_a", sc.f_dep_a);
        get("f_dep_b", sc.f_dep_b);
        get("f_col_b", sc.f_col_b);
        get("f_c_bob", sc.f_c_bob);
        get("pre_A", sc.fee_pre_a);
        get("pre_A'", sc.fee_pre_a2);
        get("pre_AA'", sc.fee_pre_aa2);
        get("pre_B", sc.fee_pre_b);
        if (f.contains("alpha")) sc.alpha = rd.rational(f["alpha"], "fees.alpha");
        if (f.contains("base")) {
            rd.known(f["base"], "fees.base", {"pre_A", "pre_A'", "pre_AA'", "pre_B"});
            for (auto it = f["base"].begin(); it != f["base"].end(); ++it)
                sc.fee_base[it.key()] = rd.i64(it.value(), "fees.base." + it.key());
        }
    }
    if (j.contains("timing")) {
        const auto& t = j["timing"];
        rd.known(t, "timing", {"T", "t_pub", "l", "horizon"});
        if (t.contains("T")) sc.T = rd.i64(t["T"], "timing.T");
        if (t.contains("t_pub")) sc.t_pub = rd.i64(t["t_pub"], "timing.t_pub");
        if (t.contains("l")) sc.l = rd.i64(t["l"], "timing.l");
        if (t.contains("horizon")) sc.horizon = rd.i64(t["horizon"], "timing.horizon");
    }
    if (!j.contains("miners") || !j["miners"].is_array()) rd.fail("miners", "expected an array");
    for (std::size_t i = 0; i < j["miners"].size(); ++i) {
        const auto& m = j["miners"][i];
        std::string f = "miners[" + std::to_string(i) + "]";
        rd.known(m, f, {"name", "power", "active", "colluding"});
        MinerProfile mp;
        mp.name = m.contains("name") ? rd.str(m["name"], f + ".name") : "M" + std::to_string(i + 1);
        if (!m.contains("power")) rd.fail(f + ".power", "missing");
        mp.power = rd.rational(m["power"], f + ".power");
        if (m.contains("active")) mp.active = rd.boolean(m["active"], f + ".active");
        if (m.contains("colluding")) mp.colluding = rd.boolean(m["colluding"], f + ".colluding");
        sc.miners.push_back(mp);
    }
    if (j.contains("bribery")) {
        const auto& b = j["bribery"];
        rd.known(b, "bribery", {"br", "eps", "split", "br_for"});
        if (b.contains("br")) sc.br = rd.i64(b["br"], "bribery.br");
        if (b.contains("eps")) sc.eps = rd.i64(b["eps"], "bribery.eps");
        if (b.contains("split")) {
            std::string s = rd.str(b["split"], "bribery.split");
            if (s == "per-block") sc.split = BribeSplit::per_block;
            else if (s == "equal") sc.split = BribeSplit::equal;
            else rd.fail("bribery.split", "expected per-block or equal");
        }
        if (b.contains("br_for")) {
            if (!b["br_for"].is_object()) rd.fail("bribery.br_for", "expected an object");
            for (auto it = b["br_for"].begin(); it != b["br_for"].end(); ++it) {
                int idx = -1;
                try {
                    idx = std::stoi(it.key());
                } catch (...) {
                    rd.fail("bribery.br_for." + it.key(), "key must be a miner index");
                }
                sc.br_for[idx] = rd.i64(it.value(), "bribery.br_for." + it.key());
            }
        }
    }
    auto read_profile = [&](const Json& p, const std::string& f) {
        rd.known(p, f, {"alice", "bob", "miners"});
        StrategyProfile prof = sc.honest_profile();
        if (p.contains("alice")) prof.alice = detail::read_alice(rd, p["alice"], f + ".alice");
        if (p.contains("bob")) prof.bob = detail::read_bob(rd, p["bob"], f + ".bob");
        if (p.contains("miners")) {
            if (!p["miners"].is_array()) rd.fail(f + ".miners", "expected an array");
            prof.miners.clear();
            for (std::size_t i = 0; i < p["miners"].size(); ++i)
                prof.miners.push_back(detail::read_miner_policy(rd, p["miners"][i], f + ".miners[" + std::to_string(i) + "]"));
        }
        return prof;
    };
    if (j.contains("policies")) sc.profile = read_profile(j["policies"], "policies");
    if (j.contains("conditioning")) {
        const auto& c = j["conditioning"];
        rd.known(c, "conditioning", {"from", "to", "colluders_only", "pins"});
        if (c.contains("from")) sc.cond.from = rd.i64(c["from"], "conditioning.from");
        if (c.contains("to")) sc.cond.to = rd.i64(c["to"], "conditioning.to");
        if (c.contains("colluders_only")) sc.cond.colluders_only = rd.boolean(c["colluders_only"], "conditioning.colluders_only");
        if (c.contains("pins")) {
            if (!c["pins"].is_object()) rd.fail("conditioning.pins", "expected an object");
            for (auto it = c["pins"].begin(); it != c["pins"].end(); ++it) {
                Round r = 0;
                try {
                    r = std::stoll(it.key());
                } catch (...) {
                    rd.fail("conditioning.pins." + it.key(), "key must be a round");
                }
                sc.cond.pins[r] = static_cast<int>(rd.i64(it.value(), "conditioning.pins." + it.key()));
            }
        }
    }
    if (j.contains("mode")) {
        std::string m = rd.str(j["mode"], "mode");
        if (m != "exact" && m != "mc") rd.fail("mode", "expected exact or mc");
        sc.exact = m == "exact";
    }
    if (j.contains("trials")) sc.trials = rd.i64(j["trials"], "trials");
    if (j.contains("seed")) sc.seed = static_cast<std::uint64_t>(rd.i64(j["seed"], "seed"));
    if (j.contains("capacity")) sc.capacity = static_cast<int>(rd.i64(j["capacity"], "capacity"));
    if (j.contains("enum_cap")) sc.enum_cap = rd.i64(j["enum_cap"], "enum_cap");
    if (j.contains("endowment")) sc.endowment = rd.i64(j["endowment"], "endowment");
    if (j.contains("lemmas")) {
        const auto& l = j["lemmas"];
        rd.known(l, "lemmas", {"focus", "t_y"});
        if (l.contains("focus")) out.focus = static_cast<int>(rd.i64(l["focus"], "lemmas.focus"));
        if (l.contains("t_y")) out.t_y = rd.i64(l["t_y"], "lemmas.t_y");
    }
    if (j.contains("ttc")) {
        const auto& t = j["ttc"];
        rd.known(t, "ttc", {"variant", "path"});
        if (t.contains("variant")) out.ttc_variant = rd.str(t["variant"], "ttc.variant");
        if (t.contains("path")) out.ttc_path = rd.str(t["path"], "ttc.path");
    }
    if (j.contains("pool")) {
        const auto& p = j["pool"];
        rd.known(p, "pool", {"h", "H", "N", "R", "f_pool", "lambda_net", "alpha_risk"});
        PoolParams pp;
        if (p.contains("h")) pp.h = rd.rational(p["h"], "pool.h");
        if (p.contains("H")) pp.H = rd.rational(p["H"], "pool.H");
        if (p.contains("N")) pp.N = rd.i64(p["N"], "pool.N");
        if (p.contains("R")) pp.R = rd.rational(p["R"], "pool.R");
        if (p.contains("f_pool")) pp.f_pool = rd.rational(p["f_pool"], "pool.f_pool");
        if (p.contains("lambda_net")) pp.lambda_net = rd.rational(p["lambda_net"], "pool.lambda_net");
        if (p.contains("alpha_risk")) {
            if (!p["alpha_risk"].is_number()) rd.fail("pool.alpha_risk", "expected a number");
            pp.alpha_risk = p["alpha_risk"].get<double>();
        }
        out.pool = pp;
    }
    if (j.contains("dominance")) {
        const auto& d = j["dominance"];
        rd.known(d, "dominance", {"player", "candidates"});
        out.dominance_player = rd.str(d.at("player"), "dominance.player");
        if (!d.contains("candidates") || !d["candidates"].is_array()) rd.fail("dominance.candidates", "expected an array");
        for (std::size_t i = 0; i < d["candidates"].size(); ++i)
            out.dominance_own.push_back(read_profile(d["candidates"][i], "dominance.candidates[" + std::to_string(i) + "]"));
    }
    out.digest = fnv1a(j.dump());
    validate_scenario(sc);
    return out;
}

inline ScenarioFile load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("io-error", "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

// ---- reports ---------------------------------------------------------------------

struct Record {
    std::string metric, party, value, ci_low = "-", ci_high = "-";
    bool operator==(const Record&) const = default;
};

struct Report {
    std::vector<std::string> header;   // without the leading "# "
    std::vector<Record> records;
    std::vector<std::string> summary;  // printed as "## " lines
    int exit_code = 0;

    void add(std::string metric, std::string party, std::string value, std::string lo = "-", std::string hi = "-") {
        records.push_back({std::move(metric), std::move(party), std::move(value), std::move(lo), std::move(hi)});
    }
    const Record* find(const std::string& metric, const std::string& party = "") const {
        for (const auto& r : records)
            if (r.metric == metric && (party.empty() || r.party == party)) return &r;
        return nullptr;
    }
};

inline std::string fmt_double(double d) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
}

inline std::string render(const Report& r) {
    std::string out;
    for (const auto& h : r.header) out += "# " + h + "\n";
    out += "# metric\tparty\tvalue\tci-low\tci-high\n";
    for (const auto& rec : r.records)
        out += rec.metric + "\t" + rec.party + "\t" + rec.value + "\t" + rec.ci_low + "\t" + rec.ci_high + "\n";
    for (const auto& s : r.summary) out += "## " + s + "\n";
    return out;
}

inline Report parse_report(const std::string& text) {
    Report r;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("## ", 0) == 0) {
            r.summary.push_back(line.substr(3));
            continue;
        }
        if (line.rfind("# ", 0) == 0) {
            if (line != "# metric\tparty\tvalue\tci-low\tci-high") r.header.push_back(line.substr(2));
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::size_t start = 0;
        for (;;) {
            auto tab = line.find('\t', start);
            cols.push_back(line.substr(start, tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (cols.size() != 5) throw Error("parse-error", "report row needs 5 columns: " + line);
        r.records.push_back({cols[0], cols[1], cols[2], cols[3], cols[4]});
    }
    return r;
}

// ---- commands --------------------------------------------------------------------

struct Options {
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> trials;
    std::optional<std::string> mode;  // exact | mc
    std::string variant, path;        // ttc
};

namespace detail {

inline Scenario apply_options(const ScenarioFile& f, const Options& o) {
    Scenario sc = f.sc;
    if (o.seed) sc.seed = *o.seed;
    if (o.trials) sc.trials = *o.trials;
    if (o.mode) {
        if (*o.mode != "exact" && *o.mode != "mc") throw Error("bad-flag", "--mode must be exact or mc");
        sc.exact = *o.mode == "exact";
    }
    return sc;
}

inline StrategyProfile profile_of(const Scenario& sc) { return sc.profile ? *sc.profile : sc.honest_profile(); }

inline Report start(const std::string& cmd, const ScenarioFile& f, const Scenario& sc) {
    Report r;
    r.header = {kToolVersion, "command: " + cmd, "scenario-digest: " + f.digest, "seed: " + std::to_string(sc.seed),
                std::string("mode: ") + (sc.exact ? "exact" : "mc"), std::string("protocol: ") + name_of(sc.protocol)};
    return r;
}

inline std::string yes(bool b) { return b ? "true" : "false"; }

} // namespace detail

inline Report cmd_simulate(const ScenarioFile& f, const Options& o = {}) {
    Scenario sc = detail::apply_options(f, o);
    auto prof = detail::profile_of(sc);
    auto rng = trial_rng(sc.seed, 0);
    auto sched = sample_schedule(round_dists(sc), rng);
    auto out = play(sc, prof, sched, true);
    Report r = detail::start("simulate", f, sc);
    std::string miners;
    for (int m : sched.miners) miners += (miners.empty() ? "" : ",") + sc.miners[m].name;
    r.header.push_back("schedule: " + miners);
    r.header.push_back("profile: " + describe(prof));
    for (std::size_t p = 0; p < out.names.size(); ++p) {
        r.add("delta", out.names[p], std::to_string(out.delta[p]));
        r.add("unrelated", out.names[p], std::to_string(out.unrelated[p]));
        r.add("bribes", out.names[p], std::to_string(out.bribes[p]));
    }
    r.add("burned", "-", std::to_string(out.burned));
    r.add("minted", "-", std::to_string(out.minted));
    r.add("resolution", "-", out.resolution);
    r.add("final-transfer", "-", std::to_string(out.final_transfer));
    std::string labels;
    for (auto l : out.labels) labels += (labels.empty() ? "" : ",") + std::string(label_name(l));
    r.add("labels", "-", labels);
    for (const auto& b : out.blocks) {
        std::string txs;
        for (const auto& t : b.txs) txs += " " + t.label;
        r.summary.push_back("round " + std::to_string(b.round) + " " + out.names[b.miner] + ":" + txs);
    }
    return r;
}

inline Report cmd_expect(const ScenarioFile& f, const Options& o = {}) {
    Scenario sc = detail::apply_options(f, o);
    auto prof = detail::profile_of(sc);
    auto u = expected_utilities(sc, prof);
    Report r = detail::start("expect", f, sc);
    r.header.push_back("profile: " + describe(prof));
    if (!u.exact) r.header.push_back("trials: " + std::to_string(u.samples));
    for (std::size_t p = 0; p < u.names.size(); ++p) {
        if (u.exact) {
            r.add("E[delta]", u.names[p], to_string(u.mean[p]));
        } else {
            double m = u.mean_d(p);
            r.add("E[delta]", u.names[p], fmt_double(m), fmt_double(m - u.half_width[p]), fmt_double(m + u.half_width[p]));
        }
    }
    return r;
}

inline Player parse_player(const std::string& s, const Scenario& sc) {
    if (s == "alice") return {Player::alice, 0};
    if (s == "bob") return {Player::bob, 0};
    for (std::size_t i = 0; i < sc.miners.size(); ++i)
        if (s == sc.miners[i].name) return {Player::miner, static_cast<int>(i)};
    throw Error("bad-parameters", "unknown player " + s);
}

inline Report cmd_dominance(const ScenarioFile& f, const Options& o = {}) {
    Scenario sc = detail::apply_options(f, o);
    if (f.dominance_own.size() < 1) throw Error("bad-parameters", "dominance section needs candidates");
    Player pl = parse_player(f.dominance_player, sc);
    auto v = dominance_check(sc, pl, f.dominance_own, {detail::profile_of(sc)});
    Report r = detail::start("dominance", f, sc);
    r.header.push_back("player: " + f.dominance_player);
    for (const auto& [prof, u] : v.table) r.add("utility", prof, to_string(u));
    r.add("verdict", f.dominance_player, dominance_name(v.verdict));
    r.add("margin", f.dominance_player, to_string(v.margin));
    r.add("witness", f.dominance_player, v.witness);
    if (v.verdict == Dominance::none) r.exit_code = 2;
    return r;
}

inline void add_lemma(Report& r, const LemmaVerdict& v, const std::string& who) {
    r.add(v.id + ".hypothesis", who, detail::yes(v.hypothesis));
    r.add(v.id + ".conclusion", who, detail::yes(v.conclusion));
    r.add(v.id + ".consistent", who, detail::yes(v.consistent));
    r.add(v.id + ".margin", who, to_string(v.margin));
    r.summary.push_back(v.id + " consistent=" + detail::yes(v.consistent));
    if (!v.consistent) r.exit_code = 2;
}

inline Report cmd_lemmas(const ScenarioFile& f, const Options& o = {}) {
    Scenario sc = detail::apply_options(f, o);
    Report r = detail::start("lemmas", f, sc);
    if (sc.protocol == Protocol::he) {
        std::string who = sc.miners.at(f.focus).name;
        int colluders = 0;
        for (const auto& m : sc.miners) colluders += m.colluding;
        for (int n = 1; n <= 5; ++n) {
            bool needs_colluder = n == 1 || n == 2 || n == 5;
            if (needs_colluder && !sc.miners[f.focus].colluding) continue;
            if (n == 5 && colluders < 2) continue;
            add_lemma(r, verify_m2mba_lemma(n, sc, f.focus, f.t_y), who);
        }
        auto t = verify_theorem_m2mba(sc);
        for (const auto& row : t.rows) {
            std::string m = sc.miners[row.miner].name;
            for (const auto& [id, ok] : row.hypotheses) r.add("theorem1." + id, m, detail::yes(ok));
            r.add("theorem1.dominance", m, dominance_name(row.dominance.verdict));
            r.add("theorem1.margin", m, to_string(row.dominance.margin));
            r.add("theorem1.witness", m, row.dominance.witness);
        }
        r.add("theorem1.hypotheses", "-", detail::yes(t.hypotheses_hold));
        r.add("theorem1.verdict", "-", detail::yes(t.ok));
        if (t.hypotheses_hold && !t.ok) r.exit_code = 2;
    } else if (sc.protocol == Protocol::demba) {
        add_lemma(r, verify_demba_lemma6(sc), "alice");
        add_lemma(r, verify_demba_lemma7(sc), "bob");
        add_lemma(r, verify_demba_lemma8(sc), "miners");
        auto d = verify_demba(sc);
        for (const auto& row : d.rows) {
            r.add("theorem2.utility", row.player + ":" + row.policy, to_string(row.utility));
            r.add("theorem2.state", row.player + ":" + row.policy, row.state);
        }
        r.add("theorem2.profitable-deviations", "-", std::to_string(d.profitable));
        r.add("theorem2.grief-loss", "alice", to_string(d.grief_loss));
        r.add("theorem2.delay-loss", "bob", to_string(d.delay_loss));
        r.add("theorem2.collusion-bound", "-", detail::yes(d.collusion_bound));
        r.add("theorem2.verdict", "-", detail::yes(d.ok));
        if (!d.ok) r.exit_code = 2;
    } else {
        throw Error("protocol-mismatch", "lemmas cover he and demba scenarios");
    }
    return r;
}

inline Report cmd_pool(const PoolParams& p, std::int64_t trials, std::uint64_t seed, const std::string& digest = "-") {
    auto m = pool_math(p);
    Report r;
    r.header = {kToolVersion, "command: pool", "scenario-digest: " + digest, "seed: " + std::to_string(seed)};
    r.add("lambda_i", "-", to_string(m.lambda_i));
    r.add("E_solo", "solo", to_string(m.E_solo));
    r.add("E_pool", "pool", to_string(m.E_pool));
    r.add("ratio", "-", to_string(m.ratio));
    r.add("Var_solo", "solo", to_string(m.Var_solo));
    r.add("Var_pool", "pool", to_string(m.Var_pool));
    r.add("dU", "-", fmt_double(m.dU));
    r.add("EU_solo", "solo", fmt_double(m.EU_solo));
    r.add("EU_pool", "pool", fmt_double(m.EU_pool));
    if (trials > 0) {
        auto s = pool_mc(p, trials, seed);
        auto ci = [&](const char* name, const char* who, double v, double se) {
            r.add(name, who, fmt_double(v), fmt_double(v - 1.96 * se), fmt_double(v + 1.96 * se));
        };
        ci("mc.mean", "solo", s.mean_solo, s.se_mean_solo);
        ci("mc.var", "solo", s.var_solo, s.se_var_solo);
        ci("mc.mean", "pool", s.mean_pool, s.se_mean_pool);
        ci("mc.var", "pool", s.var_pool, s.se_var_pool);
    }
    return r;
}

inline Report cmd_pool(const ScenarioFile& f, const Options& o = {}) {
    if (!f.pool) throw Error("bad-parameters", "scenario has no pool section");
    return cmd_pool(*f.pool, o.trials ? *o.trials : f.sc.trials, o.seed ? *o.seed : f.sc.seed, f.digest);
}

// ---- time to complete ---------------------------------------------------------------

struct TtcResult {
    double mean = 0, half_width = 0;
    Round l = 0;
    std::int64_t unfinished = 0;
};

// Rounds from setup to the transfer that ends `path`. The scenario's miner
// mix supplies the randomness (a lagging miner delays inclusion).
inline TtcResult ttc(const Scenario& base, const StrategyProfile& miners_only, const std::string& variant,
                     const std::string& path, std::int64_t trials, std::uint64_t seed) {
    Scenario sc = base;
    if (variant == "mad") sc.protocol = Protocol::mad;
    else if (variant == "he") sc.protocol = Protocol::he;
    else if (variant == "demba") sc.protocol = Protocol::demba;
    else throw Error("invalid-path", "variant must be mad, he or demba");
    if (path != "alice-redeems" && path != "bob-collateral" && path != "bob-both")
        throw Error("invalid-path", "path must be alice-redeems, bob-collateral or bob-both");
    if (trials < 1) throw Error("bad-parameters", "trials must be at least 1");
    StrategyProfile prof = miners_only;
    prof.alice = {};
    prof.bob = {};
    if (path == "bob-both") prof.alice.kind = sc.protocol == Protocol::demba ? AliceKind::offline_then_refund : AliceKind::silent;
    sc.l = 0;  // he: derived from v_dep
    TtcResult res;
    res.l = sc.delay_l();
    sc.l = res.l;
    if (sc.horizon == 0) sc.horizon = sc.T + res.l + 40;
    auto dists = round_dists(sc);
    detail::Moments m;
    for (std::int64_t t = 0; t < trials; ++t) {
        auto rng = trial_rng(seed, static_cast<std::uint64_t>(t));
        auto o = play(sc, prof, sample_schedule(dists, rng));
        auto at = [&](const char* k) { return o.redeemed.count(k) ? o.redeemed.at(k) : Round(-1); };
        Round done = -1;
        if (path == "alice-redeems") done = at("dep");
        else if (path == "bob-collateral") done = sc.protocol == Protocol::he ? at("dep") : sc.protocol == Protocol::mad ? at("col") : at("col_b");
        else {
            done = o.final_transfer;
            if (sc.protocol == Protocol::he && at("col") < 0) done = -1;
            if (sc.protocol == Protocol::mad && (at("dep") < 0 || at("col") < 0)) done = -1;
            if (sc.protocol == Protocol::demba && (at("dep") < 0 || at("col_b") < 0)) done = -1;
        }
        if (done < 0) {
            ++res.unfinished;
            done = sc.horizon + 1;
        }
        m.add(double(done));
    }
    res.mean = m.mean;
    res.half_width = 1.96 * m.se_mean();
    return res;
}

inline Report cmd_ttc(const ScenarioFile& f, const Options& o = {}) {
    Scenario sc = detail::apply_options(f, o);
    std::string variant = !o.variant.empty() ? o.variant : !f.ttc_variant.empty() ? f.ttc_variant : name_of(sc.protocol);
    std::string path = !o.path.empty() ? o.path : !f.ttc_path.empty() ? f.ttc_path : "bob-both";
    auto res = ttc(sc, detail::profile_of(sc), variant, path, sc.trials, sc.seed);
    Report r = detail::start("ttc", f, sc);
    r.header.push_back("variant: " + variant + " path: " + path + " trials: " + std::to_string(sc.trials));
    r.header.push_back("rounds only; multiply by the block interval for wall-clock (no propagation delay modelled)");
    r.add("ttc.mean", variant + ":" + path, fmt_double(res.mean), fmt_double(res.mean - res.half_width),
          fmt_double(res.mean + res.half_width));
    r.add("ttc.l", variant, std::to_string(res.l));
    r.add("ttc.unfinished", variant + ":" + path, std::to_string(res.unfinished));
    return r;
}

} // namespace arena
