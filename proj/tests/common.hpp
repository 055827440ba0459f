#pragma once

#include <arena/ledger.hpp>

namespace fx {

using namespace arena;

constexpr std::uint64_t kA = 111, kA2 = 222, kB = 333;
inline Digests digests() { return {kA, kA2, kB}; }

struct World {
    ChainState s;
    PartyId alice, bob, burn, ext;
    std::vector<PartyId> miners;
};

inline World world(int n_miners = 2, std::int64_t funds = 1000, std::int64_t f = 1) {
    World w;
    w.alice = w.s.add_party("alice", Role::alice, funds);
    w.bob = w.s.add_party("bob", Role::bob, funds);
    w.burn = w.s.add_party("burn", Role::burn_sink);
    w.ext = w.s.add_party("users", Role::external_user, 1'000'000'000);
    for (int i = 0; i < n_miners; ++i) w.miners.push_back(w.s.add_party("M" + std::to_string(i + 1), Role::miner, funds));
    w.s.unrelated_fee = f;
    return w;
}

inline TxRecord redeem(std::uint64_t id, PartyId by, int contract, std::string path, std::vector<Preimage> pre,
                       std::int64_t fee) {
    TxRecord t;
    t.id = id;
    t.kind = TxRecord::related;
    t.creator = by;
    t.contract = contract;
    t.path = std::move(path);
    t.witness.preimages = std::move(pre);
    if (by >= 0) t.witness.signers.push_back(by);
    t.fee = fee;
    return t;
}

inline TxRecord call(std::uint64_t id, PartyId by, int target, std::string method, std::int64_t value = 0,
                     std::uint64_t preimage = 0, std::int64_t fee = 0) {
    TxRecord t;
    t.id = id;
    t.kind = TxRecord::contract_call;
    t.creator = by;
    t.call = ContractCall{target, std::move(method), value, preimage};
    t.fee = fee;
    return t;
}

inline Block block(Round r, PartyId miner, std::vector<TxRecord> txs = {}, int unrelated = 0) {
    Block b;
    b.round = r;
    b.miner = miner;
    b.txs = std::move(txs);
    b.unrelated = unrelated;
    return b;
}

// advance with empty blocks mined by `miner` up to (excluding) round r
inline void skip_to(ChainState& s, Round r, PartyId miner) {
    while (s.height + 1 < r) apply_block_inplace(s, block(s.height + 1, miner));
}

} // namespace fx
