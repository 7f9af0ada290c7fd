#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "pkpir/combinatorics.hpp"
#include "pkpir/gf.hpp"
#include "pkpir/mds.hpp"
#include "pkpir/scheme.hpp"

namespace pkpir {

/// The K x L symbol matrix over GF(2^w), replicated at every database.
struct MessageStore {
    std::uint32_t width = 0;
    std::uint32_t big_k = 0;
    std::uint32_t length = 0;
    std::vector<std::vector<Fe>> symbols;  // [msg-1][pos-1]

    Fe at(std::uint32_t msg, std::uint32_t pos) const { return symbols[msg - 1][pos - 1]; }

    static MessageStore zero(std::uint32_t big_k, std::uint32_t length, std::uint32_t width);
    static MessageStore random(std::uint32_t big_k, std::uint32_t length, std::uint32_t width,
                               std::uint64_t seed);
};

/// What one database sends back: the parity part of the MDS-coded answer.
struct AnswerBlock {
    std::uint32_t db = 0;          // 1-based
    std::vector<Fe> parity;        // p - q symbols, codeword positions p..2p-q-1
};

/// Full messages the user holds after the prefetching phase, message -> symbols.
using CachedMessages = std::map<std::uint32_t, std::vector<Fe>>;

CachedMessages cache_from_store(const MessageStore& store, const PrefetchPlan& plan);

struct RetrievalTranscript {
    QueryTable table;
    std::vector<AnswerBlock> answers;
    std::vector<Fe> decoded;  // L symbols of the desired message
    std::uint64_t downloaded_symbols = 0;

    Rational download_ratio() const;  // downloaded_symbols / L
};

/// The (2p-q, p) code both sides agree on for a given geometry and width.
SystematicCode scheme_code(const SchemeCounts& counts, std::uint32_t width);

/// Evaluates database `db`'s rows against the replicated store, encodes them
/// as the systematic part of the (2p-q, p) code, and returns only the parity.
/// A deterministic function of the store and this database's own rows.
AnswerBlock database_answer(const MessageStore& store, const QueryTable& table,
                            std::uint32_t db);
AnswerBlock database_answer(const MessageStore& store, const QueryTable& table,
                            std::uint32_t db, const SystematicCode& code);

/// Recovers the desired message: per database, the q cached-determined row
/// values plus the p-q parity symbols reconstruct all p row values; desired
/// rows are then peeled by cancelling cached terms and substituting side
/// information downloaded at the other databases.
std::vector<Fe> user_decode(const QueryTable& table, const std::vector<AnswerBlock>& answers,
                            const CachedMessages& cache, std::uint32_t width);

/// Prefetch -> query -> answer -> decode, end to end.
RetrievalTranscript run_retrieval(const PrefetchPlan& plan, std::uint32_t theta,
                                  const MessageStore& store, std::uint64_t seed,
                                  const TableOptions& options = TableOptions{});

}  // namespace pkpir
