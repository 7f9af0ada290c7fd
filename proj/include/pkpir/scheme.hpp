#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pkpir/combinatorics.hpp"

namespace pkpir {

/// Which databases provided which cached messages. assignments[n-1] holds the
/// sorted message indices (1-based) the user prefetched from database n.
/// Per-database sets are disjoint; their union is the full side information.
struct PrefetchPlan {
    std::vector<std::vector<std::uint32_t>> assignments;

    std::uint32_t databases() const { return static_cast<std::uint32_t>(assignments.size()); }
    std::uint32_t total_cached() const;
    std::vector<std::uint32_t> all_cached() const;  // sorted union
    bool is_cached(std::uint32_t msg) const;
    bool is_uniform() const;

    /// Throws PlanError on overlap, out-of-range indices, or size mismatch
    /// with the stated cache budget.
    void validate(std::uint32_t big_k, std::uint32_t big_m) const;
};

/// |H_n| = M/N messages per database, drawn uniformly without replacement.
PrefetchPlan uniform_prefetch(std::uint32_t big_n, std::uint32_t big_k, std::uint32_t big_m,
                              std::uint64_t seed);

/// One (message, symbol) reference. Both 1-based; `sym` is the position the
/// database reads in its stored copy of the message.
struct Term {
    std::uint32_t msg = 0;
    std::uint32_t sym = 0;
    auto operator<=>(const Term&) const = default;
};

/// One query row: the database returns the sum of the referenced symbols.
/// Message indices within a row are distinct, and none of them is a message
/// this database itself provided in the prefetching phase.
struct QuerySpec {
    std::vector<Term> terms;  // sorted by message index

    std::uint32_t size() const { return static_cast<std::uint32_t>(terms.size()); }
    bool contains_msg(std::uint32_t msg) const;
};

/// User-side bookkeeping for one row; never sent to the database.
struct RowInfo {
    std::uint32_t id = 0;     // construction order within the database
    std::uint32_t round = 0;  // = row size
    bool desired = false;     // contains the retrieval target
    bool known = false;       // every term's message lies in H \ H_n
    // Desired rows of round >= 2 reuse a row downloaded at another database
    // as side information, with terms of messages known to this database
    // swapped for fresh symbols of messages cached elsewhere.
    std::int32_t source_db = 0;   // 1-based; 0 = none
    std::int32_t source_row = -1; // construction id within source_db
    std::vector<std::pair<Term, Term>> replacements;  // imported -> substituted
};

/// Test-only generator defects used by the privacy auditor.
enum class Mutation {
    None,
    SkipSubset,        // drop the fresh rows of one message subset
    NoShuffle,         // leave rows in construction order
    ReuseSymbolIndex,  // second desired-symbol draw per database repeats the first
};

Mutation mutation_from_name(const std::string& name);
std::string mutation_name(Mutation m);

struct TableOptions {
    bool permute_symbols = true;
    bool shuffle_rows = true;
    Mutation mutation = Mutation::None;

    /// Identity permutation, construction row order: the paper-style layout.
    static TableOptions canonical() {
        return TableOptions{false, false, Mutation::None};
    }
};

struct DatabaseTable {
    std::vector<QuerySpec> rows;     // presentation order (what the database sees)
    std::vector<RowInfo> info;       // parallel to rows
    std::vector<std::uint32_t> id_to_pos;  // construction id -> presentation index
};

struct QueryTable {
    std::uint32_t big_n = 0;
    std::uint32_t big_k = 0;
    std::uint32_t big_m = 0;
    std::uint32_t theta = 0;
    std::uint64_t seed = 0;
    TableOptions options;
    PrefetchPlan plan;
    SchemeCounts counts;
    std::vector<DatabaseTable> dbs;

    std::uint32_t length() const;  // L as uint32 (desk-scale guarded)
    std::uint32_t rows_per_db() const;
    std::uint32_t known_per_db() const;

    /// Messages database n serves: [1..K] minus the ones it provided.
    std::vector<std::uint32_t> active_messages(std::uint32_t db) const;
};

/// Builds the per-database query tables for retrieving `theta`:
/// round r of each database queries sums over every r-subset of its K-m
/// active messages, desired rows splice in side information downloaded from
/// the other databases, messages are independently symbol-permuted, and each
/// database's row order is shuffled. Counts are self-checked against the
/// closed forms.
QueryTable build_query_table(std::uint32_t big_n, std::uint32_t big_k, std::uint32_t big_m,
                             std::uint32_t theta, const PrefetchPlan& plan, std::uint64_t seed,
                             const TableOptions& options = TableOptions{});

/// Canonical form of database n's rows with message identities erased up to
/// relabeling among its active messages and symbol indices replaced by their
/// rank within the message's use set. Equal signatures mean the database
/// observes the same structure. Meaningful on canonically built tables.
std::string structural_signature(const QueryTable& table, std::uint32_t db);

/// What database n observes up to the symbol permutations: its ordered row
/// list reduced to absolute message-index sets. The statistical privacy
/// audit compares frequencies of these forms.
std::string realized_form(const QueryTable& table, std::uint32_t db);

/// Paper-style text rendering: one column per database, rows like "a7+b4+d4",
/// known rows marked with '*', cached sets as a footer.
std::string render_table_text(const QueryTable& table);

}  // namespace pkpir
