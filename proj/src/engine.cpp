#include "pkpir/engine.hpp"

#include <string>

#include "pkpir/errors.hpp"
#include "pkpir/rng.hpp"

namespace pkpir {

MessageStore MessageStore::zero(std::uint32_t big_k, std::uint32_t length, std::uint32_t width) {
    MessageStore s;
    s.width = width;
    s.big_k = big_k;
    s.length = length;
    s.symbols.assign(big_k, std::vector<Fe>(length, 0));
    return s;
}

MessageStore MessageStore::random(std::uint32_t big_k, std::uint32_t length, std::uint32_t width,
                                  std::uint64_t seed) {
    MessageStore s = zero(big_k, length, width);
    Rng rng(seed, "store");
    const std::uint64_t order = 1ull << width;
    for (auto& msg : s.symbols) {
        for (Fe& v : msg) {
            v = static_cast<Fe>(rng.below(order));
        }
    }
    return s;
}

CachedMessages cache_from_store(const MessageStore& store, const PrefetchPlan& plan) {
    CachedMessages cache;
    for (const auto& assigned : plan.assignments) {
        for (std::uint32_t msg : assigned) {
            cache[msg] = store.symbols.at(msg - 1);
        }
    }
    return cache;
}

Rational RetrievalTranscript::download_ratio() const {
    return Rational(downloaded_symbols, table.length());
}

SystematicCode scheme_code(const SchemeCounts& counts, std::uint32_t width) {
    return SystematicCode(width, counts.p.convert_to<std::uint32_t>(),
                          counts.code_length.convert_to<std::uint32_t>());
}

namespace {

void check_dimensions(const MessageStore& store, const QueryTable& table) {
    if (store.big_k != table.big_k || store.length != table.length()) {
        throw DimensionError("store is " + std::to_string(store.big_k) + "x" +
                             std::to_string(store.length) + ", table needs " +
                             std::to_string(table.big_k) + "x" + std::to_string(table.length()));
    }
    if ((1ull << store.width) < table.counts.code_length) {
        throw DimensionError("store width 2^" + std::to_string(store.width) +
                             " cannot host the (" + table.counts.code_length.str() + ", " +
                             table.counts.p.str() + ") code");
    }
}

Fe eval_row(const MessageStore& store, const QuerySpec& row) {
    Fe acc = 0;
    for (const Term& t : row.terms) {
        acc = Field::add(acc, store.at(t.msg, t.sym));
    }
    return acc;
}

Fe cached_value(const CachedMessages& cache, const Term& t) {
    const auto it = cache.find(t.msg);
    if (it == cache.end()) {
        throw PeelError("message " + std::to_string(t.msg) + " missing from the cache");
    }
    if (t.sym < 1 || t.sym > it->second.size()) {
        throw PeelError("cached symbol index out of range");
    }
    return it->second[t.sym - 1];
}

}  // namespace

AnswerBlock database_answer(const MessageStore& store, const QueryTable& table,
                            std::uint32_t db, const SystematicCode& code) {
    if (db < 1 || db > table.big_n) {
        throw DomainError("database index outside [1, N]");
    }
    check_dimensions(store, table);

    const DatabaseTable& d = table.dbs[db - 1];
    std::vector<Fe> data;
    data.reserve(d.rows.size());
    for (const QuerySpec& row : d.rows) {
        data.push_back(eval_row(store, row));
    }

    AnswerBlock out;
    out.db = db;
    out.parity = code.parity(data);
    return out;
}

AnswerBlock database_answer(const MessageStore& store, const QueryTable& table,
                            std::uint32_t db) {
    check_dimensions(store, table);
    return database_answer(store, table, db, scheme_code(table.counts, store.width));
}

std::vector<Fe> user_decode(const QueryTable& table, const std::vector<AnswerBlock>& answers,
                            const CachedMessages& cache, std::uint32_t width) {
    const std::uint32_t p = table.rows_per_db();
    const std::uint32_t parity_count =
        table.counts.parity_per_db.convert_to<std::uint32_t>();
    if (answers.size() != table.big_n) {
        throw ReconstructError("need one answer block per database");
    }
    const SystematicCode code = scheme_code(table.counts, width);

    // Per database: q cached-determined systematic values + p-q parity
    // symbols are exactly p known codeword positions.
    std::vector<std::vector<Fe>> row_values(table.big_n);
    for (const AnswerBlock& ans : answers) {
        if (ans.db < 1 || ans.db > table.big_n) {
            throw ReconstructError("answer block from unknown database");
        }
        if (!row_values[ans.db - 1].empty()) {
            throw ReconstructError("two answer blocks from database " + std::to_string(ans.db));
        }
        if (ans.parity.size() != parity_count) {
            throw ReconstructError("answer block has " + std::to_string(ans.parity.size()) +
                                   " parity symbols, expected " + std::to_string(parity_count));
        }
        const DatabaseTable& d = table.dbs[ans.db - 1];
        std::vector<std::pair<std::uint32_t, Fe>> known;
        known.reserve(p);
        for (std::uint32_t pos = 0; pos < d.rows.size(); ++pos) {
            if (d.info[pos].known) {
                Fe v = 0;
                for (const Term& t : d.rows[pos].terms) {
                    v = Field::add(v, cached_value(cache, t));
                }
                known.emplace_back(pos, v);
            }
        }
        for (std::uint32_t j = 0; j < parity_count; ++j) {
            known.emplace_back(p + j, ans.parity[j]);
        }
        row_values[ans.db - 1] = code.reconstruct(known);
    }

    // Peel the desired rows. The side-information part of a desired row is a
    // row reconstructed at another database, with any swapped terms adjusted
    // from the cache; in characteristic 2 every adjustment is an XOR.
    const std::uint32_t length = table.length();
    std::vector<Fe> decoded(length, 0);
    std::vector<bool> filled(length, false);
    for (std::uint32_t n = 1; n <= table.big_n; ++n) {
        const DatabaseTable& d = table.dbs[n - 1];
        for (std::uint32_t pos = 0; pos < d.rows.size(); ++pos) {
            const RowInfo& info = d.info[pos];
            if (!info.desired) {
                continue;
            }
            Fe v = row_values[n - 1][pos];
            if (info.source_db != 0) {
                const DatabaseTable& src_table = table.dbs[info.source_db - 1];
                const std::uint32_t src_pos =
                    src_table.id_to_pos.at(static_cast<std::uint32_t>(info.source_row));
                Fe side = row_values[info.source_db - 1][src_pos];
                for (const auto& [from, to] : info.replacements) {
                    side = Field::sub(side, cached_value(cache, from));
                    side = Field::add(side, cached_value(cache, to));
                }
                v = Field::sub(v, side);
            }
            const Term* theta_term = nullptr;
            for (const Term& t : d.rows[pos].terms) {
                if (t.msg == table.theta) {
                    theta_term = &t;
                    break;
                }
            }
            if (theta_term == nullptr) {
                throw PeelError("desired row without a desired term");
            }
            if (theta_term->sym < 1 || theta_term->sym > length ||
                filled[theta_term->sym - 1]) {
                throw PeelError("desired symbol coverage broken at index " +
                                std::to_string(theta_term->sym));
            }
            filled[theta_term->sym - 1] = true;
            decoded[theta_term->sym - 1] = v;
        }
    }
    for (bool f : filled) {
        if (!f) {
            throw PeelError("desired message not fully covered");
        }
    }
    return decoded;
}

RetrievalTranscript run_retrieval(const PrefetchPlan& plan, std::uint32_t theta,
                                  const MessageStore& store, std::uint64_t seed,
                                  const TableOptions& options) {
    const std::uint32_t big_n = plan.databases();
    const std::uint32_t big_m = plan.total_cached();

    RetrievalTranscript tr;
    tr.table = build_query_table(big_n, store.big_k, big_m, theta, plan, seed, options);

    const SystematicCode code = scheme_code(tr.table.counts, store.width);
    tr.answers.reserve(big_n);
    for (std::uint32_t n = 1; n <= big_n; ++n) {
        tr.answers.push_back(database_answer(store, tr.table, n, code));
        tr.downloaded_symbols += tr.answers.back().parity.size();
    }

    const CachedMessages cache = cache_from_store(store, plan);
    tr.decoded = user_decode(tr.table, tr.answers, cache, store.width);

    if (BigInt(tr.downloaded_symbols) != BigInt(big_n) * tr.table.counts.parity_per_db) {
        throw InternalError("download meter disagrees with N(p-q)");
    }
    return tr;
}

}  // namespace pkpir
