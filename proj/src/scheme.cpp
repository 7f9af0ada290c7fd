#include "pkpir/scheme.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "pkpir/errors.hpp"
#include "pkpir/rng.hpp"

namespace pkpir {

std::uint32_t PrefetchPlan::total_cached() const {
    std::uint32_t t = 0;
    for (const auto& a : assignments) {
        t += static_cast<std::uint32_t>(a.size());
    }
    return t;
}

std::vector<std::uint32_t> PrefetchPlan::all_cached() const {
    std::vector<std::uint32_t> all;
    for (const auto& a : assignments) {
        all.insert(all.end(), a.begin(), a.end());
    }
    std::sort(all.begin(), all.end());
    return all;
}

bool PrefetchPlan::is_cached(std::uint32_t msg) const {
    for (const auto& a : assignments) {
        if (std::find(a.begin(), a.end(), msg) != a.end()) {
            return true;
        }
    }
    return false;
}

bool PrefetchPlan::is_uniform() const {
    if (assignments.empty()) {
        return true;
    }
    const std::size_t share = assignments.front().size();
    for (const auto& a : assignments) {
        if (a.size() != share) {
            return false;
        }
    }
    return true;
}

void PrefetchPlan::validate(std::uint32_t big_k, std::uint32_t big_m) const {
    std::set<std::uint32_t> seen;
    for (std::size_t n = 0; n < assignments.size(); ++n) {
        for (std::uint32_t msg : assignments[n]) {
            if (msg < 1 || msg > big_k) {
                throw PlanError("cached message " + std::to_string(msg) +
                                " outside [1, " + std::to_string(big_k) + "]");
            }
            if (!seen.insert(msg).second) {
                throw PlanError("message " + std::to_string(msg) +
                                " cached from more than one database");
            }
        }
        if (!std::is_sorted(assignments[n].begin(), assignments[n].end())) {
            throw PlanError("per-database cached sets must be sorted");
        }
    }
    if (seen.size() > big_m) {
        throw PlanError("plan caches " + std::to_string(seen.size()) +
                        " messages, budget is " + std::to_string(big_m));
    }
}

PrefetchPlan uniform_prefetch(std::uint32_t big_n, std::uint32_t big_k, std::uint32_t big_m,
                              std::uint64_t seed) {
    if (big_n < 2 || big_k < 1) {
        throw DomainError("need N >= 2 and K >= 1");
    }
    if (big_m >= big_k) {
        throw DomainError("cache must leave something to retrieve: M >= K");
    }
    if (big_m % big_n != 0) {
        throw NonUniformError("uniform prefetching needs M divisible by N");
    }
    const std::uint32_t share = big_m / big_n;

    Rng rng(seed, "prefetch");
    std::vector<std::uint32_t> pool(big_k);
    std::iota(pool.begin(), pool.end(), 1u);

    PrefetchPlan plan;
    plan.assignments.resize(big_n);
    for (std::uint32_t n = 0; n < big_n; ++n) {
        for (std::uint32_t i = 0; i < share; ++i) {
            const std::size_t j = static_cast<std::size_t>(rng.below(pool.size()));
            plan.assignments[n].push_back(pool[j]);
            pool[j] = pool.back();
            pool.pop_back();
        }
        std::sort(plan.assignments[n].begin(), plan.assignments[n].end());
    }
    return plan;
}

bool QuerySpec::contains_msg(std::uint32_t msg) const {
    for (const Term& t : terms) {
        if (t.msg == msg) {
            return true;
        }
    }
    return false;
}

Mutation mutation_from_name(const std::string& name) {
    if (name == "none") return Mutation::None;
    if (name == "skip-subset") return Mutation::SkipSubset;
    if (name == "no-shuffle") return Mutation::NoShuffle;
    if (name == "reuse-index") return Mutation::ReuseSymbolIndex;
    throw DomainError("unknown mutation '" + name +
                      "' (try none, skip-subset, no-shuffle, reuse-index)");
}

std::string mutation_name(Mutation m) {
    switch (m) {
        case Mutation::None: return "none";
        case Mutation::SkipSubset: return "skip-subset";
        case Mutation::NoShuffle: return "no-shuffle";
        case Mutation::ReuseSymbolIndex: return "reuse-index";
    }
    return "none";
}

std::uint32_t QueryTable::length() const {
    return counts.length.convert_to<std::uint32_t>();
}

std::uint32_t QueryTable::rows_per_db() const {
    return counts.p.convert_to<std::uint32_t>();
}

std::uint32_t QueryTable::known_per_db() const {
    return counts.q.convert_to<std::uint32_t>();
}

std::vector<std::uint32_t> QueryTable::active_messages(std::uint32_t db) const {
    std::vector<std::uint32_t> out;
    const auto& own = plan.assignments.at(db - 1);
    for (std::uint32_t k = 1; k <= big_k; ++k) {
        if (std::find(own.begin(), own.end(), k) == own.end()) {
            out.push_back(k);
        }
    }
    return out;
}

namespace {

constexpr std::uint32_t kDeskScaleLimit = 1u << 20;

std::vector<std::vector<std::uint32_t>> combinations(const std::vector<std::uint32_t>& pool,
                                                     std::uint32_t r) {
    std::vector<std::vector<std::uint32_t>> out;
    if (r > pool.size()) {
        return out;
    }
    std::vector<std::uint32_t> idx(r);
    std::iota(idx.begin(), idx.end(), 0u);
    while (true) {
        std::vector<std::uint32_t> s(r);
        for (std::uint32_t i = 0; i < r; ++i) {
            s[i] = pool[idx[i]];
        }
        out.push_back(std::move(s));
        // advance
        std::int64_t i = static_cast<std::int64_t>(r) - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] ==
                             pool.size() - r + static_cast<std::size_t>(i)) {
            --i;
        }
        if (i < 0) {
            break;
        }
        ++idx[static_cast<std::size_t>(i)];
        for (std::size_t j = static_cast<std::size_t>(i) + 1; j < r; ++j) {
            idx[j] = idx[j - 1] + 1;
        }
    }
    return out;
}

std::uint64_t small_pow(std::uint64_t base, std::uint32_t exp) {
    std::uint64_t out = 1;
    for (std::uint32_t i = 0; i < exp; ++i) {
        out *= base;
    }
    return out;
}

struct BuiltRow {
    QuerySpec spec;
    RowInfo info;
};

}  // namespace

QueryTable build_query_table(std::uint32_t big_n, std::uint32_t big_k, std::uint32_t big_m,
                             std::uint32_t theta, const PrefetchPlan& plan, std::uint64_t seed,
                             const TableOptions& options) {
    const SchemeCounts counts = scheme_counts(big_n, big_k, big_m);
    plan.validate(big_k, big_m);
    if (plan.databases() != big_n) {
        throw PlanError("plan covers " + std::to_string(plan.databases()) +
                        " databases, expected " + std::to_string(big_n));
    }
    if (!plan.is_uniform() || plan.total_cached() != big_m) {
        throw NonUniformError("this scheme needs exactly M/N messages cached per database");
    }
    if (theta < 1 || theta > big_k) {
        throw DomainError("theta outside [1, K]");
    }
    if (plan.is_cached(theta)) {
        throw DomainError("theta must not be a cached message");
    }
    if (counts.length > kDeskScaleLimit || counts.p > kDeskScaleLimit) {
        throw DomainError("configuration exceeds desk scale (L or p > 2^20)");
    }

    const std::uint32_t share = big_m / big_n;      // m
    const std::uint32_t active_count = big_k - share;  // K - m
    const std::uint32_t length = counts.length.convert_to<std::uint32_t>();
    const std::uint32_t rows_expected = counts.p.convert_to<std::uint32_t>();

    QueryTable table;
    table.big_n = big_n;
    table.big_k = big_k;
    table.big_m = big_m;
    table.theta = theta;
    table.seed = seed;
    table.options = options;
    table.plan = plan;
    table.counts = counts;

    // Active message sets and the cross-database replacement bijections:
    // a side-information row imported from database n2 into database n swaps
    // each term of a message in H_n for a fresh symbol of the rank-matched
    // message of H_{n2}. H_{n2} is disjoint from everything n2 serves, so the
    // swap never collides, and it leaves per-round subset counts intact.
    std::vector<std::vector<std::uint32_t>> active(big_n), active_non_theta(big_n);
    for (std::uint32_t n = 1; n <= big_n; ++n) {
        active[n - 1] = table.active_messages(n);
        for (std::uint32_t k : active[n - 1]) {
            if (k != theta) {
                active_non_theta[n - 1].push_back(k);
            }
        }
    }
    auto replacement_for = [&](std::uint32_t n, std::uint32_t n2, std::uint32_t msg) {
        const auto& own = plan.assignments[n - 1];
        const auto& provider = plan.assignments[n2 - 1];
        const auto it = std::find(own.begin(), own.end(), msg);
        const auto r = static_cast<std::size_t>(std::distance(own.begin(), it));
        return provider[r];
    };

    // Logical symbol counters, 1-based, shared across databases: within each
    // message the indices used across the whole table are exactly 1..uses.
    std::vector<std::uint32_t> next_sym(big_k + 1, 1);
    std::vector<std::uint32_t> theta_draws(big_n + 1, 0);
    std::vector<std::uint32_t> first_theta_sym(big_n + 1, 0);
    auto fresh = [&](std::uint32_t db, std::uint32_t msg) -> std::uint32_t {
        if (msg == theta) {
            ++theta_draws[db];
            if (options.mutation == Mutation::ReuseSymbolIndex && theta_draws[db] == 2) {
                return first_theta_sym[db];
            }
            if (theta_draws[db] == 1) {
                first_theta_sym[db] = next_sym[msg];
            }
        }
        return next_sym[msg]++;
    };

    std::vector<std::vector<BuiltRow>> built(big_n);
    // nondesired[r-1][n-1] = construction ids of database n's fresh rows of round r
    std::vector<std::vector<std::vector<std::uint32_t>>> nondesired(
        active_count, std::vector<std::vector<std::uint32_t>>(big_n));

    auto add_row = [&](std::uint32_t n, QuerySpec spec, RowInfo info) -> std::uint32_t {
        std::sort(spec.terms.begin(), spec.terms.end(),
                  [](const Term& a, const Term& b) { return a.msg < b.msg; });
        info.id = static_cast<std::uint32_t>(built[n - 1].size());
        info.round = spec.size();
        built[n - 1].push_back(BuiltRow{std::move(spec), info});
        return info.id;
    };

    const std::uint32_t skip_round = active_count >= 2 ? active_count - 1 : 0;

    for (std::uint32_t r = 1; r <= active_count; ++r) {
        for (std::uint32_t n = 1; n <= big_n; ++n) {
            // Desired rows: round 1 opens with a bare fresh symbol; later
            // rounds pair a fresh symbol with one side-information sum from
            // each other database's previous round, in cyclic order.
            if (r == 1) {
                QuerySpec spec;
                spec.terms.push_back(Term{theta, fresh(n, theta)});
                RowInfo info;
                info.desired = true;
                add_row(n, std::move(spec), info);
            } else {
                for (std::uint32_t off = 1; off < big_n; ++off) {
                    const std::uint32_t n2 = ((n - 1 + off) % big_n) + 1;
                    for (std::uint32_t src_id : nondesired[r - 2][n2 - 1]) {
                        const BuiltRow& src = built[n2 - 1][src_id];
                        QuerySpec spec;
                        RowInfo info;
                        info.desired = true;
                        info.source_db = static_cast<std::int32_t>(n2);
                        info.source_row = static_cast<std::int32_t>(src_id);
                        spec.terms.push_back(Term{theta, fresh(n, theta)});
                        const auto& own = plan.assignments[n - 1];
                        for (const Term& t : src.spec.terms) {
                            if (std::find(own.begin(), own.end(), t.msg) != own.end()) {
                                const std::uint32_t msg2 = replacement_for(n, n2, t.msg);
                                const Term sub{msg2, fresh(n, msg2)};
                                spec.terms.push_back(sub);
                                info.replacements.emplace_back(t, sub);
                            } else {
                                spec.terms.push_back(t);
                            }
                        }
                        add_row(n, std::move(spec), info);
                    }
                }
            }

            // Fresh rows: every r-subset of the active non-desired messages,
            // (N-1)^(r-1) copies each, one fresh symbol per message.
            const auto subsets = combinations(active_non_theta[n - 1], r);
            const std::uint64_t copies = small_pow(big_n - 1, r - 1);
            for (std::size_t si = 0; si < subsets.size(); ++si) {
                if (options.mutation == Mutation::SkipSubset && r == skip_round &&
                    si + 1 == subsets.size()) {
                    continue;
                }
                const auto& subset = subsets[si];
                bool known = true;
                for (std::uint32_t k : subset) {
                    known = known && plan.is_cached(k);
                }
                for (std::uint64_t c = 0; c < copies; ++c) {
                    QuerySpec spec;
                    for (std::uint32_t k : subset) {
                        spec.terms.push_back(Term{k, fresh(n, k)});
                    }
                    RowInfo info;
                    info.known = known;
                    const std::uint32_t id = add_row(n, std::move(spec), info);
                    nondesired[r - 1][n - 1].push_back(id);
                }
            }
        }
    }

    // Self-check: the generated structure has to reproduce the closed-form
    // counts exactly. Skipped for deliberately mutated tables.
    if (options.mutation == Mutation::None) {
        const std::uint32_t known_expected = counts.q.convert_to<std::uint32_t>();
        const std::uint32_t desired_expected = length / big_n;
        for (std::uint32_t n = 1; n <= big_n; ++n) {
            const auto& rows = built[n - 1];
            if (rows.size() != rows_expected) {
                throw InternalError("database row count disagrees with p");
            }
            std::uint32_t known_rows = 0, desired_rows = 0;
            std::vector<std::uint64_t> per_round(active_count + 1, 0);
            for (const BuiltRow& row : rows) {
                known_rows += row.info.known ? 1 : 0;
                desired_rows += row.info.desired ? 1 : 0;
                per_round[row.info.round] += 1;
            }
            if (known_rows != known_expected) {
                throw InternalError("known-row count disagrees with q");
            }
            if (desired_rows != desired_expected) {
                throw InternalError("desired-row count disagrees with L/N");
            }
            for (std::uint32_t r = 1; r <= active_count; ++r) {
                const BigInt expect = binomial(active_count, r) * BigInt(small_pow(big_n - 1, r - 1));
                if (BigInt(per_round[r]) != expect) {
                    throw InternalError("round " + std::to_string(r) + " row count off");
                }
            }
        }
        if (next_sym[theta] != length + 1) {
            throw InternalError("desired message must use symbols 1..L exactly");
        }
        for (std::uint32_t k = 1; k <= big_k; ++k) {
            if (next_sym[k] > length + 1) {
                throw InternalError("message " + std::to_string(k) + " used more than L symbols");
            }
        }
    }

    // Step 1: independent uniform symbol permutation per message. Logical
    // index a becomes stored position perm[a].
    std::vector<std::vector<std::uint32_t>> perm(big_k);
    for (std::uint32_t k = 1; k <= big_k; ++k) {
        if (options.permute_symbols) {
            perm[k - 1] = Rng(seed, "permute", k).permutation(length);
        }
    }
    auto mapped = [&](const Term& t) -> Term {
        if (!options.permute_symbols) {
            return t;
        }
        return Term{t.msg, perm[t.msg - 1][t.sym - 1] + 1};
    };
    for (auto& rows : built) {
        for (BuiltRow& row : rows) {
            for (Term& t : row.spec.terms) {
                t = mapped(t);
            }
            for (auto& [from, to] : row.info.replacements) {
                from = mapped(from);
                to = mapped(to);
            }
        }
    }

    // Step 6: uniform shuffle of each database's row order.
    table.dbs.resize(big_n);
    for (std::uint32_t n = 1; n <= big_n; ++n) {
        auto& rows = built[n - 1];
        std::vector<std::uint32_t> order(rows.size());
        std::iota(order.begin(), order.end(), 0u);
        if (options.shuffle_rows && options.mutation != Mutation::NoShuffle) {
            Rng(seed, "shuffle", n).shuffle(order);
        }
        DatabaseTable& db = table.dbs[n - 1];
        db.rows.reserve(rows.size());
        db.info.reserve(rows.size());
        db.id_to_pos.assign(rows.size(), 0);
        for (std::uint32_t pos = 0; pos < order.size(); ++pos) {
            BuiltRow& row = rows[order[pos]];
            db.id_to_pos[row.info.id] = pos;
            db.rows.push_back(std::move(row.spec));
            db.info.push_back(std::move(row.info));
        }
    }
    return table;
}

std::string structural_signature(const QueryTable& table, std::uint32_t db) {
    if (db < 1 || db > table.big_n) {
        throw DomainError("database index outside [1, N]");
    }
    const std::vector<std::uint32_t> msgs = table.active_messages(db);
    if (msgs.size() > 8) {
        throw BudgetError("signature relabeling over " + std::to_string(msgs.size()) +
                          "! message labelings is past the audit budget");
    }
    const DatabaseTable& d = table.dbs[db - 1];

    // What a database can observe, once the symbol permutations and the row
    // shuffle have done their work, is determined by the multiset of row
    // supports together with the per-message symbol-index multiplicities
    // (all ones for a fresh-index-disciplined table). The signature records
    // exactly that, with indices renamed to first-use order per message.
    std::map<std::uint32_t, std::map<std::uint32_t, std::uint32_t>> uses;  // msg -> sym -> count
    for (const QuerySpec& row : d.rows) {
        for (const Term& t : row.terms) {
            uses[t.msg][t.sym] += 1;
        }
    }
    std::map<std::uint32_t, std::uint32_t> slot;  // message -> position in `msgs`
    for (std::uint32_t i = 0; i < msgs.size(); ++i) {
        slot[msgs[i]] = i;
    }

    // Canonical representative: lexicographic minimum over all relabelings
    // of the active messages.
    std::vector<std::uint32_t> relabel(msgs.size());
    std::iota(relabel.begin(), relabel.end(), 0u);
    std::string best;
    do {
        std::vector<std::vector<std::uint32_t>> supports;
        supports.reserve(d.rows.size());
        for (const QuerySpec& row : d.rows) {
            std::vector<std::uint32_t> s;
            s.reserve(row.terms.size());
            for (const Term& t : row.terms) {
                s.push_back(relabel[slot[t.msg]]);
            }
            std::sort(s.begin(), s.end());
            supports.push_back(std::move(s));
        }
        std::sort(supports.begin(), supports.end());

        std::vector<std::pair<std::uint32_t, std::vector<std::uint32_t>>> profiles;
        for (const auto& [msg, per_sym] : uses) {
            std::vector<std::uint32_t> counts;
            counts.reserve(per_sym.size());
            for (const auto& [sym, cnt] : per_sym) {
                counts.push_back(cnt);
            }
            std::sort(counts.begin(), counts.end());
            profiles.emplace_back(relabel[slot[msg]], std::move(counts));
        }
        std::sort(profiles.begin(), profiles.end());

        std::ostringstream os;
        for (const auto& s : supports) {
            os << '(';
            for (std::uint32_t v : s) {
                os << v << ',';
            }
            os << ')';
        }
        os << '|';
        for (const auto& [label, counts] : profiles) {
            os << label << ':';
            for (std::uint32_t c : counts) {
                os << c << ',';
            }
            os << ';';
        }
        std::string s = os.str();
        if (best.empty() || s < best) {
            best = std::move(s);
        }
    } while (std::next_permutation(relabel.begin(), relabel.end()));
    return best;
}

std::string realized_form(const QueryTable& table, std::uint32_t db) {
    if (db < 1 || db > table.big_n) {
        throw DomainError("database index outside [1, N]");
    }
    std::ostringstream os;
    for (const QuerySpec& row : table.dbs[db - 1].rows) {
        bool first = true;
        for (const Term& t : row.terms) {
            if (!first) {
                os << ',';
            }
            os << t.msg;
            first = false;
        }
        os << ';';
    }
    return os.str();
}

namespace {

std::string term_str(const Term& t, std::uint32_t big_k) {
    if (big_k <= 26) {
        return std::string(1, static_cast<char>('a' + t.msg - 1)) + std::to_string(t.sym);
    }
    return "w" + std::to_string(t.msg) + "s" + std::to_string(t.sym);
}

}  // namespace

std::string render_table_text(const QueryTable& table) {
    std::vector<std::vector<std::string>> cols(table.big_n);
    std::vector<std::size_t> width(table.big_n);
    for (std::uint32_t n = 1; n <= table.big_n; ++n) {
        const DatabaseTable& d = table.dbs[n - 1];
        for (std::uint32_t i = 0; i < d.rows.size(); ++i) {
            std::string line;
            for (const Term& t : d.rows[i].terms) {
                if (!line.empty()) {
                    line += '+';
                }
                line += term_str(t, table.big_k);
            }
            if (d.info[i].known) {
                line += " *";
            }
            cols[n - 1].push_back(line);
        }
        width[n - 1] = std::string("DB" + std::to_string(n)).size();
        for (const auto& s : cols[n - 1]) {
            width[n - 1] = std::max(width[n - 1], s.size());
        }
    }

    std::ostringstream os;
    for (std::uint32_t n = 1; n <= table.big_n; ++n) {
        std::string h = "DB" + std::to_string(n);
        h.resize(width[n - 1], ' ');
        os << (n == 1 ? "" : "  | ") << h;
    }
    os << '\n';
    const std::uint32_t rows = table.rows_per_db();
    for (std::uint32_t i = 0; i < rows; ++i) {
        for (std::uint32_t n = 1; n <= table.big_n; ++n) {
            std::string cell = i < cols[n - 1].size() ? cols[n - 1][i] : "";
            cell.resize(width[n - 1], ' ');
            os << (n == 1 ? "" : "  | ") << cell;
        }
        os << '\n';
    }
    os << "cached:";
    for (std::uint32_t n = 1; n <= table.big_n; ++n) {
        os << " DB" << n << "={";
        const auto& a = table.plan.assignments[n - 1];
        for (std::size_t i = 0; i < a.size(); ++i) {
            os << (i ? "," : "") << "W" << a[i];
        }
        os << "}";
    }
    os << "  ('*' = row fully determined by cached side information)\n";
    return os.str();
}

}  // namespace pkpir
