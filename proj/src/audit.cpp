#include "pkpir/audit.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <boost/math/distributions/chi_squared.hpp>

#include "pkpir/engine.hpp"
#include "pkpir/errors.hpp"
#include "pkpir/rng.hpp"

namespace pkpir {

ChiSquareResult two_sample_chi_square(const std::map<std::string, std::uint64_t>& a,
                                      const std::map<std::string, std::uint64_t>& b,
                                      std::uint64_t min_pooled) {
    std::set<std::string> keys;
    for (const auto& [k, _] : a) keys.insert(k);
    for (const auto& [k, _] : b) keys.insert(k);

    std::vector<std::pair<std::uint64_t, std::uint64_t>> cells;
    std::uint64_t rest_a = 0, rest_b = 0;
    for (const auto& key : keys) {
        const std::uint64_t ca = a.count(key) ? a.at(key) : 0;
        const std::uint64_t cb = b.count(key) ? b.at(key) : 0;
        if (ca + cb >= min_pooled) {
            cells.emplace_back(ca, cb);
        } else {
            rest_a += ca;
            rest_b += cb;
        }
    }
    if (rest_a + rest_b > 0) {
        cells.emplace_back(rest_a, rest_b);
    }

    ChiSquareResult r;
    r.categories = static_cast<std::uint32_t>(cells.size());
    if (cells.size() <= 1) {
        return r;  // nothing to compare; statistic 0, p-value 1
    }

    double n_a = 0, n_b = 0;
    for (const auto& [ca, cb] : cells) {
        n_a += static_cast<double>(ca);
        n_b += static_cast<double>(cb);
    }
    const double total = n_a + n_b;
    double stat = 0.0;
    for (const auto& [ca, cb] : cells) {
        const double col = static_cast<double>(ca + cb);
        const double ea = col * n_a / total;
        const double eb = col * n_b / total;
        const double da = static_cast<double>(ca) - ea;
        const double db = static_cast<double>(cb) - eb;
        stat += da * da / ea + db * db / eb;
    }
    r.statistic = stat;
    r.df = static_cast<std::uint32_t>(cells.size() - 1);
    const boost::math::chi_squared dist(r.df);
    r.p_value = boost::math::cdf(boost::math::complement(dist, stat));
    return r;
}

namespace {

std::vector<std::vector<std::uint32_t>> k_subsets(const std::vector<std::uint32_t>& pool,
                                                  std::uint32_t r) {
    std::vector<std::vector<std::uint32_t>> out;
    if (r == 0) {
        out.push_back({});
        return out;
    }
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

std::string subset_str(const std::vector<std::uint32_t>& s) {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < s.size(); ++i) {
        os << (i ? "," : "") << 'W' << s[i];
    }
    os << '}';
    return os.str();
}

/// Per-table count identities at one database; failures are appended.
void check_table_structure(const QueryTable& table, std::uint32_t db,
                           std::vector<std::string>& failures, const std::string& ctx) {
    const DatabaseTable& d = table.dbs[db - 1];
    const std::vector<std::uint32_t> active = table.active_messages(db);
    const std::uint32_t big_n = table.big_n;

    // support multiplicities
    std::map<std::vector<std::uint32_t>, std::uint64_t> support_count;
    std::map<std::uint32_t, std::set<std::uint32_t>> syms;
    std::uint32_t known_rows = 0, desired_rows = 0;
    for (std::uint32_t pos = 0; pos < d.rows.size(); ++pos) {
        std::vector<std::uint32_t> support;
        for (const Term& t : d.rows[pos].terms) {
            support.push_back(t.msg);
            if (!syms[t.msg].insert(t.sym).second) {
                failures.push_back(ctx + ": symbol index " + std::to_string(t.sym) +
                                   " of W" + std::to_string(t.msg) + " queried twice");
            }
        }
        support_count[support] += 1;
        known_rows += d.info[pos].known ? 1 : 0;
        desired_rows += d.info[pos].desired ? 1 : 0;
    }

    // every r-subset of the active messages appears (N-1)^(r-1) times
    const std::uint32_t rounds = static_cast<std::uint32_t>(active.size());
    for (std::uint32_t r = 1; r <= rounds; ++r) {
        std::uint64_t expect = 1;
        for (std::uint32_t i = 1; i < r; ++i) {
            expect *= big_n - 1;
        }
        for (const auto& s : k_subsets(active, r)) {
            const auto it = support_count.find(s);
            const std::uint64_t got = it == support_count.end() ? 0 : it->second;
            if (got != expect) {
                failures.push_back(ctx + ": subset " + subset_str(s) + " appears " +
                                   std::to_string(got) + " times, expected " +
                                   std::to_string(expect));
            }
        }
    }

    if (d.rows.size() != table.rows_per_db()) {
        failures.push_back(ctx + ": " + std::to_string(d.rows.size()) + " rows, expected p=" +
                           std::to_string(table.rows_per_db()));
    }
    if (known_rows != table.known_per_db()) {
        failures.push_back(ctx + ": " + std::to_string(known_rows) + " known rows, expected q=" +
                           std::to_string(table.known_per_db()));
    }
    if (desired_rows != table.length() / big_n) {
        failures.push_back(ctx + ": " + std::to_string(desired_rows) +
                           " desired rows, expected L/N=" +
                           std::to_string(table.length() / big_n));
    }
}

/// Every way to hand the remaining databases their m-share, depth-first.
void enumerate_completions(const std::vector<std::uint32_t>& pool, std::uint32_t share,
                           std::uint32_t dbs_left,
                           std::vector<std::vector<std::uint32_t>>& current,
                           const std::function<void(const std::vector<std::vector<std::uint32_t>>&)>& emit) {
    if (dbs_left == 0) {
        emit(current);
        return;
    }
    for (const auto& chosen : k_subsets(pool, share)) {
        std::vector<std::uint32_t> rest;
        for (std::uint32_t v : pool) {
            if (std::find(chosen.begin(), chosen.end(), v) == chosen.end()) {
                rest.push_back(v);
            }
        }
        current.push_back(chosen);
        enumerate_completions(rest, share, dbs_left - 1, current, emit);
        current.pop_back();
    }
}

}  // namespace

PrivacyReport audit_privacy_structural(std::uint32_t big_n, std::uint32_t big_k,
                                       std::uint32_t big_m, std::uint32_t db,
                                       Mutation mutation) {
    const SchemeCounts counts = scheme_counts(big_n, big_k, big_m);
    (void)counts;
    if (db < 1 || db > big_n) {
        throw DomainError("database index outside [1, N]");
    }
    const std::uint32_t share = big_m / big_n;

    // budget: C(K,m) * prod C(K-im, m) * (K-M) enumerated pairs
    BigInt grid = binomial(big_k, share) * BigInt(big_k - big_m);
    for (std::uint32_t i = 1; i < big_n; ++i) {
        grid *= binomial(big_k - i * share, share);
    }
    if (grid > 10000) {
        throw BudgetError("structural audit grid has " + grid.str() + " pairs (budget 10^4)");
    }

    PrivacyReport report;
    report.mode = AuditMode::Structural;
    report.big_n = big_n;
    report.big_k = big_k;
    report.big_m = big_m;
    report.db = db;

    std::vector<std::uint32_t> all(big_k);
    std::iota(all.begin(), all.end(), 1u);

    std::ostringstream digest_summary;
    const TableOptions opts = [&] {
        TableOptions o = TableOptions::canonical();
        o.mutation = mutation;
        return o;
    }();

    // outer: the share this database provided (fixed within a class)
    for (const auto& own : k_subsets(all, share)) {
        std::set<std::string> class_signatures;
        std::vector<std::uint32_t> rest;
        for (std::uint32_t k : all) {
            if (std::find(own.begin(), own.end(), k) == own.end()) {
                rest.push_back(k);
            }
        }
        std::vector<std::vector<std::uint32_t>> current;
        enumerate_completions(
            rest, share, big_n - 1, current,
            [&](const std::vector<std::vector<std::uint32_t>>& parts) {
                PrefetchPlan plan;
                plan.assignments.resize(big_n);
                plan.assignments[db - 1] = own;
                std::uint32_t pi = 0;
                for (std::uint32_t n = 1; n <= big_n; ++n) {
                    if (n == db) {
                        continue;
                    }
                    plan.assignments[n - 1] = parts[pi++];
                    std::sort(plan.assignments[n - 1].begin(), plan.assignments[n - 1].end());
                }
                for (std::uint32_t theta = 1; theta <= big_k; ++theta) {
                    if (plan.is_cached(theta)) {
                        continue;
                    }
                    const QueryTable table =
                        build_query_table(big_n, big_k, big_m, theta, plan, 0, opts);
                    report.cases += 1;
                    std::ostringstream ctx;
                    ctx << "db" << db << " theta=" << theta << " H=" << subset_str(plan.all_cached());
                    check_table_structure(table, db, report.failures, ctx.str());
                    class_signatures.insert(structural_signature(table, db));
                }
            });
        if (class_signatures.size() > 1) {
            report.failures.push_back("H_db=" + subset_str(own) + " yields " +
                                      std::to_string(class_signatures.size()) +
                                      " distinct signatures");
        }
        digest_summary << subset_str(own) << ":" << class_signatures.size() << " ";
    }

    report.pass = report.failures.empty();
    report.details = "signature classes per H_db -> " + digest_summary.str();
    return report;
}

PrivacyReport audit_privacy_statistical(std::uint32_t big_n, std::uint32_t big_k,
                                        std::uint32_t big_m, std::uint32_t db,
                                        std::uint64_t samples, double alpha,
                                        std::uint64_t seed, Mutation mutation) {
    const SchemeCounts counts = scheme_counts(big_n, big_k, big_m);
    if (db < 1 || db > big_n) {
        throw DomainError("database index outside [1, N]");
    }
    if (samples < 1000) {
        throw DomainError("statistical audit needs at least 10^3 samples");
    }
    if (counts.p > 2000 || samples > 2000000) {
        throw BudgetError("statistical audit would sample too much work");
    }

    PrivacyReport report;
    report.mode = AuditMode::Statistical;
    report.big_n = big_n;
    report.big_k = big_k;
    report.big_m = big_m;
    report.db = db;
    report.samples = samples;
    report.alpha = alpha;

    if (big_k - big_m < 2) {
        report.pass = true;
        report.details = "single admissible desired index; nothing to distinguish";
        return report;
    }

    const std::uint32_t share = big_m / big_n;
    PrefetchPlan plan;
    plan.assignments.resize(big_n);
    for (std::uint32_t n = 1; n <= big_n; ++n) {
        for (std::uint32_t i = 0; i < share; ++i) {
            plan.assignments[n - 1].push_back((n - 1) * share + i + 1);
        }
    }
    const std::uint32_t theta_a = big_m + 1;
    const std::uint32_t theta_b = big_m + 2;

    // The canonical forms keep ordered supports only, so the symbol
    // permutations cannot change them; skip them for speed.
    TableOptions opts;
    opts.permute_symbols = false;
    opts.mutation = mutation;

    auto edge_form = [](const QueryTable& t, std::uint32_t n) {
        const auto& rows = t.dbs[n - 1].rows;
        std::ostringstream os;
        for (const Term& term : rows.front().terms) {
            os << term.msg << ',';
        }
        os << '|';
        for (const Term& term : rows.back().terms) {
            os << term.msg << ',';
        }
        return os.str();
    };

    auto draw = [&](std::uint64_t run_seed) {
        std::map<std::string, std::uint64_t> full_a, full_b, edge_a, edge_b;
        for (std::uint64_t s = 0; s < samples; ++s) {
            const QueryTable ta = build_query_table(big_n, big_k, big_m, theta_a, plan,
                                                    derive_seed(run_seed, "stat-a", s), opts);
            full_a[realized_form(ta, db)] += 1;
            edge_a[edge_form(ta, db)] += 1;
            const QueryTable tb = build_query_table(big_n, big_k, big_m, theta_b, plan,
                                                    derive_seed(run_seed, "stat-b", s), opts);
            full_b[realized_form(tb, db)] += 1;
            edge_b[edge_form(tb, db)] += 1;
        }
        return std::pair{two_sample_chi_square(full_a, full_b),
                         two_sample_chi_square(edge_a, edge_b)};
    };

    report.cases = 2;
    std::tie(report.test, report.edge_test) = draw(seed);
    const bool full_hit = report.test.p_value < alpha;
    const bool edge_hit = report.edge_test.p_value < alpha;
    if (full_hit || edge_hit) {
        report.retried = true;
        std::tie(report.retry_test, report.retry_edge_test) = draw(derive_seed(seed, "retry"));
        const bool full_confirmed = full_hit && report.retry_test.p_value < alpha;
        const bool edge_confirmed = edge_hit && report.retry_edge_test.p_value < alpha;
        report.pass = !full_confirmed && !edge_confirmed;
    } else {
        report.pass = true;
    }

    std::ostringstream os;
    os << "theta " << theta_a << " vs " << theta_b << ": full X2=" << report.test.statistic
       << " df=" << report.test.df << " p=" << report.test.p_value
       << "; edges X2=" << report.edge_test.statistic << " df=" << report.edge_test.df
       << " p=" << report.edge_test.p_value;
    if (report.retried) {
        os << " (retry: full p=" << report.retry_test.p_value
           << ", edges p=" << report.retry_edge_test.p_value << ")";
    }
    report.details = os.str();
    if (!report.pass) {
        report.failures.push_back("canonical-form distributions differ at db" +
                                  std::to_string(db) + ": " + report.details);
    }
    return report;
}

std::vector<GridPoint> default_grid() {
    std::vector<GridPoint> pts;
    for (std::uint32_t n : {2u, 3u}) {
        for (std::uint32_t k = 2; k <= 6; ++k) {
            for (std::uint32_t m = 0; m <= 2; ++m) {
                const std::uint32_t big_m = n * m;
                if (big_m < k) {
                    pts.push_back(GridPoint{n, k, big_m});
                }
            }
        }
    }
    return pts;
}

GridReport audit_capacity_grid(const std::vector<GridPoint>& points, std::uint32_t repeats,
                               std::uint64_t seed, std::uint32_t jobs) {
    GridReport report;
    std::vector<std::vector<GridCase>> per_point(points.size());
    std::vector<std::vector<std::string>> per_failures(points.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= points.size()) {
                return;
            }
            const GridPoint& pt = points[i];
            const SchemeCounts counts = scheme_counts(pt.big_n, pt.big_k, pt.big_m);
            const std::uint32_t width = min_field_width(counts);
            const std::uint32_t length = counts.length.convert_to<std::uint32_t>();
            const Rational expected = optimal_cost(pt.big_n, pt.big_k, pt.big_m);
            const PrefetchPlan plan =
                uniform_prefetch(pt.big_n, pt.big_k, pt.big_m, derive_seed(seed, "grid-plan", i));
            for (std::uint32_t theta = 1; theta <= pt.big_k; ++theta) {
                if (plan.is_cached(theta)) {
                    continue;
                }
                for (std::uint32_t rep = 0; rep < repeats; ++rep) {
                    const std::uint64_t case_seed =
                        derive_seed(seed, "grid-case", (i * 64 + theta) * 1024 + rep);
                    const MessageStore store = MessageStore::random(
                        pt.big_k, length, width, derive_seed(case_seed, "grid-store"));
                    GridCase gc;
                    gc.point = pt;
                    gc.theta = theta;
                    gc.seed = case_seed;
                    try {
                        const RetrievalTranscript tr =
                            run_retrieval(plan, theta, store, case_seed);
                        gc.decode_ok = tr.decoded == store.symbols[theta - 1];
                        gc.ratio = rational_str(tr.download_ratio());
                        gc.expected = rational_str(expected);
                        gc.exact_ratio = tr.download_ratio() == expected;
                    } catch (const Error& e) {
                        gc.decode_ok = false;
                        gc.exact_ratio = false;
                        gc.ratio = std::string("error: ") + e.what();
                        gc.expected = rational_str(expected);
                    }
                    if (!gc.decode_ok || !gc.exact_ratio) {
                        std::ostringstream os;
                        os << "N=" << pt.big_n << " K=" << pt.big_k << " M=" << pt.big_m
                           << " theta=" << theta << " rep=" << rep
                           << (gc.decode_ok ? "" : " decode mismatch")
                           << (gc.exact_ratio ? "" : " ratio " + gc.ratio + " != " + gc.expected);
                        per_failures[i].push_back(os.str());
                    }
                    per_point[i].push_back(std::move(gc));
                }
            }
        }
    };

    const std::uint32_t nthreads = std::max(1u, jobs);
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::uint32_t t = 0; t < nthreads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    for (std::size_t i = 0; i < points.size(); ++i) {
        for (auto& c : per_point[i]) {
            report.cases.push_back(std::move(c));
        }
        for (auto& f : per_failures[i]) {
            report.failures.push_back(std::move(f));
        }
    }
    report.runs = report.cases.size();
    report.pass = report.failures.empty();
    return report;
}

}  // namespace pkpir
