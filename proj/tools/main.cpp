// pkpir: simulate and audit two-phase private information retrieval with
// partially known private side information.
//
// Subcommands: capacity, counts, table, retrieve, audit.
// Exit codes: 0 success, 1 audit/verification failure, 2 usage error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pkpir/audit.hpp"
#include "pkpir/engine.hpp"
#include "pkpir/errors.hpp"
#include "pkpir/json_io.hpp"
#include "pkpir/rng.hpp"

namespace {

using namespace pkpir;

struct CommonOpts {
    std::uint32_t big_n = 2;
    std::uint32_t big_k = 2;
    std::uint32_t big_m = 0;
    std::optional<std::uint32_t> theta;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint32_t> width;
    std::string format = "text";
    std::string plan_file;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_theta) {
    cmd->add_option("-N,--databases", o.big_n, "number of databases")->required();
    cmd->add_option("-K,--messages", o.big_k, "number of messages")->required();
    cmd->add_option("-M,--cache", o.big_m, "cache size in whole messages")->default_val(0);
    if (with_theta) {
        cmd->add_option("--theta", o.theta, "desired message index (random if absent)");
        cmd->add_option("--seed", o.seed, "master seed (random if absent)");
        cmd->add_option("--width", o.width, "field width override (bits, 1..16)")
            ->check(CLI::Range(1u, 16u));
        cmd->add_option("--plan", o.plan_file, "prefetch plan JSON file");
    }
    cmd->add_option("--format", o.format, "output format: text, json or csv")
        ->check(CLI::IsMember({"text", "json", "csv"}));
}

std::uint64_t pick_seed(const CommonOpts& o, bool quiet) {
    if (o.seed) {
        return *o.seed;
    }
    std::random_device rd;
    const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    if (!quiet) {
        std::cout << "seed " << s << " (pass --seed to reproduce)\n";
    }
    return s;
}

PrefetchPlan resolve_plan(const CommonOpts& o, std::uint64_t seed) {
    if (!o.plan_file.empty()) {
        PrefetchPlan plan = load_plan_file(o.plan_file);
        plan.validate(o.big_k, o.big_m);
        if (plan.databases() != o.big_n || plan.total_cached() != o.big_m) {
            throw PlanError("plan file does not match -N/-M");
        }
        return plan;
    }
    return uniform_prefetch(o.big_n, o.big_k, o.big_m, seed);
}

std::uint32_t resolve_theta(const CommonOpts& o, const PrefetchPlan& plan,
                            std::uint64_t seed) {
    if (o.theta) {
        return *o.theta;
    }
    std::vector<std::uint32_t> candidates;
    for (std::uint32_t k = 1; k <= o.big_k; ++k) {
        if (!plan.is_cached(k)) {
            candidates.push_back(k);
        }
    }
    Rng rng(seed, "theta");
    return candidates[static_cast<std::size_t>(rng.below(candidates.size()))];
}

int cmd_capacity(const CommonOpts& o) {
    const Rational cost = optimal_cost(o.big_n, o.big_k, o.big_m);
    const Rational cap = Rational(1) / cost;
    if (o.format == "json") {
        const Json j{{"N", o.big_n},          {"K", o.big_k},
                     {"M", o.big_m},          {"download_cost", rational_str(cost)},
                     {"capacity", rational_str(cap)}, {"download_cost_decimal", rational_to_double(cost)},
                     {"capacity_decimal", rational_to_double(cap)}};
        std::cout << j.dump(2) << "\n";
    } else if (o.format == "csv") {
        std::cout << "N,K,M,download_cost,capacity\n"
                  << o.big_n << ',' << o.big_k << ',' << o.big_m << ',' << rational_str(cost)
                  << ',' << rational_str(cap) << "\n";
    } else {
        std::cout << "D* = " << rational_str(cost) << ", C = " << rational_str(cap) << "  ("
                  << rational_to_double(cost) << ", " << rational_to_double(cap) << ")\n";
    }
    return 0;
}

int cmd_counts(const CommonOpts& o) {
    const SchemeCounts c = scheme_counts(o.big_n, o.big_k, o.big_m);
    const std::uint32_t width = min_field_width(c);
    const Rational cost = optimal_cost(o.big_n, o.big_k, o.big_m);
    if (o.format == "json") {
        const Json j{{"N", o.big_n},
                     {"K", o.big_k},
                     {"M", o.big_m},
                     {"p", c.p.convert_to<std::uint64_t>()},
                     {"q", c.q.convert_to<std::uint64_t>()},
                     {"L", c.length.convert_to<std::uint64_t>()},
                     {"code_length", c.code_length.convert_to<std::uint64_t>()},
                     {"parity_per_db", c.parity_per_db.convert_to<std::uint64_t>()},
                     {"min_field_width", width},
                     {"download_cost", rational_str(cost)}};
        std::cout << j.dump(2) << "\n";
    } else if (o.format == "csv") {
        std::cout << "N,K,M,p,q,L,code_length,parity_per_db,min_field_width,download_cost\n"
                  << o.big_n << ',' << o.big_k << ',' << o.big_m << ',' << c.p << ',' << c.q
                  << ',' << c.length << ',' << c.code_length << ',' << c.parity_per_db << ','
                  << width << ',' << rational_str(cost) << "\n";
    } else {
        std::cout << "p = " << c.p << ", q = " << c.q << ", L = " << c.length << ", code = ("
                  << c.code_length << "," << c.p << "), parity/db = " << c.parity_per_db
                  << ", min width = " << width << ", D/L = " << rational_str(cost) << "\n";
    }
    return 0;
}

int cmd_table(const CommonOpts& o, bool canonical) {
    const std::uint64_t seed = pick_seed(o, o.format != "text");
    const PrefetchPlan plan = resolve_plan(o, seed);
    const std::uint32_t theta = resolve_theta(o, plan, seed);
    const TableOptions opts = canonical ? TableOptions::canonical() : TableOptions{};
    const QueryTable table =
        build_query_table(o.big_n, o.big_k, o.big_m, theta, plan, seed, opts);
    if (o.format == "json") {
        std::cout << table_to_json(table).dump(2) << "\n";
    } else {
        std::cout << "N=" << o.big_n << " K=" << o.big_k << " M=" << o.big_m
                  << " theta=" << theta << " seed=" << seed
                  << (canonical ? " (canonical order)" : "") << "\n"
                  << render_table_text(table);
    }
    return 0;
}

int cmd_retrieve(const CommonOpts& o) {
    const std::uint64_t seed = pick_seed(o, o.format != "text");
    const PrefetchPlan plan = resolve_plan(o, seed);
    const std::uint32_t theta = resolve_theta(o, plan, seed);
    const SchemeCounts counts = scheme_counts(o.big_n, o.big_k, o.big_m);
    const std::uint32_t width = o.width ? *o.width : min_field_width(counts);
    const MessageStore store =
        MessageStore::random(o.big_k, counts.length.convert_to<std::uint32_t>(), width,
                             derive_seed(seed, "cli-store"));
    const RetrievalTranscript tr = run_retrieval(plan, theta, store, seed);
    const bool ok = tr.decoded == store.symbols[theta - 1];
    if (o.format == "json") {
        Json j = transcript_to_json(tr);
        j["decode_ok"] = ok;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "downloaded " << tr.downloaded_symbols << " of L=" << tr.table.length()
                  << " -> " << rational_str(tr.download_ratio()) << ", decode "
                  << (ok ? "OK" : "FAILED") << "\n";
    }
    return ok ? 0 : 1;
}

struct AuditOpts {
    CommonOpts common;
    bool structural = false;
    bool statistical = false;
    bool capacity = false;
    bool single_point = false;
    std::uint64_t samples = 10000;
    double alpha = 0.01;
    std::uint32_t repeats = 5;
    std::uint32_t jobs = 1;
    std::string mutate = "none";
};

int cmd_audit(const AuditOpts& a) {
    const Mutation mutation = mutation_from_name(a.mutate);
    const std::uint64_t seed = a.common.seed ? *a.common.seed : 0;
    const bool all = !a.structural && !a.statistical && !a.capacity;
    bool pass = true;
    Json report = Json::object();
    std::ostringstream text;

    if (a.structural || all) {
        Json section = Json::array();
        std::vector<GridPoint> pts;
        if (a.single_point) {
            pts.push_back(GridPoint{a.common.big_n, a.common.big_k, a.common.big_m});
        } else {
            for (std::uint32_t k = 1; k <= 4; ++k) {
                for (std::uint32_t m : {0u, 2u}) {
                    if (m < k) {
                        pts.push_back(GridPoint{2, k, m});
                    }
                }
            }
        }
        for (const GridPoint& pt : pts) {
            for (std::uint32_t db = 1; db <= pt.big_n; ++db) {
                const PrivacyReport r =
                    audit_privacy_structural(pt.big_n, pt.big_k, pt.big_m, db, mutation);
                pass = pass && r.pass;
                section.push_back(privacy_report_to_json(r));
                text << (r.pass ? "[PASS]" : "[FAIL]") << " structural privacy N=" << pt.big_n
                     << " K=" << pt.big_k << " M=" << pt.big_m << " db=" << db << " ("
                     << r.cases << " cases)\n";
                for (const std::string& f : r.failures) {
                    text << "       " << f << "\n";
                }
            }
        }
        report["structural"] = std::move(section);
    }

    if (a.statistical || all) {
        Json section = Json::array();
        std::vector<GridPoint> pts;
        if (a.single_point) {
            pts.push_back(GridPoint{a.common.big_n, a.common.big_k, a.common.big_m});
        } else {
            pts.push_back(GridPoint{2, 2, 0});
            pts.push_back(GridPoint{2, 4, 2});
        }
        for (const GridPoint& pt : pts) {
            for (std::uint32_t db = 1; db <= pt.big_n; ++db) {
                const PrivacyReport r = audit_privacy_statistical(
                    pt.big_n, pt.big_k, pt.big_m, db, a.samples, a.alpha, seed, mutation);
                pass = pass && r.pass;
                section.push_back(privacy_report_to_json(r));
                text << (r.pass ? "[PASS]" : "[FAIL]") << " statistical privacy N=" << pt.big_n
                     << " K=" << pt.big_k << " M=" << pt.big_m << " db=" << db << " ("
                     << r.details << ")\n";
            }
        }
        report["statistical"] = std::move(section);
    }

    if (a.capacity || all) {
        std::vector<GridPoint> pts;
        if (a.single_point) {
            pts.push_back(GridPoint{a.common.big_n, a.common.big_k, a.common.big_m});
        } else {
            pts = default_grid();
        }
        const GridReport r = audit_capacity_grid(pts, a.repeats, seed, a.jobs);
        pass = pass && r.pass;
        report["capacity"] = grid_report_to_json(r);
        text << (r.pass ? "[PASS]" : "[FAIL]") << " capacity grid: " << r.runs
             << " runs, " << r.failures.size() << " failures\n";
        for (const std::string& f : r.failures) {
            text << "       " << f << "\n";
        }
    }

    report["pass"] = pass;
    if (a.common.format == "json") {
        std::cout << report.dump(2) << "\n";
    } else {
        text << "audit " << (pass ? "PASS" : "FAIL") << "\n";
        std::cout << text.str();
    }
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"private information retrieval with partially known private side information"};
    app.require_subcommand(1);
    // key=value file with one [subcommand] section per command; command-line
    // flags always win over file values
    app.set_config("--config", "", "read options from a key=value file");

    CommonOpts cap_o, cnt_o, tbl_o, ret_o;
    AuditOpts aud;
    bool canonical = false;

    CLI::App* cap = app.add_subcommand("capacity", "optimal download cost and capacity");
    add_common(cap, cap_o, false);

    CLI::App* cnt = app.add_subcommand("counts", "per-database scheme geometry (p, q, L, code)");
    add_common(cnt, cnt_o, false);

    CLI::App* tbl = app.add_subcommand("table", "generate and print a query table");
    add_common(tbl, tbl_o, true);
    tbl->add_flag("--canonical", canonical,
                  "skip permutation and shuffle; prints the paper-style layout");

    CLI::App* ret = app.add_subcommand("retrieve", "run one retrieval end to end");
    add_common(ret, ret_o, true);

    CLI::App* au = app.add_subcommand("audit", "verify privacy, reliability and cost");
    add_common(au, aud.common, true);
    au->get_option("-N")->required(false);
    au->get_option("-K")->required(false);
    au->add_flag("--structural", aud.structural, "structural privacy audit only");
    au->add_flag("--statistical", aud.statistical, "statistical privacy audit only");
    au->add_flag("--capacity", aud.capacity, "capacity grid only");
    au->add_option("--samples", aud.samples, "samples per side for the statistical audit");
    au->add_option("--alpha", aud.alpha, "significance level");
    au->add_option("--repeats", aud.repeats, "stores per grid case");
    au->add_option("--jobs", aud.jobs, "worker threads for the capacity grid");
    au->add_option("--mutate", aud.mutate,
                   "test hook: none, skip-subset, no-shuffle, reuse-index");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*cap) return cmd_capacity(cap_o);
        if (*cnt) return cmd_counts(cnt_o);
        if (*tbl) return cmd_table(tbl_o, canonical);
        if (*ret) return cmd_retrieve(ret_o);
        if (*au) {
            aud.single_point = au->count("-N") > 0;
            return cmd_audit(aud);
        }
    } catch (const NonUniformError& e) {
        std::cerr << "error: " << e.what()
                  << "\n(the scheme is defined for uniform prefetching only)\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const PlanError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const WidthError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const BudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "verification error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
