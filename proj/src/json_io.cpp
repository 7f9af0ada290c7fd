#include "pkpir/json_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "pkpir/errors.hpp"

namespace pkpir {

Json plan_to_json(const PrefetchPlan& plan) {
    Json j = Json::object();
    for (std::uint32_t n = 1; n <= plan.databases(); ++n) {
        j[std::to_string(n)] = plan.assignments[n - 1];
    }
    return j;
}

PrefetchPlan plan_from_json(const Json& j) {
    if (!j.is_object()) {
        throw PlanError("plan file must be a JSON object mapping database -> messages");
    }
    std::size_t max_db = 0;
    for (const auto& [key, _] : j.items()) {
        std::size_t pos = 0;
        const unsigned long db = std::stoul(key, &pos);
        if (pos != key.size() || db < 1) {
            throw PlanError("bad database key '" + key + "' in plan file");
        }
        max_db = std::max(max_db, static_cast<std::size_t>(db));
    }
    PrefetchPlan plan;
    plan.assignments.resize(max_db);
    for (const auto& [key, val] : j.items()) {
        const std::size_t db = std::stoul(key);
        if (!val.is_array()) {
            throw PlanError("plan entry for database " + key + " must be an array");
        }
        for (const auto& v : val) {
            plan.assignments[db - 1].push_back(v.get<std::uint32_t>());
        }
        std::sort(plan.assignments[db - 1].begin(), plan.assignments[db - 1].end());
    }
    return plan;
}

PrefetchPlan load_plan_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw PlanError("cannot open plan file " + path);
    }
    Json j;
    in >> j;
    return plan_from_json(j);
}

std::string symbols_to_hex(const std::vector<Fe>& symbols, std::uint32_t width) {
    const std::uint32_t digits = (width + 3) / 4;
    std::ostringstream os;
    os << std::hex << std::setfill('0');
    for (Fe v : symbols) {
        os << std::setw(digits) << static_cast<std::uint32_t>(v);
    }
    return os.str();
}

namespace {

Json counts_to_json(const SchemeCounts& c) {
    return Json{{"p", c.p.convert_to<std::uint64_t>()},
                {"q", c.q.convert_to<std::uint64_t>()},
                {"L", c.length.convert_to<std::uint64_t>()},
                {"code_length", c.code_length.convert_to<std::uint64_t>()},
                {"parity_per_db", c.parity_per_db.convert_to<std::uint64_t>()}};
}

}  // namespace

Json table_to_json(const QueryTable& table) {
    Json databases = Json::array();
    for (std::uint32_t n = 1; n <= table.big_n; ++n) {
        const DatabaseTable& d = table.dbs[n - 1];
        Json rows = Json::array();
        for (std::uint32_t i = 0; i < d.rows.size(); ++i) {
            Json terms = Json::array();
            for (const Term& t : d.rows[i].terms) {
                terms.push_back(Json{{"msg", t.msg}, {"sym", t.sym}});
            }
            rows.push_back(Json{{"terms", std::move(terms)}, {"known", d.info[i].known}});
        }
        databases.push_back(Json{{"db", n}, {"rows", std::move(rows)}});
    }
    return Json{{"N", table.big_n},
                {"K", table.big_k},
                {"M", table.big_m},
                {"theta", table.theta},
                {"seed", table.seed},
                {"canonical", !table.options.permute_symbols && !table.options.shuffle_rows},
                {"plan", plan_to_json(table.plan)},
                {"counts", counts_to_json(table.counts)},
                {"databases", std::move(databases)}};
}

Json transcript_to_json(const RetrievalTranscript& tr) {
    const std::uint32_t width = min_field_width(tr.table.counts);
    Json answers = Json::array();
    for (const AnswerBlock& a : tr.answers) {
        answers.push_back(Json{{"db", a.db}, {"parity", symbols_to_hex(a.parity, width)}});
    }
    return Json{{"N", tr.table.big_n},
                {"K", tr.table.big_k},
                {"M", tr.table.big_m},
                {"theta", tr.table.theta},
                {"seed", tr.table.seed},
                {"plan", plan_to_json(tr.table.plan)},
                {"counts", counts_to_json(tr.table.counts)},
                {"answers", std::move(answers)},
                {"decoded", symbols_to_hex(tr.decoded, width)},
                {"downloaded_symbols", tr.downloaded_symbols},
                {"ratio", rational_str(tr.download_ratio())}};
}

Json privacy_report_to_json(const PrivacyReport& r) {
    Json j{{"mode", r.mode == AuditMode::Structural ? "structural" : "statistical"},
           {"N", r.big_n},
           {"K", r.big_k},
           {"M", r.big_m},
           {"db", r.db},
           {"pass", r.pass},
           {"cases", r.cases},
           {"failures", r.failures},
           {"details", r.details}};
    if (r.mode == AuditMode::Statistical) {
        j["samples"] = r.samples;
        j["alpha"] = r.alpha;
        j["statistic"] = r.test.statistic;
        j["df"] = r.test.df;
        j["p_value"] = r.test.p_value;
        j["categories"] = r.test.categories;
        j["edge_statistic"] = r.edge_test.statistic;
        j["edge_df"] = r.edge_test.df;
        j["edge_p_value"] = r.edge_test.p_value;
        j["retried"] = r.retried;
        if (r.retried) {
            j["retry_statistic"] = r.retry_test.statistic;
            j["retry_p_value"] = r.retry_test.p_value;
            j["retry_edge_statistic"] = r.retry_edge_test.statistic;
            j["retry_edge_p_value"] = r.retry_edge_test.p_value;
        }
    }
    return j;
}

Json grid_report_to_json(const GridReport& r) {
    Json cases = Json::array();
    for (const GridCase& c : r.cases) {
        cases.push_back(Json{{"N", c.point.big_n},
                             {"K", c.point.big_k},
                             {"M", c.point.big_m},
                             {"theta", c.theta},
                             {"seed", c.seed},
                             {"decode_ok", c.decode_ok},
                             {"ratio", c.ratio},
                             {"expected", c.expected},
                             {"exact", c.exact_ratio}});
    }
    return Json{{"pass", r.pass},
                {"runs", r.runs},
                {"failures", r.failures},
                {"cases", std::move(cases)}};
}

}  // namespace pkpir
