#include <doctest.h>

#include <map>
#include <string>

#include "pkpir/audit.hpp"
#include "pkpir/errors.hpp"
#include "pkpir/json_io.hpp"

using namespace pkpir;

TEST_SUITE("audit") {

TEST_CASE("two-sample chi-square behaves at the extremes") {
    std::map<std::string, std::uint64_t> a, b;
    for (int i = 0; i < 6; ++i) {
        a["cat" + std::to_string(i)] = 1000;
        b["cat" + std::to_string(i)] = 1000;
    }
    const ChiSquareResult same = two_sample_chi_square(a, b);
    CHECK(same.statistic == doctest::Approx(0.0));
    CHECK(same.p_value == doctest::Approx(1.0));

    std::map<std::string, std::uint64_t> x{{"only-x", 5000}};
    std::map<std::string, std::uint64_t> y{{"only-y", 5000}};
    const ChiSquareResult disjoint = two_sample_chi_square(x, y);
    CHECK(disjoint.statistic > 1000.0);
    CHECK(disjoint.p_value < 1e-9);

    // everything merged into one bucket: nothing to compare
    std::map<std::string, std::uint64_t> tiny_a{{"u", 2}}, tiny_b{{"v", 3}};
    const ChiSquareResult merged = two_sample_chi_square(tiny_a, tiny_b, 10);
    CHECK(merged.categories <= 1);
    CHECK(merged.p_value == doctest::Approx(1.0));
}

TEST_CASE("structural audit passes on clean generators") {
    for (std::uint32_t db = 1; db <= 2; ++db) {
        const PrivacyReport r = audit_privacy_structural(2, 4, 2, db);
        CHECK(r.pass);
        CHECK(r.failures.empty());
        CHECK(r.cases == 4 * 3 * 2);  // H_db x completion x theta
    }
    const PrivacyReport trivial = audit_privacy_structural(2, 1, 0, 1);
    CHECK(trivial.pass);
    CHECK(trivial.cases == 1);
    const PrivacyReport n3 = audit_privacy_structural(3, 4, 3, 2);
    CHECK(n3.pass);
}

TEST_CASE("structural audit catches the skip-subset mutation and names the subset") {
    const PrivacyReport r = audit_privacy_structural(2, 4, 2, 1, Mutation::SkipSubset);
    CHECK_FALSE(r.pass);
    bool names_subset = false;
    for (const std::string& f : r.failures) {
        names_subset = names_subset || f.find("subset {") != std::string::npos;
    }
    CHECK(names_subset);
}

TEST_CASE("structural audit catches the reused symbol index") {
    const PrivacyReport r = audit_privacy_structural(2, 4, 2, 1, Mutation::ReuseSymbolIndex);
    CHECK_FALSE(r.pass);
    bool names_reuse = false;
    for (const std::string& f : r.failures) {
        names_reuse = names_reuse || f.find("queried twice") != std::string::npos;
    }
    CHECK(names_reuse);
}

TEST_CASE("structural audit budget") {
    CHECK_THROWS_AS(audit_privacy_structural(2, 24, 2, 1), BudgetError);
}

TEST_CASE("statistical audit passes clean and fails the shuffle mutation") {
    const PrivacyReport clean = audit_privacy_statistical(2, 2, 0, 1, 3000, 0.01, 12345);
    CHECK(clean.pass);
    CHECK(clean.samples == 3000);

    const PrivacyReport leak =
        audit_privacy_statistical(2, 2, 0, 1, 3000, 0.01, 12345, Mutation::NoShuffle);
    CHECK_FALSE(leak.pass);
    CHECK(leak.retried);  // a rejection is always confirmed on fresh samples
    CHECK(leak.test.p_value < 1e-9);

    const PrivacyReport trivial = audit_privacy_statistical(2, 1, 0, 1, 1000, 0.01, 1);
    CHECK(trivial.pass);
}

TEST_CASE("statistical audit validates its inputs") {
    CHECK_THROWS_AS(audit_privacy_statistical(2, 2, 0, 1, 10, 0.01, 1), DomainError);
    CHECK_THROWS_AS(audit_privacy_statistical(2, 2, 0, 5, 1000, 0.01, 1), DomainError);
}

TEST_CASE("capacity grid verifies the worked points") {
    const GridReport single = audit_capacity_grid({GridPoint{2, 4, 2}}, 2, 9);
    CHECK(single.pass);
    for (const GridCase& c : single.cases) {
        CHECK(c.ratio == "3/2");
        CHECK(c.decode_ok);
        CHECK(c.exact_ratio);
    }
    const GridReport second = audit_capacity_grid({GridPoint{2, 5, 2}}, 1, 9);
    CHECK(second.pass);
    CHECK(second.cases.front().ratio == "7/4");
}

TEST_CASE("capacity grid runs the default grid with fan-out") {
    const std::vector<GridPoint> grid = default_grid();
    CHECK(grid.size() == 19);
    const GridReport r = audit_capacity_grid(grid, 1, 5, 4);
    CHECK(r.pass);
    CHECK(r.runs > 0);
    // deterministic merge regardless of thread count
    const GridReport sequential = audit_capacity_grid(grid, 1, 5, 1);
    CHECK(grid_report_to_json(r) == grid_report_to_json(sequential));
}

TEST_CASE("report json shapes") {
    const PrivacyReport r = audit_privacy_structural(2, 2, 0, 1);
    const Json j = privacy_report_to_json(r);
    CHECK(j["mode"] == "structural");
    CHECK(j["pass"] == true);
    const PrivacyReport s = audit_privacy_statistical(2, 2, 0, 1, 1000, 0.01, 5);
    const Json js = privacy_report_to_json(s);
    CHECK(js["mode"] == "statistical");
    CHECK(js.contains("p_value"));
}

}  // TEST_SUITE
