#include <doctest.h>

#include <thread>
#include <vector>

#include "pkpir/engine.hpp"
#include "pkpir/errors.hpp"
#include "pkpir/json_io.hpp"

using namespace pkpir;

namespace {

PrefetchPlan make_plan(std::vector<std::vector<std::uint32_t>> a) {
    PrefetchPlan p;
    p.assignments = std::move(a);
    return p;
}

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("all-zero store yields all-zero parity and message") {
    const PrefetchPlan plan = make_plan({{3}, {4}});
    const MessageStore store = MessageStore::zero(4, 8, 4);
    const RetrievalTranscript tr = run_retrieval(plan, 1, store, 7);
    for (const AnswerBlock& a : tr.answers) {
        for (Fe v : a.parity) {
            CHECK(v == 0);
        }
    }
    CHECK(tr.decoded == std::vector<Fe>(8, 0));
}

TEST_CASE("the (2,4,2) retrieval: 6 parity symbols per database, ratio 3/2") {
    const PrefetchPlan plan = make_plan({{3}, {4}});
    const MessageStore store = MessageStore::random(4, 8, 4, 99);
    const RetrievalTranscript tr = run_retrieval(plan, 1, store, 7);
    CHECK(tr.answers.size() == 2);
    CHECK(tr.answers[0].parity.size() == 6);
    CHECK(tr.answers[1].parity.size() == 6);
    CHECK(tr.downloaded_symbols == 12);
    CHECK(tr.download_ratio() == Rational(3, 2));
    CHECK(tr.decoded == store.symbols[0]);
}

TEST_CASE("the (2,5,2) retrieval: 28 downloaded symbols, ratio 7/4") {
    const PrefetchPlan plan = make_plan({{4}, {5}});
    const MessageStore store = MessageStore::random(5, 16, 5, 3);
    const RetrievalTranscript tr = run_retrieval(plan, 1, store, 11);
    CHECK(tr.downloaded_symbols == 28);
    CHECK(tr.download_ratio() == Rational(7, 4));
    CHECK(tr.decoded == store.symbols[0]);
}

TEST_CASE("no cache reduces to the classical cost") {
    const PrefetchPlan plan = make_plan({{}, {}});
    const MessageStore store = MessageStore::random(2, 4, 3, 5);
    const RetrievalTranscript tr = run_retrieval(plan, 2, store, 13);
    CHECK(tr.download_ratio() == Rational(3, 2));
    CHECK(tr.download_ratio() == classical_cost(2, 2));
    CHECK(tr.decoded == store.symbols[1]);
}

TEST_CASE("degenerate geometry: the lone parity symbol equals the row value") {
    // (2,1,0): p=1, q=0, a (2,1) code; the interpolating polynomial is
    // constant, so parity replays the systematic value.
    const PrefetchPlan plan = make_plan({{}, {}});
    const MessageStore store = MessageStore::random(1, 2, 1, 21);
    const QueryTable table = build_query_table(2, 1, 0, 1, plan, 5);
    for (std::uint32_t n = 1; n <= 2; ++n) {
        const AnswerBlock a = database_answer(store, table, n);
        REQUIRE(a.parity.size() == 1);
        const Term t = table.dbs[n - 1].rows[0].terms[0];
        CHECK(a.parity[0] == store.at(t.msg, t.sym));
    }
}

TEST_CASE("decoding works over a wider field than required") {
    const PrefetchPlan plan = make_plan({{3}, {4}});
    const MessageStore store = MessageStore::random(4, 8, 8, 123);  // GF(256) for a (13,7) code
    const RetrievalTranscript tr = run_retrieval(plan, 1, store, 17);
    CHECK(tr.decoded == store.symbols[0]);
}

TEST_CASE("transcripts are deterministic") {
    const PrefetchPlan plan = make_plan({{4}, {5}});
    const MessageStore store = MessageStore::random(5, 16, 5, 31);
    const RetrievalTranscript a = run_retrieval(plan, 2, store, 77);
    const RetrievalTranscript b = run_retrieval(plan, 2, store, 77);
    CHECK(transcript_to_json(a).dump() == transcript_to_json(b).dump());
}

TEST_CASE("an answer depends only on the store and that database's own rows") {
    const PrefetchPlan plan = make_plan({{3}, {4}});
    const MessageStore store = MessageStore::random(4, 8, 4, 9);
    const QueryTable table = build_query_table(2, 4, 2, 1, plan, 5);
    const AnswerBlock before = database_answer(store, table, 1);

    QueryTable perturbed = table;
    std::swap(perturbed.dbs[1].rows[0], perturbed.dbs[1].rows[3]);
    const AnswerBlock after = database_answer(store, perturbed, 1);
    CHECK(before.parity == after.parity);
    CHECK(database_answer(store, table, 2).parity !=
          database_answer(store, perturbed, 2).parity);
}

TEST_CASE("databases can answer concurrently against a shared store") {
    const PrefetchPlan plan = uniform_prefetch(3, 5, 3, 1);
    std::uint32_t theta = 1;
    while (plan.is_cached(theta)) {
        ++theta;
    }
    const SchemeCounts counts = scheme_counts(3, 5, 3);
    const std::uint32_t width = min_field_width(counts);
    const MessageStore store =
        MessageStore::random(5, counts.length.convert_to<std::uint32_t>(), width, 2);
    const QueryTable table = build_query_table(3, 5, 3, theta, plan, 3);

    std::vector<AnswerBlock> parallel(3);
    std::vector<std::thread> threads;
    for (std::uint32_t n = 1; n <= 3; ++n) {
        threads.emplace_back(
            [&, n] { parallel[n - 1] = database_answer(store, table, n); });
    }
    for (auto& t : threads) {
        t.join();
    }
    for (std::uint32_t n = 1; n <= 3; ++n) {
        CHECK(parallel[n - 1].parity == database_answer(store, table, n).parity);
    }
}

TEST_CASE("reliability holds across a small grid, exercised per theta") {
    for (std::uint32_t n : {2u, 3u, 4u}) {
        for (std::uint32_t k = 2; k <= 5; ++k) {
            for (std::uint32_t per_db = 0; n * per_db < k; ++per_db) {
                const std::uint32_t m = n * per_db;
                const SchemeCounts counts = scheme_counts(n, k, m);
                const std::uint32_t width = min_field_width(counts);
                const std::uint32_t length = counts.length.convert_to<std::uint32_t>();
                const PrefetchPlan plan = uniform_prefetch(n, k, m, 17 + k);
                for (std::uint32_t theta = 1; theta <= k; ++theta) {
                    if (plan.is_cached(theta)) {
                        continue;
                    }
                    const MessageStore store =
                        MessageStore::random(k, length, width, 1000 + theta);
                    const RetrievalTranscript tr =
                        run_retrieval(plan, theta, store, 41 * theta + k);
                    REQUIRE(tr.decoded == store.symbols[theta - 1]);
                    REQUIRE(tr.download_ratio() == optimal_cost(n, k, m));
                }
            }
        }
    }
}

TEST_CASE("dimension and answer shape errors") {
    const PrefetchPlan plan = make_plan({{3}, {4}});
    const QueryTable table = build_query_table(2, 4, 2, 1, plan, 5);
    const MessageStore wrong = MessageStore::random(4, 4, 4, 1);
    CHECK_THROWS_AS(database_answer(wrong, table, 1), DimensionError);
    const MessageStore narrow = MessageStore::random(4, 8, 3, 1);  // 2^3 < 13
    CHECK_THROWS_AS(database_answer(narrow, table, 1), DimensionError);

    const MessageStore store = MessageStore::random(4, 8, 4, 1);
    std::vector<AnswerBlock> answers;
    for (std::uint32_t n = 1; n <= 2; ++n) {
        answers.push_back(database_answer(store, table, n));
    }
    const CachedMessages cache = cache_from_store(store, plan);
    CHECK(user_decode(table, answers, cache, 4) == store.symbols[0]);

    std::vector<AnswerBlock> truncated = answers;
    truncated[0].parity.pop_back();
    CHECK_THROWS_AS(user_decode(table, truncated, cache, 4), ReconstructError);
    std::vector<AnswerBlock> missing(answers.begin(), answers.begin() + 1);
    CHECK_THROWS_AS(user_decode(table, missing, cache, 4), ReconstructError);

    CachedMessages empty_cache;
    CHECK_THROWS_AS(user_decode(table, answers, empty_cache, 4), PeelError);
}

TEST_CASE("a malformed table trips the peeling pass") {
    const PrefetchPlan plan = make_plan({{3}, {4}});
    TableOptions opts;
    opts.mutation = Mutation::ReuseSymbolIndex;
    const QueryTable broken = build_query_table(2, 4, 2, 1, plan, 5, opts);
    const MessageStore store = MessageStore::random(4, 8, 4, 1);
    std::vector<AnswerBlock> answers;
    for (std::uint32_t n = 1; n <= 2; ++n) {
        answers.push_back(database_answer(store, broken, n));
    }
    CHECK_THROWS_AS(user_decode(broken, answers, cache_from_store(store, plan), 4),
                    PeelError);
}

TEST_CASE("transcript json carries the documented fields") {
    const PrefetchPlan plan = make_plan({{3}, {4}});
    const MessageStore store = MessageStore::random(4, 8, 4, 2);
    const RetrievalTranscript tr = run_retrieval(plan, 2, store, 6);
    const Json j = transcript_to_json(tr);
    CHECK(j["downloaded_symbols"] == 12);
    CHECK(j["ratio"] == "3/2");
    CHECK(j["answers"].size() == 2);
    CHECK(j["decoded"].get<std::string>().size() == 8);  // 8 symbols, 1 hex digit each
    CHECK(Json::parse(j.dump()).dump() == j.dump());
}

}  // TEST_SUITE
