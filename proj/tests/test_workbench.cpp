#include <doctest.h>

#include "tlr/workbench.hpp"

using namespace tlr;

namespace {

std::string golden(const std::string& name) {
    return std::string(TLR_DATA_DIR) + "/golden/" + name;
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name)
        : path(std::filesystem::temp_directory_path() / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string str(const std::string& child = "") const {
        return child.empty() ? path.string() : (path / child).string();
    }
};

int build_index(const TempDir& tmp) {
    std::ostringstream out, err;
    int rc = cmd_index(golden("corpus.jsonl"), tmp.str("index.json"), out, err);
    CHECK(err.str().empty());
    return rc;
}

RunOptions scripted_opts(const TempDir& tmp) {
    RunOptions opts;
    opts.config_path = golden("config.json");
    opts.out_dir = tmp.str("run");
    opts.scenario_path = golden("scenario.json");
    opts.index_path = tmp.str("index.json");
    return opts;
}

}  // namespace

TEST_CASE("cmd_index builds and reports a queryable index") {
    TempDir tmp("tlr_test_wb_index");
    std::ostringstream out, err;
    int rc = cmd_index(golden("corpus.jsonl"), tmp.str("index.json"), out, err);
    CHECK(rc == 0);
    CHECK(out.str().find("indexed 3 documents") != std::string::npos);

    LocalIndex index =
        index_from_json(Json::parse(detail::read_file(tmp.str("index.json"))));
    CHECK(index.doc_count == 3);
    CHECK(!search_local(index, "acme rocket", 5).empty());

    std::ostringstream out2, err2;
    CHECK(cmd_index(tmp.str("missing.jsonl"), tmp.str("x.json"), out2, err2) == 1);
    CHECK(err2.str().find("index:") != std::string::npos);
}

TEST_CASE("config resolution layers flags over the file over defaults") {
    RunOptions opts;
    opts.config_path = golden("config.json");
    EpisodeConfig from_file = resolve_config(opts);
    CHECK(from_file.query == "acme rocket program");
    CHECK(from_file.n_init == 20);

    opts.n_init = 7;
    opts.query = "overridden topic";
    EpisodeConfig overridden = resolve_config(opts);
    CHECK(overridden.n_init == 7);
    CHECK(overridden.query == "overridden topic");
    CHECK(overridden.n_exp == 20);  // untouched file value survives

    RunOptions defaults;
    defaults.query = "just a query";
    EpisodeConfig fresh = resolve_config(defaults);
    CHECK(fresh.n_init == 20);
    CHECK(fresh.max_iterations == 5);

    RunOptions invalid;
    invalid.query = "q";
    invalid.n_init = -1;
    CHECK_THROWS_AS(resolve_config(invalid), Error);
}

TEST_CASE("cmd_run executes the scripted episode and writes artifacts") {
    TempDir tmp("tlr_test_wb_run");
    REQUIRE(build_index(tmp) == 0);
    RunOptions opts = scripted_opts(tmp);
    opts.refs_path = golden("refs.json");

    std::ostringstream out, err;
    int rc = cmd_run(opts, out, err);
    CHECK(err.str().empty());
    CHECK(rc == 0);
    CHECK(out.str().find("termination: supervisor_terminate") != std::string::npos);

    CHECK(std::filesystem::exists(tmp.str("run/timeline.txt")));
    CHECK(std::filesystem::exists(tmp.str("run/timeline.json")));
    CHECK(std::filesystem::exists(tmp.str("run/manifest.jsonl")));
    CHECK(std::filesystem::exists(tmp.str("run/metrics.json")));

    std::string text = detail::read_file(tmp.str("run/timeline.txt"));
    CHECK(text.find("2021-03-05:") == 0);
    Json structured = Json::parse(detail::read_file(tmp.str("run/timeline.json")));
    CHECK(structured["query"] == "acme rocket program");
    CHECK(structured["entries"].size() == 3);

    // metrics against the first (identical) golden reference are high
    Json metrics = Json::parse(detail::read_file(tmp.str("run/metrics.json")));
    CHECK(metrics["per_reference"][0]["agree_r1"].get<double>() ==
          doctest::Approx(1.0));
    CHECK(metrics["per_reference"][0]["date_f1"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("cmd_run exits 2 on configuration errors before any work") {
    std::ostringstream out, err;
    RunOptions missing_config;
    missing_config.config_path = "/nonexistent/config.json";
    missing_config.out_dir = "/tmp/unused";
    CHECK(cmd_run(missing_config, out, err) == 2);

    RunOptions no_backends;
    no_backends.query = "q";
    no_backends.out_dir = "/tmp/unused";
    // no scenario and no LLM_ENDPOINT in the test environment
    if (std::getenv("LLM_ENDPOINT") == nullptr)
        CHECK(cmd_run(no_backends, out, err) == 2);
}

TEST_CASE("cmd_baseline produces the shared artifact shapes") {
    TempDir tmp("tlr_test_wb_baseline");
    REQUIRE(build_index(tmp) == 0);

    Json scenario{{"responses",
                   Json::array({Json{{"response",
                                      "2021-03-05: Acme fired the new rocket engine at "
                                      "the coastal stand.\n2021-09-20: Acme launched "
                                      "the first crewed mission.\n"}}})}};
    detail::write_file(tmp.str("baseline_scenario.json"), scenario.dump());

    RunOptions opts;
    opts.query = "acme rocket program";
    opts.out_dir = tmp.str("direct");
    opts.scenario_path = tmp.str("baseline_scenario.json");
    opts.index_path = tmp.str("index.json");
    opts.refs_path = golden("refs.json");

    std::ostringstream out, err;
    int rc = cmd_baseline("direct", opts, out, err);
    CHECK(err.str().empty());
    CHECK(rc == 0);
    CHECK(std::filesystem::exists(tmp.str("direct/manifest.jsonl")));
    CHECK(std::filesystem::exists(tmp.str("direct/metrics.json")));

    std::ostringstream out2, err2;
    CHECK(cmd_baseline("bogus", opts, out2, err2) == 2);
    CHECK(err2.str().find("unknown kind") != std::string::npos);
}

TEST_CASE("cmd_eval scores a structured timeline file") {
    TempDir tmp("tlr_test_wb_eval");
    Json pred{{"query", "acme rocket program"},
              {"entries",
               Json::array(
                   {Json{{"date", "2021-03-05"},
                         {"summary",
                          "Acme fired the new rocket engine at the coastal test stand "
                          "facility."},
                         {"sources", Json::array({"a1"})}},
                    Json{{"date", "2021-06-10"},
                         {"summary",
                          "The Acme rocket completed a maiden flight and reached orbit "
                          "successfully."}},
                    Json{{"date", "2021-09-20"},
                         {"summary",
                          "Acme launched the first crewed mission after months of "
                          "preparation work."}}})}};
    detail::write_file(tmp.str("pred.json"), pred.dump());

    std::ostringstream out, err;
    int rc = cmd_eval(tmp.str("pred.json"), golden("refs.json"), true,
                      tmp.str("metrics.json"), out, err);
    CHECK(err.str().empty());
    CHECK(rc == 0);
    CHECK(out.str().find("concat") != std::string::npos);
    Json metrics = Json::parse(detail::read_file(tmp.str("metrics.json")));
    CHECK(metrics["reference_count"] == 2);
    CHECK(metrics["per_reference"][0]["align_r1"].get<double>() == doctest::Approx(1.0));

    std::ostringstream out2, err2;
    CHECK(cmd_eval(tmp.str("nope.json"), golden("refs.json"), true, "", out2, err2) == 1);
    detail::write_file(tmp.str("bad.json"), "{broken");
    CHECK(cmd_eval(tmp.str("bad.json"), golden("refs.json"), true, "", out2, err2) == 1);
}

TEST_CASE("cmd_replay renders a transcript and rejects corrupt manifests") {
    TempDir tmp("tlr_test_wb_replay");
    REQUIRE(build_index(tmp) == 0);
    RunOptions opts = scripted_opts(tmp);
    std::ostringstream run_out, run_err;
    REQUIRE(cmd_run(opts, run_out, run_err) == 0);

    std::ostringstream out, err;
    int rc = cmd_replay(tmp.str("run/manifest.jsonl"), out, err);
    CHECK(rc == 0);
    std::string transcript = out.str();
    CHECK(transcript.find("== episode: acme rocket program ==") != std::string::npos);
    CHECK(transcript.find("-- iteration 1 --") != std::string::npos);
    CHECK(transcript.find("-- iteration 2 --") != std::string::npos);
    CHECK(transcript.find("action: search") != std::string::npos);
    CHECK(transcript.find("== termination: supervisor_terminate") != std::string::npos);

    detail::write_file(tmp.str("corrupt.jsonl"), "{\"type\":\"config\"}\nnot json\n");
    std::ostringstream out2, err2;
    CHECK(cmd_replay(tmp.str("corrupt.jsonl"), out2, err2) == 1);
    CHECK(err2.str().find("line 2") != std::string::npos);
}

TEST_CASE("cmd_report compares methods across run directories") {
    TempDir tmp("tlr_test_wb_report");
    REQUIRE(build_index(tmp) == 0);

    // engine run
    RunOptions run = scripted_opts(tmp);
    run.out_dir = tmp.str("engine");
    run.refs_path = golden("refs.json");
    std::ostringstream o1, e1;
    REQUIRE(cmd_run(run, o1, e1) == 0);

    // two baselines from a tiny scripted scenario each
    for (const std::string kind : {std::string("direct"), std::string("rewrite")}) {
        Json scenario{{"responses",
                       Json::array({Json{{"response", "acme engine\nacme flight"}},
                                    Json{{"response",
                                          "2021-03-05: Acme fired the new rocket engine "
                                          "at the coastal stand.\n"}},
                                    Json{{"response",
                                          "2021-03-05: Acme fired the new rocket engine "
                                          "at the coastal stand.\n"}}})}};
        detail::write_file(tmp.str(kind + "_scenario.json"), scenario.dump());
        RunOptions opts;
        opts.query = "acme rocket program";
        opts.out_dir = tmp.str(kind);
        opts.scenario_path = tmp.str(kind + "_scenario.json");
        opts.index_path = tmp.str("index.json");
        opts.refs_path = golden("refs.json");
        std::ostringstream o, e;
        REQUIRE(cmd_baseline(kind, opts, o, e) == 0);
    }

    std::ostringstream out, err;
    int rc = cmd_report({tmp.str("engine"), tmp.str("direct"), tmp.str("rewrite")},
                        out, err);
    CHECK(err.str().empty());
    CHECK(rc == 0);
    std::string table = out.str();
    CHECK(table.find("method") != std::string::npos);
    CHECK(table.find("engine") != std::string::npos);  // dir name for the engine run
    CHECK(table.find("direct") != std::string::npos);  // method from the manifest
    CHECK(table.find("rewrite") != std::string::npos);

    std::ostringstream out2, err2;
    CHECK(cmd_report({tmp.str("nonexistent")}, out2, err2) == 1);
}
