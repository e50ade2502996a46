// tlr: timeline construction and evaluation workbench.
//
//   tlr index --corpus corpus.jsonl --index index.json
//   tlr run --config config.json --index index.json --scenario scenario.json --out runs/demo
//   tlr baseline direct --config config.json --index index.json --scenario s.json --out runs/direct
//   tlr eval --pred runs/demo/timeline.json --refs refs.json
//   tlr replay runs/demo/manifest.jsonl
//   tlr report runs/demo runs/direct runs/iter_rag

#include <CLI11.hpp>

#include "tlr/workbench.hpp"

namespace {

void add_run_options(CLI::App* cmd, tlr::RunOptions& opts) {
    cmd->add_option("--config", opts.config_path, "Episode config JSON");
    cmd->add_option("--out", opts.out_dir, "Output directory")->required();
    cmd->add_option("--scenario", opts.scenario_path,
                    "Scripted-responder scenario JSON (offline mode)");
    cmd->add_option("--index", opts.index_path, "Local index JSON (closed-domain mode)");
    cmd->add_option("--cache", opts.cache_dir, "Disk cache directory");
    cmd->add_option("--refs", opts.refs_path, "Reference timelines JSON; evaluate after run");
    cmd->add_option("--query", [&opts](const std::vector<std::string>& v) {
        opts.query = v.at(0);
        return true;
    }, "Topic query (overrides config)");
    cmd->add_option("--n-init", [&opts](const std::vector<std::string>& v) {
        opts.n_init = std::stoi(v.at(0));
        return true;
    }, "Documents for global-memory initialization");
    cmd->add_option("--n-exp", [&opts](const std::vector<std::string>& v) {
        opts.n_exp = std::stoi(v.at(0));
        return true;
    }, "Documents per exploration search");
    cmd->add_option("--top-k", [&opts](const std::vector<std::string>& v) {
        opts.top_k = std::stoi(v.at(0));
        return true;
    }, "Documents per baseline retrieval");
    cmd->add_option("--max-iterations", [&opts](const std::vector<std::string>& v) {
        opts.max_iterations = std::stoi(v.at(0));
        return true;
    }, "Exploration iteration cap");
    cmd->add_option("--token-budget", [&opts](const std::vector<std::string>& v) {
        opts.token_budget = std::stoll(v.at(0));
        return true;
    }, "Episode token budget");
    cmd->add_option("--seed", [&opts](const std::vector<std::string>& v) {
        opts.seed = std::stoll(v.at(0));
        return true;
    }, "Sampling seed (recorded in the manifest)");
    cmd->add_option("--reasoner-model", opts.reasoner_model, "Reasoner model name");
    cmd->add_option("--scraper-model", opts.scraper_model, "Scraper model name");
    cmd->add_flag("--truncate-to-ref,!--no-truncate-to-ref", opts.truncate_to_ref,
                  "Truncate prediction to reference length during evaluation");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"timeline construction and evaluation workbench"};
    app.require_subcommand(1);

    // index
    std::string corpus_path, index_path;
    CLI::App* index = app.add_subcommand("index", "Build a local BM25 index from JSONL");
    index->add_option("--corpus", corpus_path, "Corpus JSON Lines file")->required();
    index->add_option("--index", index_path, "Output index path")->required();

    // run
    tlr::RunOptions run_opts;
    CLI::App* run = app.add_subcommand("run", "Run a timeline construction episode");
    add_run_options(run, run_opts);

    // baseline
    tlr::RunOptions base_opts;
    std::string baseline_kind;
    CLI::App* baseline = app.add_subcommand("baseline", "Run a baseline method");
    baseline->add_option("kind", baseline_kind, "direct | rewrite | iter_rag")->required();
    add_run_options(baseline, base_opts);

    // eval
    std::string pred_path, refs_path, metrics_out;
    bool truncate = true;
    CLI::App* eval = app.add_subcommand("eval", "Evaluate a timeline against references");
    eval->add_option("--pred", pred_path, "Predicted timeline.json")->required();
    eval->add_option("--refs", refs_path, "Reference timelines JSON")->required();
    eval->add_option("--out", metrics_out, "Write metrics JSON here");
    eval->add_flag("--truncate-to-ref,!--no-truncate-to-ref", truncate,
                   "Truncate prediction to reference length");

    // replay
    std::string manifest_path;
    CLI::App* replay = app.add_subcommand("replay", "Render a manifest as a transcript");
    replay->add_option("manifest", manifest_path, "manifest.jsonl path")->required();

    // report
    std::vector<std::string> run_dirs;
    CLI::App* report = app.add_subcommand("report", "Compare runs: metrics and token cost");
    report->add_option("dirs", run_dirs, "Run directories")->required();

    CLI11_PARSE(app, argc, argv);

    if (index->parsed()) return tlr::cmd_index(corpus_path, index_path);
    if (run->parsed()) return tlr::cmd_run(run_opts);
    if (baseline->parsed()) return tlr::cmd_baseline(baseline_kind, base_opts);
    if (eval->parsed()) return tlr::cmd_eval(pred_path, refs_path, truncate, metrics_out);
    if (replay->parsed()) return tlr::cmd_replay(manifest_path);
    if (report->parsed()) return tlr::cmd_report(run_dirs);
    return 2;
}
