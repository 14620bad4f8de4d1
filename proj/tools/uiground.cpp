#include "uiground/datagen.hpp"
#include "uiground/encoder.hpp"
#include "uiground/error.hpp"
#include "uiground/io_util.hpp"
#include "uiground/probing.hpp"
#include "uiground/report.hpp"
#include "uiground/ui_model.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace uiground;

namespace {

// exit codes: 0 success, 2 usage, 3 data/schema, 4 numeric failure
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::NonFiniteLoss: return kExitNumeric;
        case ErrorCode::ConfigInvalid: return kExitUsage;
        default: return kExitData;
    }
}

struct TrainSection {
    TrainConfig cfg;
};

struct RunConfig {
    fs::path corpus_dir = "out/corpus";
    fs::path models_dir = "out/models";
    fs::path reports_dir = "out/reports";
    int jobs = 1;

    GenConfig gen;
    double split_train = 0.5, split_dev = 0.2, split_test = 0.3;
    std::uint64_t split_seed = 11, pair_seed = 12;
    int negatives_cap = 20;

    ModelConfig model;
    std::uint64_t init_seed_text = 31, init_seed_layout = 32;
    TrainSection train_text, train_layout;

    ProbeFamilyConfig probe;
    std::uint64_t probe_split_seed = 42, probe_sample_seed = 44;
    std::size_t probe_max_records = 7000;
    std::vector<std::string> probe_tasks = {"AT1", "AT2", "AT3", "AT4"};

    double filter_tau = 0.99;

    static RunConfig load(const fs::path& path);
};

template <class T>
void read_field(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

RunConfig RunConfig::load(const fs::path& path) {
    json j = json::parse(read_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_object())
        fail(ErrorCode::ConfigInvalid, path.string() + ": not a JSON object");

    RunConfig rc;
    rc.train_text.cfg.seed = 21;
    rc.train_layout.cfg.seed = 22;

    if (j.contains("corpus_dir")) rc.corpus_dir = j["corpus_dir"].get<std::string>();
    if (j.contains("models_dir")) rc.models_dir = j["models_dir"].get<std::string>();
    if (j.contains("reports_dir")) rc.reports_dir = j["reports_dir"].get<std::string>();
    read_field(j, "jobs", rc.jobs);
    read_field(j, "filter_tau", rc.filter_tau);

    if (j.contains("gen")) {
        const json& g = j["gen"];
        read_field(g, "seed", rc.gen.seed);
        read_field(g, "screens", rc.gen.screens);
        read_field(g, "commands_per_screen", rc.gen.commands_per_screen);
        read_field(g, "elements_min", rc.gen.elements_min);
        read_field(g, "elements_max", rc.gen.elements_max);
        read_field(g, "grid_rows", rc.gen.grid_rows);
        read_field(g, "grid_cols", rc.gen.grid_cols);
        read_field(g, "lexicon", rc.gen.lexicon);
        if (g.contains("mix")) {
            rc.gen.mix_extractive = g["mix"].value("extractive", rc.gen.mix_extractive);
            rc.gen.mix_absolute = g["mix"].value("absolute", rc.gen.mix_absolute);
            rc.gen.mix_relative = g["mix"].value("relative", rc.gen.mix_relative);
        }
        if (g.contains("split")) {
            rc.split_train = g["split"].value("train", rc.split_train);
            rc.split_dev = g["split"].value("dev", rc.split_dev);
            rc.split_test = g["split"].value("test", rc.split_test);
        }
        read_field(g, "split_seed", rc.split_seed);
        read_field(g, "pair_seed", rc.pair_seed);
        read_field(g, "negatives_cap", rc.negatives_cap);
    }

    if (j.contains("model")) {
        const json& m = j["model"];
        read_field(m, "dim", rc.model.dim);
        read_field(m, "coord_buckets", rc.model.coord_buckets);
        read_field(m, "emb_init_std", rc.model.emb_init_std);
        read_field(m, "coord_init_std", rc.model.coord_init_std);
        read_field(m, "init_seed_text", rc.init_seed_text);
        read_field(m, "init_seed_layout", rc.init_seed_layout);
    }

    auto read_train = [](const json& t, TrainSection& out) {
        read_field(t, "learning_rate", out.cfg.learning_rate);
        read_field(t, "batch_size", out.cfg.batch_size);
        read_field(t, "epochs", out.cfg.epochs);
        read_field(t, "seed", out.cfg.seed);
    };
    if (j.contains("train")) {
        const json& t = j["train"];
        if (t.contains("text")) read_train(t["text"], rc.train_text);
        if (t.contains("layout")) read_train(t["layout"], rc.train_layout);
    }

    if (j.contains("probe")) {
        const json& p = j["probe"];
        read_field(p, "count", rc.probe.count);
        read_field(p, "max_width", rc.probe.max_width);
        read_field(p, "epochs", rc.probe.epochs);
        read_field(p, "learning_rate", rc.probe.learning_rate);
        read_field(p, "batch_size", rc.probe.batch_size);
        read_field(p, "patience", rc.probe.patience);
        read_field(p, "seed", rc.probe.seed);
        read_field(p, "split_seed", rc.probe_split_seed);
        read_field(p, "sample_seed", rc.probe_sample_seed);
        std::uint64_t max_records = rc.probe_max_records;
        read_field(p, "max_records", max_records);
        rc.probe_max_records = static_cast<std::size_t>(max_records);
        read_field(p, "tasks", rc.probe_tasks);
    }
    return rc;
}

// ---- shared loading helpers ----

Corpus load_corpus(const RunConfig& rc) {
    fs::path screens = rc.corpus_dir / "screens.jsonl";
    fs::path commands = rc.corpus_dir / "commands.jsonl";
    fs::path pairs = rc.corpus_dir / "pairs.csv";
    for (const fs::path& p : {screens, commands, pairs})
        if (!fs::exists(p))
            fail(ErrorCode::IoFailure, "missing prerequisite " + p.string() + " (run 'gen' first)");
    Corpus corpus;
    corpus.screens = load_screens(screens);
    corpus.commands = load_commands(commands);
    corpus.pairs = load_pairs(pairs);
    return corpus;
}

fs::path checkpoint_path(const RunConfig& rc, ModelKind kind) {
    return rc.models_dir / (std::string(model_kind_name(kind)) + ".json");
}

ScorerModel load_model(const RunConfig& rc, ModelKind kind) {
    fs::path p = checkpoint_path(rc, kind);
    if (!fs::exists(p))
        fail(ErrorCode::IoFailure, "missing prerequisite " + p.string() + " (run 'train --kind " +
                                       model_kind_name(kind) + "' first)");
    return load_checkpoint(p);
}

std::vector<PairInstance> pairs_of_split(const Corpus& corpus, Split split) {
    std::vector<PairInstance> out;
    for (const auto& p : corpus.pairs)
        if (p.split == split) out.push_back(p);
    return out;
}

void print_corpus_summary(const Corpus& corpus) {
    std::map<std::string, Split> cmd_split;
    for (const auto& p : corpus.pairs) cmd_split.emplace(p.command_id, p.split);
    long counts[4][4] = {}; // split x (ext, abs, rel, total); row 3 = total
    for (const auto& c : corpus.commands) {
        int s = static_cast<int>(cmd_split.at(c.id));
        int t = static_cast<int>(c.reasoning);
        counts[s][t]++;
        counts[s][3]++;
        counts[3][t]++;
        counts[3][3]++;
    }
    std::printf("%-8s %12s %10s %10s %10s\n", "split", "extractive", "absolute", "relative", "total");
    const char* names[4] = {"train", "dev", "test", "total"};
    for (int s = 0; s < 4; ++s)
        std::printf("%-8s %12ld %10ld %10ld %10ld\n", names[s], counts[s][0], counts[s][1],
                    counts[s][2], counts[s][3]);
    std::printf("screens: %zu   pair instances: %zu\n", corpus.screens.size(), corpus.pairs.size());
}

// ---- subcommands ----

int cmd_gen(const RunConfig& rc) {
    Corpus corpus = generate_corpus(rc.gen, rc.split_train, rc.split_dev, rc.split_test, rc.split_seed,
                                    rc.pair_seed, rc.negatives_cap);
    save_screens(rc.corpus_dir / "screens.jsonl", corpus.screens);
    save_commands(rc.corpus_dir / "commands.jsonl", corpus.commands);
    save_pairs(rc.corpus_dir / "pairs.csv", corpus.pairs);
    print_corpus_summary(corpus);
    std::printf("corpus written to %s\n", rc.corpus_dir.string().c_str());
    return 0;
}

int cmd_train(const RunConfig& rc, const std::string& kind_name) {
    ModelKind kind = model_kind_from_name(kind_name);
    Corpus corpus = load_corpus(rc);

    // vocabulary: training-split phrases plus every element text
    std::map<std::string, Split> cmd_split;
    for (const auto& p : corpus.pairs) cmd_split.emplace(p.command_id, p.split);
    std::vector<std::string> texts;
    for (const auto& c : corpus.commands)
        if (cmd_split.at(c.id) == Split::Train) texts.push_back(c.phrase);
    for (const auto& s : corpus.screens)
        for (const auto& e : s.elements) texts.push_back(e.text);

    ModelConfig mc = rc.model;
    mc.init_seed = kind == ModelKind::TextOnly ? rc.init_seed_text : rc.init_seed_layout;
    ScorerModel model = ScorerModel::init(kind, Vocab::build(texts), mc);

    const TrainSection& ts = kind == ModelKind::TextOnly ? rc.train_text : rc.train_layout;
    auto train_pairs = pairs_of_split(corpus, Split::Train);
    PairDataset data = encode_pairs(model, corpus.screens, corpus.commands, train_pairs);
    std::printf("training %s model: %zu pairs, %zu params, lr %g, batch %d, %d epochs\n",
                model_kind_name(kind), data.items.size(), model.param_count(), ts.cfg.learning_rate,
                ts.cfg.batch_size, ts.cfg.epochs);

    std::vector<double> losses = train(model, data, ts.cfg);
    std::string loss_csv = "epoch,loss\n";
    for (std::size_t e = 0; e < losses.size(); ++e) {
        loss_csv += std::to_string(e) + "," + format_double(losses[e]) + "\n";
        if (e == 0 || e + 1 == losses.size() ||
            (e + 1) % std::max<std::size_t>(1, losses.size() / 10) == 0)
            std::printf("epoch %zu/%zu  loss %.4f\n", e + 1, losses.size(), losses[e]);
    }
    save_checkpoint(model, checkpoint_path(rc, kind));
    atomic_write_file(rc.models_dir / (std::string(model_kind_name(kind)) + "_loss.csv"), loss_csv);
    std::printf("checkpoint written to %s\n", checkpoint_path(rc, kind).string().c_str());
    return 0;
}

int cmd_eval(const RunConfig& rc, const std::string& split_name_in) {
    Corpus corpus = load_corpus(rc);
    ScorerModel text = load_model(rc, ModelKind::TextOnly);
    ScorerModel layout = load_model(rc, ModelKind::LayoutAware);
    Split split = split_from_name(split_name_in);

    std::vector<std::vector<PredictionRow>> preds;
    GroundingReport report =
        grounding_report({{"text", &text}, {"layout", &layout}}, corpus, split, &preds);
    save_grounding_report(rc.reports_dir / "grounding.csv", report);
    save_predictions(rc.reports_dir / "predictions_text.csv", preds[0]);
    save_predictions(rc.reports_dir / "predictions_layout.csv", preds[1]);

    std::printf("%-8s %8s %8s %8s %8s\n", "model", "ext", "abs", "rel", "all");
    for (const auto& row : report.rows)
        std::printf("%-8s %8.4f %8.4f %8.4f %8.4f\n", row.model.c_str(), row.acc.ext_acc,
                    row.acc.abs_acc, row.acc.rel_acc, row.acc.all_acc);
    std::printf("report written to %s\n", (rc.reports_dir / "grounding.csv").string().c_str());
    return 0;
}

int cmd_probe(const RunConfig& rc, const std::string& kind_name, const std::string& import_path,
              const std::string& task_name) {
    std::vector<RepRecord> records;
    std::string model_name;
    if (!import_path.empty()) {
        records = import_representations(import_path);
        model_name = "imported";
    } else {
        ModelKind kind = model_kind_from_name(kind_name);
        model_name = model_kind_name(kind);
        Corpus corpus = load_corpus(rc);
        ScorerModel model = load_model(rc, kind);
        fs::path reps = rc.models_dir / (model_name + "_reps.csv");
        export_representations(model, corpus.screens, corpus.commands, corpus.pairs, reps);
        std::printf("representations written to %s\n", reps.string().c_str());
        records = import_representations(reps);
    }

    if (rc.probe_max_records > 0 && records.size() > rc.probe_max_records) {
        records = sample_records(records, rc.probe_max_records, rc.probe_sample_seed);
        std::printf("subsampled to %zu records\n", records.size());
    }

    std::vector<std::string> tasks =
        task_name == "all" ? rc.probe_tasks : std::vector<std::string>{task_name};
    ProbeFamilyConfig pc = rc.probe;
    pc.jobs = rc.jobs;
    for (const auto& tname : tasks) {
        AuxTask task = aux_task_from_name(tname);
        AuxDataset aux = build_aux_dataset(records, task, rc.probe_split_seed, model_name);
        auto runs = probe_sweep(aux, pc);
        fs::path out = rc.reports_dir / ("sweep_" + model_name + "_" + tname + ".csv");
        save_sweep_csv(out, runs, task);
        double best_acc = 0.0;
        for (const auto& r : runs)
            if (!r.failed) best_acc = std::max(best_acc, r.aux_test_acc);
        std::printf("%s %s: %zu records, best probe accuracy %.4f, sweep written to %s\n",
                    model_name.c_str(), tname.c_str(), aux.examples.size(), best_acc,
                    out.string().c_str());
    }
    return 0;
}

int cmd_report(const RunConfig& rc) {
    int emitted = 0;
    for (const std::string model_name : {"text", "layout", "imported"}) {
        for (const auto& tname : std::vector<std::string>{"AT1", "AT2", "AT3", "AT4"}) {
            fs::path sweep = rc.reports_dir / ("sweep_" + model_name + "_" + tname + ".csv");
            if (!fs::exists(sweep)) continue;
            AuxTask task = AuxTask::AT1;
            auto runs = load_sweep_csv(sweep, &task);
            emit_curves(rc.reports_dir, model_name, task, runs);
            ++emitted;
        }
    }
    if (emitted == 0)
        fail(ErrorCode::IoFailure, "missing prerequisite: no sweep files in " +
                                       rc.reports_dir.string() + " (run 'probe' first)");
    std::printf("emitted %d curve pairs (CSV + SVG) in %s\n", emitted, rc.reports_dir.string().c_str());
    return 0;
}

int cmd_filter(const RunConfig& rc, double tau) {
    Corpus corpus = load_corpus(rc);
    ScorerModel text = load_model(rc, ModelKind::TextOnly);
    FilterResult result = filter_trivial(corpus, text, tau);

    save_commands(rc.corpus_dir / "commands.filtered.jsonl", result.kept);
    std::set<std::string> kept_ids;
    for (const auto& c : result.kept) kept_ids.insert(c.id);
    std::vector<PairInstance> kept_pairs;
    for (const auto& p : corpus.pairs)
        if (kept_ids.count(p.command_id)) kept_pairs.push_back(p);
    save_pairs(rc.corpus_dir / "pairs.filtered.csv", kept_pairs);
    save_removal_log(rc.reports_dir / "removal_log.csv", result.log);

    auto spatial_share = [](const std::vector<Command>& commands) {
        if (commands.empty()) return 0.0;
        double spatial = 0;
        for (const auto& c : commands)
            if (c.reasoning != Reasoning::Extractive) spatial += 1;
        return spatial / static_cast<double>(commands.size());
    };
    std::printf("tau %.4g: removed %zu of %zu commands\n", tau,
                corpus.commands.size() - result.kept.size(), corpus.commands.size());
    std::printf("spatial share: %.4f before -> %.4f after\n", spatial_share(corpus.commands),
                spatial_share(result.kept));
    std::printf("filtered corpus written to %s\n", rc.corpus_dir.string().c_str());
    return 0;
}

int cmd_demo(const RunConfig& rc) {
    std::printf("== gen ==\n");
    cmd_gen(rc);
    std::printf("== train text ==\n");
    cmd_train(rc, "text");
    std::printf("== train layout ==\n");
    cmd_train(rc, "layout");
    std::printf("== eval ==\n");
    cmd_eval(rc, "test");
    std::printf("== probe ==\n");
    cmd_probe(rc, "text", "", "all");
    cmd_probe(rc, "layout", "", "all");
    std::printf("== report ==\n");
    cmd_report(rc);
    std::printf("== filter ==\n");
    cmd_filter(rc, rc.filter_tau);
    std::printf("demo complete\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"uiground: grounding commands to UI elements and probing the learned representations"};
    app.require_subcommand(1);

    std::string config_path;
    if (const char* env = std::getenv("UIGROUND_CONFIG")) config_path = env;
    app.add_option("--config", config_path, "run configuration JSON (env UIGROUND_CONFIG)");

    std::optional<std::uint64_t> seed_override;
    std::optional<int> screens_override;
    std::optional<int> jobs_override;
    app.add_option("--seed", seed_override, "override gen.seed");
    app.add_option("--screens", screens_override, "override gen.screens");
    app.add_option("--jobs", jobs_override, "worker threads for probe sweeps");

    auto* gen = app.add_subcommand("gen", "generate the synthetic corpus");
    auto* train_cmd = app.add_subcommand("train", "train a scorer on the corpus");
    std::string kind = "text";
    train_cmd->add_option("--kind", kind, "text | layout")->required();
    auto* eval_cmd = app.add_subcommand("eval", "grounding accuracy by reasoning type");
    std::string eval_split = "test";
    eval_cmd->add_option("--split", eval_split, "train | dev | test");
    auto* probe_cmd = app.add_subcommand("probe", "complexity sweep of spatial probes");
    std::string probe_kind = "layout";
    std::string probe_import;
    std::string probe_task = "all";
    probe_cmd->add_option("--kind", probe_kind, "text | layout (ignored with --import)");
    probe_cmd->add_option("--import", probe_import, "probe an external representation file");
    probe_cmd->add_option("--task", probe_task, "AT1 | AT2 | AT3 | AT4 | all");
    auto* report_cmd = app.add_subcommand("report", "emit accuracy/selectivity curves");
    auto* filter_cmd = app.add_subcommand("filter", "remove examples a position-blind model solves");
    std::optional<double> tau_override;
    filter_cmd->add_option("--tau", tau_override, "certainty threshold in (0.5, 1)");
    auto* demo = app.add_subcommand("demo", "full pipeline on the configured corpus");

    CLI11_PARSE(app, argc, argv);

    try {
        if (config_path.empty())
            fail(ErrorCode::ConfigInvalid, "no config: pass --config or set UIGROUND_CONFIG");
        RunConfig rc = RunConfig::load(config_path);
        if (seed_override) rc.gen.seed = *seed_override;
        if (screens_override) rc.gen.screens = *screens_override;
        if (jobs_override) rc.jobs = *jobs_override;

        if (gen->parsed()) return cmd_gen(rc);
        if (train_cmd->parsed()) return cmd_train(rc, kind);
        if (eval_cmd->parsed()) return cmd_eval(rc, eval_split);
        if (probe_cmd->parsed()) return cmd_probe(rc, probe_kind, probe_import, probe_task);
        if (report_cmd->parsed()) return cmd_report(rc);
        if (filter_cmd->parsed()) return cmd_filter(rc, tau_override.value_or(rc.filter_tau));
        if (demo->parsed()) return cmd_demo(rc);
        return kExitUsage;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitData;
    }
}
