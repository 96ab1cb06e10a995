#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "zsl/data.hpp"
#include "zsl/error.hpp"
#include "zsl/eval.hpp"
#include "zsl/inference.hpp"
#include "zsl/report.hpp"
#include "zsl/train.hpp"
#include "zsl/transductive.hpp"

namespace fs = std::filesystem;
using namespace zsl;

namespace {

struct CommonOpts {
    std::string manifest;
    HyperParams hp;
    std::string setting = "conventional";
    std::string checkpoint_out = "checkpoint.zslc";
    std::string report_path = "report.json";
    std::string train_log_path;
    std::string predictions_path;
    int threads = 1;
};

void add_hyper_flags(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--manifest", o.manifest, "Dataset manifest path")->required();
    cmd->add_option("--lambda", o.hp.lambda, "Weight of the classification term")->required();
    cmd->add_option("--eta", o.hp.eta, "Weight of the L2 penalty")->required();
    cmd->add_option("--lr", o.hp.lr, "Adam learning rate")->capture_default_str();
    cmd->add_option("--epochs", o.hp.epochs, "Outer alternating iterations")->capture_default_str();
    cmd->add_option("--embed-dim", o.hp.embed_dim, "Joint embedding width")->capture_default_str();
    cmd->add_option("--batch", o.hp.batch_size, "Minibatch size")->capture_default_str();
    cmd->add_option("--seed", o.hp.seed, "Run seed")->capture_default_str();
    cmd->add_option("--setting", o.setting, "conventional or generalized")->capture_default_str()
        ->check(CLI::IsMember({"conventional", "generalized"}));
    cmd->add_option("--checkpoint-out", o.checkpoint_out, "Where to write final parameters")->capture_default_str();
    cmd->add_option("--report", o.report_path, "Where to write the run report")->capture_default_str();
    cmd->add_option("--train-log", o.train_log_path, "Optional per-iteration log (one record per line)");
    cmd->add_option("--predictions", o.predictions_path, "Optional predictions file (delimited text)");
    cmd->add_option("--threads", o.threads,
                    "Worker cap (accepted for compatibility; this build computes single-threaded)")->capture_default_str()
        ->check(CLI::PositiveNumber);
}

std::vector<std::size_t> test_pool(const Dataset& ds, Setting setting) {
    std::vector<std::size_t> pool;
    if (setting == Setting::Generalized)
        pool.insert(pool.end(), ds.test_seen.begin(), ds.test_seen.end());
    pool.insert(pool.end(), ds.test_unseen.begin(), ds.test_unseen.end());
    return pool;
}

bool can_evaluate(const Dataset& ds, Setting setting) {
    if (ds.test_unseen.empty())
        return false;
    return setting == Setting::Conventional || !ds.test_seen.empty();
}

void write_predictions_if_asked(const CommonOpts& o, const ModelParams& params, const Dataset& ds,
                                Setting setting) {
    if (o.predictions_path.empty())
        return;
    const LabelSpace space = label_space(ds, setting);
    const auto preds = predict_all(params, ds, test_pool(ds, setting), space);
    save_predictions(o.predictions_path, preds, ds.labels);
}

void print_metrics_line(const Metrics& m) {
    if (m.setting == Setting::Conventional)
        std::printf("setting=conventional ts=%.4f\n", m.ts);
    else
        std::printf("setting=generalized ts=%.4f tr=%.4f H=%.4f\n", m.ts, m.tr, m.h);
}

// Checkpoint parameters must fit the dataset they are applied to.
void check_dims(const Checkpoint& cp, const Dataset& ds, const std::string& checkpoint_path) {
    if (cp.params.d_v != ds.d_v() || cp.params.d_s != ds.d_s() || cp.params.c_all != ds.c_all())
        throw DataError(checkpoint_path + ": checkpoint dims (d_v=" + std::to_string(cp.params.d_v) +
                        ", d_s=" + std::to_string(cp.params.d_s) + ", classes=" +
                        std::to_string(cp.params.c_all) + ") do not match the dataset (d_v=" +
                        std::to_string(ds.d_v()) + ", d_s=" + std::to_string(ds.d_s()) +
                        ", classes=" + std::to_string(ds.c_all()) + ")");
}

int cmd_synth(const std::string& out_dir, const SynthConfig& cfg, bool standardize) {
    const Dataset ds = generate_synthetic(cfg);
    save_dataset(out_dir, ds, standardize);
    std::printf("wrote %s: %zu samples, %zu seen + %zu unseen classes\n",
                (fs::path(out_dir) / "manifest.json").string().c_str(), ds.features.rows(),
                ds.seen.size(), ds.unseen.size());
    return 0;
}

int cmd_train(const CommonOpts& o, const std::string& resume_path) {
    HyperParams hp = o.hp;
    hp.validate();
    const Setting setting = parse_setting(o.setting);
    const Dataset ds = load_dataset(o.manifest);
    if (ds.train.empty())
        throw DataError(o.manifest + ": dataset has an empty train split");

    TrainResult result;
    int resumed_from = 0;
    if (!resume_path.empty()) {
        Checkpoint cp = load_checkpoint(resume_path);
        check_dims(cp, ds, resume_path);
        if (cp.hp.embed_dim != hp.embed_dim)
            throw DataError(resume_path + ": checkpoint embed_dim " +
                            std::to_string(cp.hp.embed_dim) + " does not match --embed-dim " +
                            std::to_string(hp.embed_dim));
        if (cp.completed_iters > hp.epochs)
            throw ConfigError("checkpoint already has " + std::to_string(cp.completed_iters) +
                              " iterations, more than --epochs " + std::to_string(hp.epochs));
        resumed_from = cp.completed_iters;
        result = train_from(ds, labeled_train_set(ds), hp, std::move(cp.params), cp.completed_iters);
    } else {
        result = train(ds, hp);
    }

    save_checkpoint(o.checkpoint_out, result.params, hp, hp.epochs);
    if (!o.train_log_path.empty())
        save_train_log(o.train_log_path, result.log);

    nlohmann::json report = {
        {"command", "train"},
        {"timestamp", timestamp_utc()},
        {"manifest", o.manifest},
        {"setting", setting_name(setting)},
        {"config", hyperparams_json(hp)},
        {"resumed_from_iteration", resumed_from},
        {"train_log", train_log_json(result.log)},
        {"metrics", nullptr},
    };
    if (can_evaluate(ds, setting)) {
        const Metrics m = evaluate(result.params, ds, setting);
        report["metrics"] = metrics_json(m);
        print_metrics_line(m);
    }
    save_report(o.report_path, report);
    write_predictions_if_asked(o, result.params, ds, setting);
    std::printf("checkpoint written to %s\n", o.checkpoint_out.c_str());
    return 0;
}

int cmd_transduce(const CommonOpts& o, const std::string& pseudo_dump) {
    HyperParams hp = o.hp;
    hp.validate();
    const Setting setting = parse_setting(o.setting);
    const Dataset ds = load_dataset(o.manifest);
    if (ds.train.empty())
        throw DataError(o.manifest + ": dataset has an empty train split");
    if (!can_evaluate(ds, setting))
        throw DataError(o.manifest + ": dataset lacks the test splits the " +
                        std::string(setting_name(setting)) + " setting needs");

    const TransduceResult result = transduce(ds, hp, test_pool(ds, setting), setting);

    save_checkpoint(o.checkpoint_out, result.params, hp, hp.epochs);
    if (!o.train_log_path.empty())
        save_train_log(o.train_log_path, result.log);
    if (!pseudo_dump.empty()) {
        std::ofstream f(pseudo_dump, std::ios::trunc);
        if (!f)
            throw FileError("cannot open " + pseudo_dump + " for writing");
        f << "sample_index,pseudo_class,gap,round\n";
        char buf[64];
        for (const PseudoSample& p : result.pseudo_history) {
            std::snprintf(buf, sizeof buf, "%.17g", -p.confidence);
            f << p.sample_index << ',' << p.pseudo_class << ',' << buf << ',' << p.round << '\n';
        }
        if (!f.good())
            throw FileError("write failed: " + pseudo_dump);
    }

    nlohmann::json report = {
        {"command", "transduce"},
        {"timestamp", timestamp_utc()},
        {"manifest", o.manifest},
        {"setting", setting_name(setting)},
        {"config", hyperparams_json(hp)},
        {"rounds", round_reports_json(result.rounds)},
        {"metrics", result.rounds.empty() ? nlohmann::json(nullptr)
                                          : metrics_json(result.rounds.back().metrics)},
    };
    save_report(o.report_path, report);
    write_predictions_if_asked(o, result.params, ds, setting);
    if (!result.rounds.empty())
        print_metrics_line(result.rounds.back().metrics);
    std::printf("checkpoint written to %s\n", o.checkpoint_out.c_str());
    return 0;
}

int cmd_eval(const std::string& manifest, const std::string& checkpoint_path,
             const std::string& setting_str, const std::string& report_path,
             const std::string& predictions_path) {
    const Setting setting = parse_setting(setting_str);
    const Dataset ds = load_dataset(manifest);
    const Checkpoint cp = load_checkpoint(checkpoint_path);
    check_dims(cp, ds, checkpoint_path);

    const Metrics m = evaluate(cp.params, ds, setting);
    nlohmann::json report = {
        {"command", "eval"},
        {"timestamp", timestamp_utc()},
        {"manifest", manifest},
        {"checkpoint", checkpoint_path},
        {"setting", setting_name(setting)},
        {"config", hyperparams_json(cp.hp)},
        {"metrics", metrics_json(m)},
    };
    save_report(report_path, report);
    if (!predictions_path.empty()) {
        const LabelSpace space = label_space(ds, setting);
        const auto preds = predict_all(cp.params, ds, test_pool(ds, setting), space);
        save_predictions(predictions_path, preds, ds.labels);
    }
    print_metrics_line(m);
    return 0;
}

int run(int argc, char** argv) {
    CLI::App app{"Joint visual-semantic embedding for zero-shot recognition"};
    app.require_subcommand(1);

    // synth
    std::string out_dir;
    SynthConfig cfg;
    bool standardize = false;
    auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic dataset");
    synth->add_option("--out", out_dir, "Output directory")->required();
    synth->add_option("--c-seen", cfg.c_seen, "Seen class count")->capture_default_str();
    synth->add_option("--c-unseen", cfg.c_unseen, "Unseen class count")->capture_default_str();
    synth->add_option("--train-per-class", cfg.train_per_class, "Train samples per seen class")->capture_default_str();
    synth->add_option("--test-per-class", cfg.test_per_class, "Test samples per class")->capture_default_str();
    synth->add_option("--dv", cfg.d_v, "Feature dimension")->capture_default_str();
    synth->add_option("--ds", cfg.d_s, "Attribute dimension")->capture_default_str();
    synth->add_option("--sigma", cfg.sigma, "Feature noise scale")->capture_default_str();
    synth->add_option("--seed", cfg.seed, "Generator seed")->capture_default_str();
    synth->add_flag("--standardize", standardize,
                    "Record a manifest flag that standardizes features at load time");

    // train
    CommonOpts train_opts;
    std::string resume_path;
    auto* train_cmd = app.add_subcommand("train", "Inductive training (alternating minimization)");
    add_hyper_flags(train_cmd, train_opts);
    train_cmd->add_option("--resume", resume_path, "Continue from a checkpoint");

    // transduce
    CommonOpts trans_opts;
    trans_opts.setting = "generalized";
    std::string pseudo_dump;
    auto* trans_cmd = app.add_subcommand("transduce", "Transductive training with pseudo labels");
    add_hyper_flags(trans_cmd, trans_opts);
    trans_cmd->add_option("--rounds", trans_opts.hp.rounds, "Pseudo-labeling rounds")->capture_default_str();
    trans_cmd->add_option("--m0", trans_opts.hp.m0, "Initial per-class pseudo budget")->capture_default_str();
    trans_cmd->add_option("--pseudo-dump", pseudo_dump, "Optional pseudo-selection audit file");

    // eval
    std::string eval_manifest, eval_checkpoint, eval_setting = "conventional";
    std::string eval_report = "report.json", eval_predictions;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
    eval_cmd->add_option("--manifest", eval_manifest, "Dataset manifest path")->required();
    eval_cmd->add_option("--checkpoint", eval_checkpoint, "Checkpoint to evaluate")->required();
    eval_cmd->add_option("--setting", eval_setting, "conventional or generalized")->capture_default_str()
        ->check(CLI::IsMember({"conventional", "generalized"}));
    eval_cmd->add_option("--report", eval_report, "Where to write the run report")->capture_default_str();
    eval_cmd->add_option("--predictions", eval_predictions, "Optional predictions file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (synth->parsed())
        return cmd_synth(out_dir, cfg, standardize);
    if (train_cmd->parsed())
        return cmd_train(train_opts, resume_path);
    if (trans_cmd->parsed())
        return cmd_transduce(trans_opts, pseudo_dump);
    return cmd_eval(eval_manifest, eval_checkpoint, eval_setting, eval_report, eval_predictions);
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
