#include "zsl/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "zsl/error.hpp"

namespace zsl {

const char* setting_name(Setting setting) {
    return setting == Setting::Conventional ? "conventional" : "generalized";
}

Setting parse_setting(const std::string& name) {
    if (name == "conventional")
        return Setting::Conventional;
    if (name == "generalized")
        return Setting::Generalized;
    throw ConfigError("unknown setting \"" + name + "\" (conventional or generalized)");
}

nlohmann::json loss_json(const LossBreakdown& loss) {
    return {
        {"regression", loss.regression},
        {"classification", loss.classification},
        {"l2", loss.l2},
        {"total", loss.total},
    };
}

nlohmann::json hyperparams_json(const HyperParams& hp) {
    return {
        {"lambda", hp.lambda},
        {"eta", hp.eta},
        {"lr", hp.lr},
        {"embed_dim", hp.embed_dim},
        {"epochs", hp.epochs},
        {"rounds", hp.rounds},
        {"m0", hp.m0},
        {"batch_size", hp.batch_size},
        {"seed", hp.seed},
    };
}

namespace {

nlohmann::json accuracy_json(const PerClassAccuracy& acc) {
    nlohmann::json per_class = nlohmann::json::array();
    for (const ClassAccuracy& c : acc.per_class)
        per_class.push_back({
            {"class", c.class_id},
            {"count", c.count},
            {"correct", c.correct},
            {"accuracy", c.accuracy},
        });
    return {
        {"per_class", per_class},
        {"excluded", acc.excluded},
        {"mean", acc.mean},
    };
}

} // namespace

nlohmann::json metrics_json(const Metrics& m) {
    nlohmann::json j = {
        {"setting", setting_name(m.setting)},
        {"ts", m.ts},
        {"unseen", accuracy_json(m.unseen)},
    };
    if (m.setting == Setting::Generalized) {
        j["tr"] = m.tr;
        j["h"] = m.h;
        j["seen"] = accuracy_json(m.seen);
    }
    return j;
}

nlohmann::json train_log_json(const std::vector<TrainLogEntry>& log) {
    nlohmann::json arr = nlohmann::json::array();
    for (const TrainLogEntry& e : log)
        arr.push_back({
            {"iteration", e.iteration},
            {"post_visual", loss_json(e.post_visual)},
            {"post_semantic", loss_json(e.post_semantic)},
        });
    return arr;
}

nlohmann::json round_reports_json(const std::vector<RoundReport>& rounds) {
    nlohmann::json arr = nlohmann::json::array();
    for (const RoundReport& r : rounds)
        arr.push_back({
            {"round", r.round},
            {"m_used", r.m_used},
            {"pseudo_count", r.pseudo_count},
            {"pseudo_precision", r.pseudo_precision},
            {"trained_on_labeled_only", r.trained_on_labeled_only},
            {"metrics", metrics_json(r.metrics)},
        });
    return arr;
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[80];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

void save_train_log(const std::filesystem::path& path, const std::vector<TrainLogEntry>& log) {
    std::ofstream f(path, std::ios::trunc);
    if (!f)
        throw FileError("cannot open " + path.string() + " for writing");
    for (const TrainLogEntry& e : log) {
        nlohmann::json j = {
            {"iteration", e.iteration},
            {"post_visual", loss_json(e.post_visual)},
            {"post_semantic", loss_json(e.post_semantic)},
            {"wall_ms", e.wall_ms},
        };
        f << j.dump() << '\n';
    }
    f.flush();
    if (!f)
        throw FileError("write failed: " + path.string());
}

void save_report(const std::filesystem::path& path, const nlohmann::json& report) {
    std::ofstream f(path, std::ios::trunc);
    if (!f)
        throw FileError("cannot open " + path.string() + " for writing");
    f << report.dump(2) << '\n';
    f.flush();
    if (!f)
        throw FileError("write failed: " + path.string());
}

} // namespace zsl
