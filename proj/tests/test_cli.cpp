#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "temp_dir.hpp"
#include "zsl/data.hpp"
#include "zsl/eval.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run_cli(const TempDir& dir, const std::string& args) {
    const std::string cmd = "cd " + dir.path.string() + " && " + ZSL_CLI_PATH + " " + args +
                            " > stdout.txt 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

// Small dataset plus shared hyperparameter flags, reused by most cases.
const std::string kSynthArgs =
    "synth --out data --c-seen 4 --c-unseen 2 --train-per-class 10 --test-per-class 5 "
    "--dv 12 --ds 6 --seed 5";
const std::string kHyperArgs =
    "--manifest data/manifest.json --lambda 1.0 --eta 1e-4 --lr 3e-3 --embed-dim 12 "
    "--batch 16 --epochs 6 --seed 9";

} // namespace

TEST_CASE("synth then train then eval runs clean and reports consistent metrics") {
    TempDir tmp;
    REQUIRE(run_cli(tmp, kSynthArgs) == 0);
    CHECK(fs::exists(tmp / "data" / "manifest.json"));

    REQUIRE(run_cli(tmp, "train " + kHyperArgs +
                             " --setting generalized --checkpoint-out model.zslc "
                             "--report train_report.json --train-log train_log.jsonl") == 0);
    CHECK(fs::exists(tmp / "model.zslc"));
    CHECK(fs::exists(tmp / "train_log.jsonl"));

    json report = load_json(tmp / "train_report.json");
    CHECK(report.at("command") == "train");
    CHECK(report.at("setting") == "generalized");
    CHECK(report.at("train_log").size() == 6);
    const double ts = report.at("metrics").at("ts").get<double>();
    const double tr = report.at("metrics").at("tr").get<double>();
    const double h = report.at("metrics").at("h").get<double>();
    CHECK(std::abs(h - zsl::harmonic_mean(ts, tr)) <= 1e-9);

    REQUIRE(run_cli(tmp, "eval --manifest data/manifest.json --checkpoint model.zslc "
                         "--setting generalized --report eval_report.json "
                         "--predictions preds.csv") == 0);
    json eval_report = load_json(tmp / "eval_report.json");
    CHECK(eval_report.at("metrics").at("ts").get<double>() == ts);
    CHECK(eval_report.at("metrics").at("h").get<double>() == h);
    CHECK(fs::exists(tmp / "preds.csv"));

    // The stdout summary line carries the same numbers.
    const std::string out = slurp(tmp / "stdout.txt");
    CHECK(out.find("setting=generalized ts=") != std::string::npos);
}

TEST_CASE("reports are byte-identical across reruns except for the timestamp") {
    TempDir tmp;
    REQUIRE(run_cli(tmp, kSynthArgs) == 0);
    REQUIRE(run_cli(tmp, "train " + kHyperArgs + " --checkpoint-out model.zslc "
                         "--report r1.json") == 0);
    REQUIRE(run_cli(tmp, "eval --manifest data/manifest.json --checkpoint model.zslc "
                         "--report e1.json") == 0);
    REQUIRE(run_cli(tmp, "eval --manifest data/manifest.json --checkpoint model.zslc "
                         "--report e2.json") == 0);
    json a = load_json(tmp / "e1.json");
    json b = load_json(tmp / "e2.json");
    a.erase("timestamp");
    b.erase("timestamp");
    CHECK(a.dump(2) == b.dump(2));
}

TEST_CASE("training twice yields byte-identical checkpoints") {
    TempDir tmp;
    REQUIRE(run_cli(tmp, kSynthArgs) == 0);
    REQUIRE(run_cli(tmp, "train " + kHyperArgs + " --checkpoint-out a.zslc --report ra.json") == 0);
    REQUIRE(run_cli(tmp, "train " + kHyperArgs + " --checkpoint-out b.zslc --report rb.json") == 0);
    CHECK(slurp(tmp / "a.zslc") == slurp(tmp / "b.zslc"));
}

TEST_CASE("resuming from a checkpoint matches the uninterrupted run byte for byte") {
    TempDir tmp;
    REQUIRE(run_cli(tmp, kSynthArgs) == 0);
    const std::string base =
        "--manifest data/manifest.json --lambda 1.0 --eta 1e-4 --lr 3e-3 --embed-dim 12 "
        "--batch 16 --seed 9";
    REQUIRE(run_cli(tmp, "train " + base + " --epochs 6 --checkpoint-out full.zslc "
                         "--report rf.json") == 0);
    REQUIRE(run_cli(tmp, "train " + base + " --epochs 3 --checkpoint-out half.zslc "
                         "--report rh.json") == 0);
    REQUIRE(run_cli(tmp, "train " + base + " --epochs 6 --resume half.zslc "
                         "--checkpoint-out resumed.zslc --report rr.json") == 0);
    CHECK(slurp(tmp / "resumed.zslc") == slurp(tmp / "full.zslc"));
    json rr = load_json(tmp / "rr.json");
    CHECK(rr.at("resumed_from_iteration") == 3);
    CHECK(rr.at("train_log").size() == 3);
}

TEST_CASE("transduce writes one record per round and a final checkpoint") {
    TempDir tmp;
    REQUIRE(run_cli(tmp, kSynthArgs) == 0);
    REQUIRE(run_cli(tmp, "transduce " + kHyperArgs +
                             " --rounds 10 --m0 2 --checkpoint-out t.zslc --report rt.json "
                             "--pseudo-dump pseudo.csv") == 0);
    json report = load_json(tmp / "rt.json");
    CHECK(report.at("command") == "transduce");
    REQUIRE(report.at("rounds").size() == 10);
    for (int r = 0; r < 10; ++r) {
        const auto& rec = report.at("rounds").at(r);
        CHECK(rec.at("round") == r + 1);
        CHECK(rec.at("m_used") == 2 * (r + 1));
        CHECK(rec.at("metrics").contains("h"));
    }
    const double ts = report.at("metrics").at("ts").get<double>();
    const double tr = report.at("metrics").at("tr").get<double>();
    const double h = report.at("metrics").at("h").get<double>();
    CHECK(std::abs(h - zsl::harmonic_mean(ts, tr)) <= 1e-9);
    CHECK(fs::exists(tmp / "t.zslc"));
    const std::string dump = slurp(tmp / "pseudo.csv");
    CHECK(dump.rfind("sample_index,pseudo_class,gap,round", 0) == 0);
}

TEST_CASE("usage errors exit with code 1") {
    TempDir tmp;
    CHECK(run_cli(tmp, "") == 1);                       // no subcommand
    CHECK(run_cli(tmp, "train") == 1);                  // missing required flags
    CHECK(run_cli(tmp, "frobnicate --x 1") == 1);       // unknown subcommand
    REQUIRE(run_cli(tmp, kSynthArgs) == 0);
    CHECK(run_cli(tmp, "train " + kHyperArgs + " --setting sideways") == 1);
    CHECK(run_cli(tmp, "train " + kHyperArgs + " --lr 0") == 1);   // rejected by validation
    CHECK(run_cli(tmp, "train " + kHyperArgs + " --epochs -4") == 1);
}

TEST_CASE("data errors exit with code 2") {
    TempDir tmp;
    CHECK(run_cli(tmp, "train --manifest missing/manifest.json --lambda 1.0 --eta 1e-4") == 2);
    CHECK(run_cli(tmp, "eval --manifest missing/manifest.json --checkpoint nope.zslc") == 2);

    REQUIRE(run_cli(tmp, kSynthArgs) == 0);
    std::ofstream bad(tmp / "broken.json");
    bad << "{ not json";
    bad.close();
    CHECK(run_cli(tmp, "train --manifest broken.json --lambda 1.0 --eta 1e-4") == 2);

    // Checkpoint from one dataset shape applied to another.
    REQUIRE(run_cli(tmp, "train " + kHyperArgs + " --checkpoint-out m.zslc --report r.json") == 0);
    REQUIRE(run_cli(tmp, "synth --out other --c-seen 3 --c-unseen 2 --train-per-class 4 "
                         "--test-per-class 2 --dv 7 --ds 3 --seed 1") == 0);
    CHECK(run_cli(tmp, "eval --manifest other/manifest.json --checkpoint m.zslc") == 2);
}

TEST_CASE("numeric divergence exits with code 3") {
    TempDir tmp;
    REQUIRE(run_cli(tmp, kSynthArgs) == 0);
    CHECK(run_cli(tmp, "train --manifest data/manifest.json --lambda 1.0 --eta 1e-4 "
                       "--lr 1e160 --embed-dim 12 --batch 16 --epochs 2 --seed 9") == 3);
}

TEST_CASE("the standardize flag round trips through the manifest") {
    TempDir tmp;
    REQUIRE(run_cli(tmp, kSynthArgs + " --standardize") == 0);
    zsl::Dataset ds = zsl::load_dataset(tmp.path / "data" / "manifest.json");
    CHECK(ds.standardized);
    REQUIRE(run_cli(tmp, "train " + kHyperArgs + " --checkpoint-out s.zslc --report rs.json") == 0);
}
