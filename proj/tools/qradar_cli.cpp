// SPDX-License-Identifier: Apache-2.0
// qradar: command-line front end for the radar / quantum-kernel pipeline.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qradar/common.hpp"
#include "qradar/harness/config.hpp"
#include "qradar/harness/experiments.hpp"

namespace {

using qradar::harness::json;

int fail(std::string_view kind, const std::string &message, int code)
{
    json err{{"error", {{"kind", std::string(kind)}, {"message", message}}}, {"exit_code", code}};
    std::cerr << err.dump() << "\n";
    return code;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Micro-Doppler radar classification with classical and quantum-kernel SVMs", "qradar"};
    app.set_version_flag("--version", qradar::harness::version_string());
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed;
    std::optional<std::string> config_file;
    std::optional<std::string> out_dir;
    unsigned threads = 0;
    app.add_option("--seed", seed, "Master random seed (default 42)");
    app.add_option("--config", config_file, "JSON file with ExperimentConfig fields")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory (default ./out)");
    app.add_option("--threads", threads, "Worker threads, 0 = hardware concurrency")->capture_default_str();

    auto *gen = app.add_subcommand("generate", "Simulate the dataset, extract features, persist the split");
    std::optional<int> n_per_class;
    std::optional<double> snr;
    bool save_signals = false;
    gen->add_option("--n-per-class", n_per_class, "Samples per target class");
    gen->add_option("--snr", snr, "Fixed SNR in dB for every sample instead of U[5, 15]");
    gen->add_flag("--save-signals", save_signals, "Also write raw I/Q files under signals/");

    auto *sweep = app.add_subcommand("pca-sweep", "QSVM accuracy against the number of PCA components");
    bool surrogate = false;
    sweep->add_flag("--classical-surrogate", surrogate, "Continue to k = 12 with an RBF SVM on the projections");

    auto *compare = app.add_subcommand("compare", "Classical RBF SVM vs exact-kernel QSVM");

    auto *shots = app.add_subcommand("shots", "Finite-shot statistics of the representative feature-map state");
    std::vector<std::uint64_t> shot_list;
    std::optional<std::string> preset;
    shots->add_option("--shots", shot_list, "Shot counts, e.g. --shots 1024 8192");
    shots->add_option("--preset", preset, "Preset for the uncertainty-ratio summary")
        ->check(CLI::IsMember({"Ideal", "TorinoLike", "FezLike"}));

    auto *hw = app.add_subcommand("hw-emulate", "Calibrated noise presets against the ideal distribution");
    auto *report = app.add_subcommand("report", "Merge every experiment table into report.json and report.md");
    auto *all = app.add_subcommand("all", "generate, pca-sweep, compare, shots, hw-emulate and report in order");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        return fail("usage", e.what(), 2);
    }

    try {
        qradar::harness::ExperimentConfig cfg;
        if (config_file)
            cfg = qradar::harness::load_config(*config_file, cfg);
        if (seed)
            cfg.seed = *seed;
        if (out_dir)
            cfg.output_dir = *out_dir;
        if (n_per_class)
            cfg.n_per_class = *n_per_class;
        if (snr)
            cfg.fixed_snr_db = *snr;
        if (save_signals)
            cfg.save_signals = true;
        if (surrogate)
            cfg.classical_surrogate = true;
        if (!shot_list.empty())
            cfg.shots = shot_list;
        if (preset)
            cfg.noise_preset = qradar::harness::parse_noise_preset(*preset);
        cfg.validate();

        using namespace qradar::harness;
        json result;
        if (gen->parsed())
            result = cmd_generate(cfg, threads);
        else if (sweep->parsed())
            result = cmd_pca_sweep(cfg, threads);
        else if (compare->parsed())
            result = cmd_compare(cfg, threads);
        else if (shots->parsed())
            result = cmd_shots(cfg, threads);
        else if (hw->parsed())
            result = cmd_hw_emulate(cfg, threads);
        else if (report->parsed())
            result = cmd_report(cfg);
        else if (all->parsed()) {
            cmd_generate(cfg, threads);
            cmd_pca_sweep(cfg, threads);
            cmd_compare(cfg, threads);
            cmd_shots(cfg, threads);
            cmd_hw_emulate(cfg, threads);
            result = cmd_report(cfg);
            result = json{{"kind", "all"}, {"config_hash", result["config_hash"]}, {"output_dir", cfg.output_dir.string()}};
        }
        std::cout << result.dump(2) << "\n";
        return 0;
    } catch (const qradar::Error &e) {
        return fail(qradar::to_string(e.kind()), e.what(), 1);
    } catch (const std::exception &e) {
        return fail("internal", e.what(), 1);
    }
}
