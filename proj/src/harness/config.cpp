// SPDX-License-Identifier: Apache-2.0
#include "qradar/harness/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "qradar/common.hpp"
#include "qradar/qsim.hpp"

namespace qradar::harness {

std::string_view to_string(NoisePreset p)
{
    switch (p) {
    case NoisePreset::Ideal:
        return "Ideal";
    case NoisePreset::TorinoLike:
        return "TorinoLike";
    case NoisePreset::FezLike:
        return "FezLike";
    }
    return "?";
}

NoisePreset parse_noise_preset(std::string_view name)
{
    for (auto p : {NoisePreset::Ideal, NoisePreset::TorinoLike, NoisePreset::FezLike})
        if (name == to_string(p))
            return p;
    throw Error(ErrorKind::InvalidArgument,
                "unknown noise preset '" + std::string(name) + "' (expected Ideal, TorinoLike or FezLike)");
}

namespace {

[[noreturn]] void range_error(const std::string &field, const std::string &why)
{
    throw Error(ErrorKind::ParameterRange, "config." + field + ": " + why);
}

} // namespace

void ExperimentConfig::validate() const
{
    if (n_per_class < 2)
        range_error("n_per_class", "must be >= 2");
    if (!(split > 0.0 && split < 1.0))
        range_error("split", "must lie in (0, 1)");
    if (qubits < 2 || qubits > qsim::kMaxQubits)
        range_error("qubits", "must lie in [2, 6]");
    if (reps < 1)
        range_error("reps", "must be >= 1");
    if (shots.empty())
        range_error("shots", "at least one shot count is required");
    for (auto s : shots)
        if (s < 1)
            range_error("shots", "every shot count must be >= 1");
    if (!(svm_c > 0.0) || !std::isfinite(svm_c))
        range_error("svm_c", "must be positive");
    if (!(encoding_max > 0.0) || !std::isfinite(encoding_max))
        range_error("encoding_max", "must be positive");
    if (fixed_snr_db && !std::isfinite(*fixed_snr_db))
        range_error("fixed_snr_db", "must be finite");
    if (shot_trials < 2)
        range_error("shot_trials", "must be >= 2");
    if (!(torino_fidelity > 0.0 && torino_fidelity <= 1.0))
        range_error("torino_fidelity", "must lie in (0, 1]");
    if (!(fez_fidelity > 0.0 && fez_fidelity <= 1.0))
        range_error("fez_fidelity", "must lie in (0, 1]");
}

json to_json(const ExperimentConfig &c)
{
    json j;
    j["seed"] = c.seed;
    j["n_per_class"] = c.n_per_class;
    j["split"] = c.split;
    j["qubits"] = c.qubits;
    j["reps"] = c.reps;
    j["shots"] = c.shots;
    j["noise_preset"] = std::string(to_string(c.noise_preset));
    j["svm_c"] = c.svm_c;
    j["encoding_max"] = c.encoding_max;
    j["fixed_snr_db"] = c.fixed_snr_db ? json(*c.fixed_snr_db) : json(nullptr);
    j["shot_trials"] = c.shot_trials;
    j["torino_fidelity"] = c.torino_fidelity;
    j["fez_fidelity"] = c.fez_fidelity;
    j["classical_surrogate"] = c.classical_surrogate;
    j["save_signals"] = c.save_signals;
    return j;
}

ExperimentConfig config_from_json(const json &j, ExperimentConfig c)
{
    if (!j.is_object())
        throw Error(ErrorKind::InvalidArgument, "config must be a JSON object");
    static const std::set<std::string> known = {
        "seed",         "n_per_class",     "split",        "qubits",          "reps",
        "shots",        "noise_preset",    "output_dir",   "svm_c",           "encoding_max",
        "fixed_snr_db", "shot_trials",     "torino_fidelity", "fez_fidelity", "classical_surrogate",
        "save_signals",
    };
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw Error(ErrorKind::InvalidArgument, "unknown config key '" + it.key() + "'");

    try {
        if (j.contains("seed"))
            c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("n_per_class"))
            c.n_per_class = j.at("n_per_class").get<int>();
        if (j.contains("split"))
            c.split = j.at("split").get<double>();
        if (j.contains("qubits"))
            c.qubits = j.at("qubits").get<int>();
        if (j.contains("reps"))
            c.reps = j.at("reps").get<int>();
        if (j.contains("shots")) {
            c.shots.clear();
            for (const auto &s : j.at("shots")) {
                if (!s.is_number_integer() || s.get<long long>() < 1)
                    range_error("shots", "every shot count must be an integer >= 1");
                c.shots.push_back(s.get<std::uint64_t>());
            }
        }
        if (j.contains("noise_preset"))
            c.noise_preset = parse_noise_preset(j.at("noise_preset").get<std::string>());
        if (j.contains("output_dir"))
            c.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("svm_c"))
            c.svm_c = j.at("svm_c").get<double>();
        if (j.contains("encoding_max"))
            c.encoding_max = j.at("encoding_max").get<double>();
        if (j.contains("fixed_snr_db")) {
            const auto &v = j.at("fixed_snr_db");
            c.fixed_snr_db = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
        }
        if (j.contains("shot_trials"))
            c.shot_trials = j.at("shot_trials").get<int>();
        if (j.contains("torino_fidelity"))
            c.torino_fidelity = j.at("torino_fidelity").get<double>();
        if (j.contains("fez_fidelity"))
            c.fez_fidelity = j.at("fez_fidelity").get<double>();
        if (j.contains("classical_surrogate"))
            c.classical_surrogate = j.at("classical_surrogate").get<bool>();
        if (j.contains("save_signals"))
            c.save_signals = j.at("save_signals").get<bool>();
    } catch (const json::exception &e) {
        throw Error(ErrorKind::InvalidArgument, std::string("config type error: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path &path, ExperimentConfig base)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::Io, "cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error &e) {
        throw Error(ErrorKind::InvalidArgument, "config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j, std::move(base));
}

std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const ExperimentConfig &config)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_json(config).dump())));
    return buf;
}

} // namespace qradar::harness
