// SPDX-License-Identifier: Apache-2.0
#include "qradar/harness/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>

#include <Eigen/Core>

#include "qradar/harness/svg.hpp"
#include "qradar/radar_sim.hpp"
#include "qradar/signal_io.hpp"
#include "qradar/spectral_features.hpp"

#ifndef QRADAR_VERSION
#define QRADAR_VERSION "0.0.0"
#endif

namespace qradar::harness {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

fs::path out_path(const ExperimentConfig &c, const std::string &name) { return c.output_dir / name; }

void require_inputs(const ExperimentConfig &c, std::initializer_list<std::pair<const char *, const char *>> files)
{
    std::string missing;
    for (const auto &[name, producer] : files)
        if (!fs::exists(out_path(c, name)))
            missing += std::string(missing.empty() ? "" : ", ") + name + " (from `" + producer + "`)";
    if (!missing.empty())
        throw Error(ErrorKind::Io, "missing inputs in " + c.output_dir.string() + ": " + missing);
}

void write_timings(const ExperimentConfig &c, const std::string &command, const json &seconds)
{
    write_json(out_path(c, "timings_" + command + ".json"),
               json{{"kind", "timings"}, {"command", command}, {"seconds", seconds}});
}

json metrics_json(const svm::Metrics &m)
{
    return json{{"accuracy", m.accuracy},
                {"precision", m.precision},
                {"recall", m.recall},
                {"f1", m.f1},
                {"macro_precision", m.macro_precision},
                {"macro_recall", m.macro_recall},
                {"macro_f1", m.macro_f1},
                {"confusion", m.confusion}};
}

json model_json(const svm::MulticlassModel &m)
{
    json pairs = json::array();
    for (const auto &p : m.pairs) {
        pairs.push_back(json{{"positive_class", p.positive_class},
                             {"negative_class", p.negative_class},
                             {"rows", p.rows},
                             {"alpha", p.model.alpha},
                             {"labels", p.model.labels},
                             {"bias", p.model.bias},
                             {"iterations", p.model.iterations},
                             {"converged", p.model.converged}});
    }
    return json{{"classes", m.classes}, {"pairs", pairs}};
}

std::vector<std::string> outcome_labels(const std::vector<std::size_t> &idx, int n_qubits)
{
    std::vector<std::string> out;
    for (auto i : idx)
        out.push_back(qsim::bitstring(i, n_qubits));
    return out;
}

std::string fixed(double v, int decimals)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

json noise_to_json(const qsim::NoiseModel &n)
{
    return json{{"p1", n.p1}, {"p2", n.p2}, {"readout_flip", n.readout_flip}};
}

} // namespace

std::string version_string() { return QRADAR_VERSION; }

PreparedData prepare(FeatureTable table, Split split)
{
    PreparedData d;
    d.table = std::move(table);
    d.split = std::move(split);
    const Eigen::MatrixXd train = rows_of(d.table.features, d.split.train);
    const Eigen::MatrixXd test = rows_of(d.table.features, d.split.test);
    d.standardizer = pca::fit_standardizer(train);
    d.train_std = pca::standardize(train, d.standardizer);
    d.test_std = pca::standardize(test, d.standardizer);
    d.train_labels = rows_of(d.table.labels, d.split.train);
    d.test_labels = rows_of(d.table.labels, d.split.test);
    return d;
}

PreparedData load_prepared(const ExperimentConfig &config)
{
    require_inputs(config, {{kFeaturesFile, "generate"}, {kSplitFile, "generate"}});
    auto table = parse_features_csv(read_text(out_path(config, kFeaturesFile)));
    auto split = split_from_json(read_json(out_path(config, kSplitFile)), table.labels.size());
    return prepare(std::move(table), std::move(split));
}

ClassicalRun run_classical(const PreparedData &data, const ExperimentConfig &config, unsigned threads)
{
    svm::SvmConfig sc;
    sc.C = config.svm_c;
    ClassicalRun r;
    const auto t0 = Clock::now();
    r.classifier = svm::train_rbf(data.train_std, data.train_labels, sc, threads);
    r.train_seconds = seconds_since(t0);
    r.predictions = svm::predict(r.classifier, data.test_std);
    r.metrics = svm::evaluate(r.predictions, data.test_labels, radar::kNumClasses);
    return r;
}

namespace {

qkernel::KernelSpec exact_spec(const ExperimentConfig &config)
{
    qkernel::KernelSpec ks;
    ks.method = qkernel::KernelMethod::ExactFidelity;
    ks.reps = config.reps;
    ks.seed = config.seed;
    return ks;
}

/// Encode projected rows, build exact kernels and fit the one-vs-one SVM.
void fit_encoded(QsvmRun &r, const Eigen::MatrixXd &train_proj, const Eigen::MatrixXd &test_proj,
                 const std::vector<int> &train_labels, const ExperimentConfig &config, unsigned threads)
{
    auto enc = svm::scale_for_encoding(train_proj, test_proj, config.encoding_max);
    r.scaler = enc.scaler;
    r.encoded_train = std::move(enc.train);
    r.encoded_test = std::move(enc.test);

    const auto ks = exact_spec(config);
    const auto t0 = Clock::now();
    r.kernel_train = qkernel::kernel_matrix(r.encoded_train, ks, threads).entries;
    r.kernel_test = qkernel::kernel_matrix(r.encoded_test, r.encoded_train, ks, threads).entries;
    r.kernel_seconds = seconds_since(t0);

    svm::SvmConfig sc;
    sc.C = config.svm_c;
    sc.kernel = svm::KernelType::Precomputed;
    const auto t1 = Clock::now();
    r.model = svm::train_multiclass(r.kernel_train, train_labels, sc, threads);
    r.train_seconds = seconds_since(t1);
    r.predictions = svm::predict(r.model, r.kernel_test);
}

} // namespace

QsvmRun run_qsvm(const PreparedData &data, int k, const ExperimentConfig &config, unsigned threads)
{
    if (k < 2 || k > qsim::kMaxQubits)
        throw Error(ErrorKind::ParameterRange, "QSVM needs between 2 and 6 components, got " + std::to_string(k));
    QsvmRun r;
    r.pca = pca::fit_pca(data.train_std, k);
    fit_encoded(r, pca::project(data.train_std, r.pca), pca::project(data.test_std, r.pca), data.train_labels, config,
                threads);
    r.metrics = svm::evaluate(r.predictions, data.test_labels, radar::kNumClasses);
    return r;
}

json encoding_to_json(const Encoding &e)
{
    return json{{"kind", "encoding"},
                {"standardizer", {{"means", vector_to_json(e.standardizer.means)},
                                  {"stds", vector_to_json(e.standardizer.stds)}}},
                {"pca", {{"components", matrix_to_json(e.pca.components)},
                         {"eigenvalues", vector_to_json(e.pca.eigenvalues)},
                         {"explained_variance_ratio", vector_to_json(e.pca.explained_variance_ratio)},
                         {"total_variance", e.pca.total_variance}}},
                {"scaler", {{"lo", vector_to_json(e.scaler.lo)},
                            {"hi", vector_to_json(e.scaler.hi)},
                            {"upper", e.scaler.upper}}},
                {"reps", e.reps},
                {"sample_index", e.sample_index},
                {"representative", e.representative}};
}

Encoding encoding_from_json(const json &j)
{
    if (j.value("kind", "") != "encoding")
        throw Error(ErrorKind::InvalidArgument, "not an encoding document");
    Encoding e;
    try {
        e.standardizer.means = vector_from_json(j.at("standardizer").at("means"));
        e.standardizer.stds = vector_from_json(j.at("standardizer").at("stds"));
        e.pca.components = matrix_from_json(j.at("pca").at("components"));
        e.pca.eigenvalues = vector_from_json(j.at("pca").at("eigenvalues"));
        e.pca.explained_variance_ratio = vector_from_json(j.at("pca").at("explained_variance_ratio"));
        e.pca.total_variance = j.at("pca").at("total_variance").get<double>();
        e.scaler.lo = vector_from_json(j.at("scaler").at("lo"));
        e.scaler.hi = vector_from_json(j.at("scaler").at("hi"));
        e.scaler.upper = j.at("scaler").at("upper").get<double>();
        e.reps = j.at("reps").get<int>();
        e.sample_index = j.at("sample_index").get<std::size_t>();
        e.representative = j.at("representative").get<std::vector<double>>();
    } catch (const json::exception &ex) {
        throw Error(ErrorKind::InvalidArgument, std::string("encoding document malformed: ") + ex.what());
    }
    return e;
}

qsim::Circuit reference_circuit(const Encoding &e)
{
    auto c = qsim::build_zz_feature_map(e.representative, e.reps);
    c.measure_all();
    return c;
}

qsim::OutcomeDistribution emulate(const qsim::Circuit &reference, const qsim::NoiseModel &noise)
{
    if (noise.gate_noise())
        return qsim::measure_distribution(qsim::simulate_noisy(reference, noise), noise);
    return qsim::measure_distribution(qsim::simulate(reference), noise);
}

std::vector<PresetNoise> calibrate_presets(const qsim::Circuit &reference, const ExperimentConfig &config)
{
    std::vector<PresetNoise> out;
    out.push_back(PresetNoise{NoisePreset::Ideal, {}, 1.0, 1.0, 0});
    for (auto [preset, target] : {std::pair{NoisePreset::TorinoLike, config.torino_fidelity},
                                  std::pair{NoisePreset::FezLike, config.fez_fidelity}}) {
        const auto cal = qkernel::calibrate_preset(reference, target);
        out.push_back(PresetNoise{preset, cal.noise, target, cal.fidelity, cal.iterations});
    }
    return out;
}

UncertaintyRatio uncertainty_ratio(const qsim::OutcomeDistribution &dist, std::uint64_t low_shots,
                                   std::uint64_t high_shots, int trials, std::uint64_t seed)
{
    if (trials < 2)
        throw Error(ErrorKind::ParameterRange, "uncertainty ratio needs at least 2 trials");
    if (low_shots < 1 || high_shots < 1)
        throw Error(ErrorKind::ParameterRange, "shot counts must be >= 1");
    UncertaintyRatio u;
    u.outcome = qkernel::top_k_indices(dist.probabilities, 1).front();
    u.low_shots = low_shots;
    u.high_shots = high_shots;
    u.trials = trials;

    double half_width[2] = {0.0, 0.0};
    double sd[2] = {0.0, 0.0};
    const std::uint64_t shots[2] = {low_shots, high_shots};
    for (int s = 0; s < 2; ++s) {
        std::vector<double> freq(static_cast<std::size_t>(trials));
        for (int t = 0; t < trials; ++t) {
            Rng rng = make_rng(seed, {0x5407u, shots[s], static_cast<std::uint64_t>(t)});
            const auto counts = qsim::sample_shots(dist, shots[s], rng);
            const auto observed = qkernel::analyze_distribution(counts, dist, {1, 0.5});
            half_width[s] += observed.top1_uncertainty;
            freq[static_cast<std::size_t>(t)] =
                static_cast<double>(counts.counts[u.outcome]) / static_cast<double>(shots[s]);
        }
        double mean = 0.0;
        for (double f : freq)
            mean += f;
        mean /= trials;
        double ss = 0.0;
        for (double f : freq)
            ss += (f - mean) * (f - mean);
        sd[s] = std::sqrt(ss / (trials - 1));
        half_width[s] /= trials;
    }
    u.sd_low = sd[0];
    u.sd_high = sd[1];
    u.empirical_ratio = sd[1] > 0.0 ? sd[0] / sd[1] : 0.0;
    u.plug_in_ratio = half_width[1] > 0.0 ? half_width[0] / half_width[1] : 0.0;
    return u;
}

std::vector<HardwareRow> hardware_rows(const qsim::Circuit &reference, const ExperimentConfig &config)
{
    const auto presets = calibrate_presets(reference, config);
    const auto ideal = emulate(reference, {});
    const auto ideal_top5 = qkernel::top_k_indices(ideal.probabilities, 5);
    std::vector<HardwareRow> rows;
    for (const auto &p : presets) {
        HardwareRow r;
        r.calibration = p;
        const auto dist = emulate(reference, p.noise);
        const auto rep = qkernel::analyze_distribution(dist, ideal, {5, 0.5});
        r.entropy_bits = rep.shannon_entropy_bits;
        r.fidelity = rep.classical_fidelity;
        r.noise_floor = rep.noise_floor;
        r.top5 = qkernel::top_k_indices(dist.probabilities, 5);
        for (auto i : r.top5)
            r.top5_overlap += std::count(ideal_top5.begin(), ideal_top5.end(), i) > 0;
        rows.push_back(std::move(r));
    }
    return rows;
}

// ---------------------------------------------------------------- generate

json cmd_generate(const ExperimentConfig &config, unsigned threads)
{
    config.validate();
    const std::string hash = config_hash(config);
    const auto t0 = Clock::now();
    const auto samples =
        radar::generate_dataset(radar::RadarConfig{}, config.n_per_class, config.seed, threads, config.fixed_snr_db);
    const double gen_s = seconds_since(t0);

    std::vector<radar::ComplexSignal> signals;
    FeatureTable table;
    signals.reserve(samples.size());
    for (const auto &s : samples) {
        signals.push_back(s.signal);
        table.labels.push_back(static_cast<int>(s.label));
    }
    const auto t1 = Clock::now();
    table.features = features::feature_matrix(signals, {}, threads);
    const double feat_s = seconds_since(t1);

    const auto split = stratified_split(table.labels, config.split, config.seed);

    write_text(out_path(config, kFeaturesFile), features_csv(table));
    std::vector<std::string> signal_paths;
    if (config.save_signals) {
        std::error_code ec;
        fs::create_directories(config.output_dir / "signals", ec);
        if (ec)
            throw Error(ErrorKind::Io, "cannot create " + (config.output_dir / "signals").string() + ": " + ec.message());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "signals/sample_%04zu.iq", i);
            radar::write_signal(config.output_dir / name, samples[i].signal);
            signal_paths.emplace_back(name);
        }
    }
    write_text(out_path(config, kManifestFile), manifest_csv(samples, signal_paths));
    auto split_doc = split_to_json(split);
    split_doc["config_hash"] = hash;
    write_json(out_path(config, kSplitFile), split_doc);
    write_json(out_path(config, kConfigFile), json{{"kind", "config"}, {"config_hash", hash}, {"config", to_json(config)}});

    std::vector<int> per_class(radar::kNumClasses, 0), train_per_class(radar::kNumClasses, 0);
    for (int l : table.labels)
        ++per_class.at(static_cast<std::size_t>(l));
    for (auto i : split.train)
        ++train_per_class.at(static_cast<std::size_t>(table.labels[i]));
    std::vector<int> test_per_class(radar::kNumClasses);
    for (std::size_t c = 0; c < per_class.size(); ++c)
        test_per_class[c] = per_class[c] - train_per_class[c];

    json doc{{"kind", "dataset"},
             {"config_hash", hash},
             {"rows", table.labels.size()},
             {"per_class", per_class},
             {"train", split.train.size()},
             {"test", split.test.size()},
             {"train_per_class", train_per_class},
             {"test_per_class", test_per_class},
             {"feature_names", std::vector<std::string>(features::kFeatureNames.begin(), features::kFeatureNames.end())}};
    write_json(out_path(config, kDatasetFile), doc);
    write_timings(config, "generate", json{{"simulate", gen_s}, {"features", feat_s}});
    return doc;
}

// ---------------------------------------------------------------- pca-sweep

json cmd_pca_sweep(const ExperimentConfig &config, unsigned threads)
{
    config.validate();
    const std::string hash = config_hash(config);
    const auto data = load_prepared(config);
    const int d = static_cast<int>(data.train_std.cols());

    std::vector<int> exact_k, surrogate_k;
    for (int k = 2; k <= std::min(qsim::kMaxQubits, d); ++k)
        exact_k.push_back(k);
    if (config.classical_surrogate)
        for (int k = qsim::kMaxQubits + 1; k <= std::min(12, d); ++k)
            surrogate_k.push_back(k);

    const auto t0 = Clock::now();
    auto qsvm = [&](const Eigen::MatrixXd &train, const std::vector<int> &labels, const Eigen::MatrixXd &test) {
        QsvmRun r;
        fit_encoded(r, train, test, labels, config, threads);
        return r.predictions;
    };
    auto rows = pca::pca_sweep(data.train_std, data.train_labels, data.test_std, data.test_labels, exact_k, qsvm);
    const double exact_s = seconds_since(t0);
    std::vector<std::string> kinds(rows.size(), "qsvm_exact");

    if (!surrogate_k.empty()) {
        svm::SvmConfig sc;
        sc.C = config.svm_c;
        auto rbf = [&](const Eigen::MatrixXd &train, const std::vector<int> &labels, const Eigen::MatrixXd &test) {
            return svm::predict(svm::train_rbf(train, labels, sc, threads), test);
        };
        auto extra =
            pca::pca_sweep(data.train_std, data.train_labels, data.test_std, data.test_labels, surrogate_k, rbf);
        rows.insert(rows.end(), extra.begin(), extra.end());
        kinds.resize(rows.size(), "rbf_surrogate");
    }

    json table = json::array();
    std::string csv = "k,cumulative_variance_pct,accuracy_pct,delta_accuracy_pct,classifier,config_hash\n";
    std::vector<double> ks, acc, var;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double v = 100.0 * rows[i].cumulative_variance;
        const double a = 100.0 * rows[i].accuracy;
        json delta = nullptr;
        std::string delta_text;
        if (i > 0) {
            const double dlt = a - 100.0 * rows[i - 1].accuracy;
            delta = dlt;
            delta_text = format_double(dlt);
        }
        table.push_back(json{{"k", rows[i].k},
                             {"cumulative_variance_pct", v},
                             {"accuracy_pct", a},
                             {"delta_accuracy_pct", delta},
                             {"classifier", kinds[i]},
                             {"config_hash", hash}});
        csv += std::to_string(rows[i].k) + ',' + format_double(v) + ',' + format_double(a) + ',' + delta_text + ',' +
               kinds[i] + ',' + hash + '\n';
        ks.push_back(rows[i].k);
        acc.push_back(a);
        var.push_back(v);
    }
    json doc{{"kind", "pca_sweep"}, {"config_hash", hash}, {"rows", table}};
    write_json(out_path(config, kSweepFile), doc);
    write_text(out_path(config, "pca_sweep.csv"), csv);
    write_text(out_path(config, "pca_sweep.svg"),
               svg::line_chart("PCA dimensionality sweep", ks,
                               {{"test accuracy %", acc}, {"cumulative variance %", var}}, "components k", "percent"));
    write_timings(config, "pca_sweep", json{{"sweep", seconds_since(t0)}, {"exact_qsvm", exact_s}});
    return doc;
}

// ---------------------------------------------------------------- compare

json cmd_compare(const ExperimentConfig &config, unsigned threads)
{
    config.validate();
    const std::string hash = config_hash(config);
    const auto data = load_prepared(config);

    const auto t0 = Clock::now();
    const auto classical = run_classical(data, config, threads);
    const double classical_s = seconds_since(t0);
    const auto t1 = Clock::now();
    const auto q = run_qsvm(data, config.qubits, config, threads);
    const double qsvm_s = seconds_since(t1);

    auto support = [](const svm::MulticlassModel &m) {
        std::size_t n = 0;
        for (const auto &p : m.pairs)
            n += p.model.support().size();
        return n;
    };

    json c = metrics_json(classical.metrics);
    c["classifier"] = "rbf_svm";
    c["features"] = data.train_std.cols();
    c["gamma"] = classical.classifier.gamma;
    c["support_vectors"] = support(classical.classifier.model);
    c["config_hash"] = hash;
    json qs = metrics_json(q.metrics);
    qs["classifier"] = "qsvm_exact";
    qs["features"] = config.qubits;
    qs["pca_cumulative_variance"] = q.pca.cumulative_ratio();
    qs["support_vectors"] = support(q.model);
    qs["config_hash"] = hash;

    std::vector<long> test_per_class(radar::kNumClasses, 0);
    for (int l : data.test_labels)
        ++test_per_class.at(static_cast<std::size_t>(l));

    json doc{{"kind", "compare"},
             {"config_hash", hash},
             {"train_count", data.train_labels.size()},
             {"test_count", data.test_labels.size()},
             {"test_per_class", test_per_class},
             {"classical", c},
             {"qsvm", qs},
             {"accuracy_difference_pct", 100.0 * (q.metrics.accuracy - classical.metrics.accuracy)}};
    write_json(out_path(config, kMetricsFile), doc);
    write_text(out_path(config, "confusion_classical.csv"), confusion_csv(classical.metrics.confusion));
    write_text(out_path(config, "confusion_qsvm.csv"), confusion_csv(q.metrics.confusion));
    write_text(out_path(config, "kernel_train.csv"), matrix_csv(q.kernel_train));
    write_text(out_path(config, "kernel_test.csv"), matrix_csv(q.kernel_test));

    json cm = model_json(classical.classifier.model);
    cm["kind"] = "model";
    cm["classifier"] = "rbf_svm";
    cm["gamma"] = classical.classifier.gamma;
    cm["config_hash"] = hash;
    write_json(out_path(config, "model_classical.json"), cm);
    json qm = model_json(q.model);
    qm["kind"] = "model";
    qm["classifier"] = "qsvm_exact";
    qm["kernel"] = json{{"method", std::string(qkernel::to_string(qkernel::KernelMethod::ExactFidelity))},
                        {"reps", config.reps}};
    qm["scaler"] = json{{"lo", vector_to_json(q.scaler.lo)}, {"hi", vector_to_json(q.scaler.hi)}, {"upper", q.scaler.upper}};
    qm["config_hash"] = hash;
    write_json(out_path(config, "model_qsvm.json"), qm);

    // The representative state for shot and hardware studies: first helicopter in the test split.
    Encoding enc;
    enc.standardizer = data.standardizer;
    enc.pca = q.pca;
    enc.scaler = q.scaler;
    enc.reps = config.reps;
    const auto first = std::find(data.test_labels.begin(), data.test_labels.end(),
                                 static_cast<int>(radar::TargetClass::Helicopter));
    const auto pos = first == data.test_labels.end() ? std::size_t{0}
                                                     : static_cast<std::size_t>(first - data.test_labels.begin());
    enc.sample_index = data.split.test.at(pos);
    const Eigen::VectorXd angles = q.encoded_test.row(static_cast<Eigen::Index>(pos)).transpose();
    enc.representative.assign(angles.data(), angles.data() + angles.size());
    auto enc_doc = encoding_to_json(enc);
    enc_doc["config_hash"] = hash;
    write_json(out_path(config, kEncodingFile), enc_doc);

    const auto &cmx = classical.metrics;
    const auto &qmx = q.metrics;
    write_text(out_path(config, "metrics.svg"),
               svg::bar_chart("Classical SVM vs QSVM", {"Accuracy", "Precision", "Recall", "F1"},
                              {{"Classical SVM", {100 * cmx.accuracy, 100 * cmx.precision, 100 * cmx.recall, 100 * cmx.f1}},
                               {"QSVM", {100 * qmx.accuracy, 100 * qmx.precision, 100 * qmx.recall, 100 * qmx.f1}}},
                              "percent", 100.0));
    write_timings(config, "compare",
                  json{{"classical_total", classical_s},
                       {"classical_train", classical.train_seconds},
                       {"qsvm_total", qsvm_s},
                       {"qsvm_kernel", q.kernel_seconds},
                       {"qsvm_train", q.train_seconds}});
    return doc;
}

// ---------------------------------------------------------------- shots

namespace {

Encoding load_encoding(const ExperimentConfig &config)
{
    require_inputs(config, {{kEncodingFile, "compare"}});
    auto e = encoding_from_json(read_json(out_path(config, kEncodingFile)));
    if (static_cast<int>(e.representative.size()) != config.qubits || e.reps != config.reps)
        throw Error(ErrorKind::InvalidArgument,
                    "encoding.json was produced with a different qubit or repetition count; rerun `compare`");
    return e;
}

json reference_json(const Encoding &e, const qsim::Circuit &circuit)
{
    const auto st = qsim::circuit_stats(circuit);
    return json{{"sample_index", e.sample_index},
                {"angles", e.representative},
                {"gates", {{"h", st.h}, {"p", st.p}, {"cx", st.cx}, {"measurements", st.measurements},
                           {"barriers", st.barriers}, {"total", st.total}, {"depth", st.depth},
                           {"asap_depth", st.asap_depth}}}};
}

} // namespace

json cmd_shots(const ExperimentConfig &config, unsigned /*threads*/)
{
    config.validate();
    const std::string hash = config_hash(config);
    const auto enc = load_encoding(config);
    const auto circuit = reference_circuit(enc);
    write_text(out_path(config, "reference_circuit.txt"), circuit.to_text());

    const auto t0 = Clock::now();
    const auto presets = calibrate_presets(circuit, config);
    json rows = json::array();
    json exact = json::object();
    std::string csv = "preset,shots,outcome,count,frequency,exact_probability,config_hash\n";
    std::vector<svg::Series> unc_series;
    std::vector<double> shot_axis(config.shots.begin(), config.shots.end());
    const qsim::OutcomeDistribution *summary_dist = nullptr;
    std::vector<qsim::OutcomeDistribution> dists;
    dists.reserve(presets.size());

    for (std::size_t pi = 0; pi < presets.size(); ++pi) {
        const auto &p = presets[pi];
        const std::string name(to_string(p.preset));
        dists.push_back(emulate(circuit, p.noise));
        const auto &dist = dists.back();
        if (p.preset == config.noise_preset)
            summary_dist = &dist;
        const auto top = qkernel::top_k_indices(dist.probabilities, 1).front();
        exact[name] = json{{"noise", noise_to_json(p.noise)},
                           {"entropy_bits", qkernel::shannon_entropy_bits(dist.probabilities)},
                           {"top1_outcome", qsim::bitstring(top, dist.n_qubits)},
                           {"top1_probability", dist.probabilities[top]}};

        svg::Series s{name, {}};
        for (auto shots : config.shots) {
            Rng rng = make_rng(config.seed, {0x5407u, static_cast<std::uint64_t>(pi), shots});
            const auto counts = qsim::sample_shots(dist, shots, rng);
            const auto rep = qkernel::analyze_distribution(counts, dist, {1, 0.5});
            rows.push_back(json{{"preset", name},
                                {"shots", shots},
                                {"top1_outcome", rep.top_k.front().first},
                                {"top1_probability", rep.top_k.front().second},
                                {"entropy_bits", rep.shannon_entropy_bits},
                                {"top1_uncertainty", rep.top1_uncertainty},
                                {"exact_entropy_bits", qkernel::shannon_entropy_bits(dist.probabilities)},
                                {"config_hash", hash}});
            s.values.push_back(100.0 * rep.top1_uncertainty);
            for (std::size_t i = 0; i < counts.counts.size(); ++i)
                csv += name + ',' + std::to_string(shots) + ',' + qsim::bitstring(i, counts.n_qubits) + ',' +
                       std::to_string(counts.counts[i]) + ',' +
                       format_double(static_cast<double>(counts.counts[i]) / static_cast<double>(shots)) + ',' +
                       format_double(dist.probabilities[i]) + ',' + hash + '\n';
        }
        unc_series.push_back(std::move(s));
    }

    json ratio = nullptr;
    const auto [lo_it, hi_it] = std::minmax_element(config.shots.begin(), config.shots.end());
    if (*lo_it != *hi_it && summary_dist) {
        const auto u = uncertainty_ratio(*summary_dist, *lo_it, *hi_it, config.shot_trials, config.seed);
        ratio = json{{"preset", std::string(to_string(config.noise_preset))},
                     {"outcome", qsim::bitstring(u.outcome, summary_dist->n_qubits)},
                     {"low_shots", u.low_shots},
                     {"high_shots", u.high_shots},
                     {"trials", u.trials},
                     {"sd_low", u.sd_low},
                     {"sd_high", u.sd_high},
                     {"empirical_ratio", u.empirical_ratio},
                     {"plug_in_ratio", u.plug_in_ratio},
                     {"sqrt_shot_ratio", std::sqrt(static_cast<double>(u.high_shots) / static_cast<double>(u.low_shots))},
                     {"config_hash", hash}};
    }

    json doc{{"kind", "shots"},
             {"config_hash", hash},
             {"reference", reference_json(enc, circuit)},
             {"exact", exact},
             {"rows", rows},
             {"uncertainty_ratio", ratio}};
    write_json(out_path(config, kShotsFile), doc);
    write_text(out_path(config, "shots_distribution.csv"), csv);
    write_text(out_path(config, "shots.svg"),
               svg::line_chart("Top-1 uncertainty vs shots", shot_axis, unc_series, "shots", "95% half-width (%)"));
    write_timings(config, "shots", json{{"total", seconds_since(t0)}});
    return doc;
}

// ---------------------------------------------------------------- hw-emulate

json cmd_hw_emulate(const ExperimentConfig &config, unsigned /*threads*/)
{
    config.validate();
    const std::string hash = config_hash(config);
    const auto enc = load_encoding(config);
    const auto circuit = reference_circuit(enc);

    const auto t0 = Clock::now();
    const auto rows = hardware_rows(circuit, config);
    const std::uint64_t sampled_shots = *std::max_element(config.shots.begin(), config.shots.end());
    const auto ideal = emulate(circuit, {});

    json table = json::array();
    std::string csv = "preset,p1,p2,readout_flip,target_fidelity,fidelity,entropy_bits,noise_floor,top5,top5_overlap,"
                      "config_hash\n";
    std::vector<std::string> names;
    std::vector<double> ent, fid, floor_pct;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto &r = rows[i];
        const std::string name(to_string(r.calibration.preset));
        const auto labels = outcome_labels(r.top5, circuit.n_qubits());

        Rng rng = make_rng(config.seed, {0x4a3du, static_cast<std::uint64_t>(i)});
        const auto counts = qsim::sample_shots(emulate(circuit, r.calibration.noise), sampled_shots, rng);
        const auto srep = qkernel::analyze_distribution(counts, ideal, {5, 0.5});

        std::string top5_text;
        for (const auto &l : labels)
            top5_text += (top5_text.empty() ? "" : " ") + l;
        table.push_back(json{{"preset", name},
                             {"noise", noise_to_json(r.calibration.noise)},
                             {"target_fidelity", r.calibration.target_fidelity},
                             {"calibration_iterations", r.calibration.iterations},
                             {"fidelity", r.fidelity},
                             {"entropy_bits", r.entropy_bits},
                             {"noise_floor", r.noise_floor},
                             {"top5", labels},
                             {"top5_overlap", r.top5_overlap},
                             {"sampled", {{"shots", sampled_shots},
                                          {"entropy_bits", srep.shannon_entropy_bits},
                                          {"fidelity", srep.classical_fidelity},
                                          {"noise_floor", srep.noise_floor}}},
                             {"config_hash", hash}});
        csv += name + ',' + format_double(r.calibration.noise.p1) + ',' + format_double(r.calibration.noise.p2) + ',' +
               format_double(r.calibration.noise.readout_flip) + ',' + format_double(r.calibration.target_fidelity) +
               ',' + format_double(r.fidelity) + ',' + format_double(r.entropy_bits) + ',' +
               format_double(r.noise_floor) + ',' + top5_text + ',' + std::to_string(r.top5_overlap) + ',' + hash + '\n';
        names.push_back(name);
        ent.push_back(r.entropy_bits);
        fid.push_back(100.0 * r.fidelity);
        floor_pct.push_back(100.0 * r.noise_floor);
    }

    auto by = [&](NoisePreset p) -> const HardwareRow & {
        for (const auto &r : rows)
            if (r.calibration.preset == p)
                return r;
        throw Error(ErrorKind::InvalidArgument, "preset missing from hardware rows");
    };
    const auto &id = by(NoisePreset::Ideal);
    const auto &to = by(NoisePreset::TorinoLike);
    const auto &fz = by(NoisePreset::FezLike);
    json doc{{"kind", "hw_emulation"},
             {"config_hash", hash},
             {"reference", reference_json(enc, circuit)},
             {"rows", table},
             {"ordering", {{"entropy_ideal_lt_fez_lt_torino",
                            id.entropy_bits < fz.entropy_bits && fz.entropy_bits < to.entropy_bits},
                           {"noise_floor_fez_lt_torino", fz.noise_floor < to.noise_floor}}}};
    write_json(out_path(config, kHardwareFile), doc);
    write_text(out_path(config, "hw_emulation.csv"), csv);
    std::vector<svg::Series> series;
    for (std::size_t i = 0; i < names.size(); ++i)
        series.push_back({names[i], {ent[i], fid[i] / 100.0 * 4.0, floor_pct[i]}});
    write_text(out_path(config, "hw_emulation.svg"),
               svg::bar_chart("Emulated hardware comparison",
                              {"Entropy (bits)", "Fidelity (x4)", "Noise floor (%)"}, series, "value"));
    write_timings(config, "hw_emulate", json{{"total", seconds_since(t0)}});
    return doc;
}

// ---------------------------------------------------------------- report

json cmd_report(const ExperimentConfig &config)
{
    config.validate();
    const std::string hash = config_hash(config);
    const std::vector<std::pair<std::string, const char *>> inputs = {
        {"dataset", kDatasetFile}, {"pca_sweep", kSweepFile}, {"compare", kMetricsFile},
        {"shots", kShotsFile},     {"hw_emulation", kHardwareFile},
    };
    std::string missing;
    for (const auto &[kind, file] : inputs)
        if (!fs::exists(out_path(config, file)))
            missing += std::string(missing.empty() ? "" : ", ") + file;
    if (!missing.empty())
        throw Error(ErrorKind::Io, "missing inputs in " + config.output_dir.string() + ": " + missing);

    json tables = json::object();
    std::map<std::string, std::string> hashes;
    for (const auto &[kind, file] : inputs) {
        const auto j = read_json(out_path(config, file));
        const std::string got = j.is_object() ? j.value("kind", "") : "";
        if (got == "report")
            throw Error(ErrorKind::InvalidArgument, std::string(file) + " is itself a report; reports are not ingested");
        if (got != kind)
            throw Error(ErrorKind::InvalidArgument,
                        std::string(file) + " has kind '" + got + "', expected '" + kind + "'");
        hashes[kind] = j.value("config_hash", "");
        tables[kind] = j;
    }
    bool consistent = true;
    for (const auto &[kind, h] : hashes)
        consistent = consistent && h == hash;

    json timings = json::object();
    for (const char *cmd : {"generate", "pca_sweep", "compare", "shots", "hw_emulate"}) {
        const auto p = out_path(config, std::string("timings_") + cmd + ".json");
        if (fs::exists(p))
            timings[cmd] = read_json(p).value("seconds", json::object());
    }

    char eigen_version[32];
    std::snprintf(eigen_version, sizeof eigen_version, "%d.%d.%d", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION,
                  EIGEN_MINOR_VERSION);
    json doc{{"kind", "report"},
             {"config_hash", hash},
             {"config", to_json(config)},
             {"versions", {{"qradar", version_string()},
                           {"eigen", eigen_version},
                           {"fftw", std::string(features::fft_backend_version())}}},
             {"input_config_hashes", hashes},
             {"config_hashes_consistent", consistent},
             {"tables", tables},
             {"timings_seconds", timings}};
    write_json(out_path(config, kReportFile), doc);

    // Markdown summary.
    std::string md = "# Run report\n\nconfig hash `" + hash + "`, qradar " + version_string() + "\n\n";
    if (!consistent)
        md += "Warning: some inputs were produced under a different config hash.\n\n";
    const auto &cmp = tables["compare"];
    md += "## Classifier comparison\n\n| Classifier | Accuracy | Precision | Recall | F1 |\n|---|---|---|---|---|\n";
    for (const char *k : {"classical", "qsvm"}) {
        const auto &m = cmp[k];
        md += "| " + m["classifier"].get<std::string>() + " | " + fixed(100 * m["accuracy"].get<double>(), 2) + " | " +
              fixed(100 * m["precision"].get<double>(), 2) + " | " + fixed(100 * m["recall"].get<double>(), 2) + " | " +
              fixed(100 * m["f1"].get<double>(), 2) + " |\n";
    }
    md += "\n## PCA sweep\n\n| k | Cumulative variance % | Accuracy % | Delta | Classifier |\n|---|---|---|---|---|\n";
    for (const auto &r : tables["pca_sweep"]["rows"])
        md += "| " + std::to_string(r["k"].get<int>()) + " | " + fixed(r["cumulative_variance_pct"].get<double>(), 2) +
              " | " + fixed(r["accuracy_pct"].get<double>(), 2) + " | " +
              (r["delta_accuracy_pct"].is_null() ? std::string("-") : fixed(r["delta_accuracy_pct"].get<double>(), 2)) +
              " | " + r["classifier"].get<std::string>() + " |\n";
    md += "\n## Shot analysis\n\n| Preset | Shots | Top-1 | Entropy (bits) | Uncertainty |\n|---|---|---|---|---|\n";
    for (const auto &r : tables["shots"]["rows"])
        md += "| " + r["preset"].get<std::string>() + " | " + std::to_string(r["shots"].get<std::uint64_t>()) + " | " +
              r["top1_outcome"].get<std::string>() + " (" + fixed(100 * r["top1_probability"].get<double>(), 1) +
              "%) | " + fixed(r["entropy_bits"].get<double>(), 2) + " | ±" +
              fixed(100 * r["top1_uncertainty"].get<double>(), 1) + "% |\n";
    const auto &ur = tables["shots"]["uncertainty_ratio"];
    if (!ur.is_null())
        md += "\nUncertainty ratio " + std::to_string(ur["low_shots"].get<std::uint64_t>()) + " to " +
              std::to_string(ur["high_shots"].get<std::uint64_t>()) + " shots: " +
              fixed(ur["empirical_ratio"].get<double>(), 3) + " (spread over " +
              std::to_string(ur["trials"].get<int>()) + " trials), " + fixed(ur["plug_in_ratio"].get<double>(), 3) +
              " (plug-in half-widths).\n";
    md += "\n## Hardware emulation\n\n| Preset | p2 | Fidelity | Entropy (bits) | Noise floor | Top-5 overlap |\n"
          "|---|---|---|---|---|---|\n";
    for (const auto &r : tables["hw_emulation"]["rows"])
        md += "| " + r["preset"].get<std::string>() + " | " + fixed(r["noise"]["p2"].get<double>(), 4) + " | " +
              fixed(r["fidelity"].get<double>(), 3) + " | " + fixed(r["entropy_bits"].get<double>(), 3) + " | " +
              fixed(100 * r["noise_floor"].get<double>(), 2) + "% | " + std::to_string(r["top5_overlap"].get<int>()) +
              "/5 |\n";
    write_text(out_path(config, "report.md"), md);
    return doc;
}

} // namespace qradar::harness
