// SPDX-License-Identifier: Apache-2.0
#include "qradar/harness/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qradar/common.hpp"
#include "qradar/spectral_features.hpp"

namespace qradar::harness {

namespace fs = std::filesystem;

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const fs::path &path, const std::string &content)
{
    std::error_code ec;
    if (path.has_parent_path())
        fs::create_directories(path.parent_path(), ec);
    if (ec)
        throw Error(ErrorKind::Io, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    out << content;
    out.close();
    if (!out)
        throw Error(ErrorKind::Io, "write failed for " + path.string());
}

std::string read_text(const fs::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_json(const fs::path &path, const json &j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path &path)
{
    try {
        return json::parse(read_text(path));
    } catch (const json::parse_error &e) {
        throw Error(ErrorKind::Io, path.string() + " is not valid JSON: " + e.what());
    }
}

std::string features_csv(const FeatureTable &t)
{
    if (static_cast<std::size_t>(t.features.rows()) != t.labels.size())
        throw Error(ErrorKind::DimensionMismatch, "feature rows and labels differ in length");
    std::string out;
    for (auto name : features::kFeatureNames) {
        out += name;
        out += ',';
    }
    out += "label\n";
    for (Eigen::Index i = 0; i < t.features.rows(); ++i) {
        for (Eigen::Index j = 0; j < t.features.cols(); ++j)
            out += format_double(t.features(i, j)) + ',';
        out += std::to_string(t.labels[static_cast<std::size_t>(i)]) + '\n';
    }
    return out;
}

namespace {

std::vector<std::string> split_line(const std::string &line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ','))
        cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    return cells;
}

double parse_double(const std::string &s, std::size_t line_no)
{
    char *end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || !std::isfinite(v))
        throw Error(ErrorKind::InvalidArgument, "features CSV line " + std::to_string(line_no) + ": bad number '" + s + "'");
    return v;
}

} // namespace

FeatureTable parse_features_csv(const std::string &text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorKind::InvalidArgument, "features CSV is empty");
    const auto header = split_line(line);
    const std::size_t d = features::kNumFeatures;
    if (header.size() != d + 1 || header[d] != "label")
        throw Error(ErrorKind::InvalidArgument, "features CSV header does not match the feature set");
    for (std::size_t j = 0; j < d; ++j)
        if (header[j] != features::kFeatureNames[j])
            throw Error(ErrorKind::InvalidArgument, "features CSV column " + std::to_string(j) + " is '" + header[j] +
                                                        "', expected '" + std::string(features::kFeatureNames[j]) + "'");

    std::vector<std::vector<double>> rows;
    FeatureTable t;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        const auto cells = split_line(line);
        if (cells.size() != d + 1)
            throw Error(ErrorKind::InvalidArgument, "features CSV line " + std::to_string(line_no) + " has " +
                                                        std::to_string(cells.size()) + " cells");
        const double label = parse_double(cells[d], line_no);
        if (label != std::floor(label) || label < 0)
            throw Error(ErrorKind::InvalidArgument, "features CSV line " + std::to_string(line_no) + ": bad label");
        t.labels.push_back(static_cast<int>(label));
        std::vector<double> r(d);
        for (std::size_t j = 0; j < d; ++j)
            r[j] = parse_double(cells[j], line_no);
        rows.push_back(std::move(r));
    }
    t.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < d; ++j)
            t.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return t;
}

std::string manifest_csv(const std::vector<radar::LabeledSignal> &samples, const std::vector<std::string> &paths)
{
    if (!paths.empty() && paths.size() != samples.size())
        throw Error(ErrorKind::DimensionMismatch, "one signal path per sample expected");
    std::string out = "path,label,snr_db,weather,seed,class,attenuation_db_per_km,path_km,turbulence,body_velocity,"
                      "blade_count,rotation_freq,blade_length,engine_mod_freq\n";
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto &s = samples[i];
        out += (paths.empty() ? std::string() : paths[i]) + ',' + std::to_string(static_cast<int>(s.label)) + ',' +
               format_double(s.env.snr_db) + ',' + std::string(radar::to_string(s.env.weather)) + ',' +
               std::to_string(s.seed) + ',' + std::string(radar::to_string(s.label)) + ',' +
               format_double(s.env.attenuation_db_per_km) + ',' + format_double(s.env.path_km) + ',' +
               format_double(s.env.turbulence_intensity) + ',' + format_double(s.params.body_velocity) + ',' +
               std::to_string(s.params.blade_count) + ',' + format_double(s.params.rotation_freq) + ',' +
               format_double(s.params.blade_length) + ',' + format_double(s.params.engine_mod_freq) + '\n';
    }
    return out;
}

Split stratified_split(const std::vector<int> &labels, double train_fraction, std::uint64_t seed)
{
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw Error(ErrorKind::ParameterRange, "train fraction must lie in (0, 1)");
    std::vector<int> classes(labels.begin(), labels.end());
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

    Split s;
    for (int c : classes) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == c)
                idx.push_back(i);
        Rng rng = make_rng(seed, {0x5b11u, static_cast<std::uint64_t>(c)});
        for (std::size_t i = idx.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
            std::swap(idx[i - 1], idx[std::min(j, i - 1)]);
        }
        const auto n_train = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(idx.size())));
        s.train.insert(s.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        s.test.insert(s.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    }
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

json split_to_json(const Split &split)
{
    return json{{"kind", "split"}, {"train", split.train}, {"test", split.test}};
}

Split split_from_json(const json &j, std::size_t n_rows)
{
    Split s;
    try {
        s.train = j.at("train").get<std::vector<std::size_t>>();
        s.test = j.at("test").get<std::vector<std::size_t>>();
    } catch (const json::exception &e) {
        throw Error(ErrorKind::InvalidArgument, std::string("split file malformed: ") + e.what());
    }
    std::vector<char> seen(n_rows, 0);
    for (const auto *part : {&s.train, &s.test})
        for (auto i : *part) {
            if (i >= n_rows || seen[i])
                throw Error(ErrorKind::InvalidArgument, "split file does not partition the feature rows");
            seen[i] = 1;
        }
    if (s.train.size() + s.test.size() != n_rows)
        throw Error(ErrorKind::InvalidArgument, "split file does not cover every feature row");
    return s;
}

std::string matrix_csv(const Eigen::MatrixXd &m)
{
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j)
                out += ',';
            out += format_double(m(i, j));
        }
        out += '\n';
    }
    return out;
}

std::string confusion_csv(const std::vector<std::vector<long>> &confusion)
{
    std::string out = "true\\pred";
    for (std::size_t c = 0; c < confusion.size(); ++c)
        out += ',' + std::string(radar::to_string(static_cast<radar::TargetClass>(c)));
    out += '\n';
    for (std::size_t r = 0; r < confusion.size(); ++r) {
        out += std::string(radar::to_string(static_cast<radar::TargetClass>(r)));
        for (long v : confusion[r])
            out += ',' + std::to_string(v);
        out += '\n';
    }
    return out;
}

Eigen::MatrixXd rows_of(const Eigen::MatrixXd &m, const std::vector<std::size_t> &rows)
{
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
    return out;
}

std::vector<int> rows_of(const std::vector<int> &v, const std::vector<std::size_t> &rows)
{
    std::vector<int> out;
    out.reserve(rows.size());
    for (auto r : rows)
        out.push_back(v.at(r));
    return out;
}

json vector_to_json(const Eigen::VectorXd &v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from_json(const json &j)
{
    auto v = j.get<std::vector<double>>();
    return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json matrix_to_json(const Eigen::MatrixXd &m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        rows.push_back(vector_to_json(m.row(i).transpose()));
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json &j)
{
    const std::size_t r = j.size();
    const std::size_t c = r ? j[0].size() : 0;
    Eigen::MatrixXd m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (std::size_t i = 0; i < r; ++i) {
        if (j[i].size() != c)
            throw Error(ErrorKind::DimensionMismatch, "ragged matrix in JSON");
        for (std::size_t k = 0; k < c; ++k)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
    }
    return m;
}

} // namespace qradar::harness
