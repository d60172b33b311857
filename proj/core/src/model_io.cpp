#include "vibroad/model_io.hpp"

#include "vibroad/errors.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace vibroad {

namespace {

constexpr char kMagic[4] = {'V', 'A', 'D', 'M'};
constexpr std::uint16_t kVersion = 1;

void write_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint64_t read_u64(std::istream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

void write_string(std::ostream& out, const std::string& s) {
    write_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
    const auto n = read_u64(in);
    std::string s(n, '\0');
    in.read(s.data(), static_cast<std::streamsize>(n));
    return s;
}

} // namespace

void save_model(const FittedDetector& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());
    out.write(kMagic, 4);
    out.write(reinterpret_cast<const char*>(&kVersion), sizeof(kVersion));
    const auto algo = static_cast<std::uint16_t>(model.algorithm());
    out.write(reinterpret_cast<const char*>(&algo), sizeof(algo));

    write_string(out, model.config().to_json());

    const FeatureTable& train = model.train_table();
    write_u64(out, train.columns.size());
    for (const auto& c : train.columns) write_string(out, c);
    write_u64(out, train.rows());
    for (Eigen::Index i = 0; i < train.data.rows(); ++i)
        for (Eigen::Index j = 0; j < train.data.cols(); ++j) {
            const double v = train.data(i, j);
            out.write(reinterpret_cast<const char*>(&v), sizeof(v));
        }
}

std::unique_ptr<FittedDetector> load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError(path.string() + " is not a VADM model file");
    std::uint16_t version = 0, algo = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof(version));
    in.read(reinterpret_cast<char*>(&algo), sizeof(algo));
    if (version != kVersion)
        throw IoError("unsupported model format version");

    const DetectorConfig config = DetectorConfig::from_json(read_string(in));
    if (static_cast<std::uint16_t>(config.algorithm) != algo)
        throw IoError("algorithm id does not match embedded config");

    FeatureTable train;
    const auto n_cols = read_u64(in);
    for (std::uint64_t c = 0; c < n_cols; ++c) train.columns.push_back(read_string(in));
    const auto n_rows = read_u64(in);
    train.data.resize(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(n_cols));
    for (Eigen::Index i = 0; i < train.data.rows(); ++i)
        for (Eigen::Index j = 0; j < train.data.cols(); ++j) {
            double v = 0.0;
            in.read(reinterpret_cast<char*>(&v), sizeof(v));
            train.data(i, j) = v;
        }
    if (!in)
        throw IoError("truncated model file: " + path.string());
    return fit(config, train);
}

} // namespace vibroad
