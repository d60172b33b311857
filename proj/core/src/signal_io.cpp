#include "vibroad/signal_io.hpp"

#include "vibroad/errors.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace vibroad {

namespace {
constexpr char kMagic[4] = {'V', 'I', 'B', '1'};
}

VibrationSignal read_signal_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    VibrationSignal sig;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto pos = line.find("sample_rate=");
            if (pos != std::string::npos)
                sig.sample_rate = std::stod(line.substr(pos + 12));
            continue;
        }
        sig.samples.push_back(std::stod(line));
    }
    sig.validate();
    return sig;
}

void write_signal_csv(const VibrationSignal& signal, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << "# sample_rate=" << std::setprecision(17) << signal.sample_rate << "\n";
    for (double s : signal.samples)
        out << std::setprecision(17) << s << "\n";
}

VibrationSignal read_signal_vib1(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    char magic[4];
    std::uint32_t rate = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&rate), 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError(path.string() + " is not a VIB1 file");
    VibrationSignal sig;
    sig.sample_rate = static_cast<double>(rate);
    float v = 0.0f;
    while (in.read(reinterpret_cast<char*>(&v), 4))
        sig.samples.push_back(static_cast<double>(v));
    sig.validate();
    return sig;
}

void write_signal_vib1(const VibrationSignal& signal, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());
    out.write(kMagic, 4);
    const auto rate = static_cast<std::uint32_t>(signal.sample_rate);
    out.write(reinterpret_cast<const char*>(&rate), 4);
    for (double s : signal.samples) {
        const auto v = static_cast<float>(s);
        out.write(reinterpret_cast<const char*>(&v), 4);
    }
}

VibrationSignal read_signal(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? read_signal_csv(path) : read_signal_vib1(path);
}

} // namespace vibroad
