// SPDX-License-Identifier: Apache-2.0
#include "qradar/signal_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

namespace qradar::radar {

namespace {

void put_u64(std::ostream &os, std::uint64_t v)
{
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i)
        b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b.data(), b.size());
}

std::uint64_t get_u64(std::istream &is)
{
    std::array<unsigned char, 8> b{};
    is.read(reinterpret_cast<char *>(b.data()), b.size());
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

} // namespace

void write_signal(const std::filesystem::path &path, const ComplexSignal &signal)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw Error(ErrorKind::Io, "cannot open for writing: " + path.string());
    put_u64(os, signal.samples.size());
    for (const auto &v : signal.samples) {
        put_u64(os, std::bit_cast<std::uint64_t>(v.real()));
        put_u64(os, std::bit_cast<std::uint64_t>(v.imag()));
    }
    if (!os)
        throw Error(ErrorKind::Io, "write failed: " + path.string());
}

ComplexSignal read_signal(const std::filesystem::path &path, double sample_rate)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw Error(ErrorKind::Io, "cannot open for reading: " + path.string());
    const std::uint64_t count = get_u64(is);
    if (!is)
        throw Error(ErrorKind::Io, "truncated header: " + path.string());
    const auto expected = 8 + count * 16;
    if (std::filesystem::file_size(path) != expected)
        throw Error(ErrorKind::Io, "size does not match header sample count: " + path.string());

    ComplexSignal s;
    s.sample_rate = sample_rate;
    s.samples.resize(count);
    for (auto &v : s.samples) {
        const double re = std::bit_cast<double>(get_u64(is));
        const double im = std::bit_cast<double>(get_u64(is));
        v = {re, im};
    }
    if (!is)
        throw Error(ErrorKind::Io, "truncated payload: " + path.string());
    return s;
}

} // namespace qradar::radar
