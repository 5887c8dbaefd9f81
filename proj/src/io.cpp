#include "uavmd/io.hpp"
#include "uavmd/error.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace uavmd::io {
namespace {

constexpr char magic[4] = {'C', 'X', 'M', '1'};
constexpr std::size_t header_size = 4 + 4 + 8 + 8;

static_assert(std::endian::native == std::endian::little, "CXM1 I/O assumes a little-endian host");

template <class T>
void put(std::vector<std::uint8_t>& out, T v) {
    std::uint8_t b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    out.insert(out.end(), b, b + sizeof(T));
}

template <class T>
T get(std::span<const std::uint8_t> in, std::size_t off) {
    T v;
    std::memcpy(&v, in.data() + off, sizeof(T));
    return v;
}

} // namespace

std::vector<std::uint8_t> encode_cxm(const ComplexMatrix& m) {
    std::vector<std::uint8_t> out;
    out.reserve(header_size + m.size() * 16);
    out.insert(out.end(), magic, magic + 4);
    put<std::uint32_t>(out, cxm_version);
    put<std::uint64_t>(out, m.rows());
    put<std::uint64_t>(out, m.cols());
    for (const cplx& z : m.flat()) {
        put<double>(out, z.real());
        put<double>(out, z.imag());
    }
    return out;
}

ComplexMatrix decode_cxm(std::span<const std::uint8_t> bytes) {
    for (std::size_t i = 0; i < 4; ++i) {
        if (i >= bytes.size()) throw FormatError("truncated CXM1 magic", bytes.size());
        if (bytes[i] != static_cast<std::uint8_t>(magic[i])) throw FormatError("bad CXM1 magic", i);
    }
    if (bytes.size() < header_size) throw FormatError("truncated CXM1 header", bytes.size());
    const auto version = get<std::uint32_t>(bytes, 4);
    if (version != cxm_version) throw FormatError("unsupported CXM1 version " + std::to_string(version), 4);
    const auto rows = get<std::uint64_t>(bytes, 8);
    const auto cols = get<std::uint64_t>(bytes, 16);
    const std::uint64_t limit = (std::numeric_limits<std::uint64_t>::max() - header_size) / 16;
    if (cols != 0 && rows > limit / cols) throw FormatError("CXM1 dimensions overflow", 8);
    const std::uint64_t expected = header_size + rows * cols * 16;
    if (bytes.size() < expected) throw FormatError("truncated CXM1 payload", bytes.size());
    if (bytes.size() > expected) throw FormatError("trailing bytes after CXM1 payload", expected);
    ComplexMatrix m(rows, cols);
    std::size_t off = header_size;
    for (cplx& z : m.flat()) {
        z = {get<double>(bytes, off), get<double>(bytes, off + 8)};
        off += 16;
    }
    return m;
}

void write_cxm(const std::filesystem::path& path, const ComplexMatrix& m) {
    const auto bytes = encode_cxm(m);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("write failed: " + path.string());
}

ComplexMatrix read_cxm(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return decode_cxm(bytes);
}

ComplexMatrix as_row(std::span<const cplx> v) {
    ComplexMatrix m(1, v.size());
    std::copy(v.begin(), v.end(), m.flat().begin());
    return m;
}

std::vector<cplx> as_vector(const ComplexMatrix& m) {
    if (m.rows() != 1 && m.cols() != 1) {
        throw FormatError("expected a 1xM or Mx1 matrix, got " + std::to_string(m.rows()) + "x" +
                              std::to_string(m.cols()),
                          8);
    }
    return {m.flat().begin(), m.flat().end()};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << text;
    if (!f) throw IoError("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

} // namespace uavmd::io
