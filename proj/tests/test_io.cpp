#include <doctest.h>

#include "uavmd/error.hpp"
#include "uavmd/io.hpp"

#include <cstring>
#include <filesystem>

using namespace uavmd;

namespace {

ComplexMatrix sample(std::size_t r, std::size_t c) {
    ComplexMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = {0.5 * i - j, 1.0 / (1.0 + i + j)};
    return m;
}

std::uint64_t format_offset(std::span<const std::uint8_t> bytes) {
    try {
        io::decode_cxm(bytes);
    } catch (const FormatError& e) {
        return e.offset();
    }
    FAIL("decode accepted malformed bytes");
    return 0;
}

} // namespace

TEST_CASE("CXM1 layout") {
    const auto m = sample(2, 3);
    const auto b = io::encode_cxm(m);
    REQUIRE(b.size() == 24 + 2 * 3 * 16);
    CHECK(std::memcmp(b.data(), "CXM1", 4) == 0);
    CHECK(b[4] == 1);
    CHECK(b[5] == 0);
    CHECK(b[8] == 2);
    CHECK(b[16] == 3);
    double re = 0.0;
    std::memcpy(&re, b.data() + 24 + 16 * 4, 8); // element (1, 1)
    CHECK(re == m(1, 1).real());
    CHECK(io::decode_cxm(b) == m);
}

TEST_CASE("CXM1 round trip through a file") {
    const auto path = std::filesystem::temp_directory_path() / "uavmd_io_test.cxm";
    const auto m = sample(5, 7);
    io::write_cxm(path, m);
    CHECK(io::read_cxm(path) == m);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(io::read_cxm(path), IoError);
    CHECK_THROWS_AS(io::write_cxm("/nonexistent-dir/x.cxm", m), IoError);
}

TEST_CASE("malformed CXM1 reports the first bad byte") {
    auto b = io::encode_cxm(sample(2, 2));
    auto bad = b;
    bad[2] = 'X';
    CHECK(format_offset(bad) == 2);
    bad = b;
    bad[4] = 2;
    CHECK(format_offset(bad) == 4);
    bad = b;
    bad.resize(b.size() - 5);
    CHECK(format_offset(bad) == bad.size());
    bad = b;
    bad.push_back(0);
    CHECK(format_offset(bad) == b.size());
    bad = b;
    bad.resize(10);
    CHECK(format_offset(bad) == 10);
    bad = b;
    std::memset(bad.data() + 8, 0xff, 16);
    CHECK(format_offset(bad) == 8);
}

TEST_CASE("vector views") {
    const auto row = sample(1, 4), col = sample(4, 1);
    CHECK(io::as_vector(row).size() == 4);
    CHECK(io::as_vector(col).size() == 4);
    CHECK(io::as_row(io::as_vector(row)) == row);
    CHECK_THROWS_AS(io::as_vector(sample(2, 2)), FormatError);
}
