#pragma once

#include "uavmd/types.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace uavmd::io {

// CXM1 layout: "CXM1", u32 version (1), u64 rows, u64 cols, then rows*cols
// (re, im) f64 pairs in row-major order. Everything little-endian.
inline constexpr std::uint32_t cxm_version = 1;

std::vector<std::uint8_t> encode_cxm(const ComplexMatrix& m);
// Throws FormatError carrying the offset of the first offending byte.
ComplexMatrix decode_cxm(std::span<const std::uint8_t> bytes);

void write_cxm(const std::filesystem::path& path, const ComplexMatrix& m);
ComplexMatrix read_cxm(const std::filesystem::path& path);

ComplexMatrix as_row(std::span<const cplx> v);
// Accepts 1xM or Mx1.
std::vector<cplx> as_vector(const ComplexMatrix& m);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

} // namespace uavmd::io
