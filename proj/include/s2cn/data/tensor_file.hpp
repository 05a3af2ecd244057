#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "s2cn/numkit/tensor.hpp"

namespace s2cn {

// Layout: magic "STSR", version u32, dtype u8 (0 = f64), rank u32, one u64 per
// extent, then the row-major payload. All integers and floats little-endian.

inline constexpr char kTensorMagic[4] = {'S', 'T', 'S', 'R'};
inline constexpr std::uint32_t kTensorVersion = 1;
inline constexpr std::uint8_t kDtypeF64 = 0;

/// dtype, rank, extents, payload: the part shared with checkpoint records.
void write_tensor_body(std::ostream& os, const Tensor& t);
Tensor read_tensor_body(std::istream& is);

void write_tensor(std::ostream& os, const Tensor& t);
Tensor read_tensor(std::istream& is);

/// Written to a temporary file and renamed into place.
void save_tensor(const std::filesystem::path& path, const Tensor& t);
Tensor load_tensor(const std::filesystem::path& path);

/// Writes `bytes` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

}  // namespace s2cn
