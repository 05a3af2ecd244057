#include "s2cn/data/tensor_file.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "s2cn/data/byte_io.hpp"
#include "s2cn/numkit/errors.hpp"

namespace s2cn {

using namespace byte_io;

void write_tensor_body(std::ostream& os, const Tensor& t) {
  put_u8(os, kDtypeF64);
  put_u32(os, static_cast<std::uint32_t>(t.rank()));
  for (std::size_t e : t.shape()) put_u64(os, e);
  for (double v : t.values()) put_f64(os, v);
}

Tensor read_tensor_body(std::istream& is) {
  const std::uint8_t dtype = get_u8(is, "tensor dtype");
  if (dtype != kDtypeF64) throw FormatError("unknown tensor dtype " + std::to_string(dtype));
  const std::uint32_t rank = get_u32(is, "tensor rank");
  if (rank > 16) throw FormatError("implausible tensor rank " + std::to_string(rank));
  Shape shape(rank);
  std::size_t count = 1;
  for (auto& e : shape) {
    const std::uint64_t v = get_u64(is, "tensor extent");
    if (v > (std::uint64_t{1} << 40)) throw FormatError("implausible tensor extent " + std::to_string(v));
    e = static_cast<std::size_t>(v);
    if (e != 0 && count > std::numeric_limits<std::size_t>::max() / 8 / e) throw FormatError("tensor too large");
    count *= e;
  }
  std::vector<double> values;
  values.reserve(std::min<std::size_t>(count, std::size_t{1} << 20));
  for (std::size_t i = 0; i < count; ++i) values.push_back(get_f64(is, "tensor payload"));
  return Tensor(std::move(shape), std::move(values));
}

void write_tensor(std::ostream& os, const Tensor& t) {
  os.write(kTensorMagic, 4);
  put_u32(os, kTensorVersion);
  write_tensor_body(os, t);
}

Tensor read_tensor(std::istream& is) {
  char magic[4] = {};
  read_exact(is, magic, 4, "tensor magic");
  if (std::string(magic, 4) != std::string(kTensorMagic, 4)) throw FormatError("not a tensor file (bad magic)");
  const std::uint32_t version = get_u32(is, "tensor version");
  if (version != kTensorVersion) throw FormatError("unsupported tensor file version " + std::to_string(version));
  Tensor t = read_tensor_body(is);
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after tensor payload");
  return t;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void save_tensor(const std::filesystem::path& path, const Tensor& t) {
  std::ostringstream os(std::ios::binary);
  write_tensor(os, t);
  write_file_atomic(path, os.str());
}

Tensor load_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open tensor file " + path.string());
  try {
    return read_tensor(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace s2cn
