#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "s2cn/trainer/model.hpp"

namespace s2cn {

// Layout: magic "S2CN", version u32, then records until end of file. A record
// is name length u32, name bytes, and a tensor body (dtype, rank, extents,
// payload) as in the tensor file format.
inline constexpr char kCheckpointMagic[4] = {'S', '2', 'C', 'N'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  Tensor value;
};

using Archive = std::vector<NamedTensor>;

void write_archive(std::ostream& os, const Archive& archive);
/// Throws FormatError on a bad magic, unknown version, or truncated record.
Archive read_archive(std::istream& is);
/// Atomic: written to a temporary file, then renamed.
void save_archive(const std::filesystem::path& path, const Archive& archive);
Archive load_archive(const std::filesystem::path& path);

const Tensor* find_tensor(const Archive& archive, const std::string& name);

Archive model_to_archive(const Model& model);
/// Rebuilds stacks, coefficients, and head from whatever groups are present.
Model model_from_archive(const Archive& archive);

void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(const std::filesystem::path& path);

}  // namespace s2cn
