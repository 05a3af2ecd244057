#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace s2cn {

/// Plain-text `key=value` lines; blank lines and lines starting with '#' are
/// skipped, whitespace around keys and values is trimmed. Later keys win.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& is, const std::string& source = "<stream>");
KeyValues read_key_values(const std::filesystem::path& path);

std::optional<std::string> lookup(const KeyValues& kv, const std::string& key);

}  // namespace s2cn
