#pragma once

#include <string>

#include "sril/core_types.hpp"

namespace sril {

/// On-disk dataset format: newline-delimited JSON, one header line
/// ({"format":"sril-ds","version":1,"J":..,"G":..,"meta":{..}}) followed
/// by one trajectory record per line. Numbers are written with full
/// round-trip precision, so decode(encode(ds)) == ds field for field.
inline constexpr int kDatasetFormatVersion = 1;

std::string encode_dataset(const Dataset& ds);

/// Throws std::runtime_error naming the line number, the offending field,
/// and the last completely decoded record.
Dataset decode_dataset(const std::string& bytes);

void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace sril
