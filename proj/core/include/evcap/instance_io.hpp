#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "evcap/instance.hpp"

namespace evcap {

/// Parses the JSON instance document. Syntax and type problems raise
/// ParseError carrying the line (syntax) or field path (types); missing
/// fields and broken invariants raise ValidationError.
Instance instance_from_json(std::string_view text);

/// Canonical JSON rendering; instance_from_json(instance_to_json(x)) == x.
std::string instance_to_json(const Instance& inst);

Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& inst, const std::filesystem::path& path);

/// 16 hex digits of FNV-1a over the canonical rendering without the seed.
std::string instance_hash(const Instance& inst);

/// FNV-1a 64-bit digest as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace evcap
