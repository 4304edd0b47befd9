#pragma once

// Seeded generators of random Documents and JSON texts for round-trip
// checks.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>

#include "llmon/model.hpp"

namespace llmon {

struct GenOptions {
  std::size_t max_depth = 5;
  std::size_t max_nodes = 40;
  /// Include user tags (otherwise only Object/List/Scalar nodes).
  bool user_tags = true;
  /// Allow scalars with characters that need escaping or casting.
  bool awkward_text = true;
};

/// Random valid Document. Tag names avoid reserved names and never
/// conflict under flattening; scalar text never contains special-token
/// strings.
Document random_document(std::mt19937_64& rng, const GenOptions& options = {});

/// Random JSON text (depth <= max_depth, <= max_nodes values). Objects may
/// repeat keys.
std::string random_json(std::mt19937_64& rng, std::size_t max_depth = 6, std::size_t max_nodes = 50);

/// Random valid tag path of 1..max_segments segments.
TagPath random_tag_path(std::mt19937_64& rng, std::size_t max_segments = 4);

}  // namespace llmon
