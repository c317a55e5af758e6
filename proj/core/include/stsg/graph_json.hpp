#pragma once

#include <string>

#include "stsg/graph.hpp"

namespace stsg {

// STSG-JSON, schema_version 1. Strict on input: unknown fields are rejected
// ("unknown-field") at every object level, a wrong schema_version is a
// "schema-version" error, malformed JSON reports the byte offset.
// Serialization requires a graph that validates cleanly and is byte-stable.

std::string serialize_stsg(const SpatioTemporalSceneGraph& stsg);
SpatioTemporalSceneGraph deserialize_stsg(const std::string& bytes);

std::string serialize_frame(const FrameSceneGraph& fsg);
FrameSceneGraph deserialize_frame(const std::string& bytes);

}  // namespace stsg
