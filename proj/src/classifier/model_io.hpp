// Versioned binary model file: magic string, architecture block, parameters
// as little-endian 64-bit floats in declaration order.
#pragma once

#include <string>

#include "classifier/net.hpp"

namespace tubeloc::classifier {

inline constexpr const char* kModelMagic = "TUBELOC-EMB v1";

void write_model(const std::string& path, const EmbedModel& model);
EmbedModel read_model(const std::string& path);

}  // namespace tubeloc::classifier
