#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "csigan/models.hpp"

namespace csigan {

// Flat binary container: magic, format version, model kind, build seed, then
// every parameter array with its name and shape as raw little-endian
// doubles. Loading rebuilds the fixed architecture from the stored seed and
// overwrites the arrays, so forward passes reproduce bit-identically.
void save_checkpoint(const std::string& path, Generator& gen);
void save_checkpoint(const std::string& path, DiscClassNet& net);

std::unique_ptr<Generator> load_generator(const std::string& path);
std::unique_ptr<DiscClassNet> load_discriminator(const std::string& path);

// Kind string stored in the file, without loading the arrays.
std::string checkpoint_kind(const std::string& path);

}  // namespace csigan
