#pragma once

#include "kdict/dictionary.hpp"

#include <filesystem>
#include <iosfwd>

namespace kdict {

// Text format, one record per line, '#' starts a comment line:
//
//   kdict-dictionary 1
//   kernel gaussian sigma=<s>          | linear | polynomial degree=<p> offset=<c>
//   criterion <kind> threshold=<t> [max_atoms=<n>]
//   dim <d>
//   atoms <m>
//   <x_1> ... <x_d>                    (m lines, shortest round-trip decimals)
//
// Loading goes through Dictionary::from_atoms, so the Gram matrix is
// recomputed from the atoms and matches the writer's bit for bit.

void write_dictionary(std::ostream& os, const Dictionary& dict);
void save_dictionary(const std::filesystem::path& path, const Dictionary& dict);

/// Throws ParseError with the offending line number.
Dictionary read_dictionary(std::istream& is);
Dictionary load_dictionary(const std::filesystem::path& path);

}  // namespace kdict
