#pragma once

#include <string>

#include "fraclab/spectral.hpp"

namespace fraclab {

/// Decomposition cache file, layout (all little-endian):
///   magic "FRLB1"
///   u32 N, u8 layout (0 node / 1 cell), u8 bc (0 Dirichlet / 1 Neumann)
///   f64 left, f64 right
///   f64[N] eigenvalues, f64[N*N] eigenvectors column-major
///   u64 FNV-1a checksum of everything between the magic and the checksum
///
/// Only raw (unaugmented) decompositions are stored; augment after loading.
void save_decomposition(const std::string& path, const SpectralDecomposition& dec);

/// Throws InvalidState on bad magic, truncation, or checksum mismatch.
SpectralDecomposition load_decomposition(const std::string& path);

/// FNV-1a 64-bit hash; also used to key cache file names.
std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed = 14695981039346656037ULL);

} // namespace fraclab
