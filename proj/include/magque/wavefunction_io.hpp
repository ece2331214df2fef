#pragma once

#include <string>

#include "magque/operator_grid.hpp"

namespace magque {

/// Writes content to path through a temporary file in the same directory and a rename.
void atomic_write(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// Little-endian layout: "MTWF", u32 N, u32 flux (two's complement), u32 version = 1,
/// i32 origin1, i32 origin2, then N*N interleaved (re, im) doubles in (j1, j2) row-major order.
std::string encode_wavefunction(const GridWavefunction& u);
GridWavefunction decode_wavefunction(const std::string& bytes);

void write_wavefunction(const std::string& path, const GridWavefunction& u);
GridWavefunction read_wavefunction(const std::string& path);

/// Columns j1,j2,re,im.
std::string wavefunction_csv(const GridWavefunction& u);

}  // namespace magque
