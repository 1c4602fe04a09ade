#pragma once

#include "ace/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ace::io {

// EMB1 layout, all little-endian:
//   0   magic "EMB1"
//   4   u32 version = 1
//   8   u8  dtype (0 = f32, 1 = f64)
//   9   3 reserved zero bytes
//   12  u64 n
//   20  u64 d
//   28  n*d values, row-major
inline constexpr std::size_t emb1_header_size = 28;
inline constexpr std::uint32_t emb1_version = 1;

enum class Format { auto_detect, emb1, csv };
enum class DType : std::uint8_t { f32 = 0, f64 = 1 };

std::vector<std::uint8_t> encode_emb1(const EmbeddingMatrix& e, DType dtype);
EmbeddingMatrix decode_emb1(const std::vector<std::uint8_t>& bytes);

std::string encode_csv(const EmbeddingMatrix& e, DType dtype);
/// Header row is detected by a non-numeric field past the first column (or a
/// non-numeric single column); an id column by a non-numeric first field in
/// the first data row.
EmbeddingMatrix decode_csv(const std::string& text);

EmbeddingMatrix read_embeddings(const std::filesystem::path& path, Format format = Format::auto_detect);
void write_embeddings(const EmbeddingMatrix& e, const std::filesystem::path& path, Format format, DType dtype = DType::f64);

/// ".csv" suffix (any case) selects CSV, everything else EMB1.
Format format_for_path(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary and renames over the destination.
void write_file_atomic(const std::filesystem::path& path, const void* data, std::size_t size);
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace ace::io
