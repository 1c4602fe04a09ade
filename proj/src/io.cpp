#include "ace/io.hpp"

#include "ace/error.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string_view>
#include <system_error>

namespace ace::io {
namespace {

using Index = Eigen::Index;

constexpr char emb1_magic[4] = {'E', 'M', 'B', '1'};

void put_le(std::vector<std::uint8_t>& out, std::uint64_t value, int bytes) {
    for (int b = 0; b < bytes; ++b) out.push_back(static_cast<std::uint8_t>((value >> (8 * b)) & 0xffu));
}

std::uint64_t get_le(const std::uint8_t* p, int bytes) {
    std::uint64_t v = 0;
    for (int b = 0; b < bytes; ++b) v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
    return v;
}

std::string location(std::size_t row, std::size_t col) {
    return "row " + std::to_string(row) + ", column " + std::to_string(col);
}

float to_f32(double v, std::size_t row, std::size_t col) {
    const auto f = static_cast<float>(v);
    if (!std::isfinite(f)) throw Error(ErrorKind::NonRepresentable, "value at " + location(row, col) + " overflows f32");
    return f;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view text, double& out) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return false;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

bool is_number(std::string_view text) {
    double ignored = 0.0;
    return parse_double(text, ignored);
}

std::string render_number(double v, DType dtype) {
    char buf[64];
    const int precision = dtype == DType::f64 ? 17 : 9;
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, precision);
    if (ec != std::errc{}) throw Error(ErrorKind::IoFailure, "number formatting failed");
    return std::string(buf, ptr);
}

std::string quote_field(const std::string& field) {
    const bool needs = field.empty() || field.find_first_of(",\"\r\n") != std::string::npos || field.front() == ' ' ||
                       field.back() == ' ';
    if (!needs) return field;
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

struct CsvRecord {
    std::vector<std::string> fields;
    std::size_t line = 0;
};

// RFC 4180 records; blank lines are dropped.
std::vector<CsvRecord> split_csv(const std::string& text) {
    std::vector<CsvRecord> records;
    CsvRecord current;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;
    current.line = line;

    auto end_record = [&] {
        const bool blank = current.fields.empty() && field.empty() && !field_started;
        if (!blank) {
            current.fields.push_back(std::move(field));
            records.push_back(std::move(current));
        }
        current = CsvRecord{};
        field.clear();
        field_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                current.fields.push_back(std::move(field));
                field.clear();
                field_started = true;
                break;
            case '\r':
                break;
            case '\n':
                end_record();
                current.line = ++line;
                break;
            default:
                field += c;
                field_started = true;
        }
    }
    if (in_quotes) throw Error(ErrorKind::ParseError, "unterminated quoted field");
    end_record();
    return records;
}

}  // namespace

std::vector<std::uint8_t> encode_emb1(const EmbeddingMatrix& e, DType dtype) {
    const std::size_t n = e.rows();
    const std::size_t d = e.cols();
    const std::size_t width = dtype == DType::f64 ? 8 : 4;

    std::vector<std::uint8_t> out;
    out.reserve(emb1_header_size + n * d * width);
    out.insert(out.end(), std::begin(emb1_magic), std::end(emb1_magic));
    put_le(out, emb1_version, 4);
    out.push_back(static_cast<std::uint8_t>(dtype));
    out.insert(out.end(), 3, 0);
    put_le(out, n, 8);
    put_le(out, d, 8);

    const Matrix& v = e.values();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double x = v(static_cast<Index>(i), static_cast<Index>(j));
            if (dtype == DType::f64)
                put_le(out, std::bit_cast<std::uint64_t>(x), 8);
            else
                put_le(out, std::bit_cast<std::uint32_t>(to_f32(x, i, j)), 4);
        }
    }
    return out;
}

EmbeddingMatrix decode_emb1(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), emb1_magic, 4) != 0)
        throw Error(ErrorKind::BadMagic, "missing EMB1 magic");
    if (bytes.size() < emb1_header_size)
        throw Error(ErrorKind::TruncatedFile, "EMB1 header needs 28 bytes, file has " + std::to_string(bytes.size()));

    const std::uint8_t* p = bytes.data();
    const auto version = get_le(p + 4, 4);
    if (version != emb1_version) throw Error(ErrorKind::BadMagic, "unsupported EMB1 version " + std::to_string(version));
    const std::uint8_t dtype = p[8];
    if (dtype > 1) throw Error(ErrorKind::BadMagic, "unknown EMB1 dtype " + std::to_string(dtype));
    if (p[9] != 0 || p[10] != 0 || p[11] != 0) throw Error(ErrorKind::BadMagic, "EMB1 reserved bytes must be zero");
    const std::uint64_t n = get_le(p + 12, 8);
    const std::uint64_t d = get_le(p + 20, 8);
    if (n == 0 || d == 0) throw Error(ErrorKind::InvalidArgument, "EMB1 declares an empty matrix");

    const std::uint64_t width = dtype == 1 ? 8 : 4;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max();
    if (n > limit / d || n * d > (limit - emb1_header_size) / width)
        throw Error(ErrorKind::TruncatedFile, "EMB1 dimensions overflow");
    const std::uint64_t expected = emb1_header_size + n * d * width;
    if (bytes.size() != expected)
        throw Error(ErrorKind::TruncatedFile, "EMB1 payload size mismatch: expected " + std::to_string(expected) +
                                                  " bytes, file has " + std::to_string(bytes.size()));

    Matrix m(static_cast<Index>(n), static_cast<Index>(d));
    const std::uint8_t* payload = p + emb1_header_size;
    for (std::uint64_t i = 0; i < n; ++i) {
        for (std::uint64_t j = 0; j < d; ++j) {
            const std::uint8_t* cell = payload + (i * d + j) * width;
            const double x = width == 8 ? std::bit_cast<double>(get_le(cell, 8))
                                        : static_cast<double>(std::bit_cast<float>(static_cast<std::uint32_t>(get_le(cell, 4))));
            if (!std::isfinite(x)) throw Error(ErrorKind::NonFiniteValue, "non-finite value at " + location(i, j));
            m(static_cast<Index>(i), static_cast<Index>(j)) = x;
        }
    }
    return EmbeddingMatrix(std::move(m));
}

std::string encode_csv(const EmbeddingMatrix& e, DType dtype) {
    const auto& ids = e.item_ids();
    std::string out;
    if (ids) out += "id,";
    for (std::size_t j = 0; j < e.cols(); ++j) {
        if (j > 0) out += ',';
        out += 'x' + std::to_string(j);
    }
    out += '\n';

    const Matrix& v = e.values();
    for (std::size_t i = 0; i < e.rows(); ++i) {
        if (ids) out += quote_field((*ids)[i]) + ',';
        for (std::size_t j = 0; j < e.cols(); ++j) {
            if (j > 0) out += ',';
            const double x = v(static_cast<Index>(i), static_cast<Index>(j));
            out += dtype == DType::f64 ? render_number(x, dtype) : render_number(static_cast<double>(to_f32(x, i, j)), dtype);
        }
        out += '\n';
    }
    return out;
}

EmbeddingMatrix decode_csv(const std::string& text) {
    const auto records = split_csv(text);
    if (records.empty()) throw Error(ErrorKind::ParseError, "CSV is empty");

    const auto& first = records.front().fields;
    bool header = first.size() == 1 && !is_number(first[0]);
    for (std::size_t j = 1; j < first.size() && !header; ++j) header = !is_number(first[j]);

    const std::size_t start = header ? 1 : 0;
    if (records.size() <= start) throw Error(ErrorKind::ParseError, "CSV has a header but no data rows");

    const auto& lead = records[start].fields;
    const std::size_t width = lead.size();
    const bool has_ids = width >= 2 && !is_number(lead[0]);
    if (width == 1 && !is_number(lead[0]))
        throw Error(ErrorKind::ParseError, "line " + std::to_string(records[start].line) + ": non-numeric value");
    if (header && first.size() != width)
        throw Error(ErrorKind::RaggedCsv, "header has " + std::to_string(first.size()) + " fields, data has " + std::to_string(width));

    const std::size_t offset = has_ids ? 1 : 0;
    const std::size_t n = records.size() - start;
    const std::size_t d = width - offset;
    Matrix m(static_cast<Index>(n), static_cast<Index>(d));
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& rec = records[start + i];
        if (rec.fields.size() != width)
            throw Error(ErrorKind::RaggedCsv, "line " + std::to_string(rec.line) + " has " + std::to_string(rec.fields.size()) +
                                                  " fields, expected " + std::to_string(width));
        if (has_ids) ids.push_back(rec.fields[0]);
        for (std::size_t j = 0; j < d; ++j) {
            double x = 0.0;
            if (!parse_double(rec.fields[offset + j], x))
                throw Error(ErrorKind::ParseError, "line " + std::to_string(rec.line) + ": '" + rec.fields[offset + j] +
                                                       "' is not a number (" + location(i, j) + ")");
            if (!std::isfinite(x)) throw Error(ErrorKind::NonFiniteValue, "non-finite value at " + location(i, j));
            m(static_cast<Index>(i), static_cast<Index>(j)) = x;
        }
    }
    if (has_ids) return EmbeddingMatrix(std::move(m), std::move(ids));
    return EmbeddingMatrix(std::move(m));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoFailure, "cannot open '" + path.string() + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(ErrorKind::IoFailure, "read failed for '" + path.string() + "'");
    return bytes;
}

EmbeddingMatrix read_embeddings(const std::filesystem::path& path, Format format) {
    const auto bytes = read_file(path);
    if (format == Format::auto_detect)
        format = bytes.size() >= 4 && std::memcmp(bytes.data(), emb1_magic, 4) == 0 ? Format::emb1 : Format::csv;
    if (format == Format::emb1) return decode_emb1(bytes);
    return decode_csv(std::string(bytes.begin(), bytes.end()));
}

void write_embeddings(const EmbeddingMatrix& e, const std::filesystem::path& path, Format format, DType dtype) {
    if (format == Format::auto_detect) format = format_for_path(path);
    if (format == Format::emb1) {
        const auto bytes = encode_emb1(e, dtype);
        write_file_atomic(path, bytes.data(), bytes.size());
    } else {
        write_file_atomic(path, encode_csv(e, dtype));
    }
}

Format format_for_path(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".csv" ? Format::csv : Format::emb1;
}

void write_file_atomic(const std::filesystem::path& path, const void* data, std::size_t size) {
    static std::atomic<unsigned> counter{0};
    std::filesystem::path tmp = path;
    tmp += ".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::IoFailure, "cannot open '" + tmp.string() + "' for writing");
        out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw Error(ErrorKind::IoFailure, "write failed for '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        throw Error(ErrorKind::IoFailure, "cannot move output into '" + path.string() + "': " + ec.message());
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
    write_file_atomic(path, text.data(), text.size());
}

}  // namespace ace::io
