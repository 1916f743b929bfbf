#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace meco {

// Reads a text file line by line. Gzip-compressed files are detected by their
// magic bytes (0x1f 0x8b) and decompressed on the fly.
class LineReader {
public:
    explicit LineReader(const std::string& path);
    ~LineReader();

    LineReader(const LineReader&) = delete;
    LineReader& operator=(const LineReader&) = delete;

    // Returns false at end of input. The view is valid until the next call.
    bool next_line(std::string_view& line);

    const std::string& path() const { return path_; }
    std::uint64_t line_number() const { return line_number_; }
    std::uint64_t bytes_read() const { return bytes_read_; }

private:
    bool fill();

    std::string path_;
    std::FILE* file_ = nullptr;
    void* zstream_ = nullptr;    // z_stream* when gzip
    bool gz_member_complete_ = true;
    std::vector<char> raw_;      // compressed input buffer (gzip only)
    std::size_t raw_pos_ = 0;
    std::size_t raw_len_ = 0;
    std::vector<char> buf_;      // decoded text
    std::size_t pos_ = 0;
    std::size_t len_ = 0;
    std::string carry_;          // partial line spanning buffer refills
    bool eof_ = false;
    std::uint64_t line_number_ = 0;
    std::uint64_t bytes_read_ = 0;
};

// Expands files and directories into a sorted list of regular files.
std::vector<std::string> expand_inputs(const std::vector<std::string>& paths);

// Shortest round-trip decimal representation; deterministic across runs.
std::string format_double(double v);

// CSV output: UTF-8, '.' decimal separator, LF line endings.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);

    CsvWriter& field(std::string_view s);
    CsvWriter& field(std::uint64_t v);
    CsvWriter& field(std::int64_t v);
    CsvWriter& field(std::int32_t v) { return field(static_cast<std::int64_t>(v)); }
    CsvWriter& field(std::uint32_t v) { return field(static_cast<std::uint64_t>(v)); }
    CsvWriter& field(double v);
    CsvWriter& empty_field();
    void end_row();

private:
    void sep();
    std::ofstream out_;
    bool row_started_ = false;
};

void write_text_file(const std::string& path, std::string_view content);
std::string read_text_file(const std::string& path);

} // namespace meco
