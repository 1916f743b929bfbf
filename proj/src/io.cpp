#include "io.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <filesystem>
#include <sstream>

#include <zlib.h>

#include "error.hpp"

namespace meco {

namespace {
constexpr std::size_t kChunk = 1 << 20;
} // namespace

LineReader::LineReader(const std::string& path) : path_(path) {
    file_ = std::fopen(path.c_str(), "rb");
    if (!file_)
        fail(ErrorCode::io, "cannot open input file: " + path);

    unsigned char magic[2] = {0, 0};
    std::size_t got = std::fread(magic, 1, 2, file_);
    bool gzip = got == 2 && magic[0] == 0x1f && magic[1] == 0x8b;
    std::rewind(file_);

    buf_.resize(kChunk);
    if (gzip) {
        raw_.resize(kChunk);
        auto* zs = new z_stream();
        std::memset(zs, 0, sizeof(z_stream));
        if (inflateInit2(zs, 16 + MAX_WBITS) != Z_OK) {
            delete zs;
            std::fclose(file_);
            fail(ErrorCode::io, "inflateInit failed for: " + path);
        }
        zstream_ = zs;
    }
}

LineReader::~LineReader() {
    if (zstream_) {
        inflateEnd(static_cast<z_stream*>(zstream_));
        delete static_cast<z_stream*>(zstream_);
    }
    if (file_)
        std::fclose(file_);
}

bool LineReader::fill() {
    pos_ = 0;
    len_ = 0;
    if (eof_) return false;
    if (!zstream_) {
        len_ = std::fread(buf_.data(), 1, buf_.size(), file_);
        bytes_read_ += len_;
        if (len_ == 0) eof_ = true;
        return len_ > 0;
    }
    auto* zs = static_cast<z_stream*>(zstream_);
    zs->next_out = reinterpret_cast<Bytef*>(buf_.data());
    zs->avail_out = static_cast<uInt>(buf_.size());
    while (zs->avail_out > 0) {
        if (zs->avail_in == 0) {
            raw_len_ = std::fread(raw_.data(), 1, raw_.size(), file_);
            bytes_read_ += raw_len_;
            if (raw_len_ == 0) {
                if (!gz_member_complete_)
                    fail(ErrorCode::io, "truncated gzip stream: " + path_);
                eof_ = true;
                break;
            }
            zs->next_in = reinterpret_cast<Bytef*>(raw_.data());
            zs->avail_in = static_cast<uInt>(raw_len_);
        }
        int rc = inflate(zs, Z_NO_FLUSH);
        if (rc == Z_STREAM_END) {
            gz_member_complete_ = true;
            // Support concatenated gzip members.
            if (zs->avail_in == 0 && std::feof(file_)) {
                eof_ = true;
                break;
            }
            if (inflateReset(zs) != Z_OK) {
                eof_ = true;
                break;
            }
            continue;
        }
        if (rc != Z_OK)
            fail(ErrorCode::io, "gzip decompression error in " + path_ + ": " +
                                    (zs->msg ? zs->msg : "unknown"));
        gz_member_complete_ = false;
    }
    len_ = buf_.size() - zs->avail_out;
    return len_ > 0;
}

bool LineReader::next_line(std::string_view& line) {
    carry_.clear();
    while (true) {
        if (pos_ >= len_) {
            if (!fill()) {
                if (!carry_.empty()) {
                    ++line_number_;
                    if (carry_.back() == '\r') carry_.pop_back();
                    line = carry_;
                    return true;
                }
                return false;
            }
        }
        const char* start = buf_.data() + pos_;
        const char* nl = static_cast<const char*>(
            std::memchr(start, '\n', len_ - pos_));
        if (!nl) {
            carry_.append(start, len_ - pos_);
            pos_ = len_;
            continue;
        }
        std::size_t line_len = static_cast<std::size_t>(nl - start);
        pos_ += line_len + 1;
        ++line_number_;
        if (carry_.empty()) {
            if (line_len > 0 && start[line_len - 1] == '\r') --line_len;
            line = std::string_view(start, line_len);
        } else {
            carry_.append(start, line_len);
            if (!carry_.empty() && carry_.back() == '\r') carry_.pop_back();
            line = carry_;
        }
        return true;
    }
}

std::vector<std::string> expand_inputs(const std::vector<std::string>& paths) {
    namespace fs = std::filesystem;
    std::vector<std::string> files;
    for (const std::string& p : paths) {
        std::error_code ec;
        fs::file_status st = fs::status(p, ec);
        if (ec)
            fail(ErrorCode::io, "cannot stat input path: " + p);
        if (fs::is_directory(st)) {
            for (const auto& entry : fs::recursive_directory_iterator(p)) {
                if (entry.is_regular_file())
                    files.push_back(entry.path().string());
            }
        } else if (fs::is_regular_file(st)) {
            files.push_back(p);
        } else {
            fail(ErrorCode::io, "input is neither file nor directory: " + p);
        }
    }
    std::sort(files.begin(), files.end());
    files.erase(std::unique(files.begin(), files.end()), files.end());
    return files;
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

CsvWriter::CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_)
        fail(ErrorCode::io, "cannot open output file: " + path);
}

void CsvWriter::sep() {
    if (row_started_) out_ << ',';
    row_started_ = true;
}

CsvWriter& CsvWriter::field(std::string_view s) {
    sep();
    // Values in this toolkit never contain commas or quotes; escape anyway.
    if (s.find_first_of(",\"\n") != std::string_view::npos) {
        out_ << '"';
        for (char c : s) {
            if (c == '"') out_ << '"';
            out_ << c;
        }
        out_ << '"';
    } else {
        out_ << s;
    }
    return *this;
}

CsvWriter& CsvWriter::field(std::uint64_t v) {
    sep();
    out_ << v;
    return *this;
}

CsvWriter& CsvWriter::field(std::int64_t v) {
    sep();
    out_ << v;
    return *this;
}

CsvWriter& CsvWriter::field(double v) {
    sep();
    out_ << format_double(v);
    return *this;
}

CsvWriter& CsvWriter::empty_field() {
    sep();
    return *this;
}

void CsvWriter::end_row() {
    out_ << '\n';
    row_started_ = false;
}

void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorCode::io, "cannot open output file: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        fail(ErrorCode::io, "write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorCode::io, "cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace meco
