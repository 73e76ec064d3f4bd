// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "score/common.hpp"

namespace score {

/// Little-endian binary encoder for model artifacts.
class ByteWriter {
public:
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void f32(float v);
    void f64(double v);
    void bytes(std::string_view s) { buf_.append(s.data(), s.size()); }
    void str32(std::string_view s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes(s);
    }

    const std::string& buffer() const { return buf_; }
    std::string take() { return std::move(buf_); }

private:
    std::string buf_;
};

/// Little-endian decoder; throws IoError on truncated input.
class ByteReader {
public:
    explicit ByteReader(std::string_view data) : data_(data) {}

    std::uint32_t u32();
    std::uint64_t u64();
    float f32();
    double f64();
    std::string str32();
    std::string_view bytes(std::size_t n);
    bool at_end() const { return pos_ == data_.size(); }

private:
    void need(std::size_t n) const;
    std::string_view data_;
    std::size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path& path);

/// Write via temp file + rename so readers never observe partial content.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace score
