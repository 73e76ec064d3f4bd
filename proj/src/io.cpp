// SPDX-License-Identifier: Apache-2.0
#include "score/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

namespace score {

void ByteWriter::f32(float v) {
    static_assert(sizeof(float) == 4);
    u32(std::bit_cast<std::uint32_t>(v));
}

void ByteWriter::f64(double v) {
    static_assert(sizeof(double) == 8);
    u64(std::bit_cast<std::uint64_t>(v));
}

void ByteReader::need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw IoError("truncated artifact: unexpected end of data");
}

std::uint32_t ByteReader::u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
}

std::uint64_t ByteReader::u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
}

float ByteReader::f32() { return std::bit_cast<float>(u32()); }

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::string ByteReader::str32() {
    const std::uint32_t n = u32();
    return std::string(bytes(n));
}

std::string_view ByteReader::bytes(std::size_t n) {
    need(n);
    std::string_view out = data_.substr(pos_, n);
    pos_ += n;
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failure: " + path.string());
    return ss.str();
}

void atomic_write_file(const std::filesystem::path& path, std::string_view content) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::error_code ec;
    fs::create_directories(dir, ec);

    static std::atomic<std::uint64_t> counter{0};
    std::random_device rd;
    std::ostringstream tmp_name;
    tmp_name << "." << path.filename().string() << ".tmp." << rd() << "."
             << counter.fetch_add(1);
    const fs::path tmp = dir / tmp_name.str();

    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot create temp file: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            fs::remove(tmp, ec);
            throw IoError("write failure: " + tmp.string());
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("rename failure writing " + path.string() + ": " + ec.message());
    }
}

}  // namespace score
