#include "dali/bytes.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace dali {

namespace {

void check_span(ByteSpan b, std::size_t pos, std::size_t n) {
    if (pos + n > b.size()) {
        throw std::out_of_range("byte access past end of buffer");
    }
}

}  // namespace

std::uint16_t load_u16(ByteSpan b, std::size_t pos, bool big_endian) {
    check_span(b, pos, 2);
    if (big_endian) {
        return static_cast<std::uint16_t>((b[pos] << 8) | b[pos + 1]);
    }
    return static_cast<std::uint16_t>(b[pos] | (b[pos + 1] << 8));
}

std::uint32_t load_u32(ByteSpan b, std::size_t pos, bool big_endian) {
    check_span(b, pos, 4);
    if (big_endian) {
        return (std::uint32_t(b[pos]) << 24) | (std::uint32_t(b[pos + 1]) << 16) |
               (std::uint32_t(b[pos + 2]) << 8) | std::uint32_t(b[pos + 3]);
    }
    return std::uint32_t(b[pos]) | (std::uint32_t(b[pos + 1]) << 8) |
           (std::uint32_t(b[pos + 2]) << 16) | (std::uint32_t(b[pos + 3]) << 24);
}

void store_u16(Bytes& b, std::size_t pos, std::uint16_t value, bool big_endian) {
    check_span(b, pos, 2);
    if (big_endian) {
        b[pos] = static_cast<std::uint8_t>(value >> 8);
        b[pos + 1] = static_cast<std::uint8_t>(value);
    } else {
        b[pos] = static_cast<std::uint8_t>(value);
        b[pos + 1] = static_cast<std::uint8_t>(value >> 8);
    }
}

void store_u32(Bytes& b, std::size_t pos, std::uint32_t value, bool big_endian) {
    check_span(b, pos, 4);
    if (big_endian) {
        b[pos] = static_cast<std::uint8_t>(value >> 24);
        b[pos + 1] = static_cast<std::uint8_t>(value >> 16);
        b[pos + 2] = static_cast<std::uint8_t>(value >> 8);
        b[pos + 3] = static_cast<std::uint8_t>(value);
    } else {
        b[pos] = static_cast<std::uint8_t>(value);
        b[pos + 1] = static_cast<std::uint8_t>(value >> 8);
        b[pos + 2] = static_cast<std::uint8_t>(value >> 16);
        b[pos + 3] = static_cast<std::uint8_t>(value >> 24);
    }
}

std::optional<std::size_t> find_bytes(ByteSpan haystack, std::string_view needle,
                                      std::size_t from) {
    if (needle.empty() || from >= haystack.size() || needle.size() > haystack.size()) {
        return std::nullopt;
    }
    const auto* first = haystack.data() + from;
    const auto* last = haystack.data() + haystack.size();
    const auto* it = std::search(first, last, needle.begin(), needle.end());
    if (it == last) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - haystack.data());
}

std::optional<std::size_t> rfind_bytes(ByteSpan haystack, std::string_view needle,
                                       std::size_t before) {
    before = std::min<std::size_t>(before, haystack.size());
    if (needle.empty() || needle.size() > before) {
        return std::nullopt;
    }
    const auto* first = haystack.data();
    const auto* last = haystack.data() + before;
    const auto* it = std::find_end(first, last, needle.begin(), needle.end());
    if (it == last) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - haystack.data());
}

bool starts_with(ByteSpan b, std::size_t pos, std::string_view text) {
    if (pos + text.size() > b.size()) {
        return false;
    }
    return std::equal(text.begin(), text.end(), b.begin() + pos,
                      [](char c, std::uint8_t u) { return static_cast<std::uint8_t>(c) == u; });
}

Bytes to_bytes(std::string_view text) {
    return Bytes(text.begin(), text.end());
}

std::string to_string(ByteSpan b) {
    return std::string(reinterpret_cast<const char*>(b.data()), b.size());
}

std::string hex(std::uint64_t value) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "0x%llX", static_cast<unsigned long long>(value));
    return buf;
}

std::string hex_dump(ByteSpan b, std::size_t max_bytes) {
    static const char* digits = "0123456789ABCDEF";
    const std::size_t n = std::min(b.size(), max_bytes);
    std::string out;
    out.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(digits[b[i] >> 4]);
        out.push_back(digits[b[i] & 0xF]);
    }
    return out;
}

Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open for reading: " + path.string());
    }
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw std::runtime_error("read failed: " + path.string());
    }
    return data;
}

void write_file(const std::filesystem::path& path, ByteSpan data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

}  // namespace dali
