#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dali {

using Bytes = std::vector<std::uint8_t>;
using ByteSpan = std::span<const std::uint8_t>;

/// Half-open byte range [offset, offset + length) within some file.
struct ByteRange {
    std::uint64_t offset = 0;
    std::uint64_t length = 0;

    [[nodiscard]] std::uint64_t end() const noexcept { return offset + length; }
    [[nodiscard]] bool contains(std::uint64_t pos) const noexcept {
        return pos >= offset && pos < end();
    }
    friend bool operator==(const ByteRange&, const ByteRange&) = default;
};

// Fixed-width scalar encode/decode. `big_endian` selects the byte order of
// the *encoded* form; in-memory values are plain integers.

[[nodiscard]] std::uint16_t load_u16(ByteSpan b, std::size_t pos, bool big_endian);
[[nodiscard]] std::uint32_t load_u32(ByteSpan b, std::size_t pos, bool big_endian);
void store_u16(Bytes& b, std::size_t pos, std::uint16_t value, bool big_endian);
void store_u32(Bytes& b, std::size_t pos, std::uint32_t value, bool big_endian);

/// First occurrence of `needle` in `haystack` at or after `from`.
[[nodiscard]] std::optional<std::size_t> find_bytes(ByteSpan haystack, std::string_view needle,
                                                    std::size_t from = 0);
/// Last occurrence of `needle` strictly before `before`.
[[nodiscard]] std::optional<std::size_t> rfind_bytes(ByteSpan haystack, std::string_view needle,
                                                     std::size_t before);

[[nodiscard]] bool starts_with(ByteSpan b, std::size_t pos, std::string_view text);

[[nodiscard]] Bytes to_bytes(std::string_view text);
[[nodiscard]] std::string to_string(ByteSpan b);

/// "0x1781"-style rendering used by reports and the inspect command.
[[nodiscard]] std::string hex(std::uint64_t value);
/// Uppercase hex dump of at most `max_bytes` bytes, no separators.
[[nodiscard]] std::string hex_dump(ByteSpan b, std::size_t max_bytes = SIZE_MAX);

[[nodiscard]] Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, ByteSpan data);

}  // namespace dali
