#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dali/bytes.hpp"

namespace dali::tiff {

// Structural TIFF codec: parses and re-serializes the header, IFD chain,
// out-of-line values and strip data at byte-for-byte fidelity. Pixel
// interpretation and codecs other than Compression=1 are out of scope.

enum class ByteOrder : std::uint8_t { LittleEndian, BigEndian };

[[nodiscard]] constexpr bool is_big_endian(ByteOrder o) noexcept {
    return o == ByteOrder::BigEndian;
}

enum class TiffErrc {
    BadByteOrder,       // first two bytes are neither "II" nor "MM"
    BadMagic,           // magic number != 42
    OffsetOutOfBounds,  // a structural pointer lands outside [8, file length)
    CyclicIfdChain,     // next-IFD loop, or more than kMaxIfdChain IFDs
    TruncatedEntry,     // a structure extends past the end of the file
    OffsetOverflow,     // a value no longer fits its fixed-width field
    IfdIndexOutOfRange,
    FileTooLarge,       // beyond the 2^32 - 1 limit imposed by 32-bit offsets
    StripCountMismatch, // StripOffsets and StripByteCounts disagree on count
};

[[nodiscard]] std::string_view errc_name(TiffErrc code);

class TiffError : public std::runtime_error {
public:
    TiffError(TiffErrc code, const std::string& message, std::uint64_t offset = 0);

    [[nodiscard]] TiffErrc code() const noexcept { return code_; }
    [[nodiscard]] std::uint64_t offset() const noexcept { return offset_; }

private:
    TiffErrc code_;
    std::uint64_t offset_;
};

enum class FieldType : std::uint16_t {
    Byte = 1,
    Ascii = 2,
    Short = 3,
    Long = 4,
    Rational = 5,
    SByte = 6,
    Undefined = 7,
    SShort = 8,
    SLong = 9,
    SRational = 10,
    Float = 11,
    Double = 12,
};

/// Per-element size of a field type code; 0 for codes outside 1..12.
[[nodiscard]] std::size_t field_type_size(std::uint16_t code) noexcept;
[[nodiscard]] std::string_view field_type_name(std::uint16_t code);

namespace tags {
inline constexpr std::uint16_t NewSubfileType = 0x00FE;
inline constexpr std::uint16_t ImageWidth = 0x0100;
inline constexpr std::uint16_t ImageLength = 0x0101;
inline constexpr std::uint16_t BitsPerSample = 0x0102;
inline constexpr std::uint16_t Compression = 0x0103;
inline constexpr std::uint16_t PhotometricInterpretation = 0x0106;
inline constexpr std::uint16_t StripOffsets = 0x0111;
inline constexpr std::uint16_t SamplesPerPixel = 0x0115;
inline constexpr std::uint16_t RowsPerStrip = 0x0116;
inline constexpr std::uint16_t StripByteCounts = 0x0117;
inline constexpr std::uint16_t XResolution = 0x011A;
inline constexpr std::uint16_t YResolution = 0x011B;
inline constexpr std::uint16_t ResolutionUnit = 0x0128;
inline constexpr std::uint16_t Software = 0x0131;
inline constexpr std::uint16_t DateTime = 0x0132;
inline constexpr std::uint16_t TileOffsets = 0x0144;
inline constexpr std::uint16_t TileByteCounts = 0x0145;
}  // namespace tags

/// Human-readable name for the tags this toolkit knows about, else "".
[[nodiscard]] std::string_view tag_name(std::uint16_t tag);

inline constexpr std::size_t kMaxIfdChain = 1024;
inline constexpr std::uint64_t kMaxFileSize = 0xFFFFFFFFull;

struct TiffHeader {
    ByteOrder byte_order = ByteOrder::LittleEndian;
    std::uint16_t magic = 42;
    std::uint32_t first_ifd_offset = 8;
};

/// One 12-byte directory entry. `data` holds the element bytes in the
/// document's byte order; `cell` is the raw value/offset cell as stored,
/// kept so inline padding bytes survive a round-trip. For out-of-line
/// entries `value_offset` is authoritative and the cell is re-encoded from
/// it on write.
struct IfdEntry {
    std::uint16_t tag = 0;
    std::uint16_t type = 0;
    std::uint32_t count = 0;
    std::array<std::uint8_t, 4> cell{};
    Bytes data;
    std::uint32_t value_offset = 0;
    std::uint64_t entry_pos = 0;  // position of this entry in the source file

    [[nodiscard]] std::uint64_t payload_size() const noexcept;
    [[nodiscard]] bool out_of_line() const noexcept { return payload_size() > 4; }
};

struct Ifd {
    std::uint64_t offset = 0;  // position of the entry-count word
    std::vector<IfdEntry> entries;
    std::uint32_t next_ifd_offset = 0;

    [[nodiscard]] std::uint64_t table_size() const noexcept {
        return 2 + 12ull * entries.size() + 4;
    }
};

/// Image data band addressed by StripOffsets/StripByteCounts (or the tile
/// analogues). `source_tag` is tags::StripOffsets or tags::TileOffsets.
struct Strip {
    std::size_t ifd_index = 0;
    std::uint16_t source_tag = 0;
    std::uint32_t offset = 0;
    std::uint32_t length = 0;
    Bytes data;
};

/// Byte run unreachable from any structural pointer. The hiding place for
/// foreign content; preserved verbatim by layout-preserving writes and
/// dropped by canonical ones.
struct ForeignSpan {
    std::uint64_t offset = 0;
    Bytes bytes;

    [[nodiscard]] ByteRange range() const noexcept { return {offset, bytes.size()}; }
};

struct TiffDocument {
    TiffHeader header;
    std::vector<Ifd> ifds;
    std::vector<Strip> strips;
    std::vector<ForeignSpan> foreign_spans;
    std::uint64_t raw_length = 0;
};

/// Parse a complete TIFF byte sequence. Every structural pointer is bounds
/// checked against [8, length); unreferenced bytes end up in foreign_spans.
[[nodiscard]] TiffDocument parse_tiff(ByteSpan bytes);

enum class Layout {
    Preserve,   // re-emit every structure at its recorded offset
    Canonical,  // dense repack: header, IFDs + values, strips; drops foreign spans
};

struct WriteOptions {
    Layout layout = Layout::Preserve;
    // Emit entries in parsed order instead of ascending tag order. Needed for
    // byte-identical round-trips of inputs whose tags were not sorted.
    bool preserve_order = false;
};

[[nodiscard]] Bytes write_tiff(const TiffDocument& doc, const WriteOptions& options = {});

/// Entry lookup by tag; throws IfdIndexOutOfRange, missing tag is not an error.
[[nodiscard]] std::optional<IfdEntry> get_entry(const TiffDocument& doc, std::size_t ifd_index,
                                                std::uint16_t tag);

enum class FixtureVariant { Bilevel, Grayscale, Rgb };

struct FixtureOptions {
    std::optional<std::string> software;
    std::optional<std::string> datetime;
    std::optional<std::uint32_t> rows_per_strip;  // default: one strip for the whole image
    ByteOrder byte_order = ByteOrder::LittleEndian;
};

/// Deterministic minimal uncompressed TIFF with the mandatory tag set for
/// the variant. Output is canonical: parses with zero foreign spans.
[[nodiscard]] Bytes make_fixture_tiff(std::uint32_t width, std::uint32_t height,
                                      FixtureVariant variant, const FixtureOptions& options = {});

/// Copy with all element data re-encoded for `order`. Offsets are numeric
/// and unaffected.
[[nodiscard]] TiffDocument with_byte_order(const TiffDocument& doc, ByteOrder order);

/// Structural equality: byte order, tag/type/count/value of every entry,
/// strip payloads and foreign bytes — ignoring where anything is placed.
/// Offset-valued entries (StripOffsets/TileOffsets) are compared by shape
/// only; their meaning is carried by the strip payload comparison.
[[nodiscard]] bool structurally_equal(const TiffDocument& a, const TiffDocument& b);

/// Like structurally_equal but ignores foreign spans. This is the "same
/// image" relation used by the sanitizer and splice validators.
[[nodiscard]] bool content_equal(const TiffDocument& a, const TiffDocument& b);

/// Decode integer elements (Byte/Short/Long) of an entry. Returns nullopt
/// for non-integer field types.
[[nodiscard]] std::optional<std::vector<std::uint64_t>> entry_uints(const IfdEntry& entry,
                                                                    ByteOrder order);

/// Re-encode integer elements in place; count and type are unchanged.
/// Throws OffsetOverflow when a value does not fit the element width.
void set_entry_uints(IfdEntry& entry, const std::vector<std::uint64_t>& values, ByteOrder order);

/// ASCII payload without the trailing NUL (if present).
[[nodiscard]] std::string entry_ascii(const IfdEntry& entry);

/// Convenience constructor keeping data/count/cell consistent.
[[nodiscard]] IfdEntry make_entry(std::uint16_t tag, FieldType type, std::uint32_t count,
                                  Bytes data);

}  // namespace dali::tiff
