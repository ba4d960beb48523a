#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "dali/bytes.hpp"
#include "dali/tiff_codec.hpp"

namespace testsupport {

// Hand-rolled binary writer, independent of the codec under test. Tests use
// it to assemble raw TIFF structures as an oracle for the parser.
struct RawWriter {
    dali::Bytes b;
    bool big = false;

    void u8(std::uint8_t v) { b.push_back(v); }
    void u16(std::uint16_t v) {
        if (big) {
            b.push_back(static_cast<std::uint8_t>(v >> 8));
            b.push_back(static_cast<std::uint8_t>(v));
        } else {
            b.push_back(static_cast<std::uint8_t>(v));
            b.push_back(static_cast<std::uint8_t>(v >> 8));
        }
    }
    void u32(std::uint32_t v) {
        if (big) {
            u16(static_cast<std::uint16_t>(v >> 16));
            u16(static_cast<std::uint16_t>(v));
        } else {
            u16(static_cast<std::uint16_t>(v));
            u16(static_cast<std::uint16_t>(v >> 16));
        }
    }
    void raw(std::string_view s) { b.insert(b.end(), s.begin(), s.end()); }
    void fill(std::size_t n, std::uint8_t v) { b.insert(b.end(), n, v); }
    [[nodiscard]] std::size_t pos() const { return b.size(); }
};

// Minimal valid single-entry TIFF: header, then one IFD at `ifd_offset`
// (gap filled with `gap_byte`), ImageWidth=8 inline, next-IFD = 0.
inline dali::Bytes minimal_raw_tiff(bool big = false, std::uint32_t ifd_offset = 8,
                                    std::uint8_t gap_byte = 0xEE) {
    RawWriter w;
    w.big = big;
    w.raw(big ? "MM" : "II");
    w.u16(42);
    w.u32(ifd_offset);
    if (ifd_offset > w.pos()) {
        w.fill(ifd_offset - w.pos(), gap_byte);
    }
    w.u16(1);
    w.u16(0x0100);  // ImageWidth
    w.u16(3);       // SHORT
    w.u32(1);
    w.u16(8);
    w.u16(0);  // inline padding
    w.u32(0);  // next IFD
    return w.b;
}

inline dali::Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
    dali::Bytes out(n);
    for (auto& v : out) {
        v = static_cast<std::uint8_t>(rng());
    }
    return out;
}

// Junk that can never be mistaken for a PDF header or TIFF magic.
inline dali::Bytes junk_prefix(std::mt19937_64& rng, std::size_t n) {
    dali::Bytes out(n);
    for (auto& v : out) {
        v = static_cast<std::uint8_t>('A' + rng() % 23);
    }
    return out;
}

/// Random structurally valid document (never includes strip machinery
/// unless `with_strips`; those tags come as a consistent pair).
inline dali::tiff::TiffDocument random_document(std::mt19937_64& rng, bool with_strips = true) {
    using namespace dali::tiff;
    static constexpr std::uint16_t tag_pool[] = {
        0x00FE, 0x0100, 0x0101, 0x0102, 0x0103, 0x0106, 0x0115, 0x0116,
        0x011A, 0x011B, 0x0128, 0x0131, 0x0132, 0x013B, 0x8298, 0x9000,
    };
    TiffDocument doc;
    doc.header.byte_order = (rng() % 2 == 0) ? ByteOrder::LittleEndian : ByteOrder::BigEndian;

    const std::size_t ifd_count = 1 + rng() % 3;
    for (std::size_t i = 0; i < ifd_count; ++i) {
        Ifd ifd;
        std::vector<std::uint16_t> tags(std::begin(tag_pool), std::end(tag_pool));
        std::shuffle(tags.begin(), tags.end(), rng);
        const std::size_t entry_count = 1 + rng() % 10;
        for (std::size_t k = 0; k < entry_count; ++k) {
            const auto type = static_cast<FieldType>(1 + rng() % 12);
            const std::uint32_t count = static_cast<std::uint32_t>(rng() % 24);
            const std::size_t total =
                field_type_size(static_cast<std::uint16_t>(type)) * count;
            ifd.entries.push_back(make_entry(tags[k], type, count, random_bytes(rng, total)));
        }
        if (with_strips && rng() % 2 == 0) {
            const std::uint32_t strips = 1 + rng() % 3;
            dali::Bytes offsets(strips * 4, 0);
            dali::Bytes counts(strips * 4, 0);
            std::vector<std::uint64_t> lengths;
            for (std::uint32_t s = 0; s < strips; ++s) {
                lengths.push_back(1 + rng() % 64);
            }
            auto offsets_entry = make_entry(tags::StripOffsets, FieldType::Long, strips, offsets);
            auto counts_entry =
                make_entry(tags::StripByteCounts, FieldType::Long, strips, counts);
            dali::tiff::set_entry_uints(counts_entry, lengths, doc.header.byte_order);
            ifd.entries.push_back(offsets_entry);
            ifd.entries.push_back(counts_entry);
            for (std::uint32_t s = 0; s < strips; ++s) {
                Strip strip;
                strip.ifd_index = i;
                strip.source_tag = tags::StripOffsets;
                strip.length = static_cast<std::uint32_t>(lengths[s]);
                strip.data = random_bytes(rng, strip.length);
                doc.strips.push_back(std::move(strip));
            }
        }
        doc.ifds.push_back(std::move(ifd));
    }
    return doc;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("dali_test_" + tag + "_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace testsupport
