#include "dali/tiff_codec.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace dali::tiff {

namespace {

constexpr std::size_t kHeaderSize = 8;

// -----------------------------------------------------------------------
// Coverage map: which bytes of the input are reachable from the structure.
// -----------------------------------------------------------------------

class Coverage {
public:
    void add(std::uint64_t offset, std::uint64_t length) {
        if (length > 0) {
            runs_.emplace_back(offset, offset + length);
        }
    }

    // Complement of the covered set within [0, total), as (offset, length).
    [[nodiscard]] std::vector<ByteRange> gaps(std::uint64_t total) {
        std::sort(runs_.begin(), runs_.end());
        std::vector<ByteRange> out;
        std::uint64_t cursor = 0;
        for (const auto& [lo, hi] : runs_) {
            if (lo > cursor) {
                out.push_back({cursor, lo - cursor});
            }
            cursor = std::max(cursor, hi);
        }
        if (cursor < total) {
            out.push_back({cursor, total - cursor});
        }
        return out;
    }

private:
    std::vector<std::pair<std::uint64_t, std::uint64_t>> runs_;
};

std::uint16_t read_u16(ByteSpan b, std::uint64_t pos, bool big) {
    if (pos + 2 > b.size()) {
        throw TiffError(TiffErrc::TruncatedEntry, "16-bit read past end of file", pos);
    }
    return load_u16(b, static_cast<std::size_t>(pos), big);
}

std::uint32_t read_u32(ByteSpan b, std::uint64_t pos, bool big) {
    if (pos + 4 > b.size()) {
        throw TiffError(TiffErrc::TruncatedEntry, "32-bit read past end of file", pos);
    }
    return load_u32(b, static_cast<std::size_t>(pos), big);
}

std::uint32_t cell_u32(const std::array<std::uint8_t, 4>& cell, bool big) {
    return load_u32(ByteSpan(cell.data(), 4), 0, big);
}

void encode_cell_u32(std::array<std::uint8_t, 4>& cell, std::uint32_t value, bool big) {
    Bytes tmp(4, 0);
    store_u32(tmp, 0, value, big);
    std::copy(tmp.begin(), tmp.end(), cell.begin());
}

void check_pointer(std::uint64_t target, std::uint64_t file_len, std::uint64_t where,
                   const char* what) {
    if (target < kHeaderSize || target >= file_len) {
        throw TiffError(TiffErrc::OffsetOutOfBounds,
                        std::string(what) + " points outside [8, file length)", where);
    }
}

// Byte length of all strips declared by (offsets_tag, counts_tag) on one IFD,
// materialized into doc.strips. Zero-length strips are kept so entry counts
// and strip counts always match.
void reconstruct_strips(TiffDocument& doc, ByteSpan bytes, std::size_t ifd_index,
                        std::uint16_t offsets_tag, std::uint16_t counts_tag, Coverage& cov) {
    const Ifd& ifd = doc.ifds[ifd_index];
    const IfdEntry* offsets_entry = nullptr;
    const IfdEntry* counts_entry = nullptr;
    for (const auto& e : ifd.entries) {
        if (e.tag == offsets_tag) offsets_entry = &e;
        if (e.tag == counts_tag) counts_entry = &e;
    }
    if (offsets_entry == nullptr || counts_entry == nullptr) {
        return;  // image data (if any) stays unreachable
    }
    auto offsets = entry_uints(*offsets_entry, doc.header.byte_order);
    auto counts = entry_uints(*counts_entry, doc.header.byte_order);
    if (!offsets || !counts) {
        return;  // non-integer field types; leave data unreachable
    }
    if (offsets->size() != counts->size()) {
        throw TiffError(TiffErrc::StripCountMismatch,
                        "StripOffsets and StripByteCounts declare different counts",
                        offsets_entry->entry_pos);
    }
    for (std::size_t j = 0; j < offsets->size(); ++j) {
        const std::uint64_t off = (*offsets)[j];
        const std::uint64_t len = (*counts)[j];
        Strip strip;
        strip.ifd_index = ifd_index;
        strip.source_tag = offsets_tag;
        strip.offset = static_cast<std::uint32_t>(off);
        strip.length = static_cast<std::uint32_t>(len);
        if (len > 0) {
            check_pointer(off, bytes.size(), offsets_entry->entry_pos, "strip offset");
            if (off + len > bytes.size()) {
                throw TiffError(TiffErrc::TruncatedEntry, "strip data extends past end of file",
                                off);
            }
            strip.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(off),
                              bytes.begin() + static_cast<std::ptrdiff_t>(off + len));
            cov.add(off, len);
        }
        doc.strips.push_back(std::move(strip));
    }
}

std::vector<IfdEntry> ordered_entries(const Ifd& ifd, bool preserve_order) {
    std::vector<IfdEntry> entries = ifd.entries;
    if (!preserve_order) {
        std::stable_sort(entries.begin(), entries.end(),
                         [](const IfdEntry& a, const IfdEntry& b) { return a.tag < b.tag; });
    }
    return entries;
}

void write_entry_slot(Bytes& out, std::size_t pos, const IfdEntry& e, bool big,
                      bool zero_padding) {
    store_u16(out, pos, e.tag, big);
    store_u16(out, pos + 2, e.type, big);
    store_u32(out, pos + 4, e.count, big);
    if (e.out_of_line()) {
        store_u32(out, pos + 8, e.value_offset, big);
    } else {
        // Inline: value bytes left-justified, then the preserved (or zeroed)
        // padding from the original cell.
        for (std::size_t k = 0; k < 4; ++k) {
            out[pos + 8 + k] = k < e.data.size() ? e.data[k] : (zero_padding ? 0 : e.cell[k]);
        }
    }
}

Bytes write_preserve(const TiffDocument& doc, bool preserve_order) {
    const bool big = is_big_endian(doc.header.byte_order);
    std::uint64_t extent = std::max<std::uint64_t>(doc.raw_length, kHeaderSize);
    for (const auto& ifd : doc.ifds) {
        extent = std::max(extent, ifd.offset + ifd.table_size());
        for (const auto& e : ifd.entries) {
            if (e.out_of_line()) {
                extent = std::max(extent, e.value_offset + e.payload_size());
            }
        }
    }
    for (const auto& s : doc.strips) {
        extent = std::max<std::uint64_t>(extent, std::uint64_t(s.offset) + s.length);
    }
    for (const auto& f : doc.foreign_spans) {
        extent = std::max(extent, f.offset + f.bytes.size());
    }
    if (extent > kMaxFileSize) {
        throw TiffError(TiffErrc::OffsetOverflow, "document extent exceeds 32-bit offset range");
    }

    Bytes out(static_cast<std::size_t>(extent), 0);
    out[0] = big ? 'M' : 'I';
    out[1] = out[0];
    store_u16(out, 2, doc.header.magic, big);
    store_u32(out, 4, doc.header.first_ifd_offset, big);

    for (const auto& f : doc.foreign_spans) {
        std::copy(f.bytes.begin(), f.bytes.end(),
                  out.begin() + static_cast<std::ptrdiff_t>(f.offset));
    }
    for (const auto& ifd : doc.ifds) {
        const auto entries = ordered_entries(ifd, preserve_order);
        const auto pos = static_cast<std::size_t>(ifd.offset);
        store_u16(out, pos, static_cast<std::uint16_t>(entries.size()), big);
        for (std::size_t i = 0; i < entries.size(); ++i) {
            write_entry_slot(out, pos + 2 + 12 * i, entries[i], big, /*zero_padding=*/false);
            if (entries[i].out_of_line()) {
                std::copy(entries[i].data.begin(), entries[i].data.end(),
                          out.begin() + entries[i].value_offset);
            }
        }
        store_u32(out, pos + 2 + 12 * entries.size(), ifd.next_ifd_offset, big);
    }
    for (const auto& s : doc.strips) {
        std::copy(s.data.begin(), s.data.end(), out.begin() + s.offset);
    }
    return out;
}

Bytes write_canonical(const TiffDocument& doc) {
    if (doc.ifds.empty()) {
        throw std::invalid_argument("cannot serialize a TIFF document with no IFDs");
    }
    const bool big = is_big_endian(doc.header.byte_order);

    // Pass 1: place IFD tables with their value blobs, then all strips.
    struct PlacedIfd {
        std::uint64_t table_pos = 0;
        std::vector<IfdEntry> entries;                // sorted
        std::vector<std::uint64_t> blob_pos;          // per entry; 0 if inline
    };
    std::vector<PlacedIfd> placed(doc.ifds.size());
    std::uint64_t cursor = kHeaderSize;
    for (std::size_t i = 0; i < doc.ifds.size(); ++i) {
        if (doc.ifds[i].entries.size() > 0xFFFF) {
            throw std::invalid_argument("IFD has more than 65535 entries");
        }
        placed[i].table_pos = cursor;
        placed[i].entries = ordered_entries(doc.ifds[i], /*preserve_order=*/false);
        cursor += doc.ifds[i].table_size();
        placed[i].blob_pos.resize(placed[i].entries.size(), 0);
        for (std::size_t k = 0; k < placed[i].entries.size(); ++k) {
            if (placed[i].entries[k].out_of_line()) {
                placed[i].blob_pos[k] = cursor;
                cursor += placed[i].entries[k].payload_size();
            }
        }
    }
    std::vector<std::uint64_t> strip_pos(doc.strips.size(), 0);
    for (std::size_t s = 0; s < doc.strips.size(); ++s) {
        strip_pos[s] = cursor;
        cursor += doc.strips[s].length;
    }
    if (cursor > kMaxFileSize) {
        throw TiffError(TiffErrc::OffsetOverflow, "canonical layout exceeds 32-bit offset range");
    }

    // Pass 2: rewrite offset-valued fields against the new layout.
    for (std::size_t i = 0; i < placed.size(); ++i) {
        for (std::size_t k = 0; k < placed[i].entries.size(); ++k) {
            IfdEntry& e = placed[i].entries[k];
            if (e.tag == tags::StripOffsets || e.tag == tags::TileOffsets) {
                std::vector<std::uint64_t> fresh;
                for (std::size_t s = 0; s < doc.strips.size(); ++s) {
                    if (doc.strips[s].ifd_index == i && doc.strips[s].source_tag == e.tag) {
                        fresh.push_back(strip_pos[s]);
                    }
                }
                if (fresh.size() == e.count) {
                    set_entry_uints(e, fresh, doc.header.byte_order);
                }
            }
            if (e.out_of_line()) {
                e.value_offset = static_cast<std::uint32_t>(placed[i].blob_pos[k]);
            }
        }
    }

    Bytes out(static_cast<std::size_t>(cursor), 0);
    out[0] = big ? 'M' : 'I';
    out[1] = out[0];
    store_u16(out, 2, doc.header.magic, big);
    store_u32(out, 4, static_cast<std::uint32_t>(placed[0].table_pos), big);
    for (std::size_t i = 0; i < placed.size(); ++i) {
        const auto pos = static_cast<std::size_t>(placed[i].table_pos);
        store_u16(out, pos, static_cast<std::uint16_t>(placed[i].entries.size()), big);
        for (std::size_t k = 0; k < placed[i].entries.size(); ++k) {
            write_entry_slot(out, pos + 2 + 12 * k, placed[i].entries[k], big,
                             /*zero_padding=*/true);
            if (placed[i].entries[k].out_of_line()) {
                std::copy(placed[i].entries[k].data.begin(), placed[i].entries[k].data.end(),
                          out.begin() + static_cast<std::ptrdiff_t>(placed[i].blob_pos[k]));
            }
        }
        const std::uint32_t next =
            i + 1 < placed.size() ? static_cast<std::uint32_t>(placed[i + 1].table_pos) : 0;
        store_u32(out, pos + 2 + 12 * placed[i].entries.size(), next, big);
    }
    for (std::size_t s = 0; s < doc.strips.size(); ++s) {
        std::copy(doc.strips[s].data.begin(), doc.strips[s].data.end(),
                  out.begin() + static_cast<std::ptrdiff_t>(strip_pos[s]));
    }
    return out;
}

// Entries whose data carries file offsets rather than image parameters.
bool is_offset_valued(std::uint16_t tag) {
    return tag == tags::StripOffsets || tag == tags::TileOffsets;
}

bool entries_equivalent(const IfdEntry& a, const IfdEntry& b) {
    if (a.tag != b.tag || a.type != b.type || a.count != b.count) {
        return false;
    }
    if (is_offset_valued(a.tag)) {
        return true;  // meaning compared via strip payloads
    }
    return a.data == b.data;
}

bool ifds_equivalent(const Ifd& a, const Ifd& b) {
    if (a.entries.size() != b.entries.size()) {
        return false;
    }
    auto ea = a.entries;
    auto eb = b.entries;
    auto by_tag = [](const IfdEntry& x, const IfdEntry& y) { return x.tag < y.tag; };
    std::stable_sort(ea.begin(), ea.end(), by_tag);
    std::stable_sort(eb.begin(), eb.end(), by_tag);
    for (std::size_t i = 0; i < ea.size(); ++i) {
        if (!entries_equivalent(ea[i], eb[i])) {
            return false;
        }
    }
    return true;
}

}  // namespace

std::string_view errc_name(TiffErrc code) {
    switch (code) {
        case TiffErrc::BadByteOrder: return "BadByteOrder";
        case TiffErrc::BadMagic: return "BadMagic";
        case TiffErrc::OffsetOutOfBounds: return "OffsetOutOfBounds";
        case TiffErrc::CyclicIfdChain: return "CyclicIfdChain";
        case TiffErrc::TruncatedEntry: return "TruncatedEntry";
        case TiffErrc::OffsetOverflow: return "OffsetOverflow";
        case TiffErrc::IfdIndexOutOfRange: return "IfdIndexOutOfRange";
        case TiffErrc::FileTooLarge: return "FileTooLarge";
        case TiffErrc::StripCountMismatch: return "StripCountMismatch";
    }
    return "UnknownError";
}

TiffError::TiffError(TiffErrc code, const std::string& message, std::uint64_t offset)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message),
      code_(code),
      offset_(offset) {}

std::size_t field_type_size(std::uint16_t code) noexcept {
    switch (static_cast<FieldType>(code)) {
        case FieldType::Byte:
        case FieldType::Ascii:
        case FieldType::SByte:
        case FieldType::Undefined: return 1;
        case FieldType::Short:
        case FieldType::SShort: return 2;
        case FieldType::Long:
        case FieldType::SLong:
        case FieldType::Float: return 4;
        case FieldType::Rational:
        case FieldType::SRational:
        case FieldType::Double: return 8;
    }
    return 0;
}

std::string_view field_type_name(std::uint16_t code) {
    switch (static_cast<FieldType>(code)) {
        case FieldType::Byte: return "BYTE";
        case FieldType::Ascii: return "ASCII";
        case FieldType::Short: return "SHORT";
        case FieldType::Long: return "LONG";
        case FieldType::Rational: return "RATIONAL";
        case FieldType::SByte: return "SBYTE";
        case FieldType::Undefined: return "UNDEFINED";
        case FieldType::SShort: return "SSHORT";
        case FieldType::SLong: return "SLONG";
        case FieldType::SRational: return "SRATIONAL";
        case FieldType::Float: return "FLOAT";
        case FieldType::Double: return "DOUBLE";
    }
    return "UNKNOWN";
}

std::string_view tag_name(std::uint16_t tag) {
    switch (tag) {
        case tags::NewSubfileType: return "NewSubfileType";
        case tags::ImageWidth: return "ImageWidth";
        case tags::ImageLength: return "ImageLength";
        case tags::BitsPerSample: return "BitsPerSample";
        case tags::Compression: return "Compression";
        case tags::PhotometricInterpretation: return "PhotometricInterpretation";
        case tags::StripOffsets: return "StripOffsets";
        case tags::SamplesPerPixel: return "SamplesPerPixel";
        case tags::RowsPerStrip: return "RowsPerStrip";
        case tags::StripByteCounts: return "StripByteCounts";
        case tags::XResolution: return "XResolution";
        case tags::YResolution: return "YResolution";
        case tags::ResolutionUnit: return "ResolutionUnit";
        case tags::Software: return "Software";
        case tags::DateTime: return "DateTime";
        case tags::TileOffsets: return "TileOffsets";
        case tags::TileByteCounts: return "TileByteCounts";
        default: return "";
    }
}

std::uint64_t IfdEntry::payload_size() const noexcept {
    const std::size_t elem = field_type_size(type);
    if (elem == 0) {
        return 4;  // unknown type: opaque inline cell
    }
    return std::uint64_t(elem) * count;
}

TiffDocument parse_tiff(ByteSpan bytes) {
    if (bytes.size() > kMaxFileSize) {
        throw TiffError(TiffErrc::FileTooLarge, "input exceeds 2^32 - 1 bytes");
    }
    if (bytes.size() < kHeaderSize) {
        throw TiffError(TiffErrc::TruncatedEntry, "shorter than the 8-byte header");
    }

    TiffDocument doc;
    doc.raw_length = bytes.size();
    if (bytes[0] == 'I' && bytes[1] == 'I') {
        doc.header.byte_order = ByteOrder::LittleEndian;
    } else if (bytes[0] == 'M' && bytes[1] == 'M') {
        doc.header.byte_order = ByteOrder::BigEndian;
    } else {
        throw TiffError(TiffErrc::BadByteOrder, "first two bytes are neither \"II\" nor \"MM\"");
    }
    const bool big = is_big_endian(doc.header.byte_order);
    doc.header.magic = read_u16(bytes, 2, big);
    if (doc.header.magic != 42) {
        throw TiffError(TiffErrc::BadMagic, "magic number is not 42", 2);
    }
    doc.header.first_ifd_offset = read_u32(bytes, 4, big);
    if (doc.header.first_ifd_offset < kHeaderSize ||
        std::uint64_t(doc.header.first_ifd_offset) + 2 > bytes.size()) {
        throw TiffError(TiffErrc::OffsetOutOfBounds, "first-IFD offset outside the file", 4);
    }

    Coverage cov;
    cov.add(0, kHeaderSize);

    std::set<std::uint64_t> visited;
    std::uint64_t pos = doc.header.first_ifd_offset;
    while (pos != 0) {
        if (visited.contains(pos) || visited.size() >= kMaxIfdChain) {
            throw TiffError(TiffErrc::CyclicIfdChain, "next-IFD chain loops or exceeds cap", pos);
        }
        visited.insert(pos);
        check_pointer(pos, bytes.size(), pos, "IFD offset");

        Ifd ifd;
        ifd.offset = pos;
        const std::uint16_t n = read_u16(bytes, pos, big);
        const std::uint64_t table_end = pos + 2 + 12ull * n + 4;
        if (table_end > bytes.size()) {
            throw TiffError(TiffErrc::TruncatedEntry, "IFD table extends past end of file", pos);
        }
        for (std::uint16_t i = 0; i < n; ++i) {
            const std::uint64_t ep = pos + 2 + 12ull * i;
            IfdEntry e;
            e.tag = read_u16(bytes, ep, big);
            e.type = read_u16(bytes, ep + 2, big);
            e.count = read_u32(bytes, ep + 4, big);
            std::copy(bytes.begin() + static_cast<std::ptrdiff_t>(ep + 8),
                      bytes.begin() + static_cast<std::ptrdiff_t>(ep + 12), e.cell.begin());
            e.entry_pos = ep;
            const std::uint64_t total = e.payload_size();
            if (total <= 4) {
                e.data.assign(e.cell.begin(), e.cell.begin() + static_cast<std::ptrdiff_t>(total));
            } else {
                e.value_offset = cell_u32(e.cell, big);
                check_pointer(e.value_offset, bytes.size(), ep + 8, "value offset");
                if (e.value_offset + total > bytes.size()) {
                    throw TiffError(TiffErrc::TruncatedEntry,
                                    "out-of-line value extends past end of file", e.value_offset);
                }
                e.data.assign(bytes.begin() + e.value_offset,
                              bytes.begin() + static_cast<std::ptrdiff_t>(e.value_offset + total));
                cov.add(e.value_offset, total);
            }
            ifd.entries.push_back(std::move(e));
        }
        ifd.next_ifd_offset = read_u32(bytes, pos + 2 + 12ull * n, big);
        if (ifd.next_ifd_offset != 0) {
            check_pointer(ifd.next_ifd_offset, bytes.size(), pos + 2 + 12ull * n,
                          "next-IFD offset");
        }
        cov.add(pos, ifd.table_size());
        doc.ifds.push_back(std::move(ifd));
        pos = doc.ifds.back().next_ifd_offset;
    }

    for (std::size_t i = 0; i < doc.ifds.size(); ++i) {
        reconstruct_strips(doc, bytes, i, tags::StripOffsets, tags::StripByteCounts, cov);
        reconstruct_strips(doc, bytes, i, tags::TileOffsets, tags::TileByteCounts, cov);
    }

    for (const auto& gap : cov.gaps(doc.raw_length)) {
        ForeignSpan span;
        span.offset = gap.offset;
        span.bytes.assign(bytes.begin() + static_cast<std::ptrdiff_t>(gap.offset),
                          bytes.begin() + static_cast<std::ptrdiff_t>(gap.end()));
        doc.foreign_spans.push_back(std::move(span));
    }
    return doc;
}

Bytes write_tiff(const TiffDocument& doc, const WriteOptions& options) {
    if (options.layout == Layout::Preserve) {
        return write_preserve(doc, options.preserve_order);
    }
    return write_canonical(doc);
}

std::optional<IfdEntry> get_entry(const TiffDocument& doc, std::size_t ifd_index,
                                  std::uint16_t tag) {
    if (ifd_index >= doc.ifds.size()) {
        throw TiffError(TiffErrc::IfdIndexOutOfRange, "IFD index " + std::to_string(ifd_index) +
                                                          " of " +
                                                          std::to_string(doc.ifds.size()));
    }
    for (const auto& e : doc.ifds[ifd_index].entries) {
        if (e.tag == tag) {
            return e;
        }
    }
    return std::nullopt;
}

std::optional<std::vector<std::uint64_t>> entry_uints(const IfdEntry& entry, ByteOrder order) {
    const auto type = static_cast<FieldType>(entry.type);
    if (type != FieldType::Byte && type != FieldType::Short && type != FieldType::Long) {
        return std::nullopt;
    }
    const std::size_t elem = field_type_size(entry.type);
    const bool big = is_big_endian(order);
    std::vector<std::uint64_t> values;
    values.reserve(entry.count);
    for (std::uint32_t i = 0; i < entry.count; ++i) {
        const std::size_t pos = i * elem;
        switch (elem) {
            case 1: values.push_back(entry.data[pos]); break;
            case 2: values.push_back(load_u16(entry.data, pos, big)); break;
            default: values.push_back(load_u32(entry.data, pos, big)); break;
        }
    }
    return values;
}

void set_entry_uints(IfdEntry& entry, const std::vector<std::uint64_t>& values, ByteOrder order) {
    const std::size_t elem = field_type_size(entry.type);
    if (elem == 0 || elem > 4) {
        throw std::invalid_argument("entry type does not hold unsigned integers");
    }
    if (values.size() != entry.count) {
        throw std::invalid_argument("value count does not match entry count");
    }
    const std::uint64_t max = elem == 1 ? 0xFF : elem == 2 ? 0xFFFF : 0xFFFFFFFFull;
    const bool big = is_big_endian(order);
    Bytes fresh(values.size() * elem, 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] > max) {
            throw TiffError(TiffErrc::OffsetOverflow,
                            "value " + hex(values[i]) + " does not fit a " +
                                std::to_string(elem) + "-byte field");
        }
        switch (elem) {
            case 1: fresh[i] = static_cast<std::uint8_t>(values[i]); break;
            case 2: store_u16(fresh, i * 2, static_cast<std::uint16_t>(values[i]), big); break;
            default: store_u32(fresh, i * 4, static_cast<std::uint32_t>(values[i]), big); break;
        }
    }
    entry.data = std::move(fresh);
}

std::string entry_ascii(const IfdEntry& entry) {
    std::string text(entry.data.begin(), entry.data.end());
    if (!text.empty() && text.back() == '\0') {
        text.pop_back();
    }
    return text;
}

IfdEntry make_entry(std::uint16_t tag, FieldType type, std::uint32_t count, Bytes data) {
    IfdEntry e;
    e.tag = tag;
    e.type = static_cast<std::uint16_t>(type);
    e.count = count;
    e.data = std::move(data);
    return e;
}

TiffDocument with_byte_order(const TiffDocument& doc, ByteOrder order) {
    TiffDocument out = doc;
    if (order == doc.header.byte_order) {
        return out;
    }
    out.header.byte_order = order;
    for (auto& ifd : out.ifds) {
        for (auto& e : ifd.entries) {
            std::size_t elem = field_type_size(e.type);
            if (elem <= 1) {
                continue;  // bytes/ASCII/unknown: no element swapping
            }
            // Rationals are pairs of 32-bit words.
            const auto ftype = static_cast<FieldType>(e.type);
            if (ftype == FieldType::Rational || ftype == FieldType::SRational) {
                elem = 4;
            }
            for (std::size_t pos = 0; pos + elem <= e.data.size(); pos += elem) {
                std::reverse(e.data.begin() + static_cast<std::ptrdiff_t>(pos),
                             e.data.begin() + static_cast<std::ptrdiff_t>(pos + elem));
            }
        }
    }
    return out;
}

bool content_equal(const TiffDocument& a, const TiffDocument& b) {
    if (a.header.byte_order != b.header.byte_order || a.header.magic != b.header.magic) {
        return false;
    }
    if (a.ifds.size() != b.ifds.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.ifds.size(); ++i) {
        if (!ifds_equivalent(a.ifds[i], b.ifds[i])) {
            return false;
        }
    }
    if (a.strips.size() != b.strips.size()) {
        return false;
    }
    for (std::size_t s = 0; s < a.strips.size(); ++s) {
        const Strip& sa = a.strips[s];
        const Strip& sb = b.strips[s];
        if (sa.ifd_index != sb.ifd_index || sa.source_tag != sb.source_tag ||
            sa.length != sb.length || sa.data != sb.data) {
            return false;
        }
    }
    return true;
}

bool structurally_equal(const TiffDocument& a, const TiffDocument& b) {
    if (!content_equal(a, b)) {
        return false;
    }
    if (a.foreign_spans.size() != b.foreign_spans.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.foreign_spans.size(); ++i) {
        if (a.foreign_spans[i].bytes != b.foreign_spans[i].bytes) {
            return false;
        }
    }
    return true;
}

Bytes make_fixture_tiff(std::uint32_t width, std::uint32_t height, FixtureVariant variant,
                        const FixtureOptions& options) {
    if (width < 1 || height < 1) {
        throw std::invalid_argument("fixture dimensions must be at least 1x1");
    }
    const ByteOrder order = options.byte_order;
    const std::uint32_t rps = std::max<std::uint32_t>(1, options.rows_per_strip.value_or(height));
    const std::uint32_t strip_count = (height + rps - 1) / rps;

    std::uint64_t row_bytes = 0;
    switch (variant) {
        case FixtureVariant::Bilevel: row_bytes = (width + 7) / 8; break;
        case FixtureVariant::Grayscale: row_bytes = width; break;
        case FixtureVariant::Rgb: row_bytes = std::uint64_t(width) * 3; break;
    }

    TiffDocument doc;
    doc.header.byte_order = order;

    std::vector<Strip> strips;
    std::vector<std::uint64_t> strip_lengths;
    for (std::uint32_t s = 0; s < strip_count; ++s) {
        const std::uint32_t first_row = s * rps;
        const std::uint32_t rows = std::min(rps, height - first_row);
        Strip strip;
        strip.ifd_index = 0;
        strip.source_tag = tags::StripOffsets;
        strip.length = static_cast<std::uint32_t>(row_bytes * rows);
        strip.data.resize(strip.length);
        std::size_t w = 0;
        for (std::uint32_t r = 0; r < rows; ++r) {
            const std::uint32_t y = first_row + r;
            for (std::uint64_t i = 0; i < row_bytes; ++i) {
                std::uint8_t value = 0;
                switch (variant) {
                    case FixtureVariant::Bilevel: value = (y % 2 == 0) ? 0xAA : 0x55; break;
                    case FixtureVariant::Grayscale:
                        value = static_cast<std::uint8_t>(i * 31 + y * 17);
                        break;
                    case FixtureVariant::Rgb: {
                        const std::uint64_t x = i / 3;
                        const std::uint64_t c = i % 3;
                        value = static_cast<std::uint8_t>(c == 0 ? x : c == 1 ? y : (x ^ y));
                        break;
                    }
                }
                strip.data[w++] = value;
            }
        }
        strip_lengths.push_back(strip.length);
        strips.push_back(std::move(strip));
    }

    const bool big = is_big_endian(order);
    auto shorts = [&](std::initializer_list<std::uint16_t> vs) {
        Bytes d(vs.size() * 2, 0);
        std::size_t i = 0;
        for (auto v : vs) {
            store_u16(d, 2 * i++, v, big);
        }
        return d;
    };
    auto longs = [&](const std::vector<std::uint32_t>& vs) {
        Bytes d(vs.size() * 4, 0);
        for (std::size_t i = 0; i < vs.size(); ++i) {
            store_u32(d, 4 * i, vs[i], big);
        }
        return d;
    };
    auto rational = [&](std::uint32_t num, std::uint32_t den) {
        return longs({num, den});
    };
    auto ascii = [](const std::string& text) {
        Bytes d(text.begin(), text.end());
        d.push_back('\0');
        return d;
    };

    Ifd ifd;
    auto add = [&](std::uint16_t tag, FieldType type, std::uint32_t count, Bytes data) {
        ifd.entries.push_back(make_entry(tag, type, count, std::move(data)));
    };

    add(tags::NewSubfileType, FieldType::Long, 1, longs({0}));
    add(tags::ImageWidth, FieldType::Long, 1, longs({width}));
    add(tags::ImageLength, FieldType::Long, 1, longs({height}));
    if (variant == FixtureVariant::Grayscale) {
        add(tags::BitsPerSample, FieldType::Short, 1, shorts({8}));
    } else if (variant == FixtureVariant::Rgb) {
        add(tags::BitsPerSample, FieldType::Short, 3, shorts({8, 8, 8}));
    }
    add(tags::Compression, FieldType::Short, 1, shorts({1}));
    add(tags::PhotometricInterpretation, FieldType::Short, 1,
        shorts({variant == FixtureVariant::Rgb ? std::uint16_t(2) : std::uint16_t(1)}));
    // Placeholder offsets; the canonical writer assigns the real layout.
    add(tags::StripOffsets, FieldType::Long, strip_count,
        longs(std::vector<std::uint32_t>(strip_count, 0)));
    if (variant == FixtureVariant::Rgb) {
        add(tags::SamplesPerPixel, FieldType::Short, 1, shorts({3}));
    }
    add(tags::RowsPerStrip, FieldType::Long, 1, longs({rps}));
    {
        std::vector<std::uint32_t> counts(strip_lengths.begin(), strip_lengths.end());
        add(tags::StripByteCounts, FieldType::Long, strip_count, longs(counts));
    }
    add(tags::XResolution, FieldType::Rational, 1, rational(300, 1));
    add(tags::YResolution, FieldType::Rational, 1, rational(300, 1));
    add(tags::ResolutionUnit, FieldType::Short, 1, shorts({2}));
    if (options.software) {
        const Bytes d = ascii(*options.software);
        add(tags::Software, FieldType::Ascii, static_cast<std::uint32_t>(d.size()), d);
    }
    if (options.datetime) {
        const Bytes d = ascii(*options.datetime);
        add(tags::DateTime, FieldType::Ascii, static_cast<std::uint32_t>(d.size()), d);
    }

    doc.ifds.push_back(std::move(ifd));
    doc.strips = std::move(strips);
    return write_tiff(doc, {.layout = Layout::Canonical});
}

}  // namespace dali::tiff
