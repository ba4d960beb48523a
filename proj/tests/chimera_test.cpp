#include <doctest.h>

#include <set>

#include "dali/chimera.hpp"
#include "support.hpp"

using namespace dali;
using namespace dali::chimera;

namespace {

// Byte-displacement oracle: every original TIFF byte at offset o >= 8 must
// reappear at o + shift, except bytes inside offset fields enumerated in
// the report; and every enumerated field must actually have changed.
void check_displacement(ByteSpan tiff_bytes, ByteSpan out, const ChimeraReport& report) {
    std::set<std::uint64_t> patched;
    for (const auto& rw : report.rewrites) {
        for (unsigned k = 0; k < rw.field_width; ++k) {
            patched.insert(rw.field_pos + k);
        }
    }
    std::size_t unexplained = 0;
    for (std::uint64_t o = 0; o < 8; ++o) {
        if (!patched.contains(o) && out[o] != tiff_bytes[o]) {
            ++unexplained;
        }
    }
    for (std::uint64_t o = 8; o < tiff_bytes.size(); ++o) {
        if (!patched.contains(o) && out[o + report.shift] != tiff_bytes[o]) {
            ++unexplained;
        }
    }
    CHECK(unexplained == 0);
    for (const auto& rw : report.rewrites) {
        CHECK(rw.new_offset == rw.old_offset + report.shift);
        const std::uint64_t out_pos =
            rw.field_pos < 8 ? rw.field_pos : rw.field_pos + report.shift;
        bool field_differs = false;
        for (unsigned k = 0; k < rw.field_width; ++k) {
            if (out[out_pos + k] != tiff_bytes[rw.field_pos + k]) {
                field_differs = true;
            }
        }
        CHECK(field_differs);
    }
}

Bytes fixture_tiff_multistrip() {
    tiff::FixtureOptions options;
    options.rows_per_strip = 3;
    options.software = "splice drill";
    return tiff::make_fixture_tiff(16, 10, tiff::FixtureVariant::Grayscale, options);
}

}  // namespace

TEST_CASE("rebase anchors: 0x8 + 6,009 bytes of PDF = 0x1781") {
    const Bytes tiff_bytes = tiff::make_fixture_tiff(8, 8, tiff::FixtureVariant::Bilevel);
    const tiff::TiffDocument doc = tiff::parse_tiff(tiff_bytes);
    REQUIRE(doc.header.first_ifd_offset == 8);

    auto [rebased, rewrites] = rebase_tiff(doc, 6009, 8);
    CHECK(rebased.header.first_ifd_offset == 0x1781);
    REQUIRE(!rewrites.empty());
    CHECK(rewrites[0].description == "first IFD offset");
    CHECK(rewrites[0].old_offset == 8);
    CHECK(rewrites[0].new_offset == 0x1781);
    CHECK(rewrites[0].field_pos == 4);
}

TEST_CASE("rebase with zero shift is the identity") {
    const tiff::TiffDocument doc = tiff::parse_tiff(fixture_tiff_multistrip());
    auto [rebased, rewrites] = rebase_tiff(doc, 0, 8);
    CHECK(rewrites.empty());
    CHECK(tiff::structurally_equal(doc, rebased));
    CHECK(rebased.header.first_ifd_offset == doc.header.first_ifd_offset);
}

TEST_CASE("rebase moves every strip by the shift") {
    const Bytes tiff_bytes = fixture_tiff_multistrip();
    const tiff::TiffDocument doc = tiff::parse_tiff(tiff_bytes);
    REQUIRE(doc.strips.size() == 4);  // 3+3+3+1 rows

    const std::uint64_t shift = 500;
    auto [rebased, rewrites] = rebase_tiff(doc, shift, 8);
    for (std::size_t s = 0; s < doc.strips.size(); ++s) {
        CHECK(rebased.strips[s].offset == doc.strips[s].offset + shift);
    }
    const auto entry = tiff::get_entry(rebased, 0, tiff::tags::StripOffsets);
    REQUIRE(entry.has_value());
    const auto values = tiff::entry_uints(*entry, doc.header.byte_order);
    for (std::size_t s = 0; s < values->size(); ++s) {
        CHECK((*values)[s] == doc.strips[s].offset + shift);
    }
}

TEST_CASE("build_chimera: paper-faithful splice") {
    const Bytes tiff_bytes = fixture_tiff_multistrip();
    const Bytes pdf_bytes = pdf::make_fixture_pdf("100,000 Euros", "chimera-forge");
    const auto [out, report] = build_chimera(tiff_bytes, pdf_bytes, SpliceMode::PaperFaithful);

    CHECK(report.shift == pdf_bytes.size());
    CHECK(report.pdf_span.offset == 8);
    CHECK(report.pdf_span.length == pdf_bytes.size());

    SUBCASE("embedded PDF is byte-identical and the TIFF is displaced verbatim") {
        CHECK(std::equal(pdf_bytes.begin(), pdf_bytes.end(), out.begin() + 8));
        check_displacement(tiff_bytes, out, report);
    }
    SUBCASE("output ends with a trailer copy") {
        const std::string tail = to_string(ByteSpan(out).last(6));
        CHECK(tail == "%%EOF\n");
        CHECK(starts_with(out, report.trailer_copy_span.offset, "trailer"));
    }
    SUBCASE("dual validity") {
        const DualValidity v = validate_chimera(out);
        CHECK(v.tiff_ok);
        CHECK(v.pdf_ok);
        CHECK(v.both);
        // The paper's variant leaves PDF offsets relative to the header.
        CHECK_FALSE(v.pdf_resolution.from_file_start);
        CHECK(v.pdf_resolution.from_header_offset);
    }
    SUBCASE("structural image equality with the original") {
        const tiff::TiffDocument original = tiff::parse_tiff(tiff_bytes);
        const tiff::TiffDocument spliced = tiff::parse_tiff(out);
        CHECK(tiff::content_equal(original, spliced));
    }
    SUBCASE("report renders as a rewrite table") {
        const std::string table = format_report(report);
        CHECK(table.find("first IFD offset") != std::string::npos);
        CHECK(table.find("0x8 -> ") != std::string::npos);
        CHECK(table.find("StripOffsets") != std::string::npos);
    }
}

TEST_CASE("build_chimera: strict mode resolves from byte 0") {
    const Bytes tiff_bytes = tiff::make_fixture_tiff(12, 12, tiff::FixtureVariant::Rgb);
    const Bytes pdf_bytes = pdf::make_fixture_pdf("strict splice", "chimera-forge");
    const auto [out, report] = build_chimera(tiff_bytes, pdf_bytes, SpliceMode::Strict);

    const DualValidity v = validate_chimera(out);
    CHECK(v.both);
    CHECK(v.pdf_resolution.from_file_start);

    const Bytes expected_embed =
        pdf::shift_pdf_offsets(pdf::scan_pdf(pdf_bytes), pdf_bytes, 8);
    CHECK(std::equal(expected_embed.begin(), expected_embed.end(), out.begin() + 8));
    check_displacement(tiff_bytes, out, report);
}

TEST_CASE("validate_chimera on single-format files") {
    SUBCASE("pristine TIFF: tiff_ok only") {
        const DualValidity v =
            validate_chimera(tiff::make_fixture_tiff(8, 8, tiff::FixtureVariant::Bilevel));
        CHECK(v.tiff_ok);
        CHECK_FALSE(v.pdf_ok);
        CHECK_FALSE(v.both);
        CHECK(v.pdf_error.find("NoHeader") != std::string::npos);
    }
    SUBCASE("pristine PDF: pdf_ok only") {
        const DualValidity v = validate_chimera(pdf::make_fixture_pdf("plain", "t"));
        CHECK(v.pdf_ok);
        CHECK_FALSE(v.tiff_ok);
        CHECK_FALSE(v.both);
        CHECK(v.tiff_error.find("BadByteOrder") != std::string::npos);
    }
}

TEST_CASE("build_chimera error paths") {
    const Bytes tiff_bytes = tiff::make_fixture_tiff(8, 8, tiff::FixtureVariant::Bilevel);
    const Bytes pdf_bytes = pdf::make_fixture_pdf("guard", "t");

    SUBCASE("splicing into an existing chimera is refused") {
        const auto first = build_chimera(tiff_bytes, pdf_bytes, SpliceMode::PaperFaithful);
        CHECK_THROWS_WITH_AS(
            (void)build_chimera(first.bytes, pdf_bytes, SpliceMode::PaperFaithful),
            doctest::Contains("AlreadyChimeric"), ChimeraError);
    }
    SUBCASE("PDF header too deep to survive the splice") {
        Bytes displaced(1010, 'x');
        displaced.insert(displaced.end(), pdf_bytes.begin(), pdf_bytes.end());
        CHECK_THROWS_WITH_AS((void)build_chimera(tiff_bytes, displaced, SpliceMode::Strict),
                             doctest::Contains("HeaderWindowExceeded"), ChimeraError);
    }
    SUBCASE("degenerate PDF input propagates the scan error") {
        CHECK_THROWS_AS((void)build_chimera(tiff_bytes, Bytes{}, SpliceMode::PaperFaithful),
                        pdf::PdfError);
    }
    SUBCASE("degenerate TIFF input propagates the parse error") {
        CHECK_THROWS_AS((void)build_chimera(pdf_bytes, pdf_bytes, SpliceMode::PaperFaithful),
                        tiff::TiffError);
    }
}

TEST_CASE("rebase refuses offsets past the 32-bit range") {
    const tiff::TiffDocument doc =
        tiff::parse_tiff(tiff::make_fixture_tiff(8, 8, tiff::FixtureVariant::Bilevel));
    CHECK_THROWS_WITH_AS((void)rebase_tiff(doc, 0xFFFFFFF0ull, 8),
                         doctest::Contains("OffsetOverflow"), ChimeraError);
}

TEST_CASE("splicing survives interstitial foreign bytes in the TIFF") {
    const Bytes tiff_bytes = testsupport::minimal_raw_tiff(false, 0x20, 0x77);
    const Bytes pdf_bytes = pdf::make_fixture_pdf("gap case", "t");
    const auto [out, report] = build_chimera(tiff_bytes, pdf_bytes, SpliceMode::Strict);
    check_displacement(tiff_bytes, out, report);
    CHECK(validate_chimera(out).both);
}

TEST_CASE("displacement holds across variants, byte orders and modes") {
    for (const auto order : {tiff::ByteOrder::LittleEndian, tiff::ByteOrder::BigEndian}) {
        for (const auto mode : {SpliceMode::PaperFaithful, SpliceMode::Strict}) {
            tiff::FixtureOptions options;
            options.byte_order = order;
            options.rows_per_strip = 2;
            options.datetime = "1988:02:18 13:59:59";
            const Bytes tiff_bytes =
                tiff::make_fixture_tiff(9, 7, tiff::FixtureVariant::Rgb, options);
            const Bytes pdf_bytes = pdf::make_fixture_pdf("matrix", "t");
            const auto [out, report] = build_chimera(tiff_bytes, pdf_bytes, mode);
            check_displacement(tiff_bytes, out, report);
            CHECK(validate_chimera(out).both);
        }
    }
}
