// dalitool: forge, detect, inspect, disarm and sign PDF/TIFF polyglots.
//
// Exit codes: 0 success (detect: all clean; verify: accept), 1 detect found
// suspicious files, 2 detect found a polyglot / verify rejected, 3
// operational error, 64 usage error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

#include "dali/bytes.hpp"
#include "dali/chimera.hpp"
#include "dali/detector.hpp"
#include "dali/pdf_lite.hpp"
#include "dali/sanitizer.hpp"
#include "dali/signet.hpp"
#include "dali/tiff_codec.hpp"

namespace {

using namespace dali;

detector::ClaimedType claim_from_flag(const std::string& flag) {
    if (flag == "pdf") {
        return detector::ClaimedType::Pdf;
    }
    if (flag == "tiff" || flag == "tif") {
        return detector::ClaimedType::Tiff;
    }
    return detector::ClaimedType::Unknown;
}

std::string render_entry_value(const tiff::IfdEntry& entry, tiff::ByteOrder order) {
    const auto type = static_cast<tiff::FieldType>(entry.type);
    if (type == tiff::FieldType::Ascii) {
        return "\"" + tiff::entry_ascii(entry) + "\"";
    }
    if (auto values = tiff::entry_uints(entry, order)) {
        std::string out;
        for (std::size_t i = 0; i < values->size(); ++i) {
            if (i > 0) {
                out += ",";
            }
            if (i == 8) {
                out += "... (" + std::to_string(values->size()) + " values)";
                break;
            }
            out += std::to_string((*values)[i]);
        }
        return out;
    }
    if (type == tiff::FieldType::Rational && entry.count == 1 && entry.data.size() == 8) {
        const bool big = tiff::is_big_endian(order);
        return std::to_string(load_u32(entry.data, 0, big)) + "/" +
               std::to_string(load_u32(entry.data, 4, big));
    }
    return hex_dump(entry.data, 8) + (entry.data.size() > 8 ? "..." : "");
}

void dump_tiff(const tiff::TiffDocument& doc, std::ostream& out) {
    out << "TIFF structure\n";
    out << "  byte order: "
        << (doc.header.byte_order == tiff::ByteOrder::LittleEndian ? "little-endian (\"II\")"
                                                                   : "big-endian (\"MM\")")
        << "\n";
    out << "  magic:      " << doc.header.magic << "\n";
    out << "  first IFD:  " << hex(doc.header.first_ifd_offset) << "\n";
    for (std::size_t i = 0; i < doc.ifds.size(); ++i) {
        const auto& ifd = doc.ifds[i];
        out << "  IFD " << i << " @ " << hex(ifd.offset) << " -- " << ifd.entries.size()
            << " entries, next " << hex(ifd.next_ifd_offset) << "\n";
        for (const auto& e : ifd.entries) {
            char line[160];
            const auto name = tiff::tag_name(e.tag);
            std::snprintf(line, sizeof(line), "    %-8s %-26s %-9s x%-6u",
                          hex(e.tag).c_str(),
                          name.empty() ? "(unknown)" : std::string(name).c_str(),
                          std::string(tiff::field_type_name(e.type)).c_str(), e.count);
            out << line;
            if (e.out_of_line()) {
                out << " @" << hex(e.value_offset) << " = ";
            } else {
                out << " = ";
            }
            out << render_entry_value(e, doc.header.byte_order) << "\n";
        }
    }
    std::uint64_t strip_total = 0;
    for (const auto& s : doc.strips) {
        strip_total += s.length;
    }
    out << "  strips: " << doc.strips.size() << " (" << strip_total << " bytes)\n";
    for (std::size_t s = 0; s < doc.strips.size(); ++s) {
        out << "    [" << s << "] ifd " << doc.strips[s].ifd_index << " @ "
            << hex(doc.strips[s].offset) << " +" << doc.strips[s].length << "\n";
    }
    if (doc.foreign_spans.empty()) {
        out << "  foreign spans: none\n";
    } else {
        out << "  foreign spans:\n";
        for (const auto& span : doc.foreign_spans) {
            out << "    [" << hex(span.offset) << "," << hex(span.offset + span.bytes.size())
                << ") " << span.bytes.size() << " bytes\n";
        }
    }
}

void dump_pdf(const pdf::PdfSkeleton& sk, std::ostream& out) {
    out << "PDF structure\n";
    out << "  header:    %PDF-" << sk.header.major << "." << sk.header.minor << " at "
        << hex(sk.header.offset) << "\n";
    out << "  body:      [" << hex(sk.body_span.offset) << "," << hex(sk.body_span.end())
        << ")\n";
    out << "  xref:      @" << hex(sk.xref_pos) << ", " << sk.xref_sections.size()
        << " subsection(s)\n";
    for (const auto& section : sk.xref_sections) {
        for (std::size_t i = 0; i < section.entries.size(); ++i) {
            const auto& e = section.entries[i];
            out << "    obj " << section.first_object_id + i << ": "
                << (e.kind == pdf::XrefKind::InUse ? "in-use @" + hex(e.offset)
                                                   : "free") << "\n";
        }
    }
    out << "  trailer:   [" << hex(sk.trailer_span.offset) << "," << hex(sk.trailer_span.end())
        << ")\n";
    out << "  startxref: " << sk.startxref_value << " (" << hex(sk.startxref_value)
        << "), resolves from byte 0: " << (sk.resolution.from_file_start ? "yes" : "no")
        << ", from header: " << (sk.resolution.from_header_offset ? "yes" : "no") << "\n";
    out << "  %%EOF:     at " << hex(sk.eof_offset) << ", earlier markers: "
        << sk.earlier_eofs.size() << "\n";
}

struct DetectArgs {
    std::vector<std::string> paths;
    bool json = false;
    std::size_t min_foreign = 16;
};

int run_detect(const DetectArgs& args) {
    detector::DetectorConfig config;
    config.min_foreign_len = args.min_foreign;
    std::vector<detector::FileReport> reports;
    for (const auto& raw : args.paths) {
        const std::filesystem::path path(raw);
        if (std::filesystem::is_directory(path)) {
            auto sub = detector::scan_tree(path, config);
            reports.insert(reports.end(), sub.begin(), sub.end());
            continue;
        }
        detector::FileReport fr;
        fr.path = path;
        try {
            const Bytes data = read_file(path);
            fr.report = detector::detect(data, detector::claimed_type_from_extension(path),
                                         config);
        } catch (const std::exception& e) {
            fr.io_error = e.what();
        }
        reports.push_back(std::move(fr));
    }
    if (args.json) {
        std::cout << detector::format_reports_json(reports) << "\n";
    } else {
        for (const auto& fr : reports) {
            std::cout << detector::format_report_text(fr);
        }
    }
    return detector::exit_code_for(reports);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PDF/TIFF polyglot toolkit: forge, detect, inspect, disarm, sign"};
    app.require_subcommand(1);

    // forge
    auto* forge = app.add_subcommand("forge", "Splice a PDF into a TIFF");
    std::string forge_tiff, forge_pdf, forge_out, forge_report;
    bool forge_strict = false;
    forge->add_option("--tiff", forge_tiff, "TIFF input")->required();
    forge->add_option("--pdf", forge_pdf, "PDF input")->required();
    forge->add_option("-o,--output", forge_out, "polyglot output path")->required();
    forge->add_flag("--strict-pdf", forge_strict,
                    "also shift the embedded xref/startxref by +8");
    forge->add_option("--report", forge_report, "write the rewrite table here");

    // detect
    auto* det = app.add_subcommand("detect", "Scan files or directories for polyglots");
    DetectArgs detect_args;
    det->add_option("paths", detect_args.paths, "files or directories")->required();
    det->add_flag("--json", detect_args.json, "machine-readable output");
    det->add_option("--min-foreign", detect_args.min_foreign,
                    "minimum unreachable-run length to report")
        ->default_val(16);

    // inspect
    auto* ins = app.add_subcommand("inspect", "Dump the structure of a file");
    std::string inspect_path, inspect_as;
    ins->add_option("path", inspect_path, "file to inspect")->required();
    ins->add_option("--as", inspect_as, "pdf|tiff (default: try both)")
        ->check(CLI::IsMember({"pdf", "tiff"}));

    // sanitize
    auto* san = app.add_subcommand("sanitize", "Rewrite a file under one claimed format");
    std::string san_path, san_as, san_out;
    san->add_option("path", san_path, "file to disarm")->required();
    san->add_option("--as", san_as, "pdf|tiff")->required()->check(
        CLI::IsMember({"pdf", "tiff"}));
    san->add_option("-o,--output", san_out, "sanitized output path")->required();

    // sign
    auto* sign = app.add_subcommand("sign", "Write a detached signature envelope");
    std::string sign_path, sign_name, sign_mime, sign_out, sign_id = "softsign-v1";
    bool sign_bind = false;
    sign->add_option("path", sign_path, "content to sign")->required();
    sign->add_option("--name", sign_name, "filename to present (bound when --bind)")
        ->required();
    sign->add_option("--mime", sign_mime, "MIME type (bound when --bind)")->required();
    sign->add_flag("--bind", sign_bind, "bind filename and MIME into the signed message");
    sign->add_option("-o,--output", sign_out, "envelope path (default: <path>.dse)");
    sign->add_option("--signer-id", sign_id, "deterministic signer identity");

    // verify
    auto* ver = app.add_subcommand("verify", "Verify a detached signature envelope");
    std::string ver_env, ver_content, ver_name, ver_mime, ver_id = "softsign-v1";
    ver->add_option("envelope", ver_env, ".dse envelope path")->required();
    ver->add_option("--content", ver_content, "content file")->required();
    ver->add_option("--name", ver_name, "presented filename")->required();
    ver->add_option("--mime", ver_mime, "presented MIME type")->required();
    ver->add_option("--signer-id", ver_id, "deterministic signer identity");

    // demo
    auto* demo = app.add_subcommand("demo", "Enact the whole scenario into a directory");
    std::string demo_out;
    bool demo_with_time = false;
    demo->add_option("-o,--output", demo_out, "output directory")->required();
    demo->add_flag("--with-time", demo_with_time, "stamp the transcript with the wall clock");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 64;
    }

    try {
        if (forge->parsed()) {
            const Bytes t = read_file(forge_tiff);
            const Bytes p = read_file(forge_pdf);
            const auto mode = forge_strict ? chimera::SpliceMode::Strict
                                           : chimera::SpliceMode::PaperFaithful;
            const auto result = chimera::build_chimera(t, p, mode);
            write_file(forge_out, result.bytes);
            if (!forge_report.empty()) {
                const std::string table = chimera::format_report(result.report);
                write_file(forge_report, to_bytes(table));
            }
            const auto dual = chimera::validate_chimera(result.bytes);
            std::cout << "forged " << forge_out << ": " << result.bytes.size()
                      << " bytes, shift " << result.report.shift << " ("
                      << hex(result.report.shift) << "), mode "
                      << chimera::to_string(result.report.mode) << "\n"
                      << "dual validity: tiff=" << (dual.tiff_ok ? "ok" : "INVALID")
                      << " pdf=" << (dual.pdf_ok ? "ok" : "INVALID") << "\n";
            return dual.both ? 0 : 3;
        }
        if (det->parsed()) {
            return run_detect(detect_args);
        }
        if (ins->parsed()) {
            const Bytes data = read_file(inspect_path);
            bool shown = false;
            std::string errors;
            if (inspect_as.empty() || inspect_as == "tiff") {
                try {
                    dump_tiff(tiff::parse_tiff(data), std::cout);
                    shown = true;
                } catch (const std::exception& e) {
                    errors += std::string("tiff: ") + e.what() + "\n";
                }
            }
            if (inspect_as.empty() || inspect_as == "pdf") {
                try {
                    dump_pdf(pdf::scan_pdf(data), std::cout);
                    shown = true;
                } catch (const std::exception& e) {
                    errors += std::string("pdf: ") + e.what() + "\n";
                }
            }
            if (!shown) {
                std::cerr << errors;
                return 3;
            }
            return 0;
        }
        if (san->parsed()) {
            const Bytes data = read_file(san_path);
            const auto outcome = sanitizer::sanitize(data, claim_from_flag(san_as));
            write_file(san_out, outcome.output);
            std::cout << sanitizer::format_outcome(outcome);
            std::cout << "wrote " << san_out << "\n";
            return 0;
        }
        if (sign->parsed()) {
            const Bytes content = read_file(sign_path);
            signet::KeyedDigestBackend backend(sign_id);
            const auto mode =
                sign_bind ? signet::BindingMode::Hardened : signet::BindingMode::Legacy;
            const auto envelope =
                signet::sign_detached(content, sign_name, sign_mime, mode, backend);
            const std::string out_path = sign_out.empty() ? sign_path + ".dse" : sign_out;
            write_file(out_path, signet::encode_envelope(envelope));
            std::cout << "signed " << sign_path << " ("
                      << (sign_bind ? "hardened" : "legacy") << ") -> " << out_path << "\n"
                      << "digest sha256:"
                      << hex_dump(ByteSpan(envelope.digest.data(), envelope.digest.size()))
                      << "\n";
            return 0;
        }
        if (ver->parsed()) {
            const auto envelope = signet::decode_envelope(read_file(ver_env));
            const Bytes content = read_file(ver_content);
            signet::KeyedDigestBackend backend(ver_id);
            const auto result =
                signet::verify_envelope(envelope, content, ver_name, ver_mime, backend);
            if (result.accepted) {
                std::cout << "accept\n";
                return 0;
            }
            std::cout << "reject(" << signet::to_string(result.reason) << "): " << result.detail
                      << "\n";
            return 2;
        }
        if (demo->parsed()) {
            const std::filesystem::path dir(demo_out);
            std::filesystem::create_directories(dir);

            tiff::FixtureOptions tiff_options;
            tiff_options.software = "1 million Euros";
            const Bytes t =
                tiff::make_fixture_tiff(64, 64, tiff::FixtureVariant::Grayscale, tiff_options);
            const Bytes p = pdf::make_fixture_pdf("100,000 Euros", "dalitool demo");

            signet::KeyedDigestBackend backend("demo-signer");
            const auto transcript = signet::attack_demo(t, p, backend);
            if (!transcript.chimera_built || !transcript.dual_valid) {
                std::cerr << "demo failed: " << transcript.build_error << "\n";
                return 3;
            }

            write_file(dir / "Contract.tif", t);
            write_file(dir / "Contract.pdf", p);
            write_file(dir / "Contract.chimera", transcript.chimera_bytes);
            write_file(dir / "Contract.pdf.dse",
                       signet::encode_envelope(transcript.legacy_envelope));
            write_file(dir / "Contract.pdf.bound.dse",
                       signet::encode_envelope(transcript.hardened_envelope));

            std::string text = signet::format_transcript(transcript);
            if (demo_with_time) {
                const auto now = std::chrono::system_clock::to_time_t(
                    std::chrono::system_clock::now());
                char stamp[64];
                std::strftime(stamp, sizeof(stamp), "generated at %Y-%m-%dT%H:%M:%SZ\n",
                              std::gmtime(&now));
                text.insert(0, stamp);
            }
            write_file(dir / "transcript.txt", to_bytes(text));
            std::cout << text;
            std::cout << "artifacts in " << dir.string() << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 64;
}
