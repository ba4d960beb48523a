#include <doctest.h>

#include <cstdio>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "dali/chimera.hpp"
#include "dali/pdf_lite.hpp"
#include "dali/tiff_codec.hpp"
#include "support.hpp"

using namespace dali;

namespace {

struct CmdResult {
    int code = -1;
    std::string out;
};

CmdResult run_tool(const std::string& args) {
    const std::string cmd = std::string(DALITOOL_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CmdResult result;
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) {
        result.out.append(buf, n);
    }
    const int status = pclose(pipe);
    result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string q(const std::filesystem::path& p) {
    return "'" + p.string() + "'";
}

}  // namespace

TEST_CASE("forge then detect: the pipeline exit codes") {
    testsupport::TempDir dir("cli_forge");
    const auto root = dir.path();
    write_file(root / "a.tif", tiff::make_fixture_tiff(16, 16, tiff::FixtureVariant::Grayscale));
    write_file(root / "b.pdf", pdf::make_fixture_pdf("pipeline", "t"));

    const auto forged = run_tool("forge --tiff " + q(root / "a.tif") + " --pdf " +
                                 q(root / "b.pdf") + " -o " + q(root / "c.chimera") +
                                 " --report " + q(root / "c.report"));
    CHECK(forged.code == 0);
    CHECK(forged.out.find("dual validity: tiff=ok pdf=ok") != std::string::npos);
    CHECK(std::filesystem::exists(root / "c.chimera"));
    const std::string report = to_string(read_file(root / "c.report"));
    CHECK(report.find("first IFD offset") != std::string::npos);

    CHECK(run_tool("detect " + q(root / "c.chimera")).code == 2);
    CHECK(run_tool("detect " + q(root / "b.pdf")).code == 0);
    CHECK(run_tool("detect " + q(root)).code == 2);  // directory walk

    SUBCASE("strict mode also round-trips") {
        const auto strict = run_tool("forge --tiff " + q(root / "a.tif") + " --pdf " +
                                     q(root / "b.pdf") + " -o " + q(root / "s.chimera") +
                                     " --strict-pdf");
        CHECK(strict.code == 0);
        const auto v = chimera::validate_chimera(read_file(root / "s.chimera"));
        CHECK(v.both);
        CHECK(v.pdf_resolution.from_file_start);
    }
}

TEST_CASE("detect --json emits parseable, schema-stable output") {
    testsupport::TempDir dir("cli_json");
    const auto root = dir.path();
    const Bytes t = tiff::make_fixture_tiff(8, 8, tiff::FixtureVariant::Bilevel);
    const Bytes p = pdf::make_fixture_pdf("json", "t");
    write_file(root / "x.pdf",
               chimera::build_chimera(t, p, chimera::SpliceMode::PaperFaithful).bytes);

    const auto result = run_tool("detect --json " + q(root / "x.pdf"));
    CHECK(result.code == 2);
    const auto parsed = nlohmann::json::parse(result.out);
    REQUIRE(parsed.is_array());
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0]["claimed_type"] == "pdf");
    CHECK(parsed[0]["verdict"] == "polyglot");
    REQUIRE(parsed[0]["findings"].is_array());
    CHECK(!parsed[0]["findings"].empty());
    for (const auto& f : parsed[0]["findings"]) {
        CHECK(f.contains("kind"));
        CHECK(f.contains("severity"));
        CHECK(f["span"].contains("offset"));
        CHECK(f["span"].contains("length"));
        CHECK(f.contains("evidence"));
    }
}

TEST_CASE("sign and verify round trip through the filesystem") {
    testsupport::TempDir dir("cli_sign");
    const auto root = dir.path();
    const auto content = root / "Contract.pdf";
    write_file(content, pdf::make_fixture_pdf("sign me", "t"));

    SUBCASE("legacy: rename does not matter") {
        CHECK(run_tool("sign " + q(content) + " --name Contract.pdf --mime application/pdf")
                  .code == 0);
        const auto env = q(root / "Contract.pdf.dse");
        CHECK(run_tool("verify " + env + " --content " + q(content) +
                       " --name Contract.pdf --mime application/pdf")
                  .code == 0);
        CHECK(run_tool("verify " + env + " --content " + q(content) +
                       " --name Contract.tif --mime image/tiff")
                  .code == 0);
    }
    SUBCASE("hardened: rename rejects with NameMismatch, exit 2") {
        CHECK(run_tool("sign " + q(content) +
                       " --name Contract.pdf --mime application/pdf --bind -o " +
                       q(root / "bound.dse"))
                  .code == 0);
        const auto accept = run_tool("verify " + q(root / "bound.dse") + " --content " +
                                     q(content) + " --name Contract.pdf --mime application/pdf");
        CHECK(accept.code == 0);
        CHECK(accept.out.find("accept") != std::string::npos);
        const auto reject = run_tool("verify " + q(root / "bound.dse") + " --content " +
                                     q(content) + " --name Contract.tif --mime image/tiff");
        CHECK(reject.code == 2);
        CHECK(reject.out.find("NameMismatch") != std::string::npos);
    }
    SUBCASE("a different signer identity cannot verify") {
        CHECK(run_tool("sign " + q(content) + " --name a.pdf --mime application/pdf").code == 0);
        CHECK(run_tool("verify " + q(root / "Contract.pdf.dse") + " --content " + q(content) +
                       " --name a.pdf --mime application/pdf --signer-id other")
                  .code == 2);
    }
}

TEST_CASE("sanitize via the CLI disarms a chimera") {
    testsupport::TempDir dir("cli_sanitize");
    const auto root = dir.path();
    const Bytes t = tiff::make_fixture_tiff(12, 12, tiff::FixtureVariant::Grayscale);
    const Bytes p = pdf::make_fixture_pdf("disarm", "t");
    write_file(root / "evil.tif",
               chimera::build_chimera(t, p, chimera::SpliceMode::PaperFaithful).bytes);

    const auto result = run_tool("sanitize " + q(root / "evil.tif") + " --as tiff -o " +
                                 q(root / "clean.tif"));
    CHECK(result.code == 0);
    CHECK(result.out.find("dropped:") != std::string::npos);
    CHECK(run_tool("detect " + q(root / "clean.tif")).code == 0);
    CHECK(read_file(root / "clean.tif") == t);
}

TEST_CASE("demo writes the full artifact set deterministically") {
    testsupport::TempDir dir("cli_demo");
    const auto out1 = dir.path() / "one";
    const auto out2 = dir.path() / "two";

    const auto first = run_tool("demo -o " + q(out1));
    CHECK(first.code == 0);
    CHECK(first.out.find("legacy-accept-after-rename=true") != std::string::npos);
    CHECK(first.out.find("hardened-accept-after-rename=false") != std::string::npos);
    for (const char* name : {"Contract.tif", "Contract.pdf", "Contract.chimera",
                             "Contract.pdf.dse", "Contract.pdf.bound.dse", "transcript.txt"}) {
        CHECK(std::filesystem::exists(out1 / name));
    }
    const std::string transcript = to_string(read_file(out1 / "transcript.txt"));
    CHECK(transcript.find("the attack") != std::string::npos);

    CHECK(run_tool("demo -o " + q(out2)).code == 0);
    CHECK(read_file(out1 / "Contract.chimera") == read_file(out2 / "Contract.chimera"));
    CHECK(read_file(out1 / "Contract.pdf.dse") == read_file(out2 / "Contract.pdf.dse"));
    CHECK(read_file(out1 / "transcript.txt") == read_file(out2 / "transcript.txt"));

    SUBCASE("the demo chimera is detected no matter the claimed extension") {
        CHECK(run_tool("detect " + q(out1 / "Contract.chimera")).code == 2);
    }
}

TEST_CASE("inspect prints hex offsets") {
    testsupport::TempDir dir("cli_inspect");
    const auto path = dir.path() / "t.tif";
    write_file(path, tiff::make_fixture_tiff(8, 8, tiff::FixtureVariant::Bilevel));
    const auto result = run_tool("inspect " + q(path));
    CHECK(result.code == 0);
    CHECK(result.out.find("first IFD:  0x8") != std::string::npos);
    CHECK(result.out.find("StripOffsets") != std::string::npos);

    const auto forced = run_tool("inspect " + q(path) + " --as pdf");
    CHECK(forced.code == 3);  // not a PDF
}

TEST_CASE("usage and operational errors") {
    CHECK(run_tool("no-such-command").code == 64);
    CHECK(run_tool("forge --tiff only").code == 64);
    CHECK(run_tool("--help").code == 0);
    CHECK(run_tool("detect /no/such/file.pdf").code == 3);
    CHECK(run_tool("sanitize /no/such/file --as tiff -o /tmp/x").code == 3);
}
