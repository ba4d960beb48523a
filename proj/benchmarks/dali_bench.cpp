#include <benchmark/benchmark.h>

#include "dali/chimera.hpp"
#include "dali/detector.hpp"
#include "dali/pdf_lite.hpp"
#include "dali/sanitizer.hpp"
#include "dali/signet.hpp"
#include "dali/tiff_codec.hpp"

namespace {

using namespace dali;

Bytes bench_tiff(std::uint32_t side) {
    tiff::FixtureOptions options;
    options.rows_per_strip = 16;
    options.software = "bench";
    return tiff::make_fixture_tiff(side, side, tiff::FixtureVariant::Rgb, options);
}

Bytes bench_pdf() {
    return pdf::make_fixture_pdf("benchmark corpus document", "dalitool", 6009);
}

void BM_ParseTiff(benchmark::State& state) {
    const Bytes input = bench_tiff(static_cast<std::uint32_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(tiff::parse_tiff(input));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * input.size()));
}
BENCHMARK(BM_ParseTiff)->Arg(32)->Arg(128)->Arg(512);

void BM_WriteTiffCanonical(benchmark::State& state) {
    const tiff::TiffDocument doc =
        tiff::parse_tiff(bench_tiff(static_cast<std::uint32_t>(state.range(0))));
    for (auto _ : state) {
        benchmark::DoNotOptimize(tiff::write_tiff(doc, {.layout = tiff::Layout::Canonical}));
    }
}
BENCHMARK(BM_WriteTiffCanonical)->Arg(32)->Arg(256);

void BM_ScanPdf(benchmark::State& state) {
    const Bytes input = bench_pdf();
    for (auto _ : state) {
        benchmark::DoNotOptimize(pdf::scan_pdf(input));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * input.size()));
}
BENCHMARK(BM_ScanPdf);

void BM_BuildChimera(benchmark::State& state) {
    const Bytes t = bench_tiff(static_cast<std::uint32_t>(state.range(0)));
    const Bytes p = bench_pdf();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            chimera::build_chimera(t, p, chimera::SpliceMode::PaperFaithful));
    }
}
BENCHMARK(BM_BuildChimera)->Arg(64)->Arg(256);

void BM_Detect(benchmark::State& state) {
    const Bytes artifact =
        chimera::build_chimera(bench_tiff(128), bench_pdf(), chimera::SpliceMode::Strict).bytes;
    for (auto _ : state) {
        benchmark::DoNotOptimize(detector::detect(artifact, detector::ClaimedType::Pdf));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * artifact.size()));
}
BENCHMARK(BM_Detect);

void BM_SanitizeTiff(benchmark::State& state) {
    const Bytes artifact =
        chimera::build_chimera(bench_tiff(128), bench_pdf(), chimera::SpliceMode::PaperFaithful)
            .bytes;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sanitizer::sanitize(artifact, detector::ClaimedType::Tiff));
    }
}
BENCHMARK(BM_SanitizeTiff);

void BM_SignVerify(benchmark::State& state) {
    signet::KeyedDigestBackend backend("bench");
    const Bytes content = bench_tiff(static_cast<std::uint32_t>(state.range(0)));
    for (auto _ : state) {
        const auto env = signet::sign_detached(content, "a.pdf", "application/pdf",
                                               signet::BindingMode::Hardened, backend);
        benchmark::DoNotOptimize(
            signet::verify_envelope(env, content, "a.pdf", "application/pdf", backend));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * content.size()));
}
BENCHMARK(BM_SignVerify)->Arg(64)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
