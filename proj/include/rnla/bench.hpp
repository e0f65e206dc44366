#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rnla/nn/attention.hpp"

namespace rnla::bench {

inline constexpr std::size_t kDefaultTrials = 200; // measurement protocol default
inline constexpr std::size_t kDefaultWarmup = 10;

// Worker threads used inside timed regions (default 1 for stable numbers).
void set_timing_threads(int threads);
int timing_threads();

struct TimeStats {
    double mean_ms = 0.0;
    double std_ms = 0.0; // sample std; 0 by convention when trials == 1
};

// Runs `warmup` discarded iterations then `trials` timed ones on a monotonic
// clock, with the timed region pinned to timing_threads() workers. A throwing
// thunk raises benchmark_error carrying the iteration index.
TimeStats time_op(const std::function<void()>& thunk, std::size_t trials, std::size_t warmup);

struct BenchRecord {
    std::string op;   // linear | conv2d | attention | rsvd | cqrrpt
    std::string impl; // dense | sketched
    std::optional<std::uint64_t> d_in, d_out;
    std::optional<std::uint64_t> c_in, c_out;
    std::optional<std::string> kernel; // conv kernel size or attention kernel name
    std::optional<std::uint64_t> image;
    std::optional<std::uint64_t> d_model, heads, n, m;
    std::optional<std::uint64_t> l, k;
    std::optional<std::uint64_t> batch;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials, warmup;
    std::optional<double> mean_ms, std_ms;
    std::optional<std::uint64_t> params_dense, params_sketched;
    std::optional<std::uint64_t> est_mem_bytes;
    std::optional<double> recon_rel_err, orth_err;
    bool skipped = false;
    std::string skip_reason;
};

struct LinearGrid {
    std::vector<std::size_t> d_in, d_out;
    std::vector<std::size_t> num_terms, low_rank;
    std::size_t batch = 8;
    std::size_t trials = kDefaultTrials;
    std::size_t warmup = kDefaultWarmup;
    std::uint64_t seed = 0;
};
std::vector<BenchRecord> run_linear_bench(const LinearGrid& grid);

struct ConvGrid {
    std::vector<std::size_t> c_in, c_out;
    std::vector<std::size_t> kernels; // square
    std::vector<std::size_t> images;  // square
    std::vector<std::size_t> num_terms, low_rank;
    std::size_t batch = 1;
    std::size_t trials = kDefaultTrials;
    std::size_t warmup = kDefaultWarmup;
    std::uint64_t seed = 0;
};
std::vector<BenchRecord> run_conv_bench(const ConvGrid& grid);

struct AttentionGrid {
    std::vector<std::size_t> d_model, heads, features, seq_lens;
    std::vector<nn::AttentionKernel> kernels;
    std::uint64_t mem_budget_bytes = std::uint64_t{2} << 30;
    std::size_t trials = kDefaultTrials;
    std::size_t warmup = kDefaultWarmup;
    std::uint64_t seed = 0;
};
std::vector<BenchRecord> run_attention_bench(const AttentionGrid& grid);

struct DecompSpec {
    std::string kind; // rsvd | cqrrpt
    std::size_t rows = 0, cols = 0;
    std::size_t rank = 0;                        // rsvd target rank
    std::size_t oversample = 8, power_iters = 1; // rsvd controls
    double gamma = 4.0;                          // cqrrpt oversampling ratio
    double rank_tol = 1e-10;
    std::size_t synth_rank = 0; // > 0: exact-rank synthetic input instead of dense Gaussian
    std::size_t trials = kDefaultTrials;
    std::size_t warmup = kDefaultWarmup;
    std::uint64_t seed = 0;
};
std::vector<BenchRecord> run_decomp_bench(const DecompSpec& spec);

// Fixed header, RFC-4180 quoting, 6 significant digits for times; skipped
// rows never carry mean_ms.
extern const char* const kCsvHeader;
void write_csv(const std::vector<BenchRecord>& records, const std::string& path);
std::string record_to_csv(const BenchRecord& record);

} // namespace rnla::bench
