#include "rnla/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <new>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rnla/decomp.hpp"
#include "rnla/linalg.hpp"
#include "rnla/nn/layers.hpp"
#include "rnla/rng.hpp"
#include "rnla/sketch.hpp"

namespace rnla::bench {

namespace {
int g_timing_threads = 1;
}

void set_timing_threads(int threads) { g_timing_threads = threads < 1 ? 1 : threads; }
int timing_threads() { return g_timing_threads; }

TimeStats time_op(const std::function<void()>& thunk, std::size_t trials, std::size_t warmup) {
    if (trials < 1) throw parameter_error("time_op: trials must be >= 1");
#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(g_timing_threads);
#endif
    TimeStats stats;
    try {
        for (std::size_t i = 0; i < warmup; ++i) {
            try {
                thunk();
            } catch (const std::exception& e) {
                throw benchmark_error(std::string("warmup iteration failed: ") + e.what(), i);
            }
        }
        std::vector<double> samples(trials);
        for (std::size_t i = 0; i < trials; ++i) {
            const auto t0 = std::chrono::steady_clock::now();
            try {
                thunk();
            } catch (const std::exception& e) {
                throw benchmark_error(std::string("timed iteration failed: ") + e.what(),
                                      warmup + i);
            }
            samples[i] =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
        }
        double mean = 0.0;
        for (double s : samples) mean += s;
        mean /= static_cast<double>(trials);
        double var = 0.0;
        if (trials > 1) {
            for (double s : samples) var += (s - mean) * (s - mean);
            var /= static_cast<double>(trials - 1);
        }
        stats.mean_ms = mean;
        stats.std_ms = std::sqrt(var);
    } catch (...) {
#ifdef _OPENMP
        omp_set_num_threads(saved);
#endif
        throw;
    }
#ifdef _OPENMP
    omp_set_num_threads(saved);
#endif
    return stats;
}

namespace {

Matrix random_input(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    return sketch::gaussian_matrix(rows, cols, seed);
}

} // namespace

std::vector<BenchRecord> run_linear_bench(const LinearGrid& grid) {
    std::vector<BenchRecord> records;
    std::uint64_t shape_idx = 0;
    for (std::size_t d_in : grid.d_in) {
        for (std::size_t d_out : grid.d_out) {
            ++shape_idx;
            const std::uint64_t params_dense = static_cast<std::uint64_t>(d_in) * d_out;

            BenchRecord dense;
            dense.op = "linear";
            dense.impl = "dense";
            dense.d_in = d_in;
            dense.d_out = d_out;
            dense.batch = grid.batch;
            dense.seed = grid.seed;
            dense.trials = grid.trials;
            dense.warmup = grid.warmup;
            dense.params_dense = params_dense;
            try {
                const nn::DenseLinear layer =
                    nn::dense_linear_init(d_in, d_out, derive_seed(grid.seed, shape_idx));
                dense.est_mem_bytes = nn::memory_estimate(layer, grid.batch);
                const Matrix x = random_input(d_in, grid.batch, derive_seed(grid.seed, shape_idx + 7));
                Matrix sink;
                const TimeStats t =
                    time_op([&] { sink = layer.forward(x); }, grid.trials, grid.warmup);
                dense.mean_ms = t.mean_ms;
                dense.std_ms = t.std_ms;
            } catch (const std::bad_alloc&) {
                dense.skipped = true;
                dense.skip_reason = "resource";
            }
            records.push_back(std::move(dense));

            for (std::size_t l : grid.num_terms) {
                for (std::size_t k : grid.low_rank) {
                    BenchRecord rec;
                    rec.op = "linear";
                    rec.impl = "sketched";
                    rec.d_in = d_in;
                    rec.d_out = d_out;
                    rec.l = l;
                    rec.k = k;
                    rec.batch = grid.batch;
                    rec.seed = grid.seed;
                    rec.trials = grid.trials;
                    rec.warmup = grid.warmup;
                    rec.params_dense = params_dense;
                    rec.params_sketched = nn::sk_stored_coeffs(l, k, d_in, d_out);
                    if (nn::exceeds_dense(l, k, d_in, d_out)) {
                        rec.skipped = true;
                        rec.skip_reason = "exceeds dense size";
                    } else {
                        try {
                            const nn::SkLinear layer = nn::sk_linear_fresh(
                                d_in, d_out, l, k, derive_seed(grid.seed, (shape_idx << 16) ^ (l << 10) ^ k));
                            rec.est_mem_bytes = nn::memory_estimate(layer, grid.batch);
                            const Matrix x =
                                random_input(d_in, grid.batch, derive_seed(grid.seed, shape_idx + 7));
                            Matrix sink;
                            const TimeStats t =
                                time_op([&] { sink = layer.forward(x); }, grid.trials, grid.warmup);
                            rec.mean_ms = t.mean_ms;
                            rec.std_ms = t.std_ms;
                        } catch (const std::bad_alloc&) {
                            rec.skipped = true;
                            rec.skip_reason = "resource";
                        }
                    }
                    records.push_back(std::move(rec));
                }
            }
        }
    }
    return records;
}

std::vector<BenchRecord> run_conv_bench(const ConvGrid& grid) {
    std::vector<BenchRecord> records;
    std::uint64_t shape_idx = 0;
    for (std::size_t c_in : grid.c_in) {
        for (std::size_t c_out : grid.c_out) {
            for (std::size_t kernel : grid.kernels) {
                for (std::size_t image : grid.images) {
                    ++shape_idx;
                    nn::ConvShape shape;
                    shape.c_in = c_in;
                    shape.c_out = c_out;
                    shape.kernel_h = shape.kernel_w = kernel;
                    shape.stride = 1;
                    shape.padding = 0;
                    const std::size_t lowered = shape.lowered_d_in();
                    const std::uint64_t params_dense = static_cast<std::uint64_t>(lowered) * c_out;

                    nn::ImageBatch x;
                    x.batch = grid.batch;
                    x.channels = c_in;
                    x.height = x.width = image;
                    {
                        const Matrix noise = random_input(1, grid.batch * c_in * image * image,
                                                          derive_seed(grid.seed, shape_idx + 13));
                        x.data.assign(noise.data(), noise.data() + noise.size());
                    }

                    auto base = [&](const char* impl) {
                        BenchRecord rec;
                        rec.op = "conv2d";
                        rec.impl = impl;
                        rec.c_in = c_in;
                        rec.c_out = c_out;
                        rec.kernel = std::to_string(kernel);
                        rec.image = image;
                        rec.batch = grid.batch;
                        rec.seed = grid.seed;
                        rec.trials = grid.trials;
                        rec.warmup = grid.warmup;
                        rec.params_dense = params_dense;
                        return rec;
                    };

                    BenchRecord dense = base("dense");
                    try {
                        const nn::DenseConv2d layer =
                            nn::dense_conv2d_init(shape, derive_seed(grid.seed, shape_idx));
                        dense.est_mem_bytes = nn::memory_estimate(layer, image, image, grid.batch);
                        nn::ImageBatch sink;
                        const TimeStats t =
                            time_op([&] { sink = layer.forward(x); }, grid.trials, grid.warmup);
                        dense.mean_ms = t.mean_ms;
                        dense.std_ms = t.std_ms;
                    } catch (const std::bad_alloc&) {
                        dense.skipped = true;
                        dense.skip_reason = "resource";
                    }
                    records.push_back(std::move(dense));

                    for (std::size_t l : grid.num_terms) {
                        for (std::size_t k : grid.low_rank) {
                            BenchRecord rec = base("sketched");
                            rec.l = l;
                            rec.k = k;
                            rec.params_sketched = nn::sk_stored_coeffs(l, k, lowered, c_out);
                            if (nn::exceeds_dense(l, k, lowered, c_out)) {
                                rec.skipped = true;
                                rec.skip_reason = "exceeds dense size";
                            } else {
                                try {
                                    const nn::SkConv2d layer = nn::sk_conv2d_fresh(
                                        shape, l, k,
                                        derive_seed(grid.seed, (shape_idx << 16) ^ (l << 10) ^ k));
                                    rec.est_mem_bytes =
                                        nn::memory_estimate(layer, image, image, grid.batch);
                                    nn::ImageBatch sink;
                                    const TimeStats t = time_op([&] { sink = layer.forward(x); },
                                                                grid.trials, grid.warmup);
                                    rec.mean_ms = t.mean_ms;
                                    rec.std_ms = t.std_ms;
                                } catch (const std::bad_alloc&) {
                                    rec.skipped = true;
                                    rec.skip_reason = "resource";
                                }
                            }
                            records.push_back(std::move(rec));
                        }
                    }
                }
            }
        }
    }
    return records;
}

std::vector<BenchRecord> run_attention_bench(const AttentionGrid& grid) {
    std::vector<BenchRecord> records;
    std::uint64_t cfg_idx = 0;
    for (std::size_t d_model : grid.d_model) {
        for (std::size_t heads : grid.heads) {
            if (d_model % heads != 0)
                throw parameter_error("attention bench: d_model must be divisible by heads");
            const nn::MhaParams params =
                nn::mha_params_init(d_model, heads, derive_seed(grid.seed, ++cfg_idx));

            for (std::size_t m : grid.features) {
                for (nn::AttentionKernel kernel : grid.kernels) {
                    const nn::RandMha rand_layer(params, m, kernel,
                                                 derive_seed(grid.seed, cfg_idx ^ (m << 8)));

                    // Single-token correctness spot check: both paths reduce
                    // to v * W_o at N = 1.
                    {
                        const Matrix x1 = random_input(1, d_model, derive_seed(grid.seed, 0xa11));
                        const Matrix ye = nn::exact_mha_forward(params, x1);
                        const Matrix yr = rand_layer.forward(x1);
                        const double diff = linalg::frobenius_norm(linalg::sub(ye, yr));
                        const double ref = linalg::frobenius_norm(ye);
                        if (diff > 1e-9 * (ref > 0 ? ref : 1.0))
                            throw benchmark_error("attention bench: N=1 outputs disagree", 0);
                    }

                    for (std::size_t n : grid.seq_lens) {
                        const Matrix x =
                            random_input(n, d_model, derive_seed(grid.seed, cfg_idx ^ n));

                        BenchRecord exact;
                        exact.op = "attention";
                        exact.impl = "dense";
                        exact.d_model = d_model;
                        exact.heads = heads;
                        exact.n = n;
                        exact.seed = grid.seed;
                        exact.trials = grid.trials;
                        exact.warmup = grid.warmup;
                        exact.est_mem_bytes = nn::exact_mha_memory_estimate(d_model, heads, n);
                        if (*exact.est_mem_bytes > grid.mem_budget_bytes) {
                            exact.skipped = true;
                            exact.skip_reason = "memory-budget";
                        } else {
                            Matrix sink;
                            const TimeStats t =
                                time_op([&] { sink = nn::exact_mha_forward(params, x); },
                                        grid.trials, grid.warmup);
                            exact.mean_ms = t.mean_ms;
                            exact.std_ms = t.std_ms;
                        }
                        records.push_back(std::move(exact));

                        BenchRecord rnd;
                        rnd.op = "attention";
                        rnd.impl = "sketched";
                        rnd.d_model = d_model;
                        rnd.heads = heads;
                        rnd.n = n;
                        rnd.m = m;
                        rnd.kernel = nn::kernel_name(kernel);
                        rnd.seed = grid.seed;
                        rnd.trials = grid.trials;
                        rnd.warmup = grid.warmup;
                        rnd.est_mem_bytes = nn::rand_mha_memory_estimate(d_model, heads, m, n);
                        if (*rnd.est_mem_bytes > grid.mem_budget_bytes) {
                            rnd.skipped = true;
                            rnd.skip_reason = "memory-budget";
                        } else {
                            Matrix sink;
                            const TimeStats t = time_op([&] { sink = rand_layer.forward(x); },
                                                        grid.trials, grid.warmup);
                            rnd.mean_ms = t.mean_ms;
                            rnd.std_ms = t.std_ms;
                        }
                        records.push_back(std::move(rnd));
                    }
                }
            }
        }
    }
    return records;
}

std::vector<BenchRecord> run_decomp_bench(const DecompSpec& spec) {
    if (spec.kind != "rsvd" && spec.kind != "cqrrpt")
        throw parameter_error("decomp bench: kind must be rsvd or cqrrpt");
    if (spec.rows == 0 || spec.cols == 0)
        throw parameter_error("decomp bench: rows and cols must be >= 1");
    if (spec.kind == "cqrrpt") {
        const std::size_t d =
            static_cast<std::size_t>(std::ceil(spec.gamma * static_cast<double>(spec.cols)));
        if (spec.rows < d)
            throw parameter_error("decomp bench: cqrrpt requires rows >= ceil(gamma*cols)");
    } else if (spec.rank < 1 || spec.rank + spec.oversample > std::min(spec.rows, spec.cols)) {
        throw parameter_error("decomp bench: rsvd rank/oversample out of range");
    }

    Matrix a;
    if (spec.synth_rank > 0) {
        const Matrix x = random_input(spec.rows, spec.synth_rank, derive_seed(spec.seed, 1));
        const Matrix y = random_input(spec.cols, spec.synth_rank, derive_seed(spec.seed, 2));
        a = linalg::matmul(x, linalg::transpose(y));
    } else {
        a = random_input(spec.rows, spec.cols, derive_seed(spec.seed, 1));
    }
    const double a_norm = linalg::frobenius_norm(a);

    BenchRecord rec;
    rec.op = spec.kind;
    rec.impl = "sketched";
    rec.d_in = spec.rows;
    rec.d_out = spec.cols;
    rec.seed = spec.seed;
    rec.trials = spec.trials;
    rec.warmup = spec.warmup;

    try {
        if (spec.kind == "rsvd") {
            rec.k = spec.rank;
            decomp::RsvdResult result;
            const TimeStats t = time_op(
                [&] {
                    result = decomp::rsvd(a, spec.rank, spec.oversample, spec.power_iters, spec.seed);
                },
                spec.trials, spec.warmup);
            rec.mean_ms = t.mean_ms;
            rec.std_ms = t.std_ms;

            Matrix usv = result.u;
            for (std::size_t i = 0; i < usv.rows(); ++i)
                for (std::size_t j = 0; j < usv.cols(); ++j) usv(i, j) *= result.s[j];
            usv = linalg::matmul(usv, linalg::transpose(result.v));
            rec.recon_rel_err = linalg::frobenius_norm(linalg::sub(a, usv)) / (a_norm > 0 ? a_norm : 1.0);
            const Matrix utu = linalg::matmul(linalg::transpose(result.u), result.u);
            const Matrix vtv = linalg::matmul(linalg::transpose(result.v), result.v);
            rec.orth_err = std::max(
                linalg::frobenius_norm(linalg::sub(utu, Matrix::identity(utu.rows()))),
                linalg::frobenius_norm(linalg::sub(vtv, Matrix::identity(vtv.rows()))));
        } else {
            decomp::CqrrptResult result;
            const TimeStats t = time_op(
                [&] { result = decomp::cqrrpt(a, spec.gamma, spec.rank_tol, spec.seed); },
                spec.trials, spec.warmup);
            rec.mean_ms = t.mean_ms;
            rec.std_ms = t.std_ms;
            rec.k = result.rank;

            const Matrix ap = linalg::permute_cols(a, result.pivots);
            rec.recon_rel_err =
                linalg::frobenius_norm(linalg::sub(ap, linalg::matmul(result.q, result.r_mat))) /
                (a_norm > 0 ? a_norm : 1.0);
            const Matrix qtq = linalg::matmul(linalg::transpose(result.q), result.q);
            rec.orth_err = linalg::frobenius_norm(linalg::sub(qtq, Matrix::identity(qtq.rows())));
        }
    } catch (const decomposition_error& e) {
        rec.skipped = true;
        rec.skip_reason = e.what();
        rec.mean_ms.reset();
        rec.std_ms.reset();
    }

    return {rec};
}

const char* const kCsvHeader =
    "op,impl,d_in,d_out,c_in,c_out,kernel,image,d_model,heads,N,m,l,k,batch,seed,trials,warmup,"
    "mean_ms,std_ms,params_dense,params_sketched,est_mem_bytes,recon_rel_err,orth_err,skipped,"
    "skip_reason";

namespace {

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void put_u64(std::string& row, const std::optional<std::uint64_t>& v) {
    row += ',';
    if (v) row += std::to_string(*v);
}

void put_f(std::string& row, const std::optional<double>& v) {
    row += ',';
    if (v) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.6g", *v);
        row += buf;
    }
}

} // namespace

std::string record_to_csv(const BenchRecord& r) {
    std::string row = csv_quote(r.op) + ',' + csv_quote(r.impl);
    put_u64(row, r.d_in);
    put_u64(row, r.d_out);
    put_u64(row, r.c_in);
    put_u64(row, r.c_out);
    row += ',';
    if (r.kernel) row += csv_quote(*r.kernel);
    put_u64(row, r.image);
    put_u64(row, r.d_model);
    put_u64(row, r.heads);
    put_u64(row, r.n);
    put_u64(row, r.m);
    put_u64(row, r.l);
    put_u64(row, r.k);
    put_u64(row, r.batch);
    put_u64(row, r.seed);
    put_u64(row, r.trials);
    put_u64(row, r.warmup);
    put_f(row, r.mean_ms);
    put_f(row, r.std_ms);
    put_u64(row, r.params_dense);
    put_u64(row, r.params_sketched);
    put_u64(row, r.est_mem_bytes);
    put_f(row, r.recon_rel_err);
    put_f(row, r.orth_err);
    row += ',';
    row += r.skipped ? "true" : "false";
    row += ',';
    row += csv_quote(r.skip_reason);
    return row;
}

void write_csv(const std::vector<BenchRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("write_csv: cannot write " + path);
    out << kCsvHeader << '\n';
    for (const auto& r : records) out << record_to_csv(r) << '\n';
    if (!out) throw std::runtime_error("write_csv: I/O error writing " + path);
}

} // namespace rnla::bench
