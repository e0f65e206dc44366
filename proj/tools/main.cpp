// Command-line driver: benchmark grids over dense vs sketched layers and
// randomized decompositions, sketching-hyperparameter tuning of saved models,
// and model-file inspection.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rnla/bench.hpp"
#include "rnla/decomp.hpp"
#include "rnla/linalg.hpp"
#include "rnla/nn/model.hpp"
#include "rnla/rng.hpp"
#include "rnla/sketch.hpp"
#include "rnla/tuner.hpp"

namespace {

using rnla::Matrix;

std::vector<std::size_t> parse_size_list(const std::string& csv) {
    std::vector<std::size_t> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(static_cast<std::size_t>(std::stoull(item)));
    }
    if (out.empty()) throw CLI::ValidationError("expected a comma-separated list of integers");
    return out;
}

// --- dataset handling for `tune` ---

struct Dataset {
    Matrix x;                // d_in x n_samples, column per sample
    std::vector<int> labels; // n_samples
};

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() < 2) throw std::runtime_error("dataset rows need features plus a label");
        if (!rows.empty() && rows[0].size() != row.size())
            throw std::runtime_error("dataset rows have inconsistent column counts");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("dataset " + path + " is empty");
    const std::size_t d = rows[0].size() - 1;
    Dataset ds;
    ds.x = Matrix(d, rows.size());
    ds.labels.resize(rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j) {
        for (std::size_t i = 0; i < d; ++i) ds.x(i, j) = rows[j][i];
        ds.labels[j] = static_cast<int>(rows[j][d]);
    }
    return ds;
}

double metric_logloss(const Matrix& logits, const std::vector<int>& labels) {
    const std::size_t n = logits.cols();
    double loss = 0.0;
    if (logits.rows() == 1) {
        for (std::size_t j = 0; j < n; ++j) {
            const double z = logits(0, j);
            // log(1+e^-z) evaluated stably
            const double log1pexp = z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
            loss += labels[j] == 1 ? log1pexp : log1pexp + z;
        }
    } else {
        for (std::size_t j = 0; j < n; ++j) {
            double mx = logits(0, j);
            for (std::size_t i = 1; i < logits.rows(); ++i) mx = std::max(mx, logits(i, j));
            double sum = 0.0;
            for (std::size_t i = 0; i < logits.rows(); ++i) sum += std::exp(logits(i, j) - mx);
            loss -= logits(static_cast<std::size_t>(labels[j]), j) - mx - std::log(sum);
        }
    }
    return loss / static_cast<double>(n);
}

double metric_accuracy(const Matrix& logits, const std::vector<int>& labels) {
    const std::size_t n = logits.cols();
    std::size_t hits = 0;
    for (std::size_t j = 0; j < n; ++j) {
        int pred = 0;
        if (logits.rows() == 1) {
            pred = logits(0, j) > 0 ? 1 : 0;
        } else {
            for (std::size_t i = 1; i < logits.rows(); ++i)
                if (logits(i, j) > logits(static_cast<std::size_t>(pred), j))
                    pred = static_cast<int>(i);
        }
        if (pred == labels[j]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(n);
}

double metric_mse(const Matrix& logits, const std::vector<int>& labels) {
    double acc = 0.0;
    for (std::size_t j = 0; j < logits.cols(); ++j) {
        const double diff = logits(0, j) - static_cast<double>(labels[j]);
        acc += diff * diff;
    }
    return acc / static_cast<double>(logits.cols());
}

double eval_metric(const std::string& metric, const rnla::nn::Model& model, const Dataset& ds) {
    const Matrix logits = rnla::nn::model_forward(model, ds.x);
    if (metric == "logloss") return metric_logloss(logits, ds.labels);
    if (metric == "accuracy") return metric_accuracy(logits, ds.labels);
    if (metric == "mse") return metric_mse(logits, ds.labels);
    throw std::runtime_error("unknown metric " + metric);
}

// --- f32 throughput variant of the linear benchmark ---

struct F32Dense {
    std::size_t d_in, d_out;
    std::vector<float> w, b;
};

void f32_gemm(const float* a, const float* b, float* c, std::size_t m, std::size_t k,
              std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        float* crow = c + i * n;
        for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0f;
        const float* arow = a + i * k;
        for (std::size_t kk = 0; kk < k; ++kk) {
            const float av = arow[kk];
            const float* brow = b + kk * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

std::vector<float> to_f32(const Matrix& m) {
    std::vector<float> out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) out[i] = static_cast<float>(m.data()[i]);
    return out;
}

std::vector<rnla::bench::BenchRecord> run_linear_bench_f32(const rnla::bench::LinearGrid& grid) {
    using rnla::bench::BenchRecord;
    std::vector<BenchRecord> records;
    std::uint64_t idx = 0;
    for (std::size_t d_in : grid.d_in) {
        for (std::size_t d_out : grid.d_out) {
            ++idx;
            const std::vector<float> x =
                to_f32(rnla::sketch::gaussian_matrix(d_in, grid.batch, rnla::derive_seed(grid.seed, idx)));
            const std::vector<float> w = to_f32(
                rnla::sketch::gaussian_matrix(d_out, d_in, rnla::derive_seed(grid.seed, idx + 3)));
            std::vector<float> y(d_out * grid.batch);

            BenchRecord dense;
            dense.op = "linear";
            dense.impl = "dense";
            dense.d_in = d_in;
            dense.d_out = d_out;
            dense.batch = grid.batch;
            dense.seed = grid.seed;
            dense.trials = grid.trials;
            dense.warmup = grid.warmup;
            dense.params_dense = static_cast<std::uint64_t>(d_in) * d_out;
            const auto td = rnla::bench::time_op(
                [&] { f32_gemm(w.data(), x.data(), y.data(), d_out, d_in, grid.batch); },
                grid.trials, grid.warmup);
            dense.mean_ms = td.mean_ms;
            dense.std_ms = td.std_ms;
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
                    rec.params_dense = static_cast<std::uint64_t>(d_in) * d_out;
                    rec.params_sketched = rnla::nn::sk_stored_coeffs(l, k, d_in, d_out);
                    if (rnla::nn::exceeds_dense(l, k, d_in, d_out)) {
                        rec.skipped = true;
                        rec.skip_reason = "exceeds dense size";
                        records.push_back(std::move(rec));
                        continue;
                    }
                    const rnla::nn::SkLinear layer = rnla::nn::sk_linear_fresh(
                        d_in, d_out, l, k, rnla::derive_seed(grid.seed, (idx << 16) ^ (l << 10) ^ k));
                    std::vector<std::vector<float>> s1t(l), u1(l), s2(l), u2(l);
                    for (std::size_t i = 0; i < l; ++i) {
                        s1t[i] = to_f32(rnla::linalg::transpose(layer.terms[i].s1.realized()));
                        u1[i] = to_f32(layer.terms[i].u1);
                        s2[i] = to_f32(layer.terms[i].s2.realized());
                        u2[i] = to_f32(layer.terms[i].u2);
                    }
                    std::vector<float> t1(k * grid.batch), t2(k * grid.batch),
                        out1(d_out * grid.batch), out2(d_out * grid.batch);
                    const auto ts = rnla::bench::time_op(
                        [&] {
                            for (std::size_t i = 0; i < l; ++i) {
                                f32_gemm(u1[i].data(), x.data(), t1.data(), k, d_in, grid.batch);
                                f32_gemm(s1t[i].data(), t1.data(), out1.data(), d_out, k, grid.batch);
                                f32_gemm(s2[i].data(), x.data(), t2.data(), k, d_in, grid.batch);
                                f32_gemm(u2[i].data(), t2.data(), out2.data(), d_out, k, grid.batch);
                            }
                        },
                        grid.trials, grid.warmup);
                    rec.mean_ms = ts.mean_ms;
                    rec.std_ms = ts.std_ms;
                    records.push_back(std::move(rec));
                }
            }
        }
    }
    return records;
}

rnla::tuner::Selector parse_selector(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw CLI::ValidationError("--select expects type:..., pattern:... or names:...");
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    if (kind == "type") return rnla::tuner::ByType{rnla::nn::layer_type_from_name(rest)};
    if (kind == "pattern") return rnla::tuner::ByPattern{rest};
    if (kind == "names") {
        rnla::tuner::ByNames names;
        std::stringstream ss(rest);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) names.names.push_back(item);
        return names;
    }
    throw CLI::ValidationError("--select expects type:..., pattern:... or names:...");
}

rnla::tuner::ParamSpace parse_params(const std::string& spec) {
    if (spec == "auto") return rnla::tuner::AutoParams{};
    std::vector<rnla::tuner::LkPair> pairs;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw CLI::ValidationError("--params expects 'auto' or a list like 1:8,2:16");
        pairs.push_back({static_cast<std::size_t>(std::stoull(item.substr(0, colon))),
                         static_cast<std::size_t>(std::stoull(item.substr(colon + 1)))});
    }
    if (pairs.empty()) throw CLI::ValidationError("--params list is empty");
    return pairs;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized numerical linear algebra benchmarks, sketched-layer tuning, and model tools"};
    app.require_subcommand(1);

    int threads = 1;
    app.add_option("--threads", threads, "worker threads inside timed regions")
        ->capture_default_str();

    // --- bench ---
    CLI::App* bench = app.add_subcommand("bench", "run a benchmark grid and write CSV records");
    bench->require_subcommand(1);

    std::string din_csv = "1024", dout_csv = "1024", l_csv = "1", k_csv = "16";
    std::size_t batch = 8, trials = rnla::bench::kDefaultTrials, warmup = rnla::bench::kDefaultWarmup;
    std::uint64_t seed = 42;
    std::string out_path = "bench.csv";
    bool f32 = false;

    CLI::App* lin = bench->add_subcommand("linear", "dense vs sketched linear forward");
    lin->add_option("--din", din_csv, "input feature sizes")->capture_default_str();
    lin->add_option("--dout", dout_csv, "output feature sizes")->capture_default_str();
    lin->add_option("--l", l_csv, "number of sketch terms")->capture_default_str();
    lin->add_option("--k", k_csv, "sketch ranks")->capture_default_str();
    lin->add_option("--batch", batch, "input columns per forward")->capture_default_str();
    lin->add_option("--trials", trials, "timed repetitions per record")->capture_default_str();
    lin->add_option("--warmup", warmup, "discarded warmup repetitions")->capture_default_str();
    lin->add_option("--seed", seed, "master seed")->capture_default_str();
    lin->add_option("--out", out_path, "output CSV path")->capture_default_str();
    lin->add_flag("--f32", f32, "time in float32 (throughput experiments only)");

    std::string cin_csv = "64", cout_csv = "64", kernel_csv = "3", image_csv = "32";
    CLI::App* conv = bench->add_subcommand("conv", "dense vs sketched conv2d forward");
    conv->add_option("--cin", cin_csv, "input channel counts")->capture_default_str();
    conv->add_option("--cout", cout_csv, "output channel counts")->capture_default_str();
    conv->add_option("--kernel", kernel_csv, "square kernel sizes")->capture_default_str();
    conv->add_option("--image", image_csv, "square image sizes")->capture_default_str();
    conv->add_option("--l", l_csv, "number of sketch terms")->capture_default_str();
    conv->add_option("--k", k_csv, "sketch ranks")->capture_default_str();
    conv->add_option("--batch", batch, "images per forward")->capture_default_str();
    conv->add_option("--trials", trials, "timed repetitions per record")->capture_default_str();
    conv->add_option("--warmup", warmup, "discarded warmup repetitions")->capture_default_str();
    conv->add_option("--seed", seed, "master seed")->capture_default_str();
    conv->add_option("--out", out_path, "output CSV path")->capture_default_str();

    std::string dmodel_csv = "128", heads_csv = "4", features_csv = "64", seqlen_csv = "256";
    std::string att_kernel_csv = "softmax";
    std::uint64_t mem_budget = std::uint64_t{2} << 30;
    CLI::App* att = bench->add_subcommand("attention", "exact vs random-feature attention");
    att->add_option("--dmodel", dmodel_csv, "embedding dimensions")->capture_default_str();
    att->add_option("--heads", heads_csv, "head counts")->capture_default_str();
    att->add_option("--features", features_csv, "random feature counts")->capture_default_str();
    att->add_option("--kernel", att_kernel_csv, "feature kernels (softmax,relu)")->capture_default_str();
    att->add_option("--seqlen", seqlen_csv, "sequence lengths")->capture_default_str();
    att->add_option("--mem-budget", mem_budget, "skip exact rows above this many bytes")
        ->capture_default_str();
    att->add_option("--trials", trials, "timed repetitions per record")->capture_default_str();
    att->add_option("--warmup", warmup, "discarded warmup repetitions")->capture_default_str();
    att->add_option("--seed", seed, "master seed")->capture_default_str();
    att->add_option("--out", out_path, "output CSV path")->capture_default_str();

    std::string decomp_kind = "rsvd";
    std::size_t rows = 1000, cols = 50, rank = 5, oversample = 8, power_iters = 1;
    double gamma = 4.0, rank_tol = 1e-10;
    CLI::App* dec = bench->add_subcommand("decomp", "randomized decomposition timing and residuals");
    dec->add_option("--kind", decomp_kind, "rsvd or cqrrpt")->capture_default_str();
    dec->add_option("--rows", rows, "matrix rows")->capture_default_str();
    dec->add_option("--cols", cols, "matrix cols")->capture_default_str();
    dec->add_option("--rank", rank, "rsvd target rank")->capture_default_str();
    dec->add_option("--oversample", oversample, "rsvd oversampling")->capture_default_str();
    dec->add_option("--power-iters", power_iters, "rsvd power iterations")->capture_default_str();
    dec->add_option("--gamma", gamma, "cqrrpt sketch ratio")->capture_default_str();
    dec->add_option("--rank-tol", rank_tol, "relative rank threshold")->capture_default_str();
    std::size_t synth_rank = 0;
    dec->add_option("--synth-rank", synth_rank, "use an exact-rank synthetic input (0 = dense random)")
        ->capture_default_str();
    dec->add_option("--trials", trials, "timed repetitions per record")->capture_default_str();
    dec->add_option("--warmup", warmup, "discarded warmup repetitions")->capture_default_str();
    dec->add_option("--seed", seed, "master seed")->capture_default_str();
    dec->add_option("--out", out_path, "output CSV path")->capture_default_str();

    // --- tune ---
    std::string model_path, select_spec = "type:Linear", params_spec = "auto";
    std::string data_path, metric = "logloss", objective = "params";
    std::string out_model, report_path;
    double threshold = 0.0;
    bool higher_is_better = false, use_grid = false, joint = false, no_copy_weights = false;
    bool maximize_objective = false;
    std::size_t n_trials = 10;

    CLI::App* tune = app.add_subcommand("tune", "search sketching hyperparameters for a saved model");
    tune->add_option("--model", model_path, "model manifest path")->required();
    tune->add_option("--select", select_spec, "layer selector: type:NAME | pattern:RE | names:a,b")
        ->capture_default_str();
    tune->add_option("--params", params_spec, "'auto' or explicit l:k list")->capture_default_str();
    tune->add_option("--data", data_path, "evaluation dataset CSV (features...,label)")->required();
    tune->add_option("--metric", metric, "accuracy metric: logloss | mse | accuracy")
        ->capture_default_str();
    tune->add_option("--threshold", threshold, "accuracy constraint")->required();
    tune->add_flag("--higher-is-better", higher_is_better, "threshold is a lower bound");
    tune->add_option("--objective", objective, "objective: params | latency | loss")
        ->capture_default_str();
    tune->add_flag("--maximize-objective", maximize_objective, "maximize instead of minimize");
    tune->add_option("--n-trials", n_trials, "random-search trials per layer")->capture_default_str();
    tune->add_flag("--grid", use_grid, "exhaustive grid instead of random search");
    tune->add_flag("--joint", joint, "one joint search over all matched layers");
    tune->add_flag("--no-copy-weights", no_copy_weights, "fresh init instead of copying weights");
    tune->add_option("--seed", seed, "master seed")->capture_default_str();
    tune->add_option("--out-model", out_model, "path for the optimized model");
    tune->add_option("--report", report_path, "trial report CSV path");

    // --- model ---
    CLI::App* model_cmd = app.add_subcommand("model", "model file utilities");
    std::string inspect_path;
    CLI::App* inspect = model_cmd->add_subcommand("inspect", "print a model manifest");
    inspect->add_option("path", inspect_path, "model manifest path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        rnla::bench::set_timing_threads(threads);

        if (lin->parsed()) {
            rnla::bench::LinearGrid grid;
            grid.d_in = parse_size_list(din_csv);
            grid.d_out = parse_size_list(dout_csv);
            grid.num_terms = parse_size_list(l_csv);
            grid.low_rank = parse_size_list(k_csv);
            grid.batch = batch;
            grid.trials = trials;
            grid.warmup = warmup;
            grid.seed = seed;
            const auto records =
                f32 ? run_linear_bench_f32(grid) : rnla::bench::run_linear_bench(grid);
            rnla::bench::write_csv(records, out_path);
            std::cout << records.size() << " records -> " << out_path << "\n";
        } else if (conv->parsed()) {
            rnla::bench::ConvGrid grid;
            grid.c_in = parse_size_list(cin_csv);
            grid.c_out = parse_size_list(cout_csv);
            grid.kernels = parse_size_list(kernel_csv);
            grid.images = parse_size_list(image_csv);
            grid.num_terms = parse_size_list(l_csv);
            grid.low_rank = parse_size_list(k_csv);
            grid.batch = batch;
            grid.trials = trials;
            grid.warmup = warmup;
            grid.seed = seed;
            const auto records = rnla::bench::run_conv_bench(grid);
            rnla::bench::write_csv(records, out_path);
            std::cout << records.size() << " records -> " << out_path << "\n";
        } else if (att->parsed()) {
            rnla::bench::AttentionGrid grid;
            grid.d_model = parse_size_list(dmodel_csv);
            grid.heads = parse_size_list(heads_csv);
            grid.features = parse_size_list(features_csv);
            grid.seq_lens = parse_size_list(seqlen_csv);
            {
                std::stringstream ss(att_kernel_csv);
                std::string item;
                while (std::getline(ss, item, ','))
                    if (!item.empty()) grid.kernels.push_back(rnla::nn::kernel_from_name(item));
            }
            grid.mem_budget_bytes = mem_budget;
            grid.trials = trials;
            grid.warmup = warmup;
            grid.seed = seed;
            const auto records = rnla::bench::run_attention_bench(grid);
            rnla::bench::write_csv(records, out_path);
            std::cout << records.size() << " records -> " << out_path << "\n";
        } else if (dec->parsed()) {
            rnla::bench::DecompSpec spec;
            spec.kind = decomp_kind;
            spec.rows = rows;
            spec.cols = cols;
            spec.rank = rank;
            spec.oversample = oversample;
            spec.power_iters = power_iters;
            spec.gamma = gamma;
            spec.rank_tol = rank_tol;
            spec.synth_rank = synth_rank;
            spec.trials = trials;
            spec.warmup = warmup;
            spec.seed = seed;
            const auto records = rnla::bench::run_decomp_bench(spec);
            rnla::bench::write_csv(records, out_path);
            std::cout << records.size() << " records -> " << out_path << "\n";
        } else if (tune->parsed()) {
            const rnla::nn::Model model = rnla::nn::model_load(model_path);
            const Dataset ds = load_dataset(data_path);

            rnla::tuner::LayerConfig config;
            config.selector = parse_selector(select_spec);
            config.params = parse_params(params_spec);
            config.separate = !joint;
            config.copy_weights = !no_copy_weights;

            rnla::tuner::TuneOptions options;
            options.threshold = threshold;
            options.higher_is_better = higher_is_better;
            options.minimize_objective = !maximize_objective;
            options.master_seed = seed;
            if (use_grid) options.algo = rnla::tuner::Grid{};
            else options.algo = rnla::tuner::Random{n_trials, seed};

            const auto accuracy_eval = [&](const rnla::nn::Model& m) {
                return eval_metric(metric, m, ds);
            };
            const rnla::tuner::EvalFn objective_eval = [&](const rnla::nn::Model& m) -> double {
                if (objective == "params")
                    return static_cast<double>(rnla::nn::model_params(m).total_stored);
                if (objective == "loss") return eval_metric(metric, m, ds);
                if (objective == "latency") {
                    Matrix sink;
                    const auto t = rnla::bench::time_op(
                        [&] { sink = rnla::nn::model_forward(m, ds.x); }, 5, 1);
                    return t.mean_ms;
                }
                throw std::runtime_error("unknown objective " + objective);
            };

            const double baseline = eval_metric(metric, model, ds);
            const auto result =
                rnla::tuner::tune(model, {config}, accuracy_eval, objective_eval, options);
            for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
            if (!report_path.empty()) rnla::tuner::write_report_csv(result.trials, report_path);

            const rnla::tuner::Assignment best =
                config.separate
                    ? rnla::tuner::best_params_per_layer(result.trials, options.minimize_objective)
                    : rnla::tuner::best_params(result.trials, options.minimize_objective);
            const rnla::nn::Model optimized =
                rnla::tuner::apply_best_params(model, best, config.copy_weights);
            if (!out_model.empty()) rnla::nn::model_save(optimized, out_model);

            const auto before = rnla::nn::model_params(model);
            const auto after = rnla::nn::model_params(optimized);
            std::cout << "trials: " << result.trials.size() << "\n";
            std::cout << "baseline " << metric << ": " << baseline << "\n";
            std::cout << "optimized " << metric << ": " << eval_metric(metric, optimized, ds) << "\n";
            std::cout << "total_stored: " << before.total_stored << " -> " << after.total_stored
                      << "\n";
            for (const auto& e : best)
                std::cout << "  " << e.layer << ": l=" << e.l << " k=" << e.k << "\n";
            if (!out_model.empty()) std::cout << "saved " << out_model << "\n";
        } else if (inspect->parsed()) {
            const rnla::nn::Model model = rnla::nn::model_load(inspect_path);
            std::cout << rnla::nn::model_manifest_json(model) << "\n";
        }
    } catch (const rnla::parameter_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const rnla::shape_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
