// Compares the OpenMP matmul kernel against the serial triple-loop reference:
// runtime side by side plus a bitwise equality check (the parallel kernel must
// reproduce the serial result exactly).

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rnla/bench.hpp"
#include "rnla/linalg.hpp"
#include "rnla/sketch.hpp"

int main(int argc, char** argv) {
    std::vector<std::size_t> sizes = {128, 256, 512};
    std::size_t trials = 5, warmup = 1;
    int threads = 0; // 0 = OpenMP default

    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        auto next = [&]() -> const char* {
            if (i + 1 >= argc) {
                std::fprintf(stderr, "missing value for %s\n", arg.c_str());
                std::exit(1);
            }
            return argv[++i];
        };
        if (arg == "--sizes") {
            sizes.clear();
            std::string csv = next();
            std::size_t pos = 0;
            while (pos < csv.size()) {
                std::size_t comma = csv.find(',', pos);
                if (comma == std::string::npos) comma = csv.size();
                sizes.push_back(std::stoull(csv.substr(pos, comma - pos)));
                pos = comma + 1;
            }
        } else if (arg == "--trials") {
            trials = std::stoull(next());
        } else if (arg == "--warmup") {
            warmup = std::stoull(next());
        } else if (arg == "--threads") {
            threads = std::stoi(next());
        } else {
            std::fprintf(stderr, "usage: kernel-bench [--sizes n,n,...] [--trials n] [--warmup n] [--threads n]\n");
            return arg == "--help" || arg == "-h" ? 0 : 1;
        }
    }

#ifdef _OPENMP
    const int max_threads = threads > 0 ? threads : omp_get_max_threads();
#else
    const int max_threads = 1;
#endif

    std::printf("%8s %12s %12s %9s %10s\n", "n", "serial_ms", "parallel_ms", "speedup", "bit_equal");
    for (std::size_t n : sizes) {
        const rnla::Matrix a = rnla::sketch::gaussian_matrix(n, n, 1234 + n);
        const rnla::Matrix b = rnla::sketch::gaussian_matrix(n, n, 5678 + n);

        rnla::Matrix out_serial, out_parallel;
        rnla::bench::set_timing_threads(1);
        const auto ts = rnla::bench::time_op(
            [&] { out_serial = rnla::linalg::matmul_serial(a, b); }, trials, warmup);
        rnla::bench::set_timing_threads(max_threads);
        const auto tp =
            rnla::bench::time_op([&] { out_parallel = rnla::linalg::matmul(a, b); }, trials, warmup);

        const bool equal = std::memcmp(out_serial.data(), out_parallel.data(),
                                       out_serial.size() * sizeof(double)) == 0;
        std::printf("%8zu %12.3f %12.3f %8.2fx %10s\n", n, ts.mean_ms, tp.mean_ms,
                    ts.mean_ms / tp.mean_ms, equal ? "yes" : "NO");
        if (!equal) return 2;
    }
    return 0;
}
