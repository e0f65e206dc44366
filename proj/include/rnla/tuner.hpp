#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "rnla/nn/model.hpp"

namespace rnla::tuner {

struct ByType {
    nn::LayerType type;
};
struct ByNames {
    std::vector<std::string> names;
};
// Anchored regular expression over the dotted layer path (full match).
struct ByPattern {
    std::string pattern;
};
using Selector = std::variant<ByType, ByNames, ByPattern>;

struct LkPair {
    std::size_t l = 1;
    std::size_t k = 1;
};

struct AutoParams {};
using ParamSpace = std::variant<AutoParams, std::vector<LkPair>>;

struct LayerConfig {
    Selector selector;
    ParamSpace params = AutoParams{};
    bool separate = true;    // search each matched layer independently
    bool copy_weights = true;
};

// One layer replacement: (l, k) plus the sketch seed the trial used, so the
// winning candidate can be rebuilt bit-identically.
struct AssignmentEntry {
    std::string layer;
    std::size_t l = 0;
    std::size_t k = 0;
    std::uint64_t seed = 0;
};
using Assignment = std::vector<AssignmentEntry>;

struct TrialResult {
    Assignment assignment;
    double accuracy = 0.0;
    double objective = 0.0;
    bool satisfied = false;
    std::size_t trial_index = 0;
    bool failed = false;     // a callback threw; excluded from best
    std::string error;
    std::uint64_t total_stored = 0; // stored coefficients of the replaced layers
    double wall_ms = 0.0;
};

struct Grid {};
struct Random {
    std::size_t n_trials = 10;
    std::uint64_t seed = 0;
};
using SearchAlgorithm = std::variant<Grid, Random>;

using EvalFn = std::function<double(const nn::Model&)>;

struct TuneOptions {
    double threshold = 0.0;
    bool higher_is_better = false;
    bool minimize_objective = true;
    SearchAlgorithm algo = Grid{};
    std::uint64_t master_seed = 0;
    // Trials run concurrently only when the caller declares the callbacks
    // thread-safe; results are ordered by trial_index either way.
    bool callbacks_thread_safe = false;
};

struct TuneOutput {
    std::vector<TrialResult> trials;
    std::vector<std::string> warnings; // e.g. unsketchable layers that were skipped
};

// Matched layer names, deterministic, in model order. Zero matches raise
// selection_error naming the selector.
std::vector<std::string> match_layers(const nn::Model& model, const LayerConfig& config);

// l in {1,2,3} x k in {8,...,512}, filtered by the skip rule (admit at
// equality), ordered by stored size ascending. Empty result = unsketchable.
std::vector<LkPair> auto_search_space(const nn::LayerVariant& layer);

// Joint Grid spaces larger than this are sampled instead of enumerated.
inline constexpr std::size_t kGridEnumerationLimit = 10000;

TuneOutput tune(const nn::Model& model, const std::vector<LayerConfig>& configs,
                const EvalFn& accuracy_eval, const EvalFn& objective_eval,
                const TuneOptions& options);

// Best single trial among satisfied ones: extreme objective, ties broken by
// smaller total_stored, then lower trial_index. Throws
// no_feasible_config_error when nothing satisfied.
Assignment best_params(const std::vector<TrialResult>& trials, bool minimize_objective);

// Union of each layer's best satisfied trial (the separate=true composition).
Assignment best_params_per_layer(const std::vector<TrialResult>& trials, bool minimize_objective);

// New model with the assigned layers replaced by sketched equivalents; the
// input model is untouched, unassigned layers are copied verbatim.
nn::Model apply_best_params(const nn::Model& model, const Assignment& assignment,
                            bool copy_weights);

// Report CSV: trial_index,layer,l,k,accuracy,objective,satisfied,total_stored,wall_ms.
void write_report_csv(const std::vector<TrialResult>& trials, const std::string& path);

} // namespace rnla::tuner
