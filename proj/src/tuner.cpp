#include "rnla/tuner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <regex>

#include "rnla/rng.hpp"

namespace rnla::tuner {

using nn::LayerType;
using nn::LayerVariant;
using nn::Model;

std::vector<std::string> match_layers(const Model& model, const LayerConfig& config) {
    if (model.layers.empty()) throw selection_error("match_layers: model is empty");
    std::vector<std::string> out;
    if (const auto* by_type = std::get_if<ByType>(&config.selector)) {
        for (const auto& nl : model.layers)
            if (nn::layer_type(nl.layer) == by_type->type) out.push_back(nl.name);
        if (out.empty())
            throw selection_error("match_layers: no layer of type " +
                                  nn::layer_type_name(by_type->type));
    } else if (const auto* by_names = std::get_if<ByNames>(&config.selector)) {
        for (const auto& name : by_names->names)
            if (!model.find(name))
                throw selection_error("match_layers: no layer named '" + name + "'");
        for (const auto& nl : model.layers)
            if (std::find(by_names->names.begin(), by_names->names.end(), nl.name) !=
                by_names->names.end())
                out.push_back(nl.name);
        if (out.empty()) throw selection_error("match_layers: empty name list");
    } else {
        const auto& by_pattern = std::get<ByPattern>(config.selector);
        const std::regex re(by_pattern.pattern);
        for (const auto& nl : model.layers)
            if (std::regex_match(nl.name, re)) out.push_back(nl.name);
        if (out.empty())
            throw selection_error("match_layers: pattern '" + by_pattern.pattern +
                                  "' matched nothing");
    }
    return out;
}

namespace {

// Dense dimensions a sketched replacement would see; 0/0 when the layer type
// cannot be sketched.
std::pair<std::size_t, std::size_t> sketchable_dims(const LayerVariant& layer) {
    if (const auto* d = std::get_if<nn::DenseLinear>(&layer)) return {d->d_in(), d->d_out()};
    if (const auto* c = std::get_if<nn::DenseConv2d>(&layer))
        return {c->shape.lowered_d_in(), c->shape.c_out};
    return {0, 0};
}

} // namespace

std::vector<LkPair> auto_search_space(const LayerVariant& layer) {
    const auto [d_in, d_out] = sketchable_dims(layer);
    if (d_in == 0)
        throw parameter_error("auto_search_space: layer is not a dense linear or conv layer");
    std::vector<LkPair> space;
    for (std::size_t l : {1, 2, 3})
        for (std::size_t k : {8, 16, 32, 64, 128, 256, 512})
            if (!nn::exceeds_dense(l, k, d_in, d_out)) space.push_back({l, k});
    std::sort(space.begin(), space.end(), [&](const LkPair& a, const LkPair& b) {
        const auto sa = nn::sk_stored_coeffs(a.l, a.k, d_in, d_out);
        const auto sb = nn::sk_stored_coeffs(b.l, b.k, d_in, d_out);
        if (sa != sb) return sa < sb;
        if (a.l != b.l) return a.l < b.l;
        return a.k < b.k;
    });
    return space;
}

namespace {

LayerVariant make_sketched(const LayerVariant& dense, std::size_t l, std::size_t k,
                           std::uint64_t seed, bool copy_weights) {
    if (const auto* d = std::get_if<nn::DenseLinear>(&dense)) {
        if (copy_weights) return nn::sk_linear_from_dense(d->w, d->b, l, k, seed);
        return nn::sk_linear_fresh(d->d_in(), d->d_out(), l, k, seed);
    }
    if (const auto* c = std::get_if<nn::DenseConv2d>(&dense)) {
        if (copy_weights) return nn::sk_conv2d_from_dense(*c, l, k, seed);
        return nn::sk_conv2d_fresh(c->shape, l, k, seed);
    }
    throw application_error("layer cannot be sketched (not dense linear/conv)");
}

std::uint64_t stored_after_sketch(const LayerVariant& dense, std::size_t l, std::size_t k) {
    const auto [d_in, d_out] = sketchable_dims(dense);
    return nn::sk_stored_coeffs(l, k, d_in, d_out) + d_out;
}

struct TrialSpec {
    Assignment assignment;
    bool copy_weights = true;
    std::size_t trial_index = 0;
};

Model build_candidate(const Model& base, const Assignment& assignment, bool copy_weights) {
    Model candidate = base;
    for (const auto& entry : assignment) {
        nn::NamedLayer* nl = candidate.find(entry.layer);
        nl->layer = make_sketched(nl->layer, entry.l, entry.k, entry.seed, copy_weights);
    }
    return candidate;
}

void run_trial(const Model& base, const TrialSpec& spec, const EvalFn& accuracy_eval,
               const EvalFn& objective_eval, const TuneOptions& options, TrialResult& out) {
    out.assignment = spec.assignment;
    out.trial_index = spec.trial_index;
    for (const auto& entry : spec.assignment)
        out.total_stored += stored_after_sketch(base.find(entry.layer)->layer, entry.l, entry.k);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const Model candidate = build_candidate(base, spec.assignment, spec.copy_weights);
        out.accuracy = accuracy_eval(candidate);
        out.objective = objective_eval(candidate);
        out.satisfied = options.higher_is_better ? out.accuracy >= options.threshold
                                                 : out.accuracy <= options.threshold;
    } catch (const std::exception& e) {
        out.failed = true;
        out.error = e.what();
        out.satisfied = false;
    }
    out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
}

} // namespace

TuneOutput tune(const Model& model, const std::vector<LayerConfig>& configs,
                const EvalFn& accuracy_eval, const EvalFn& objective_eval,
                const TuneOptions& options) {
    TuneOutput out;
    std::vector<TrialSpec> specs;
    std::size_t next_index = 0;

    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
        const LayerConfig& config = configs[ci];
        const std::vector<std::string> names = match_layers(model, config);

        std::vector<std::string> usable;
        std::vector<std::vector<LkPair>> spaces;
        for (const auto& name : names) {
            const LayerVariant& layer = model.find(name)->layer;
            std::vector<LkPair> space;
            if (std::holds_alternative<AutoParams>(config.params)) {
                space = auto_search_space(layer);
                if (space.empty()) {
                    out.warnings.push_back("layer '" + name +
                                           "' is unsketchable (every (l,k) exceeds dense size); skipped");
                    continue;
                }
            } else {
                space = std::get<std::vector<LkPair>>(config.params);
                if (space.empty()) {
                    out.warnings.push_back("layer '" + name + "' has an empty candidate list; skipped");
                    continue;
                }
            }
            usable.push_back(name);
            spaces.push_back(std::move(space));
        }
        if (usable.empty()) continue;

        auto replacement_seed = [&](std::size_t trial, std::size_t layer_ordinal) {
            return derive_seed(options.master_seed, (ci << 40) ^ (trial << 8) ^ layer_ordinal);
        };

        if (config.separate) {
            for (std::size_t li = 0; li < usable.size(); ++li) {
                const auto& space = spaces[li];
                auto add_spec = [&](const LkPair& lk) {
                    TrialSpec spec;
                    spec.copy_weights = config.copy_weights;
                    spec.trial_index = next_index++;
                    spec.assignment = {
                        {usable[li], lk.l, lk.k, replacement_seed(spec.trial_index, li)}};
                    specs.push_back(std::move(spec));
                };
                if (std::holds_alternative<Grid>(options.algo)) {
                    for (const LkPair& lk : space) add_spec(lk);
                } else {
                    const auto& random = std::get<Random>(options.algo);
                    Splitmix64 rng(derive_seed(random.seed, (ci << 20) ^ li));
                    for (std::size_t t = 0; t < random.n_trials; ++t)
                        add_spec(space[rng.next_below(space.size())]);
                }
            }
        } else {
            auto add_joint_spec = [&](const std::vector<std::size_t>& point) {
                TrialSpec spec;
                spec.copy_weights = config.copy_weights;
                spec.trial_index = next_index++;
                for (std::size_t li = 0; li < usable.size(); ++li) {
                    const LkPair lk = spaces[li][point[li]];
                    spec.assignment.push_back(
                        {usable[li], lk.l, lk.k, replacement_seed(spec.trial_index, li)});
                }
                specs.push_back(std::move(spec));
            };

            std::size_t total = 1;
            bool overflow = false;
            for (const auto& space : spaces) {
                if (total > kGridEnumerationLimit / space.size() + 1) overflow = true;
                total *= space.size();
                if (total > kGridEnumerationLimit) overflow = true;
            }

            if (std::holds_alternative<Grid>(options.algo) && !overflow) {
                std::vector<std::size_t> point(usable.size(), 0);
                bool done = false;
                while (!done) {
                    add_joint_spec(point);
                    std::size_t pos = usable.size();
                    done = true;
                    while (pos-- > 0) {
                        if (++point[pos] < spaces[pos].size()) {
                            done = false;
                            break;
                        }
                        point[pos] = 0;
                    }
                }
            } else {
                // Either the caller asked for Random, or the joint grid is too
                // large to enumerate and is sampled instead.
                std::size_t n_trials;
                std::uint64_t sample_seed;
                if (const auto* random = std::get_if<Random>(&options.algo)) {
                    n_trials = random->n_trials;
                    sample_seed = random->seed;
                } else {
                    n_trials = kGridEnumerationLimit;
                    sample_seed = derive_seed(options.master_seed, 0x9d1dULL ^ ci);
                    out.warnings.push_back("joint grid has more than " +
                                           std::to_string(kGridEnumerationLimit) +
                                           " points; sampling instead");
                }
                Splitmix64 rng(sample_seed);
                std::vector<std::size_t> point(usable.size());
                for (std::size_t t = 0; t < n_trials; ++t) {
                    for (std::size_t li = 0; li < usable.size(); ++li)
                        point[li] = rng.next_below(spaces[li].size());
                    add_joint_spec(point);
                }
            }
        }
    }

    out.trials.resize(specs.size());
    if (options.callbacks_thread_safe) {
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(specs.size()); ++i)
            run_trial(model, specs[i], accuracy_eval, objective_eval, options, out.trials[i]);
    } else {
        for (std::size_t i = 0; i < specs.size(); ++i)
            run_trial(model, specs[i], accuracy_eval, objective_eval, options, out.trials[i]);
    }
    return out;
}

namespace {

bool better_trial(const TrialResult& a, const TrialResult& b, bool minimize_objective) {
    if (a.objective != b.objective)
        return minimize_objective ? a.objective < b.objective : a.objective > b.objective;
    if (a.total_stored != b.total_stored) return a.total_stored < b.total_stored;
    return a.trial_index < b.trial_index;
}

} // namespace

Assignment best_params(const std::vector<TrialResult>& trials, bool minimize_objective) {
    const TrialResult* best = nullptr;
    for (const auto& t : trials) {
        if (t.failed || !t.satisfied) continue;
        if (!best || better_trial(t, *best, minimize_objective)) best = &t;
    }
    if (!best)
        throw no_feasible_config_error("best_params: no trial satisfied the accuracy threshold");
    return best->assignment;
}

Assignment best_params_per_layer(const std::vector<TrialResult>& trials, bool minimize_objective) {
    // Keyed by the joined layer names of the assignment; for separate-mode
    // results that is the single layer each trial touched.
    std::vector<std::pair<std::string, const TrialResult*>> groups;
    for (const auto& t : trials) {
        if (t.failed || !t.satisfied) continue;
        std::string key;
        for (const auto& e : t.assignment) key += e.layer + ";";
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return g.first == key; });
        if (it == groups.end()) groups.emplace_back(key, &t);
        else if (better_trial(t, *it->second, minimize_objective)) it->second = &t;
    }
    if (groups.empty())
        throw no_feasible_config_error(
            "best_params_per_layer: no trial satisfied the accuracy threshold");
    Assignment combined;
    for (const auto& [key, trial] : groups)
        for (const auto& e : trial->assignment) combined.push_back(e);
    return combined;
}

nn::Model apply_best_params(const Model& model, const Assignment& assignment, bool copy_weights) {
    Model out = model;
    for (const auto& entry : assignment) {
        nn::NamedLayer* nl = out.find(entry.layer);
        if (!nl) throw application_error("apply_best_params: no layer named '" + entry.layer + "'");
        const LayerType t = nn::layer_type(nl->layer);
        if (t == LayerType::SkLinear || t == LayerType::SkConv2d)
            throw application_error("apply_best_params: layer '" + entry.layer +
                                    "' is already sketched");
        nl->layer = make_sketched(nl->layer, entry.l, entry.k, entry.seed, copy_weights);
    }
    return out;
}

void write_report_csv(const std::vector<TrialResult>& trials, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("write_report_csv: cannot write " + path);
    out << "trial_index,layer,l,k,accuracy,objective,satisfied,total_stored,wall_ms\n";
    char buf[64];
    for (const auto& t : trials) {
        for (const auto& e : t.assignment) {
            out << t.trial_index << ',' << e.layer << ',' << e.l << ',' << e.k << ',';
            if (!t.failed) {
                std::snprintf(buf, sizeof buf, "%.10g", t.accuracy);
                out << buf;
            }
            out << ',';
            if (!t.failed) {
                std::snprintf(buf, sizeof buf, "%.10g", t.objective);
                out << buf;
            }
            out << ',' << (t.satisfied ? "true" : "false") << ',' << t.total_stored << ',';
            std::snprintf(buf, sizeof buf, "%.6g", t.wall_ms);
            out << buf << '\n';
        }
    }
}

} // namespace rnla::tuner
