#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "boundlab/bounds.hpp"
#include "boundlab/garnet.hpp"

namespace boundlab::harness {

/// State distribution recipe: uniform, point(s), dirichlet(seed), or the
/// exact occupancy of a named policy ("optimal", "uniform" or explicit
/// actions) started from a base distribution.
struct DistributionSpec {
    enum class Kind { uniform, point, dirichlet, occupancy };
    Kind kind = Kind::uniform;
    int state = 0;
    std::uint64_t seed = 0;
    std::string policy = "optimal";
    Actions actions;  ///< used when policy == "actions"
    std::vector<DistributionSpec> base;  ///< zero or one element; uniform when empty
};

/// "uniform", "point:3", "dirichlet:42", "occupancy:optimal", "occupancy:uniform".
DistributionSpec parse_distribution(const std::string& text);
DistributionSpec distribution_from_json(const nlohmann::json& j);
OccupancyWeights resolve(const DistributionSpec& spec, const Mdp& mdp);

/// Policy space recipe; random_hull draws `n_vertices` distinct deterministic
/// vertices per instance.
struct SpaceSpec {
    std::string kind = "full_simplex";
    double delta = 0.0;
    std::vector<Actions> vertices;
    int n_vertices = 3;
};

SpaceSpec space_spec_from_json(const nlohmann::json& j);
PolicySpace resolve(const SpaceSpec& spec, const Mdp& mdp, std::uint64_t seed);

struct InstanceSource {
    std::string kind = "garnet";  ///< garnet | file | counterexample
    int count = 10;
    std::uint64_t seed = 0;
    int states_min = 3;
    int states_max = 6;
    int actions_min = 2;
    int actions_max = 3;
    int branching = 0;  ///< 0: drawn uniformly from [1, n_states]
    double sparsity = 0.0;
    std::vector<double> gammas{0.9};
    std::vector<std::string> files;
    std::vector<int> sizes;  ///< counterexample sizes
};

struct ExperimentConfig {
    InstanceSource instances;
    DistributionSpec mu;
    DistributionSpec nu;
    std::vector<SpaceSpec> spaces{SpaceSpec{}};
    double eps = 1e-6;
    int max_iters = 10000;
    int restarts = 8;
    int pairs = 20;  ///< sampled policy pairs per instance
    int rounds = 3;
    int i_max = 40;
    int j_max = 40;
    double grid_resolution = 0.02;
    int grid_max_states = 5;
    std::uint64_t seed = 0;
    std::string output_dir;  ///< empty: no files written
};

/// Every field except the instance source may be omitted. Relative file paths
/// are resolved against `base_dir`; missing files are a config error.
ExperimentConfig config_from_json(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

struct Instance {
    int index;
    std::uint64_t seed;
    std::string label;
    Mdp mdp;
    int counterexample_n = 0;  ///< > 0 for counterexample instances
};

std::vector<Instance> build_instances(const ExperimentConfig& config);

/// One check on one instance. `gating` checks decide the exit status;
/// diagnostics are reported only.
struct CheckRecord {
    int instance = 0;
    std::uint64_t seed = 0;
    std::string check;
    BoundReport report;
    bool pass = true;
    bool gating = true;
};

struct SuiteResult {
    std::string suite;
    std::vector<CheckRecord> records;  ///< sorted by (instance, emission order)
    std::vector<std::string> tables;   ///< extra CSV documents (compare, reweighting)

    bool passed() const;
    int failures() const;
    /// max lhs over the records of a check, -inf when absent.
    double max_lhs(const std::string& check) const;
    double min_slack(const std::string& check) const;
    std::size_t count(const std::string& check) const;
    bool all_pass(const std::string& check) const;
};

const std::vector<std::string>& suite_names();

/// Runs one suite ("all" runs every suite) over the configured instances.
SuiteResult run_suite(const std::string& suite, const ExperimentConfig& config);

/// reports.json and summary.csv (plus any side tables) under `dir`.
void write_suite(const SuiteResult& result, const std::filesystem::path& dir);
nlohmann::json records_to_json(const SuiteResult& result);
std::string summary_csv(const SuiteResult& result);

struct ReweightRound {
    StochasticPolicy policy;
    OccupancyWeights distribution;  ///< weights the round optimized against
    double loss;                    ///< mu (v_* - v_pi)
    double fw_gap;
};

/// Round 1 optimizes J_{nu0}; round i > 1 optimizes against d_{nu0, pi_{i-1}},
/// warm-started from pi_{i-1}.
std::vector<ReweightRound> reweighting_iteration(const Mdp& mdp, const OccupancyWeights& mu,
                                                 const OccupancyWeights& nu0,
                                                 const PolicySpace& space, double eps, int rounds,
                                                 int max_iters = 10000);

/// Comparison CSV over the configured instances, with LPS on the first space
/// and DPI on the deterministic policies generating it.
std::string compare_lps_dpi(const ExperimentConfig& config, SuiteResult* checks = nullptr);

/// Work-pool width: BOUNDLAB_THREADS when set, else the OpenMP default.
int pool_threads();

}  // namespace boundlab::harness
