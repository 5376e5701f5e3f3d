#include <cstdlib>
#include <random>
#include <set>

#include "boundlab/errors.hpp"
#include "boundlab/harness.hpp"
#include "boundlab/io.hpp"
#include "harness_internal.hpp"

namespace boundlab::harness {

using nlohmann::json;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    // splitmix64 finalizer
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

DistributionSpec parse_distribution(const std::string& text) {
    DistributionSpec d;
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string tail = colon == std::string::npos ? "" : text.substr(colon + 1);
    auto need_tail = [&] {
        if (tail.empty()) throw InvalidArgument("distribution '" + text + "' needs an argument");
    };
    try {
        if (head == "uniform") {
            d.kind = DistributionSpec::Kind::uniform;
        } else if (head == "point") {
            need_tail();
            d.kind = DistributionSpec::Kind::point;
            d.state = std::stoi(tail);
        } else if (head == "dirichlet") {
            need_tail();
            d.kind = DistributionSpec::Kind::dirichlet;
            d.seed = std::stoull(tail);
        } else if (head == "occupancy") {
            d.kind = DistributionSpec::Kind::occupancy;
            d.policy = tail.empty() ? "optimal" : tail;
            if (d.policy != "optimal" && d.policy != "uniform")
                throw InvalidArgument("occupancy policy must be optimal or uniform");
        } else {
            throw InvalidArgument("unknown distribution '" + text + "'");
        }
    } catch (const std::logic_error& e) {
        if (dynamic_cast<const InvalidArgument*>(&e)) throw;
        throw InvalidArgument("malformed distribution '" + text + "'");
    }
    return d;
}

DistributionSpec distribution_from_json(const json& j) {
    if (j.is_string()) return parse_distribution(j.get<std::string>());
    const std::string kind = j.at("kind").get<std::string>();
    DistributionSpec d;
    if (kind == "uniform") {
        d.kind = DistributionSpec::Kind::uniform;
    } else if (kind == "point") {
        d.kind = DistributionSpec::Kind::point;
        d.state = j.at("state").get<int>();
    } else if (kind == "dirichlet") {
        d.kind = DistributionSpec::Kind::dirichlet;
        if (!j.contains("seed")) throw InvalidArgument("dirichlet distribution needs an explicit seed");
        d.seed = j.at("seed").get<std::uint64_t>();
    } else if (kind == "occupancy") {
        d.kind = DistributionSpec::Kind::occupancy;
        const json& p = j.value("policy", json("optimal"));
        if (p.is_array()) {
            d.policy = "actions";
            d.actions = p.get<Actions>();
        } else {
            d.policy = p.get<std::string>();
            if (d.policy != "optimal" && d.policy != "uniform")
                throw InvalidArgument("occupancy policy must be optimal, uniform or an action list");
        }
        if (j.contains("base")) d.base.push_back(distribution_from_json(j.at("base")));
    } else {
        throw InvalidArgument("unknown distribution kind '" + kind + "'");
    }
    return d;
}

OccupancyWeights resolve(const DistributionSpec& spec, const Mdp& mdp) {
    const int S = mdp.n_states();
    switch (spec.kind) {
        case DistributionSpec::Kind::uniform:
            return OccupancyWeights::uniform(S);
        case DistributionSpec::Kind::point:
            if (spec.state < 0 || spec.state >= S)
                throw InvalidArgument("point distribution state out of range");
            return OccupancyWeights::point(S, spec.state);
        case DistributionSpec::Kind::dirichlet: {
            std::mt19937_64 rng(spec.seed);
            return OccupancyWeights(dirichlet_one(rng, S).transpose());
        }
        case DistributionSpec::Kind::occupancy: {
            const OccupancyWeights base =
                spec.base.empty() ? OccupancyWeights::uniform(S) : resolve(spec.base.front(), mdp);
            if (spec.policy == "optimal") return occupancy(mdp, base, optimal_solve(mdp).policy);
            if (spec.policy == "uniform")
                return occupancy(mdp, base, StochasticPolicy::uniform(S, mdp.n_actions()));
            return occupancy(mdp, base, StochasticPolicy::deterministic(spec.actions, mdp.n_actions()));
        }
    }
    throw InvalidArgument("bad distribution spec");
}

SpaceSpec space_spec_from_json(const json& j) {
    SpaceSpec s;
    s.kind = j.at("kind").get<std::string>();
    if (s.kind == "capped_simplex") {
        s.delta = j.at("delta").get<double>();
    } else if (s.kind == "convex_hull") {
        s.vertices = io::vertices_from_json(j);
    } else if (s.kind == "random_hull") {
        s.n_vertices = j.value("n_vertices", 3);
        if (s.n_vertices < 1) throw InvalidArgument("random_hull needs at least one vertex");
    } else if (s.kind != "full_simplex") {
        throw InvalidArgument("unknown space kind '" + s.kind + "'");
    }
    return s;
}

PolicySpace resolve(const SpaceSpec& spec, const Mdp& mdp, std::uint64_t seed) {
    const int S = mdp.n_states();
    const int A = mdp.n_actions();
    if (spec.kind == "full_simplex") return PolicySpace::full_simplex(S, A);
    if (spec.kind == "capped_simplex") return PolicySpace::capped_simplex(S, A, spec.delta);
    if (spec.kind == "convex_hull") return PolicySpace::convex_hull(S, A, spec.vertices);
    if (spec.kind == "random_hull") {
        const std::size_t total = deterministic_policy_count(S, A, 1u << 20);
        const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(spec.n_vertices), total);
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> pick(0, A - 1);
        std::set<Actions> seen;
        std::vector<Actions> vertices;
        while (vertices.size() < n) {
            Actions a(S);
            for (int& x : a) x = pick(rng);
            if (seen.insert(a).second) vertices.push_back(std::move(a));
        }
        return PolicySpace::convex_hull(S, A, std::move(vertices));
    }
    throw InvalidArgument("unknown space kind '" + spec.kind + "'");
}

namespace {

void read_range(const json& j, const char* key, int& lo, int& hi) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (v.is_array()) {
        if (v.size() != 2) throw InvalidArgument(std::string(key) + " range needs two entries");
        lo = v[0].get<int>();
        hi = v[1].get<int>();
    } else {
        lo = hi = v.get<int>();
    }
    if (lo < 1 || hi < lo) throw InvalidArgument(std::string("bad range for ") + key);
}

}  // namespace

ExperimentConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
    ExperimentConfig c;
    const json& src = j.at("instances");
    InstanceSource& in = c.instances;
    in.kind = src.value("source", std::string("garnet"));
    if (!src.contains("seed")) throw InvalidArgument("instances.seed must be given explicitly");
    in.seed = src.at("seed").get<std::uint64_t>();
    in.count = src.value("count", in.count);
    read_range(src, "states", in.states_min, in.states_max);
    read_range(src, "actions", in.actions_min, in.actions_max);
    in.branching = src.value("branching", 0);
    in.sparsity = src.value("sparsity", 0.0);
    if (src.contains("gamma")) {
        const json& g = src.at("gamma");
        in.gammas = g.is_array() ? g.get<std::vector<double>>() : std::vector<double>{g.get<double>()};
        if (in.gammas.empty()) throw InvalidArgument("instances.gamma is empty");
    }
    if (src.contains("sizes")) in.sizes = src.at("sizes").get<std::vector<int>>();
    if (src.contains("files")) {
        for (const auto& f : src.at("files")) {
            std::filesystem::path p = f.get<std::string>();
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            if (!std::filesystem::exists(p)) throw InvalidArgument("instance file not found: " + p.string());
            in.files.push_back(p.string());
        }
    }
    if (in.kind == "file" && in.files.empty()) throw InvalidArgument("file source needs instances.files");
    if (in.kind != "garnet" && in.kind != "file" && in.kind != "counterexample")
        throw InvalidArgument("unknown instance source '" + in.kind + "'");
    if (in.count < 0) throw InvalidArgument("instances.count must be nonnegative");

    if (j.contains("mu")) c.mu = distribution_from_json(j.at("mu"));
    if (j.contains("nu")) c.nu = distribution_from_json(j.at("nu"));
    if (j.contains("spaces")) {
        c.spaces.clear();
        for (const auto& s : j.at("spaces")) c.spaces.push_back(space_spec_from_json(s));
        if (c.spaces.empty()) throw InvalidArgument("spaces is empty");
    } else if (j.contains("space")) {
        c.spaces = {space_spec_from_json(j.at("space"))};
    }
    c.eps = j.value("eps", c.eps);
    c.max_iters = j.value("max_iters", c.max_iters);
    c.restarts = j.value("restarts", c.restarts);
    c.pairs = j.value("pairs", c.pairs);
    c.rounds = j.value("rounds", c.rounds);
    c.i_max = j.value("i_max", c.i_max);
    c.j_max = j.value("j_max", c.j_max);
    c.grid_resolution = j.value("grid_resolution", c.grid_resolution);
    c.grid_max_states = j.value("grid_max_states", c.grid_max_states);
    c.seed = j.value("seed", in.seed);
    c.output_dir = j.value("output_dir", std::string());
    if (!c.output_dir.empty() && std::filesystem::path(c.output_dir).is_relative() && !base_dir.empty())
        c.output_dir = (base_dir / c.output_dir).string();
    if (!(c.eps >= 0.0)) throw InvalidArgument("eps must be nonnegative");
    if (c.rounds < 1) throw InvalidArgument("rounds must be at least 1");
    if (c.pairs < 1) throw InvalidArgument("pairs must be at least 1");
    if (!(c.grid_resolution > 0.0 && c.grid_resolution <= 1.0))
        throw InvalidArgument("grid_resolution must lie in (0, 1]");
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    return config_from_json(io::read_json(path), path.parent_path());
}

std::vector<Instance> build_instances(const ExperimentConfig& config) {
    const InstanceSource& in = config.instances;
    std::vector<Instance> out;
    if (in.kind == "file") {
        for (std::size_t k = 0; k < in.files.size(); ++k) {
            const auto seed = derive_seed(in.seed, k);
            out.push_back({static_cast<int>(k), seed, std::filesystem::path(in.files[k]).filename().string(),
                           io::load_mdp(in.files[k])});
        }
        return out;
    }
    if (in.kind == "counterexample") {
        const std::vector<int> sizes = in.sizes.empty() ? std::vector<int>{5, 10, 50} : in.sizes;
        for (std::size_t k = 0; k < sizes.size(); ++k) {
            const double gamma = in.gammas[k % in.gammas.size()];
            Instance inst{static_cast<int>(k), derive_seed(in.seed, k),
                          "counterexample-" + std::to_string(sizes[k]),
                          theorem4_counterexample(sizes[k], gamma).mdp, sizes[k]};
            out.push_back(std::move(inst));
        }
        return out;
    }
    for (int k = 0; k < in.count; ++k) {
        const std::uint64_t seed = derive_seed(in.seed, static_cast<std::uint64_t>(k));
        std::mt19937_64 rng(seed);
        GarnetSpec g;
        g.n_states = std::uniform_int_distribution<int>(in.states_min, in.states_max)(rng);
        g.n_actions = std::uniform_int_distribution<int>(in.actions_min, in.actions_max)(rng);
        g.branching = in.branching > 0 ? std::min(in.branching, g.n_states)
                                       : std::uniform_int_distribution<int>(1, g.n_states)(rng);
        g.sparsity = in.sparsity;
        g.discount = in.gammas[static_cast<std::size_t>(k) % in.gammas.size()];
        g.seed = seed;
        out.push_back({k, seed, "garnet-" + std::to_string(k), generate_garnet(g)});
    }
    return out;
}

int pool_threads() {
    int n = default_threads();
    if (const char* env = std::getenv("BOUNDLAB_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) n = std::min(n, cap);
    }
    return std::max(1, n);
}

}  // namespace boundlab::harness
