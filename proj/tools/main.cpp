#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "boundlab/errors.hpp"
#include "boundlab/harness.hpp"
#include "boundlab/io.hpp"

using namespace boundlab;
using nlohmann::json;

namespace {

void print_summary(const harness::SuiteResult& r) {
    std::map<std::string, std::pair<int, int>> by_check;  // passed, total
    for (const auto& rec : r.records) {
        auto& [pass, total] = by_check[rec.check];
        pass += rec.pass ? 1 : 0;
        ++total;
    }
    for (const auto& [check, counts] : by_check)
        std::cout << check << ": " << counts.first << "/" << counts.second << " pass\n";
    std::cout << r.suite << ": " << (r.passed() ? "OK" : "FAILED") << " (" << r.failures()
              << " certified failures)\n";
}

std::ofstream open_out(const std::string& path) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Performance-bound verification for local policy search and direct policy iteration"};
    app.require_subcommand(1);

    std::string suite, config_path, out_dir;
    auto* verify = app.add_subcommand("verify", "Run a verification suite");
    verify->add_option("suite", suite, "Suite name")->required()->check(CLI::IsMember(harness::suite_names()));
    verify->add_option("--config", config_path, "Experiment config JSON")->required()->check(CLI::ExistingFile);
    verify->add_option("--out", out_dir, "Output directory (overrides the config)");

    auto* compare = app.add_subcommand("compare", "Side-by-side LPS and DPI guarantees");
    compare->add_option("--config", config_path, "Experiment config JSON")->required()->check(CLI::ExistingFile);
    compare->add_option("--out", out_dir, "Output directory (overrides the config)");

    int ce_n = 5;
    double ce_gamma = 0.9;
    std::string ce_out;
    auto* cex = app.add_subcommand("counterexample", "Concentration counterexample");
    cex->add_option("--n", ce_n, "Number of states and actions")->required()->check(CLI::Range(2, 100000));
    cex->add_option("--gamma", ce_gamma, "Discount factor")->check(CLI::Range(0.0, 0.999999999));
    cex->add_option("--out", ce_out, "Write the MDP as JSON");

    GarnetSpec g;
    std::string garnet_out;
    auto* garnet = app.add_subcommand("garnet", "Generate a Garnet MDP");
    garnet->add_option("--states", g.n_states)->required();
    garnet->add_option("--actions", g.n_actions)->required();
    garnet->add_option("--branching", g.branching)->required();
    garnet->add_option("--sparsity", g.sparsity)->required();
    garnet->add_option("--seed", g.seed)->required();
    garnet->add_option("--gamma", g.discount);
    garnet->add_option("--out", garnet_out)->required();

    std::string mdp_path, space_path, vertices_path, nu_spec, mu_spec = "uniform", run_out;
    double eps = 1e-6;
    int max_iters = 10000;
    auto* lps = app.add_subcommand("lps", "Local policy search");
    lps->add_option("--mdp", mdp_path)->required()->check(CLI::ExistingFile);
    lps->add_option("--space", space_path)->required()->check(CLI::ExistingFile);
    lps->add_option("--nu", nu_spec)->required();
    lps->add_option("--eps", eps)->required()->check(CLI::NonNegativeNumber);
    lps->add_option("--max-iters", max_iters);
    lps->add_option("--out", run_out, "Trace CSV")->required();

    auto* dpi = app.add_subcommand("dpi", "Direct policy iteration");
    dpi->add_option("--mdp", mdp_path)->required()->check(CLI::ExistingFile);
    dpi->add_option("--vertices", vertices_path)->required()->check(CLI::ExistingFile);
    dpi->add_option("--nu", nu_spec)->required();
    dpi->add_option("--mu", mu_spec, "Distribution for the reported losses");
    dpi->add_option("--max-iters", max_iters);
    dpi->add_option("--out", run_out, "Sequence CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*verify || *compare) {
            harness::ExperimentConfig config = harness::load_config(config_path);
            if (!out_dir.empty()) config.output_dir = out_dir;
            const harness::SuiteResult r = harness::run_suite(*verify ? suite : "compare", config);
            if (!config.output_dir.empty()) harness::write_suite(r, config.output_dir);
            if (*compare && config.output_dir.empty() && !r.tables.empty()) std::cout << r.tables.front();
            print_summary(r);
            return r.passed() ? 0 : 1;
        }
        if (*cex) {
            const Counterexample c = theorem4_counterexample(ce_n, ce_gamma);
            const OccupancyWeights nu = OccupancyWeights::uniform(ce_n);
            const double sup = one_step_concentration(c.mdp, c.mu, nu);
            json out = {{"n", ce_n},
                        {"gamma", ce_gamma},
                        {"nu", "uniform"},
                        {"one_step_concentration", sup},
                        {"c_ge_n", sup >= ce_n - 1e-9}};
            if (!ce_out.empty()) io::save_mdp(ce_out, c.mdp);
            std::cout << out.dump(2) << '\n';
            return sup >= ce_n - 1e-9 ? 0 : 1;
        }
        if (*garnet) {
            io::save_mdp(garnet_out, generate_garnet(g));
            return 0;
        }
        if (*lps) {
            const Mdp mdp = io::load_mdp(mdp_path);
            const PolicySpace space =
                io::space_from_json(io::read_json(space_path), mdp.n_states(), mdp.n_actions());
            const OccupancyWeights nu = harness::resolve(harness::parse_distribution(nu_spec), mdp);
            LpsOptions o;
            o.eps = eps;
            o.max_iters = max_iters;
            const LpsResult r = local_search(mdp, nu, space, o);
            auto out = open_out(run_out);
            io::write_trace_csv(out, r);
            json summary = {{"fw_gap", r.fw_gap},
                            {"iterations", r.iterations},
                            {"termination", to_string(r.termination)},
                            {"objective", objective(mdp, nu, r.policy)},
                            {"policy", io::to_json(r.policy)}};
            std::cout << summary.dump(2) << '\n';
            return 0;
        }
        if (*dpi) {
            const Mdp mdp = io::load_mdp(mdp_path);
            const auto vertices = io::vertices_from_json(io::read_json(vertices_path));
            if (vertices.empty()) throw InvalidArgument("no vertices given");
            const DeterministicPolicySet set =
                DeterministicPolicySet::listed(mdp.n_states(), mdp.n_actions(), vertices);
            const OccupancyWeights nu = harness::resolve(harness::parse_distribution(nu_spec), mdp);
            const OccupancyWeights mu = harness::resolve(harness::parse_distribution(mu_spec), mdp);
            const DpiResult r = run_dpi(mdp, nu, mu, set, vertices.front(), max_iters);
            auto out = open_out(run_out);
            io::write_dpi_csv(out, r);
            json summary = {{"final_policy", r.final_policy},
                            {"steps", r.policy_sequence.size() - 1},
                            {"cycle_detected", r.cycle_detected},
                            {"limsup_loss", r.limsup_loss}};
            std::cout << summary.dump(2) << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
