// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "boundlab/harness.hpp"

using namespace boundlab;
using namespace boundlab::harness;

namespace {

int failures = 0;

ExperimentConfig config(const std::string& name) {
    return load_config(std::string(BOUNDLAB_CONFIG_DIR) + "/" + name + ".json");
}

struct Timed {
    SuiteResult result;
    double seconds;
};

Timed timed_run(const std::string& suite, const ExperimentConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    SuiteResult r = run_suite(suite, c);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(r), s};
}

void report(const char* criterion, bool pass, const std::string& detail) {
    std::printf("%s  %-34s %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double max_param(const SuiteResult& r, const std::string& check, const char* key) {
    double out = 0.0;
    for (const auto& rec : r.records)
        if (rec.check == check && rec.report.params.contains(key))
            out = std::max(out, real_from_json(rec.report.params.at(key)));
    return out;
}

void run(const char* criterion, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(criterion, false, std::string("error: ") + e.what());
    }
}

}  // namespace

int main() {
    run("lemma1-identity", [] {
        const Timed t = timed_run("lemma1", config("lemma1"));
        const auto& r = t.result;
        const bool ok = r.count("lemma1_residual") == 100 && r.all_pass("lemma1_residual") && t.seconds < 10;
        report("lemma1-identity", ok,
               fmt("instances=%.0f max_residual=%.3g (<=1e-9) time=%.2fs (<10s)", r.count("lemma1_residual"),
                   r.max_lhs("lemma1_residual"), t.seconds));
    });

    run("theorem1-derivative", [] {
        const Timed t = timed_run("theorem1", config("theorem1"));
        const auto& r = t.result;
        const char* rel = "theorem1_derivative_relative_error";
        const char* exp = "theorem1_remainder_exponent";
        double min_exponent = 1e300;
        for (const auto& rec : r.records)
            if (rec.check == exp) min_exponent = std::min(min_exponent, rec.report.rhs.upper);
        const bool ok = r.count(rel) == 100 && r.all_pass(rel) && r.all_pass(exp) && t.seconds < 30;
        report("theorem1-derivative", ok,
               fmt("instances=%.0f max_rel_err=%.3g (<=1e-4) min_exponent=%.3f (>=1.9) time=%.2fs (<30s)",
                   r.count(rel), r.max_lhs(rel), min_exponent, t.seconds));
    });

    run("theorem1-equivalence", [] {
        const auto r = run_suite("theorem1-equivalence", config("theorem1_equivalence"));
        const char* eq = "theorem1_slack_equals_scaled_gap";
        const bool ok = r.count(eq) == 50 && r.all_pass(eq) && r.all_pass("theorem1_certificate_is_maximal");
        report("theorem1-equivalence", ok,
               fmt("instances=%.0f max|slack-(1-g)gap|=%.3g (<=1e-12)", r.count(eq), r.max_lhs(eq)));
    });

    run("theorem3-end-to-end", [] {
        const Timed t = timed_run("theorem3", config("theorem3"));
        const auto& r = t.result;
        double min_lhs = 1e300;
        for (const auto& rec : r.records)
            if (rec.check == "theorem3") min_lhs = std::min(min_lhs, rec.report.lhs);
        const bool ok = r.count("theorem3") == 50 && r.all_pass("theorem3") && t.seconds < 300;
        report("theorem3-end-to-end", ok,
               fmt("instances=%.0f min_slack=%.3g (>=-1e-8) min_lhs=%.3g (>=-1e-9) time=%.2fs (<300s)",
                   r.count("theorem3"), r.min_slack("theorem3"), min_lhs, t.seconds));
    });

    run("theorem5-collapse", [] {
        const auto r = run_suite("theorem5", config("theorem5"));
        const char* c = "theorem5_final_loss";
        const bool ok = r.count(c) == 50 && r.all_pass(c);
        report("theorem5-collapse", ok,
               fmt("instances=%.0f max_loss=%.3g (<=1e-6)", r.count(c), r.max_lhs(c)));
    });

    run("theorem4-counterexample", [] {
        const Timed t = timed_run("counterexample", config("counterexample"));
        const auto& r = t.result;
        const bool ok = r.count("counterexample_uniform_exact") == 3 && r.all_pass("counterexample_uniform_exact") &&
                        r.count("counterexample_grid_minimum") == 1 && r.all_pass("counterexample_grid_minimum") &&
                        r.all_pass("counterexample_attained") && r.all_pass("counterexample_random_minimum") &&
                        t.seconds < 60;
        double grid_min = 0.0;
        for (const auto& rec : r.records)
            if (rec.check == "counterexample_grid_minimum") grid_min = rec.report.rhs.upper;
        report("theorem4-counterexample", ok,
               fmt("n={5,10,50} max|c-n|=%.3g grid_min(n=5)=%.9g (>=5-1e-6) time=%.2fs (<60s)",
                   r.max_lhs("counterexample_uniform_exact"), grid_min, t.seconds));
    });

    run("theorem4-inequality", [] {
        const auto r = run_suite("theorem4", config("theorem4"));
        const bool ok = r.count("theorem4") == 20 && r.all_pass("theorem4");
        report("theorem4-inequality", ok,
               fmt("instances=%.0f min_slack=%.3g max_bracket_width=%.3g", r.count("theorem4"),
                   r.min_slack("theorem4"), max_param(r, "theorem4", "bracket_width")));
    });

    run("dpi-sanity", [] {
        const auto full = run_suite("dpi", config("dpi_full"));
        const auto restricted = run_suite("dpi", config("dpi_restricted"));
        const char* m = "dpi_matches_policy_iteration";
        const char* b = "dpi_restricted_bound";
        const bool ok = full.count(m) == 50 && full.all_pass(m) && full.all_pass("dpi_full_limsup_loss") &&
                        restricted.count(b) == 20 && restricted.all_pass(b);
        report("dpi-sanity", ok,
               fmt("pi_trajectories=%.0f/50 restricted=%.0f/20 min_slack=%.3g (>=-1e-8)", full.count(m),
                   restricted.count(b), restricted.min_slack(b)));
    });

    run("eprime-e-relation", [] {
        const auto r = run_suite("eprime", config("eprime"));
        const char* c = "eprime_pair_relation";
        const bool ok = r.count(c) == 50 && r.all_pass(c);
        report("eprime-e-relation", ok,
               fmt("instances=%.0f max(nu_gap - d_gap/(1-g))=%.3g (<=1e-9)", r.count(c), r.max_lhs(c)));
    });

    run("determinism", [] {
        const ExperimentConfig c = config("all");
        const SuiteResult a = run_suite("all", c);
        const int threads = omp_get_max_threads();
        omp_set_num_threads(3);
        const SuiteResult b = run_suite("all", c);
        omp_set_num_threads(threads);
        const std::string ja = records_to_json(a).dump(2);
        const std::string jb = records_to_json(b).dump(2);
        const bool ok = ja == jb && summary_csv(a) == summary_csv(b) && a.tables == b.tables && a.passed();
        report("determinism", ok,
               fmt("records=%.0f bytes=%.0f identical=%.0f", static_cast<double>(a.records.size()),
                   static_cast<double>(ja.size()), ja == jb ? 1.0 : 0.0));
    });

    std::printf("%s (%d failed)\n", failures == 0 ? "ALL CRITERIA PASS" : "SOME CRITERIA FAILED", failures);
    return failures == 0 ? 0 : 1;
}
