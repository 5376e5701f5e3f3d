#include "boundlab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "boundlab/errors.hpp"

namespace boundlab::io {

std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

int required_int(const json& j, const char* key) {
    if (!j.contains(key)) throw InvalidArgument(std::string("missing field '") + key + "'");
    return j.at(key).get<int>();
}

}  // namespace

json to_json(const Mdp& mdp) {
    const int S = mdp.n_states();
    const int A = mdp.n_actions();
    json transition = json::array();
    json reward = json::array();
    for (int s = 0; s < S; ++s) {
        json ts = json::array();
        json rs = json::array();
        for (int a = 0; a < A; ++a) {
            json row = json::array();
            for (int t = 0; t < S; ++t) row.push_back(mdp.transition(s, a, t));
            ts.push_back(std::move(row));
            rs.push_back(mdp.reward(s, a));
        }
        transition.push_back(std::move(ts));
        reward.push_back(std::move(rs));
    }
    return {{"n_states", S},
            {"n_actions", A},
            {"gamma", mdp.discount()},
            {"transition", std::move(transition)},
            {"reward", std::move(reward)}};
}

Mdp mdp_from_json(const json& j) {
    const int S = required_int(j, "n_states");
    const int A = required_int(j, "n_actions");
    if (S < 1 || A < 1) throw DimensionError("mdp: empty dimensions");
    const double gamma = j.at("gamma").get<double>();
    const json& tr = j.at("transition");
    const json& rw = j.at("reward");
    if (tr.size() != static_cast<std::size_t>(S) || rw.size() != static_cast<std::size_t>(S))
        throw DimensionError("mdp: transition/reward must have n_states rows");
    std::vector<double> transition;
    std::vector<double> reward;
    transition.reserve(static_cast<std::size_t>(S) * A * S);
    for (int s = 0; s < S; ++s) {
        if (tr[s].size() != static_cast<std::size_t>(A) || rw[s].size() != static_cast<std::size_t>(A))
            throw DimensionError("mdp: each state needs n_actions entries");
        for (int a = 0; a < A; ++a) {
            if (tr[s][a].size() != static_cast<std::size_t>(S))
                throw DimensionError("mdp: each transition row needs n_states entries");
            for (int t = 0; t < S; ++t) transition.push_back(tr[s][a][t].get<double>());
            reward.push_back(rw[s][a].get<double>());
        }
    }
    return Mdp(S, A, gamma, transition, reward);
}

json to_json(const StochasticPolicy& pi) {
    json rows = json::array();
    for (int s = 0; s < pi.n_states(); ++s) {
        json row = json::array();
        for (int a = 0; a < pi.n_actions(); ++a) row.push_back(pi(s, a));
        rows.push_back(std::move(row));
    }
    return {{"n_states", pi.n_states()}, {"n_actions", pi.n_actions()}, {"probs", std::move(rows)}};
}

StochasticPolicy policy_from_json(const json& j) {
    const json& rows = j.is_array() ? j : j.at("probs");
    if (rows.empty()) throw DimensionError("policy: no rows");
    const auto S = static_cast<Eigen::Index>(rows.size());
    const auto A = static_cast<Eigen::Index>(rows[0].size());
    Matrix probs(S, A);
    for (Eigen::Index s = 0; s < S; ++s) {
        if (rows[s].size() != static_cast<std::size_t>(A)) throw DimensionError("policy: ragged rows");
        for (Eigen::Index a = 0; a < A; ++a) probs(s, a) = rows[s][a].get<double>();
    }
    return StochasticPolicy(std::move(probs));
}

json to_json(const PolicySpace& space) {
    switch (space.kind()) {
        case PolicySpace::Kind::full_simplex:
            return {{"kind", "full_simplex"}};
        case PolicySpace::Kind::capped_simplex:
            return {{"kind", "capped_simplex"}, {"delta", space.delta()}};
        case PolicySpace::Kind::convex_hull:
            return {{"kind", "convex_hull"}, {"vertices", space.vertices()}};
    }
    return {};
}

std::vector<Actions> vertices_from_json(const json& j) {
    const json& list = j.is_array() ? j : j.at("vertices");
    return list.get<std::vector<Actions>>();
}

PolicySpace space_from_json(const json& j, int n_states, int n_actions) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "full_simplex") return PolicySpace::full_simplex(n_states, n_actions);
    if (kind == "capped_simplex")
        return PolicySpace::capped_simplex(n_states, n_actions, j.at("delta").get<double>());
    if (kind == "convex_hull")
        return PolicySpace::convex_hull(n_states, n_actions, vertices_from_json(j));
    throw InvalidArgument("unknown policy space kind '" + kind + "'");
}

json to_json(const BoundReport& report) {
    return {{"theorem", report.theorem},
            {"lhs", json_real(report.lhs)},
            {"rhs_lower", json_real(report.rhs.lower)},
            {"rhs_upper", json_real(report.rhs.upper)},
            {"slack", json_real(report.slack)},
            {"certified", report.certified},
            {"params", report.params}};
}

BoundReport report_from_json(const json& j) {
    BoundReport r;
    r.theorem = j.at("theorem").get<std::string>();
    r.lhs = real_from_json(j.at("lhs"));
    r.rhs = {real_from_json(j.at("rhs_lower")), real_from_json(j.at("rhs_upper"))};
    r.slack = real_from_json(j.at("slack"));
    r.certified = j.at("certified").get<bool>();
    r.params = j.value("params", json::object());
    return r;
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const json& j) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

Mdp load_mdp(const std::filesystem::path& path) { return mdp_from_json(read_json(path)); }

void save_mdp(const std::filesystem::path& path, const Mdp& mdp) { write_json(path, to_json(mdp)); }

void write_trace_csv(std::ostream& out, const LpsResult& result) {
    out << "iter,objective,gap,alpha\n";
    for (const TracePoint& p : result.objective_trace)
        out << p.iter << ',' << format_real(p.objective) << ',' << format_real(p.gap) << ','
            << format_real(p.alpha) << '\n';
}

void write_dpi_csv(std::ostream& out, const DpiResult& result) {
    out << "k,loss,policy_hash\n";
    for (std::size_t k = 0; k < result.policy_sequence.size(); ++k)
        out << k << ',' << format_real(result.loss_sequence[k]) << ','
            << policy_hash(result.policy_sequence[k]) << '\n';
}

void write_table1_header(std::ostream& out) {
    out << "instance,method,bounded_term,horizon_term,concentration_lower,concentration_upper,"
           "error_term,guarantee_lower,guarantee_upper,measured_loss,error_terms_exact,"
           "concentration_inequality_holds\n";
}

void write_table1_rows(std::ostream& out, const std::string& label, const Table1Report& report) {
    for (const Table1Row* row : {&report.lps, &report.dpi}) {
        out << label << ',' << row->method << ',' << row->bounded_term << ','
            << format_real(row->horizon_term) << ',' << format_real(row->concentration_term.lower)
            << ',' << format_real(row->concentration_term.upper) << ','
            << format_real(row->error_term) << ',' << format_real(row->guarantee.lower) << ','
            << format_real(row->guarantee.upper) << ',' << format_real(row->measured_loss) << ','
            << (report.error_terms_exact ? 1 : 0) << ','
            << (report.concentration_inequality_holds ? 1 : 0) << '\n';
    }
}

}  // namespace boundlab::io
