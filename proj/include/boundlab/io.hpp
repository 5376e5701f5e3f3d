#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "boundlab/bounds.hpp"

namespace boundlab::io {

using nlohmann::json;

/// Shortest round-trip decimal; non-finite values spelled inf, -inf, nan.
std::string format_real(double x);

json to_json(const Mdp& mdp);
Mdp mdp_from_json(const json& j);

json to_json(const StochasticPolicy& pi);
StochasticPolicy policy_from_json(const json& j);

json to_json(const PolicySpace& space);
/// The shape comes from the MDP the space is used with.
PolicySpace space_from_json(const json& j, int n_states, int n_actions);

/// Either a bare array of action vectors or {"vertices": [...]}.
std::vector<Actions> vertices_from_json(const json& j);

json to_json(const BoundReport& report);
BoundReport report_from_json(const json& j);

json read_json(const std::filesystem::path& path);
/// Pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const json& j);

Mdp load_mdp(const std::filesystem::path& path);
void save_mdp(const std::filesystem::path& path, const Mdp& mdp);

/// iter,objective,gap,alpha
void write_trace_csv(std::ostream& out, const LpsResult& result);
/// k,loss,policy_hash
void write_dpi_csv(std::ostream& out, const DpiResult& result);

/// Comparison-table rows; `label` identifies the instance in the first column.
void write_table1_header(std::ostream& out);
void write_table1_rows(std::ostream& out, const std::string& label, const Table1Report& report);

}  // namespace boundlab::io
