#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfs/common.hpp"
#include "qfs/dataset.hpp"
#include "qfs/evalharness.hpp"
#include "qfs/geometry.hpp"
#include "qfs/infometrics.hpp"
#include "qfs/pulses.hpp"
#include "qfs/quantum_sim.hpp"
#include "qfs/selection.hpp"

// JSON checkpoint format for every pipeline artifact. Symmetric matrices are
// stored as row-major lower triangles (diagonal included); bitstrings render
// atom 0 first; plain nlohmann::json objects keep keys sorted, so identical
// inputs serialize byte-identically.

namespace qfs {

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path);
    out << j.dump(2) << '\n';
}

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifactError(path + " (run the upstream stage first)");
    try {
        nlohmann::json j;
        in >> j;
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed artifact " + path + ": " + e.what());
    }
}

// ---- FeatureTable -----------------------------------------------------------

inline nlohmann::json table_to_json(const FeatureTable& table) {
    nlohmann::json cols = nlohmann::json::array();
    for (const ColumnSpec& c : table.columns())
        cols.push_back({{"name", c.name},
                        {"kind", c.kind == ColumnKind::numerical ? "numerical" : "categorical"},
                        {"role", c.role == ColumnRole::target ? "target" : "feature"}});
    nlohmann::json values = nlohmann::json::array();
    for (std::size_t r = 0; r < table.n_rows(); ++r)
        for (std::size_t c = 0; c < table.n_columns(); ++c)
            values.push_back(table.column_values(c)[r]);
    return {{"columns", cols}, {"n_rows", table.n_rows()}, {"values", values}};
}

inline FeatureTable table_from_json(const nlohmann::json& j) {
    std::vector<ColumnSpec> specs;
    for (const auto& c : j.at("columns")) {
        ColumnSpec spec;
        spec.name = c.at("name").get<std::string>();
        spec.kind = c.at("kind").get<std::string>() == "numerical" ? ColumnKind::numerical
                                                                   : ColumnKind::categorical;
        spec.role = c.at("role").get<std::string>() == "target" ? ColumnRole::target
                                                                : ColumnRole::feature;
        specs.push_back(spec);
    }
    const auto n_rows = j.at("n_rows").get<std::size_t>();
    const auto& values = j.at("values");
    if (values.size() != n_rows * specs.size())
        throw ValidationError("table artifact value count mismatch");
    std::vector<std::vector<double>> data(specs.size(), std::vector<double>(n_rows));
    std::size_t k = 0;
    for (std::size_t r = 0; r < n_rows; ++r)
        for (std::size_t c = 0; c < specs.size(); ++c, ++k) data[c][r] = values[k].get<double>();
    return FeatureTable(std::move(specs), std::move(data));
}

// ---- InfoProfile ------------------------------------------------------------

inline nlohmann::json profile_to_json(const InfoProfile& profile, int n_bins) {
    return {{"relevance", profile.relevance},
            {"redundancy_lower", profile.redundancy.lower_triangle()},
            {"normalized_redundancy_lower", profile.normalized_redundancy.lower_triangle()},
            {"entropies", profile.entropies},
            {"p_weights", profile.p_weights},
            {"n_bins", n_bins},
            {"estimator", "plugin_histogram"}};
}

inline InfoProfile profile_from_json(const nlohmann::json& j) {
    InfoProfile profile;
    profile.relevance = j.at("relevance").get<std::vector<double>>();
    profile.redundancy =
        SquareMatrix::from_lower_triangle(j.at("redundancy_lower").get<std::vector<double>>());
    profile.normalized_redundancy = SquareMatrix::from_lower_triangle(
        j.at("normalized_redundancy_lower").get<std::vector<double>>());
    profile.entropies = j.at("entropies").get<std::vector<double>>();
    profile.p_weights = j.at("p_weights").get<std::vector<double>>();
    return profile;
}

// ---- AtomLayout ---------------------------------------------------------------

inline nlohmann::json layout_to_json(const AtomLayout& layout) {
    nlohmann::json positions = nlohmann::json::array();
    for (const auto& p : layout.positions) positions.push_back({p[0], p[1]});
    return {{"positions", positions},
            {"blockade_radius", layout.blockade_radius},
            {"target_distances_lower", layout.target_distances.lower_triangle()},
            {"error_matrix_lower", layout.error_matrix.lower_triangle()},
            {"mean_error", layout.mean_error},
            {"dilation", layout.dilation},
            {"seed_used", layout.seed_used}};
}

inline AtomLayout layout_from_json(const nlohmann::json& j) {
    AtomLayout layout;
    for (const auto& p : j.at("positions"))
        layout.positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    layout.blockade_radius = j.at("blockade_radius").get<double>();
    layout.target_distances = SquareMatrix::from_lower_triangle(
        j.at("target_distances_lower").get<std::vector<double>>());
    layout.error_matrix =
        SquareMatrix::from_lower_triangle(j.at("error_matrix_lower").get<std::vector<double>>());
    layout.mean_error = j.at("mean_error").get<double>();
    layout.dilation = j.at("dilation").get<double>();
    layout.seed_used = j.at("seed_used").get<std::uint64_t>();
    return layout;
}

// ---- DriveProgram -------------------------------------------------------------

namespace detail {

inline nlohmann::json knots_to_json(const Schedule& s) {
    nlohmann::json out = nlohmann::json::array();
    for (const Knot& k : s.knots()) out.push_back({k.t, k.value});
    return out;
}

inline Schedule knots_from_json(const nlohmann::json& j) {
    std::vector<Knot> knots;
    for (const auto& k : j) knots.push_back({k.at(0).get<double>(), k.at(1).get<double>()});
    return Schedule(std::move(knots));
}

}  // namespace detail

inline nlohmann::json slew_report_to_json(const SlewReport& report) {
    auto segments_json = [](const std::vector<SlewSegment>& segments) {
        nlohmann::json out = nlohmann::json::array();
        for (const SlewSegment& seg : segments)
            out.push_back({{"channel", seg.channel},
                           {"t_start", seg.t_start},
                           {"t_end", seg.t_end},
                           {"sweep_rate", seg.sweep_rate},
                           {"omega_ref", seg.omega_ref},
                           {"s", std::isfinite(seg.s) ? nlohmann::json(seg.s)
                                                      : nlohmann::json(nullptr)}});
        return out;
    };
    return {{"passed", report.passed},
            {"bound", report.bound},
            {"max_abs_finite_s", report.max_abs_finite_s},
            {"segments", segments_json(report.segments)},
            {"violations", segments_json(report.violations)}};
}

inline nlohmann::json program_to_json(const DriveProgram& program) {
    return {{"omega_knots", detail::knots_to_json(program.omega)},
            {"phase_knots", detail::knots_to_json(program.phase)},
            {"delta_global_knots", detail::knots_to_json(program.delta_global)},
            {"delta_local_knots", detail::knots_to_json(program.delta_local_envelope)},
            {"site_weights", program.site_weights},
            {"n_steps", program.n_steps},
            {"total_time", program.total_time}};
}

inline DriveProgram program_from_json(const nlohmann::json& j) {
    DriveProgram program;
    program.omega = detail::knots_from_json(j.at("omega_knots"));
    program.phase = detail::knots_from_json(j.at("phase_knots"));
    program.delta_global = detail::knots_from_json(j.at("delta_global_knots"));
    program.delta_local_envelope = detail::knots_from_json(j.at("delta_local_knots"));
    program.site_weights = j.at("site_weights").get<std::vector<double>>();
    program.n_steps = j.at("n_steps").get<int>();
    program.total_time = j.at("total_time").get<double>();
    program.validate();
    return program;
}

// ---- SampleEnsemble ------------------------------------------------------------

inline nlohmann::json ensemble_to_json(const SampleEnsemble& ensemble) {
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [mask, count] : ensemble.counts)
        counts[bitstring_to_string(mask, ensemble.n_atoms)] = count;
    return {{"counts", counts},
            {"n_atoms", ensemble.n_atoms},
            {"shots", ensemble.shots},
            {"seed", ensemble.seed}};
}

inline SampleEnsemble ensemble_from_json(const nlohmann::json& j) {
    SampleEnsemble ensemble;
    ensemble.n_atoms = j.at("n_atoms").get<std::size_t>();
    ensemble.shots = j.at("shots").get<long long>();
    ensemble.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& [key, value] : j.at("counts").items())
        ensemble.counts[bitstring_from_string(key)] = value.get<long long>();
    return ensemble;
}

// ---- SelectionReport -----------------------------------------------------------

namespace detail {

inline nlohmann::json subset_to_json(const PruneResult& r,
                                     const std::vector<std::string>& feature_names) {
    nlohmann::json names = nlohmann::json::array();
    for (std::size_t idx : r.features) names.push_back(feature_names.at(idx));
    return {{"features", names},
            {"indices", r.features},
            {"relaxed", r.relaxed}};
}

inline PruneResult subset_from_json(const nlohmann::json& j) {
    PruneResult r;
    r.features = j.at("indices").get<std::vector<std::size_t>>();
    r.relaxed = j.at("relaxed").get<bool>();
    return r;
}

}  // namespace detail

inline nlohmann::json selection_to_json(const SelectionReport& report,
                                        const std::vector<std::string>& feature_names) {
    nlohmann::json kept_counts = nlohmann::json::object();
    nlohmann::json kept_energies = nlohmann::json::object();
    for (const auto& [mask, count] : report.kept.counts) {
        const std::string key = bitstring_to_string(mask, report.kept.n_atoms);
        kept_counts[key] = count;
        kept_energies[key] = report.kept.energies.at(mask);
    }
    nlohmann::json subsets = nlohmann::json::object();
    for (const auto& [k, r] : report.subsets_by_cardinality)
        subsets[std::to_string(k)] = detail::subset_to_json(r, feature_names);
    nlohmann::json alts = nlohmann::json::array();
    for (const PruneResult& r : report.alternative_sets)
        alts.push_back(detail::subset_to_json(r, feature_names));
    return {{"densities", report.densities},
            {"kept_fraction", report.kept_fraction},
            {"filter_mode", report.filter_mode == FilterMode::per_shot ? "per_shot"
                                                                       : "per_unique"},
            {"prune_threshold", report.prune_threshold},
            {"kept_counts", kept_counts},
            {"kept_energies", kept_energies},
            {"kept_shots", report.kept.kept_shots},
            {"subsets_by_cardinality", subsets},
            {"alternatives", alts}};
}

inline SelectionReport selection_from_json(const nlohmann::json& j) {
    SelectionReport report;
    report.densities = j.at("densities").get<std::vector<double>>();
    report.kept_fraction = j.at("kept_fraction").get<double>();
    report.filter_mode = j.at("filter_mode").get<std::string>() == "per_unique"
                             ? FilterMode::per_unique
                             : FilterMode::per_shot;
    report.prune_threshold = j.at("prune_threshold").get<double>();
    report.kept.n_atoms = report.densities.size();
    report.kept.kept_shots = j.at("kept_shots").get<long long>();
    for (const auto& [key, value] : j.at("kept_counts").items())
        report.kept.counts[bitstring_from_string(key)] = value.get<long long>();
    for (const auto& [key, value] : j.at("kept_energies").items())
        report.kept.energies[bitstring_from_string(key)] = value.get<double>();
    for (const auto& [key, value] : j.at("subsets_by_cardinality").items())
        report.subsets_by_cardinality[std::stoi(key)] = detail::subset_from_json(value);
    for (const auto& value : j.at("alternatives"))
        report.alternative_sets.push_back(detail::subset_from_json(value));
    return report;
}

// ---- ComparisonTable -----------------------------------------------------------

inline nlohmann::json comparison_to_json(const ComparisonTable& table,
                                         const std::vector<std::string>& feature_names) {
    auto names_of = [&](const std::vector<std::size_t>& subset) {
        nlohmann::json names = nlohmann::json::array();
        for (std::size_t idx : subset) names.push_back(feature_names.at(idx));
        return names;
    };
    nlohmann::json records = nlohmann::json::array();
    for (const MetricRecord& r : table.records) {
        nlohmann::json rec = {{"precision", r.precision},
                              {"recall", r.recall},
                              {"subset", names_of(r.subset)},
                              {"seed", r.seed},
                              {"method", method_name(r.method)}};
        rec["auc"] = r.auc ? nlohmann::json(*r.auc) : nlohmann::json(nullptr);
        records.push_back(rec);
    }
    nlohmann::json rows = nlohmann::json::array();
    for (const ComparisonRow& r : table.rows) {
        nlohmann::json row = {{"k", r.k},
                              {"method", method_name(r.method)},
                              {"median_precision", r.median_precision},
                              {"median_recall", r.median_recall}};
        row["median_auc"] = r.median_auc ? nlohmann::json(*r.median_auc) : nlohmann::json(nullptr);
        rows.push_back(row);
    }
    nlohmann::json overlap = nlohmann::json::object();
    for (const auto& [k, v] : table.overlap) overlap[std::to_string(k)] = v;
    nlohmann::json mi = nlohmann::json::object();
    for (const auto& [k, subset] : table.mi_subsets) mi[std::to_string(k)] = names_of(subset);
    return {{"records", records}, {"rows", rows}, {"overlap", overlap}, {"mi_subsets", mi}};
}

}  // namespace qfs
