#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "qfs/artifacts.hpp"
#include "qfs/config.hpp"
#include "qfs/csv.hpp"

namespace qfs {

enum class Stage { ingest, info, embed, program, simulate, select, evaluate, all };

inline Stage stage_from_string(const std::string& name) {
    if (name == "ingest") return Stage::ingest;
    if (name == "info") return Stage::info;
    if (name == "embed") return Stage::embed;
    if (name == "program") return Stage::program;
    if (name == "simulate") return Stage::simulate;
    if (name == "select") return Stage::select;
    if (name == "evaluate") return Stage::evaluate;
    if (name == "all") return Stage::all;
    throw ConfigError("unknown stage: " + name);
}

namespace paths {

inline std::string table(const RunConfig& c) { return c.output_dir + "/table.json"; }
inline std::string profile(const RunConfig& c) { return c.output_dir + "/info_profile.json"; }
inline std::string layout(const RunConfig& c) { return c.output_dir + "/layout.json"; }
inline std::string program(const RunConfig& c) { return c.output_dir + "/program.json"; }
inline std::string samples(const RunConfig& c) { return c.output_dir + "/samples.json"; }
inline std::string selection(const RunConfig& c) { return c.output_dir + "/selection.json"; }
inline std::string comparison(const RunConfig& c) { return c.output_dir + "/comparison.json"; }

}  // namespace paths

namespace detail {

inline std::vector<std::string> artifact_feature_names(const RunConfig& config) {
    return table_from_json(read_json_file(paths::table(config))).feature_names();
}

/// k_range clamped to the actual feature count, so the default [1, 6] works
/// on small tables too.
inline std::pair<int, int> effective_k_range(const RunConfig& config, std::size_t n_features) {
    const int n = static_cast<int>(n_features);
    return {std::min(config.k_min, n), std::min(config.k_max, n)};
}

}  // namespace detail

inline void run_ingest(const RunConfig& config, std::ostream& diag) {
    std::vector<std::string> warnings;
    FeatureTable table = load_table(config.dataset_path, config.target_name,
                                    config.missing_policy_enum(), config.delimiter[0],
                                    &warnings);
    for (const std::string& w : warnings) diag << "ingest: warning: " << w << '\n';
    write_json_file(paths::table(config), table_to_json(table));
    diag << "ingest: " << table.n_rows() << " rows, " << table.n_features()
         << " features, target '" << config.target_name << "' -> " << paths::table(config)
         << '\n';
}

inline void run_info(const RunConfig& config, std::ostream& diag) {
    FeatureTable table = table_from_json(read_json_file(paths::table(config)));
    DiscretizedView view = discretize(table, config.n_bins);
    InfoProfile profile = compute_profile(view, to_int_series(table.target()));
    write_json_file(paths::profile(config), profile_to_json(profile, config.n_bins));
    double max_i = 0.0;
    for (double v : profile.relevance) max_i = std::max(max_i, v);
    diag << "info: " << profile.relevance.size() << " features, max relevance " << max_i
         << " nats -> " << paths::profile(config) << '\n';
}

inline void run_embed(const RunConfig& config, std::ostream& diag) {
    InfoProfile profile = profile_from_json(read_json_file(paths::profile(config)));
    const double r_b = blockade_radius(config.constants);
    EmbedOptions options;
    options.n_restarts = config.n_restarts;
    options.base_seed = config.base_seed;
    options.interval_mode = config.interval_mode_enum();
    AtomLayout layout = embed_redundancy(profile.redundancy, r_b, options);
    write_json_file(paths::layout(config), layout_to_json(layout));
    diag << "embed: " << layout.n_atoms() << " atoms, R_b " << r_b << " m, mean eps "
         << layout.mean_error << " (dilation " << layout.dilation << ", seed "
         << layout.seed_used << ") -> " << paths::layout(config) << '\n';
}

inline void run_program(const RunConfig& config, std::ostream& diag) {
    InfoProfile profile = profile_from_json(read_json_file(paths::profile(config)));
    DriveProgram program = build_default_program(config.constants, profile.p_weights,
                                                 config.n_steps, config.fractions);
    SlewReport slew = validate_slew(program, config.slew_bound);
    if (!slew.passed) {
        for (const SlewSegment& seg : slew.violations)
            diag << "program: slew violation on " << seg.channel << " over [" << seg.t_start
                 << ", " << seg.t_end << "] s: |s| = " << std::abs(seg.s) << " > "
                 << slew.bound << '\n';
        throw ValidationError("drive program violates the slew bound");
    }
    nlohmann::json artifact = program_to_json(program);
    artifact["slew"] = slew_report_to_json(slew);
    write_json_file(paths::program(config), artifact);
    diag << "program: " << program.n_steps << " interpolation steps over "
         << program.total_time << " s, max |s| " << slew.max_abs_finite_s << " -> "
         << paths::program(config) << '\n';
}

inline void run_simulate(const RunConfig& config, std::ostream& diag) {
    AtomLayout layout = layout_from_json(read_json_file(paths::layout(config)));
    DriveProgram program = program_from_json(read_json_file(paths::program(config)));
    RydbergSystem system(std::move(layout), std::move(program), config.constants.c6,
                         static_cast<std::size_t>(config.max_atoms));
    diag << "simulate: evolving " << system.n_atoms() << " atoms ("
         << (std::size_t{1} << system.n_atoms()) << " amplitudes)..." << '\n';
    StateVector psi = evolve(system, config.substeps_per_interval);
    SampleEnsemble ensemble = sample(psi, config.shots, config.base_seed);
    write_json_file(paths::samples(config), ensemble_to_json(ensemble));
    diag << "simulate: norm " << psi.norm() << ", " << ensemble.counts.size()
         << " distinct outcomes over " << ensemble.shots << " shots -> "
         << paths::samples(config) << '\n';
}

inline void run_select(const RunConfig& config, std::ostream& diag) {
    InfoProfile profile = profile_from_json(read_json_file(paths::profile(config)));
    SampleEnsemble ensemble = ensemble_from_json(read_json_file(paths::samples(config)));
    QuboInstance instance{profile.relevance, profile.redundancy, config.alpha};
    const auto [k_min, k_max] = detail::effective_k_range(config, instance.n_features());
    SelectionReport report = build_selection_report(
        ensemble, instance, profile.normalized_redundancy, config.filter_fraction,
        config.prune_threshold, k_min, k_max,
        static_cast<std::size_t>(config.alternatives_sets), config.filter_mode_enum());
    write_json_file(paths::selection(config),
                    selection_to_json(report, detail::artifact_feature_names(config)));
    diag << "select: kept " << report.kept.kept_shots << " shots, subsets for k in ["
         << k_min << ", " << k_max << "] -> " << paths::selection(config) << '\n';
}

inline void run_evaluate(const RunConfig& config, std::ostream& diag) {
    FeatureTable table = table_from_json(read_json_file(paths::table(config)));
    InfoProfile profile = profile_from_json(read_json_file(paths::profile(config)));
    SelectionReport report = selection_from_json(read_json_file(paths::selection(config)));
    EvalOptions options;
    options.test_fraction = config.test_fraction;
    options.classifier.l2 = config.l2;
    options.classifier.steps = config.gd_steps;
    options.classifier.learning_rate = config.learning_rate;
    ComparisonTable comparison = compare(table, profile.relevance,
                                         report.subsets_by_cardinality, config.eval_seeds,
                                         options);
    write_json_file(paths::comparison(config),
                    comparison_to_json(comparison, table.feature_names()));
    for (const ComparisonRow& row : comparison.rows)
        diag << "evaluate: k=" << row.k << ' ' << method_name(row.method) << " median AUC "
             << (row.median_auc ? std::to_string(*row.median_auc) : std::string("n/a"))
             << ", precision " << row.median_precision << ", recall " << row.median_recall
             << '\n';
    diag << "evaluate: -> " << paths::comparison(config) << '\n';
}

/// Run one stage (or the whole chain). Throws ConfigError /
/// MissingArtifactError / ValidationError / NumericalError; the CLI maps
/// these to exit codes.
inline void run_stage(Stage stage, const RunConfig& config, std::ostream& diag) {
    config.validate();
    std::filesystem::create_directories(config.output_dir);
    switch (stage) {
        case Stage::ingest: run_ingest(config, diag); break;
        case Stage::info: run_info(config, diag); break;
        case Stage::embed: run_embed(config, diag); break;
        case Stage::program: run_program(config, diag); break;
        case Stage::simulate: run_simulate(config, diag); break;
        case Stage::select: run_select(config, diag); break;
        case Stage::evaluate: run_evaluate(config, diag); break;
        case Stage::all:
            run_ingest(config, diag);
            run_info(config, diag);
            run_embed(config, diag);
            run_program(config, diag);
            run_simulate(config, diag);
            run_select(config, diag);
            run_evaluate(config, diag);
            break;
    }
}

/// One CSV per published figure: drive schedules, atom positions, the
/// embedding-error matrix, subset overlap vs k, and median metrics vs k.
inline void emit_plots(const RunConfig& config, std::ostream& diag) {
    config.validate();
    const std::string dir = config.output_dir;

    {
        DriveProgram program = program_from_json(read_json_file(paths::program(config)));
        std::ofstream out(dir + "/fig_schedules.csv", std::ios::binary);
        csv::write_row(out, {"t", "omega", "phase", "delta_g", "delta_l"});
        for (const DriveSample& s : discretize_program(program))
            csv::write_row(out, {format_double(s.t), format_double(s.omega),
                                 format_double(s.phase), format_double(s.delta_g),
                                 format_double(s.delta_l)});
        diag << "plots: " << dir << "/fig_schedules.csv" << '\n';
    }

    const auto names = detail::artifact_feature_names(config);
    {
        AtomLayout layout = layout_from_json(read_json_file(paths::layout(config)));
        std::ofstream out(dir + "/fig_positions.csv", std::ios::binary);
        csv::write_row(out, {"feature", "x", "y"});
        for (std::size_t i = 0; i < layout.n_atoms(); ++i)
            csv::write_row(out, {names.at(i), format_double(layout.positions[i][0]),
                                 format_double(layout.positions[i][1])});
        diag << "plots: " << dir << "/fig_positions.csv" << '\n';

        std::ofstream err(dir + "/fig_error_matrix.csv", std::ios::binary);
        csv::write_row(err, {"feature_i", "feature_j", "target_distance", "epsilon"});
        for (std::size_t i = 0; i < layout.n_atoms(); ++i)
            for (std::size_t j = i + 1; j < layout.n_atoms(); ++j)
                csv::write_row(err, {names.at(i), names.at(j),
                                     format_double(layout.target_distances(i, j)),
                                     format_double(layout.error_matrix(i, j))});
        diag << "plots: " << dir << "/fig_error_matrix.csv" << '\n';
    }

    {
        const nlohmann::json comparison = read_json_file(paths::comparison(config));
        std::ofstream overlap(dir + "/fig_overlap.csv", std::ios::binary);
        csv::write_row(overlap, {"k", "overlap"});
        for (const auto& [k, v] : comparison.at("overlap").items())
            csv::write_row(overlap, {k, format_double(v.get<double>())});
        diag << "plots: " << dir << "/fig_overlap.csv" << '\n';

        std::ofstream metrics(dir + "/fig_metrics.csv", std::ios::binary);
        csv::write_row(metrics, {"k", "method", "metric", "value"});
        for (const auto& row : comparison.at("rows")) {
            const std::string k = std::to_string(row.at("k").get<int>());
            const std::string method = row.at("method").get<std::string>();
            const auto& auc = row.at("median_auc");
            csv::write_row(metrics,
                           {k, method, "auc",
                            auc.is_null() ? "" : format_double(auc.get<double>())});
            csv::write_row(metrics, {k, method, "precision",
                                     format_double(row.at("median_precision").get<double>())});
            csv::write_row(metrics, {k, method, "recall",
                                     format_double(row.at("median_recall").get<double>())});
        }
        diag << "plots: " << dir << "/fig_metrics.csv" << '\n';
    }
}

}  // namespace qfs
