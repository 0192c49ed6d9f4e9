// Command line front end: fit clusters to interaction data, simulate
// synthetic networks, score clusterings and estimate intensity curves.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tsbm/errors.hpp"
#include "tsbm/evaluate.hpp"
#include "tsbm/intensity.hpp"
#include "tsbm/io.hpp"
#include "tsbm/search.hpp"
#include "tsbm/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tsbm;

namespace {

// ---------------------------------------------------------------------------
// Shared plumbing

struct GridSpec {
    std::string breakpoints;     // comma separated list, overrides the rest
    int n_intervals = 0;         // 0: take the input's interval count
    double horizon = 0.0;        // exclusive with interval_length
    double interval_length = 0.0;

    // data_intervals > 0 when the input already fixes an interval count.
    TimeGrid resolve(int data_intervals) const {
        if (horizon > 0.0 && interval_length > 0.0)
            throw std::invalid_argument("--horizon and --interval-length are exclusive");
        if (!breakpoints.empty()) {
            std::vector<double> pts;
            std::stringstream ss(breakpoints);
            std::string tok;
            while (std::getline(ss, tok, ','))
                if (!tok.empty()) pts.push_back(std::stod(tok));
            TimeGrid grid{std::move(pts)};
            if (grid.n_intervals() < data_intervals)
                throw std::invalid_argument("breakpoints cover fewer intervals than the data");
            return grid;
        }
        const int u = n_intervals > 0 ? n_intervals : data_intervals;
        if (u < 1)
            throw std::invalid_argument("grid unknown: pass --intervals or --breakpoints");
        if (u < data_intervals)
            throw std::invalid_argument("--intervals is smaller than the data's interval count");
        if (horizon > 0.0) return TimeGrid::uniform(u, horizon);
        const double step = interval_length > 0.0 ? interval_length : 1.0;
        return TimeGrid::uniform(u, step * u);
    }

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--breakpoints", breakpoints,
                        "Comma separated interval boundaries, starting at 0");
        cmd->add_option("--intervals", n_intervals, "Number of uniform intervals");
        cmd->add_option("--horizon", horizon, "End of the observation window");
        cmd->add_option("--interval-length", interval_length,
                        "Uniform interval length (default 1)");
    }
};

struct LoadedInput {
    InteractionTensor tensor;
    std::vector<std::string> node_ids;  // dense index -> raw token
};

std::array<std::string, 4> parse_columns(const std::string& spec) {
    std::array<std::string, 4> roles;
    std::stringstream ss(spec);
    std::string tok;
    size_t n = 0;
    while (std::getline(ss, tok, ',')) {
        if (n >= roles.size()) throw std::invalid_argument("--columns needs four roles");
        roles[n++] = tok;
    }
    if (n != roles.size()) throw std::invalid_argument("--columns needs four roles");
    return roles;
}

std::vector<std::string> numbered_ids(int n) {
    std::vector<std::string> ids(n);
    for (int i = 0; i < n; ++i) ids[i] = std::to_string(i + 1);
    return ids;
}

LoadedInput load_input(const std::string& path, const std::string& format,
                       const std::string& columns, int index_base, const GridSpec& grid) {
    if (format == "tensor") {
        InteractionTensor tensor = read_tensor(path);
        std::vector<std::string> ids = numbered_ids(tensor.n_nodes());
        return {std::move(tensor), std::move(ids)};
    }
    if (format == "events") {
        EventData data = read_events(path);
        double latest = 0.0;
        for (const Event& e : data.events) latest = std::max(latest, e.time);
        TimeGrid g = grid.resolve(grid.n_intervals > 0 || !grid.breakpoints.empty()
                                      ? 0
                                      : static_cast<int>(std::ceil(latest)));
        return {build_tensor(data.events, g, static_cast<int>(data.node_ids.size())),
                std::move(data.node_ids)};
    }
    if (format == "binned") {
        BinnedData data = read_binned(path, parse_columns(columns), index_base);
        TimeGrid g = grid.resolve(data.n_intervals);
        return {tensor_from_binned(data, g), std::move(data.node_ids)};
    }
    throw std::invalid_argument("unknown input format '" + format +
                                "', expected tensor, events or binned");
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory '" + dir + "': " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void write_json(const std::string& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw DataError("failed writing '" + path + "'");
    out << doc.dump(2) << "\n";
}

std::vector<IntensityCurve> all_block_curves(const InteractionTensor& tensor,
                                             const Partition& z,
                                             const std::optional<Partition>& time_clusters) {
    std::vector<IntensityCurve> curves;
    const int k = z.n_clusters();
    curves.reserve(static_cast<size_t>(k) * k);
    if (time_clusters.has_value()) {
        Array3<double> pi = estimate_pi_b(block_stats_b(tensor, z, *time_clusters));
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) curves.push_back(block_curve_b(pi, *time_clusters, a, b));
    } else {
        Array3<double> pi = estimate_pi_a(block_stats_a(tensor, z));
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) curves.push_back(block_curve_a(pi, a, b));
    }
    return curves;
}

// ---------------------------------------------------------------------------
// fit

struct FitOptions {
    std::string input;
    std::string format = "tensor";
    std::string columns = "source,target,interval,count";
    int index_base = 1;
    GridSpec grid;
    std::string model = "A";
    int k_max = 0;
    int d_max = 0;
    int restarts = 10;
    std::string strategy = "auto";
    std::string time_init = "ward";
    uint64_t seed = 1;
    double epsilon = 0.0;
    int threads = 1;
    Priors priors;
    std::string out_dir;
    bool emit_trace = false;
    bool emit_plot = false;
};

std::string fit_canonical(const FitOptions& opt) {
    std::ostringstream ss;
    ss << "fit|input=" << opt.input << "|format=" << opt.format << "|columns=" << opt.columns
       << "|index_base=" << opt.index_base << "|breakpoints=" << opt.grid.breakpoints
       << "|intervals=" << opt.grid.n_intervals << "|horizon=" << opt.grid.horizon
       << "|step=" << opt.grid.interval_length << "|model=" << opt.model
       << "|k_max=" << opt.k_max << "|d_max=" << opt.d_max << "|restarts=" << opt.restarts
       << "|strategy=" << opt.strategy << "|time_init=" << opt.time_init
       << "|seed=" << opt.seed << "|epsilon=" << opt.epsilon
       << "|a=" << opt.priors.a << "|b=" << opt.priors.b << "|alpha=" << opt.priors.alpha
       << "|beta=" << opt.priors.beta;
    return ss.str();
}

void write_node_map(const std::string& path, const std::vector<std::string>& ids,
                    const IoStamp& stamp) {
    std::ofstream out(path);
    if (!out) throw DataError("failed writing '" + path + "'");
    out << "# tsbm node-map config=" << stamp.config_hash << " seed=" << stamp.seed << "\n";
    out << "node,index\n";
    for (size_t i = 0; i < ids.size(); ++i) out << ids[i] << "," << (i + 1) << "\n";
}

// Observed per-block interaction totals, raw and averaged per ordered pair:
// the series behind cumulative-count plots.
void write_block_counts(const std::string& path, const InteractionTensor& tensor,
                        const Partition& z, const IoStamp& stamp) {
    BlockStatsA stats = block_stats_a(tensor, z);
    const int k = z.n_clusters();
    std::ofstream out(path);
    if (!out) throw DataError("failed writing '" + path + "'");
    out << "# tsbm block-counts config=" << stamp.config_hash << " seed=" << stamp.seed << "\n";
    out << "row_cluster,col_cluster,interval,t_end,count,cum_count_per_pair\n";
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            const int64_t pairs = stats.pair_count(a, b);
            double cum = 0.0;
            for (int u = 0; u < tensor.n_intervals(); ++u) {
                const int64_t s = stats.s(a, b, u);
                out << (a + 1) << "," << (b + 1) << "," << (u + 1) << ","
                    << tensor.grid().breakpoint(u + 1) << "," << s << ",";
                if (pairs == 0) {
                    out << "NA\n";
                } else {
                    cum += static_cast<double>(s) / static_cast<double>(pairs);
                    out << cum << "\n";
                }
            }
        }
}

void write_interval_clusters(const std::string& path, const Partition& tc, const TimeGrid& grid,
                             const IoStamp& stamp) {
    std::ofstream out(path);
    if (!out) throw DataError("failed writing '" + path + "'");
    out << "# tsbm interval-clusters config=" << stamp.config_hash << " seed=" << stamp.seed
        << "\n";
    out << "interval,t_start,t_end,cluster\n";
    for (int u = 0; u < tc.size(); ++u)
        out << (u + 1) << "," << grid.breakpoint(u) << "," << grid.breakpoint(u + 1) << ","
            << (tc.label(u) + 1) << "\n";
}

json restart_json(const RestartReport& r) {
    return json{{"seed", r.seed},
                {"init_log_icl", r.init_log_icl},
                {"final_log_icl", r.final_log_icl},
                {"n_clusters", r.n_clusters},
                {"n_time_clusters", r.n_time_clusters},
                {"node_moves", r.node_moves},
                {"node_merges", r.node_merges},
                {"interval_moves", r.interval_moves},
                {"interval_merges", r.interval_merges},
                {"accepted_operations", r.icl_trace.empty() ? 0 : r.icl_trace.size() - 1},
                {"recompute_gap", r.recompute_gap},
                {"integrity_ok", r.integrity_ok},
                {"wall_seconds", r.wall_seconds}};
}

int run_fit(const FitOptions& opt) {
    LoadedInput input = load_input(opt.input, opt.format, opt.columns, opt.index_base, opt.grid);
    const InteractionTensor& tensor = input.tensor;

    SearchConfig cfg;
    cfg.model = model_from_string(opt.model);
    cfg.k_max = opt.k_max;
    cfg.d_max = opt.d_max;
    cfg.n_restarts = opt.restarts;
    cfg.seed = opt.seed;
    cfg.epsilon = opt.epsilon;
    cfg.n_threads = opt.threads;
    if (opt.strategy == "auto")
        cfg.strategy = cfg.model == Model::A ? Strategy::NodesOnly
                                             : Strategy::NodesThenIntervals;
    else
        cfg.strategy = strategy_from_string(opt.strategy);
    if (opt.time_init == "ward")
        cfg.ward_time_init = true;
    else if (opt.time_init == "random")
        cfg.ward_time_init = false;
    else
        throw std::invalid_argument("unknown time init '" + opt.time_init +
                                    "', expected ward or random");
    opt.priors.validate();
    cfg.validate(tensor.n_nodes(), tensor.n_intervals());

    const IoStamp stamp{config_hash(fit_canonical(opt)), opt.seed};
    ensure_dir(opt.out_dir);

    const auto t0 = std::chrono::steady_clock::now();
    FitResult fit = run_greedy_icl(tensor, cfg, opt.priors);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                            .count();

    write_node_map(join_path(opt.out_dir, "node_map.csv"), input.node_ids, stamp);
    write_labels(join_path(opt.out_dir, "node_assignments.csv"), "node", input.node_ids,
                 fit.node_partition.labels(), stamp);
    if (fit.time_partition.has_value())
        write_labels(join_path(opt.out_dir, "time_assignments.csv"), "interval",
                     numbered_ids(tensor.n_intervals()), fit.time_partition->labels(), stamp);

    write_intensities(join_path(opt.out_dir, "intensities.csv"),
                      all_block_curves(tensor, fit.node_partition, fit.time_partition),
                      tensor.grid(), stamp);

    if (opt.emit_trace)
        write_icl_trace(join_path(opt.out_dir, "icl_trace.csv"), fit.restarts, stamp);
    if (opt.emit_plot) {
        write_block_counts(join_path(opt.out_dir, "block_counts.csv"), tensor,
                           fit.node_partition, stamp);
        if (fit.time_partition.has_value())
            write_interval_clusters(join_path(opt.out_dir, "interval_clusters.csv"),
                                    *fit.time_partition, tensor.grid(), stamp);
    }

    json meta;
    meta["command"] = "fit";
    meta["config_hash"] = stamp.config_hash;
    meta["seed"] = opt.seed;
    meta["input"] = opt.input;
    meta["format"] = opt.format;
    meta["model"] = to_string(cfg.model);
    meta["n_nodes"] = tensor.n_nodes();
    meta["n_intervals"] = tensor.n_intervals();
    meta["total_interactions"] = tensor.total();
    meta["k_max"] = cfg.resolved_k_max(tensor.n_nodes());
    if (cfg.model == Model::B) meta["d_max"] = cfg.resolved_d_max(tensor.n_intervals());
    meta["n_restarts"] = cfg.n_restarts;
    meta["strategy"] = to_string(cfg.strategy);
    if (cfg.model == Model::B) meta["time_init"] = cfg.ward_time_init ? "ward" : "random";
    meta["epsilon"] = cfg.epsilon;
    meta["n_threads"] = cfg.n_threads;
    meta["priors"] = {{"a", opt.priors.a},
                      {"b", opt.priors.b},
                      {"alpha", opt.priors.alpha},
                      {"beta", opt.priors.beta}};
    meta["log_icl"] = fit.log_icl;
    meta["n_clusters"] = fit.node_partition.n_clusters();
    if (fit.time_partition.has_value())
        meta["n_time_clusters"] = fit.time_partition->n_clusters();
    meta["best_restart"] = fit.best_restart;
    meta["wall_seconds"] = wall;
    json restarts = json::array();
    for (const RestartReport& r : fit.restarts) restarts.push_back(restart_json(r));
    meta["restarts"] = restarts;
    write_json(join_path(opt.out_dir, "run_meta.json"), meta);

    std::cout << "fit: model " << to_string(cfg.model) << ", K=" << fit.node_partition.n_clusters();
    if (fit.time_partition.has_value()) std::cout << ", D=" << fit.time_partition->n_clusters();
    std::cout << ", log ICL=" << fit.log_icl << ", best restart " << (fit.best_restart + 1) << "/"
              << cfg.n_restarts << ", " << wall << "s\n";
    std::cout << "outputs in " << opt.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
    std::string preset;
    std::string scenario_file;
    double psi = 0.0;
    uint64_t seed = 1;
    std::string out_dir;
    bool emit_events = false;
};

Array2<double> rate_matrix_from_json(const json& rows) {
    const int k = static_cast<int>(rows.size());
    Array2<double> m(k, k, 0.0);
    for (int i = 0; i < k; ++i) {
        if (static_cast<int>(rows[i].size()) != k)
            throw std::invalid_argument("rate matrices must be square");
        for (int j = 0; j < k; ++j) m(i, j) = rows[i][j].get<double>();
    }
    return m;
}

SimScenario scenario_from_json(const std::string& path, double cli_psi) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open scenario file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw DataError("scenario file '" + path + "': " + e.what());
    }

    const double psi = cli_psi != 0.0 ? cli_psi : doc.value("psi", 0.0);
    SimScenario s;
    if (doc.contains("preset")) {
        s = scenario_presets(doc.at("preset").get<std::string>(), psi);
    } else {
        s.psi = psi;
        s.name = "custom";
    }
    if (doc.contains("name")) s.name = doc.at("name").get<std::string>();
    if (doc.contains("n_nodes")) s.n_nodes = doc.at("n_nodes").get<int>();
    if (doc.contains("breakpoints"))
        s.grid = TimeGrid(doc.at("breakpoints").get<std::vector<double>>());
    else if (doc.contains("intervals"))
        s.grid = TimeGrid::uniform(doc.at("intervals").get<int>(),
                                   doc.value("horizon", doc.at("intervals").get<double>()));
    if (doc.contains("node_weights"))
        s.node_weights = doc.at("node_weights").get<std::vector<double>>();
    if (doc.contains("rates")) {
        s.rates.clear();
        for (const json& m : doc.at("rates")) s.rates.push_back(rate_matrix_from_json(m));
    }
    if (doc.contains("regime_of_interval")) {
        s.regime_of_interval = doc.at("regime_of_interval").get<std::vector<int>>();
        s.regime_weights.clear();
    }
    if (doc.contains("regime_weights")) {
        s.regime_weights = doc.at("regime_weights").get<std::vector<double>>();
        if (!doc.contains("regime_of_interval")) s.regime_of_interval.clear();
    }
    s.validate();
    return s;
}

std::string simulate_canonical(const SimulateOptions& opt, const SimScenario& s) {
    std::ostringstream ss;
    ss << "simulate|scenario=" << s.name << "|psi=" << s.psi << "|n_nodes=" << s.n_nodes
       << "|intervals=" << s.grid.n_intervals() << "|horizon=" << s.grid.horizon()
       << "|seed=" << opt.seed << "|events=" << opt.emit_events;
    return ss.str();
}

int run_simulate(const SimulateOptions& opt) {
    if (opt.preset.empty() == opt.scenario_file.empty())
        throw std::invalid_argument("pass exactly one of --preset or --scenario-file");
    SimScenario scenario = opt.scenario_file.empty()
                               ? scenario_presets(opt.preset, opt.psi)
                               : scenario_from_json(opt.scenario_file, opt.psi);

    const IoStamp stamp{config_hash(simulate_canonical(opt, scenario)), opt.seed};
    ensure_dir(opt.out_dir);

    Rng rng(opt.seed);
    std::vector<int> z = sample_memberships(scenario.node_weights, scenario.n_nodes, rng);
    std::vector<int> regimes = sample_regimes(scenario, rng);
    Rng events_rng = rng;  // same base draw: the event set bins to the tensor
    InteractionTensor tensor = sample_tensor(scenario, z, regimes, rng);

    write_tensor(join_path(opt.out_dir, "tensor.csv"), tensor, stamp);
    write_labels(join_path(opt.out_dir, "z_true.csv"), "node", numbered_ids(scenario.n_nodes),
                 z, stamp);
    write_labels(join_path(opt.out_dir, "y_true.csv"), "interval",
                 numbered_ids(scenario.grid.n_intervals()), regimes, stamp);
    if (opt.emit_events) {
        std::vector<Event> events = sample_events(scenario, z, regimes, events_rng);
        write_events(join_path(opt.out_dir, "events.csv"), events,
                     numbered_ids(scenario.n_nodes), stamp);
    }

    json meta;
    meta["command"] = "simulate";
    meta["config_hash"] = stamp.config_hash;
    meta["seed"] = opt.seed;
    meta["scenario"] = scenario.name;
    meta["psi"] = scenario.psi;
    meta["n_nodes"] = scenario.n_nodes;
    meta["n_intervals"] = scenario.grid.n_intervals();
    meta["horizon"] = scenario.grid.horizon();
    meta["n_node_clusters"] = scenario.n_node_clusters();
    meta["n_regimes"] = scenario.n_regimes();
    meta["total_interactions"] = tensor.total();
    write_json(join_path(opt.out_dir, "sim_meta.json"), meta);

    std::cout << "simulate: " << scenario.name << ", N=" << scenario.n_nodes
              << ", U=" << scenario.grid.n_intervals() << ", "
              << tensor.total() << " interactions\n";
    std::cout << "outputs in " << opt.out_dir << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// evaluate

int run_evaluate(const std::string& truth_path, const std::string& estimate_path) {
    std::vector<std::pair<std::string, int>> truth = read_labels(truth_path);
    std::vector<std::pair<std::string, int>> estimate = read_labels(estimate_path);
    if (truth.size() != estimate.size())
        throw DataError("label files disagree on the item count (" +
                        std::to_string(truth.size()) + " vs " +
                        std::to_string(estimate.size()) + ")");

    std::vector<int> a, b;
    a.reserve(truth.size());
    b.reserve(truth.size());
    for (const auto& [id, label] : truth) {
        a.push_back(label);
        auto it = std::find_if(estimate.begin(), estimate.end(),
                               [&](const auto& p) { return p.first == id; });
        if (it == estimate.end())
            throw DataError("item '" + id + "' from " + truth_path + " is missing in " +
                            estimate_path);
        b.push_back(it->second);
    }
    std::printf("%.10g\n", adjusted_rand_index(a, b));
    return 0;
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateOptions {
    std::string input;
    std::string node_labels;
    std::string time_labels;
    std::string model = "A";
    std::string out_dir;
};

// Assignment files key items by their 1-based index and number clusters from
// 1; returns 0-based compact labels.
std::vector<int> labels_by_index(const std::string& path, int n_items,
                                 const std::string& what) {
    std::vector<std::pair<std::string, int>> rows = read_labels(path);
    if (static_cast<int>(rows.size()) != n_items)
        throw DataError(path + ": expected " + std::to_string(n_items) + " " + what +
                        " rows, found " + std::to_string(rows.size()));
    std::vector<int> labels(n_items, -1);
    for (const auto& [id, label] : rows) {
        int idx = 0;
        try {
            size_t used = 0;
            idx = std::stoi(id, &used);
            if (used != id.size()) throw std::invalid_argument(id);
        } catch (const std::exception&) {
            throw DataError(path + ": " + what + " id '" + id + "' is not an index");
        }
        if (idx < 1 || idx > n_items)
            throw DataError(path + ": " + what + " index " + std::to_string(idx) +
                            " outside [1, " + std::to_string(n_items) + "]");
        if (labels[idx - 1] >= 0)
            throw DataError(path + ": duplicate " + what + " index " + std::to_string(idx));
        if (label < 1) throw DataError(path + ": cluster numbers are 1-based");
        labels[idx - 1] = label - 1;
    }
    return Partition::from_labels(std::move(labels)).compacted().labels();
}

int run_estimate(const EstimateOptions& opt) {
    InteractionTensor tensor = read_tensor(opt.input);
    const Model model = model_from_string(opt.model);
    Partition z = Partition::from_labels(
        labels_by_index(opt.node_labels, tensor.n_nodes(), "node"));

    std::optional<Partition> tc;
    if (model == Model::B) {
        if (opt.time_labels.empty())
            throw std::invalid_argument("model B needs --time-labels");
        tc = Partition::from_labels(
            labels_by_index(opt.time_labels, tensor.n_intervals(), "interval"));
    } else if (!opt.time_labels.empty()) {
        throw std::invalid_argument("model A takes no --time-labels");
    }

    std::ostringstream canonical;
    canonical << "estimate|input=" << opt.input << "|node_labels=" << opt.node_labels
              << "|time_labels=" << opt.time_labels << "|model=" << opt.model;
    const IoStamp stamp{config_hash(canonical.str()), 0};
    ensure_dir(opt.out_dir);

    write_intensities(join_path(opt.out_dir, "intensities.csv"),
                      all_block_curves(tensor, z, tc), tensor.grid(), stamp);

    json meta;
    meta["command"] = "estimate";
    meta["config_hash"] = stamp.config_hash;
    meta["model"] = to_string(model);
    meta["n_nodes"] = tensor.n_nodes();
    meta["n_intervals"] = tensor.n_intervals();
    meta["n_clusters"] = z.n_clusters();
    if (tc.has_value()) meta["n_time_clusters"] = tc->n_clusters();
    write_json(join_path(opt.out_dir, "run_meta.json"), meta);

    std::cout << "estimate: " << z.n_clusters() * z.n_clusters() << " block curves in "
              << opt.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Clustering of dynamic interaction networks by exact ICL maximization"};
    app.require_subcommand(1);

    FitOptions fit_opt;
    CLI::App* fit = app.add_subcommand("fit", "Cluster nodes (and intervals) of a network");
    fit->add_option("--input", fit_opt.input, "Input data file")->required();
    fit->add_option("--format", fit_opt.format, "Input format: tensor, events or binned");
    fit->add_option("--columns", fit_opt.columns,
                    "Column roles of a binned file, e.g. source,target,interval,count");
    fit->add_option("--index-base", fit_opt.index_base,
                    "First interval index of a binned file (default 1)");
    fit_opt.grid.add_flags(fit);
    fit->add_option("--model", fit_opt.model, "A (per-interval) or B (clustered intervals)");
    fit->add_option("--k-max", fit_opt.k_max, "Cluster budget (default ceil(N/2))");
    fit->add_option("--d-max", fit_opt.d_max,
                    "Time cluster budget, model B (default ceil(sqrt(U)))");
    fit->add_option("--restarts", fit_opt.restarts, "Random restarts (default 10)");
    fit->add_option("--strategy", fit_opt.strategy,
                    "auto, nodes, tn (nodes then intervals), nt or alt");
    fit->add_option("--time-init", fit_opt.time_init,
                    "Interval label seeding, model B: ward or random");
    fit->add_option("--seed", fit_opt.seed, "RNG seed (default 1)");
    fit->add_option("--epsilon", fit_opt.epsilon, "Minimal accepted gain (default 0)");
    fit->add_option("--threads", fit_opt.threads, "Concurrent restarts (default 1)");
    fit->add_option("--prior-a", fit_opt.priors.a, "Gamma shape (default 1)");
    fit->add_option("--prior-b", fit_opt.priors.b, "Gamma rate (default 1)");
    fit->add_option("--prior-alpha", fit_opt.priors.alpha,
                    "Node Dirichlet concentration (default 1)");
    fit->add_option("--prior-beta", fit_opt.priors.beta,
                    "Time Dirichlet concentration (default 1)");
    fit->add_option("--out", fit_opt.out_dir, "Output directory")->required();
    fit->add_flag("--emit-trace", fit_opt.emit_trace, "Write the per-restart ICL trace");
    fit->add_flag("--emit-plot-data", fit_opt.emit_plot,
                  "Write plot-ready block count and interval cluster series");

    SimulateOptions sim_opt;
    CLI::App* simulate = app.add_subcommand("simulate", "Draw a synthetic network");
    simulate->add_option("--preset", sim_opt.preset,
                         "Named scenario: scenario1, overfit, scenario2, scenario2-K3");
    simulate->add_option("--scenario-file", sim_opt.scenario_file,
                         "JSON scenario description (may extend a preset)");
    simulate->add_option("--psi", sim_opt.psi, "Planted contrast override (>= 1)");
    simulate->add_option("--seed", sim_opt.seed, "RNG seed (default 1)");
    simulate->add_option("--out", sim_opt.out_dir, "Output directory")->required();
    simulate->add_flag("--events", sim_opt.emit_events,
                       "Also write timestamped events that bin to the tensor");

    std::string truth_path, estimate_path;
    CLI::App* evaluate = app.add_subcommand(
        "evaluate", "Adjusted Rand index between two assignment files");
    evaluate->add_option("--truth", truth_path, "Reference assignment file")->required();
    evaluate->add_option("--estimate", estimate_path, "Assignment file to score")->required();

    EstimateOptions est_opt;
    CLI::App* estimate = app.add_subcommand(
        "estimate", "Intensity curves for a fixed clustering");
    estimate->add_option("--input", est_opt.input, "Tensor CSV (with .meta.json side-car)")
        ->required();
    estimate->add_option("--node-labels", est_opt.node_labels, "Node assignment file")
        ->required();
    estimate->add_option("--time-labels", est_opt.time_labels,
                         "Interval assignment file (model B)");
    estimate->add_option("--model", est_opt.model, "A or B");
    estimate->add_option("--out", est_opt.out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (fit->parsed()) return run_fit(fit_opt);
        if (simulate->parsed()) return run_simulate(sim_opt);
        if (evaluate->parsed()) return run_evaluate(truth_path, estimate_path);
        if (estimate->parsed()) return run_estimate(est_opt);
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
