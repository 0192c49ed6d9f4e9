#include "tsbm/io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

namespace tsbm {

std::string config_hash(const std::string& canonical) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return std::string(buf);
}

namespace {

std::string stamp_comment(const std::string& kind, const IoStamp& stamp) {
    return "# tsbm " + kind + " config=" +
           (stamp.config_hash.empty() ? "none" : stamp.config_hash) +
           " seed=" + std::to_string(stamp.seed) + "\n";
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',' || c == ';' || c == '\t' || c == ' ') {
            if (!current.empty()) {
                fields.push_back(std::move(current));
                current.clear();
            }
        } else if (c != '\r') {
            current += c;
        }
    }
    if (!current.empty()) fields.push_back(std::move(current));
    return fields;
}

bool parse_long(const std::string& token, int64_t& value) {
    if (token.empty()) return false;
    size_t pos = 0;
    try {
        value = std::stoll(token, &pos);
    } catch (const std::exception&) {
        return false;
    }
    return pos == token.size();
}

bool parse_double(const std::string& token, double& value) {
    if (token.empty()) return false;
    size_t pos = 0;
    try {
        value = std::stod(token, &pos);
    } catch (const std::exception&) {
        return false;
    }
    return pos == token.size() && std::isfinite(value);
}

// Iterates the content lines of a delimited file, skipping blanks and '#'
// comments. fn returns false when a line should be treated as a header,
// which is tolerated for the first content line only.
template <typename Fn>
void for_each_content_line(const std::string& path, Fn&& fn) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::string line;
    int line_number = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++line_number;
        const std::vector<std::string> fields = split_fields(line);
        if (fields.empty() || fields[0][0] == '#') continue;
        const bool parsed = fn(fields, line_number);
        if (!parsed) {
            if (first_content) {
                first_content = false;  // header row
                continue;
            }
            throw DataError(path + " line " + std::to_string(line_number) +
                            ": malformed record");
        }
        first_content = false;
    }
}

// Raw-token to dense-index mapping in order of first appearance.
struct NodeInterner {
    std::unordered_map<std::string, int> index;
    std::vector<std::string> ids;

    int intern(const std::string& token) {
        auto it = index.find(token);
        if (it != index.end()) return it->second;
        const int dense = static_cast<int>(ids.size());
        index.emplace(token, dense);
        ids.push_back(token);
        return dense;
    }
};

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    return out;
}

}  // namespace

EventData read_events(const std::string& path) {
    EventData data;
    NodeInterner interner;
    for_each_content_line(path, [&](const std::vector<std::string>& fields, int line_number) {
        if (fields.size() != 3) return false;
        double time = 0.0;
        if (!parse_double(fields[2], time)) return false;
        if (time < 0.0)
            throw DataError(path + " line " + std::to_string(line_number) +
                            ": negative event time");
        if (fields[0] == fields[1])
            throw DataError(path + " line " + std::to_string(line_number) +
                            ": self interaction of node '" + fields[0] + "'");
        Event e;
        e.source = interner.intern(fields[0]);
        e.target = interner.intern(fields[1]);
        e.time = time;
        data.events.push_back(e);
        return true;
    });
    if (data.events.empty()) throw DataError(path + ": no event records");
    data.node_ids = std::move(interner.ids);
    return data;
}

BinnedData read_binned(const std::string& path, const std::array<std::string, 4>& columns,
                       int index_base) {
    int source_col = -1, target_col = -1, interval_col = -1, count_col = -1;
    for (int c = 0; c < 4; ++c) {
        if (columns[c] == "source") source_col = c;
        else if (columns[c] == "target") target_col = c;
        else if (columns[c] == "interval") interval_col = c;
        else if (columns[c] == "count") count_col = c;
        else throw std::invalid_argument("unknown column role '" + columns[c] + "'");
    }
    if (source_col < 0 || target_col < 0 || interval_col < 0 || count_col < 0)
        throw std::invalid_argument("column roles must cover source, target, interval, count");
    if (index_base != 0 && index_base != 1)
        throw std::invalid_argument("interval index base must be 0 or 1");

    BinnedData data;
    NodeInterner interner;
    for_each_content_line(path, [&](const std::vector<std::string>& fields, int line_number) {
        if (fields.size() != 4) return false;
        int64_t interval = 0, count = 0;
        if (!parse_long(fields[interval_col], interval) || !parse_long(fields[count_col], count))
            return false;
        if (interval < index_base)
            throw DataError(path + " line " + std::to_string(line_number) +
                            ": interval index below base " + std::to_string(index_base));
        if (count < 0)
            throw DataError(path + " line " + std::to_string(line_number) +
                            ": negative interaction count");
        if (fields[source_col] == fields[target_col])
            throw DataError(path + " line " + std::to_string(line_number) +
                            ": self interaction of node '" + fields[source_col] + "'");
        BinnedData::Cell cell;
        cell.source = interner.intern(fields[source_col]);
        cell.target = interner.intern(fields[target_col]);
        cell.interval = static_cast<int>(interval - index_base);
        cell.count = count;
        data.cells.push_back(cell);
        data.n_intervals = std::max(data.n_intervals, cell.interval + 1);
        return true;
    });
    if (data.cells.empty()) throw DataError(path + ": no count records");
    data.node_ids = std::move(interner.ids);
    return data;
}

InteractionTensor tensor_from_binned(const BinnedData& data, const TimeGrid& grid) {
    if (data.n_intervals > grid.n_intervals())
        throw DataError("data uses " + std::to_string(data.n_intervals) +
                        " intervals but the grid has " + std::to_string(grid.n_intervals()));
    InteractionTensor tensor(static_cast<int>(data.node_ids.size()), grid);
    for (size_t r = 0; r < data.cells.size(); ++r) {
        const auto& cell = data.cells[r];
        try {
            tensor.add(cell.source, cell.target, cell.interval, cell.count);
        } catch (const DataError& err) {
            throw DataError("count record " + std::to_string(r) + ": " + err.what());
        }
    }
    return tensor;
}

void write_tensor(const std::string& csv_path, const InteractionTensor& tensor,
                  const IoStamp& stamp) {
    std::ofstream out = open_output(csv_path);
    out << stamp_comment("tensor", stamp);
    out << "source,target,interval,count\n";
    for (int i = 0; i < tensor.n_nodes(); ++i) {
        for (int j = 0; j < tensor.n_nodes(); ++j) {
            if (j == i) continue;
            const int32_t* row = tensor.pair_row(i, j);
            for (int u = 0; u < tensor.n_intervals(); ++u) {
                if (row[u] != 0)
                    out << (i + 1) << ',' << (j + 1) << ',' << (u + 1) << ',' << row[u] << '\n';
            }
        }
    }
    if (!out) throw DataError("failed writing '" + csv_path + "'");

    nlohmann::json meta;
    meta["n_nodes"] = tensor.n_nodes();
    meta["breakpoints"] = tensor.grid().breakpoints();
    meta["config_hash"] = stamp.config_hash;
    meta["seed"] = stamp.seed;
    std::ofstream meta_out = open_output(csv_path + ".meta.json");
    meta_out << meta.dump(2) << '\n';
    if (!meta_out) throw DataError("failed writing '" + csv_path + ".meta.json'");
}

InteractionTensor read_tensor(const std::string& csv_path) {
    const std::string meta_path = csv_path + ".meta.json";
    std::ifstream meta_in(meta_path);
    if (!meta_in) throw DataError("cannot open '" + meta_path + "'");
    nlohmann::json meta;
    try {
        meta_in >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(meta_path + ": " + e.what());
    }
    if (!meta.contains("n_nodes") || !meta.contains("breakpoints"))
        throw DataError(meta_path + ": missing n_nodes or breakpoints");
    int n_nodes = 0;
    std::vector<double> breakpoints;
    try {
        n_nodes = meta.at("n_nodes").get<int>();
        breakpoints = meta.at("breakpoints").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(meta_path + ": " + e.what());
    }
    TimeGrid grid = [&] {
        try {
            return TimeGrid(breakpoints);
        } catch (const std::invalid_argument& e) {
            throw DataError(meta_path + ": " + e.what());
        }
    }();
    if (n_nodes < 2) throw DataError(meta_path + ": n_nodes must be at least 2");

    InteractionTensor tensor(n_nodes, grid);
    for_each_content_line(csv_path, [&](const std::vector<std::string>& fields, int line_number) {
        if (fields.size() != 4) return false;
        int64_t i = 0, j = 0, u = 0, c = 0;
        if (!parse_long(fields[0], i) || !parse_long(fields[1], j) ||
            !parse_long(fields[2], u) || !parse_long(fields[3], c))
            return false;
        if (i < 1 || i > n_nodes || j < 1 || j > n_nodes)
            throw DataError(csv_path + " line " + std::to_string(line_number) +
                            ": node index outside [1, " + std::to_string(n_nodes) + "]");
        if (u < 1 || u > grid.n_intervals())
            throw DataError(csv_path + " line " + std::to_string(line_number) +
                            ": interval index outside [1, " +
                            std::to_string(grid.n_intervals()) + "]");
        try {
            tensor.add(static_cast<int>(i - 1), static_cast<int>(j - 1),
                       static_cast<int>(u - 1), c);
        } catch (const DataError& err) {
            throw DataError(csv_path + " line " + std::to_string(line_number) + ": " +
                            err.what());
        }
        return true;
    });
    return tensor;
}

void write_events(const std::string& path, const std::vector<Event>& events,
                  const std::vector<std::string>& node_ids, const IoStamp& stamp) {
    std::ofstream out = open_output(path);
    out << stamp_comment("events", stamp);
    out << "source,target,time\n";
    for (const Event& e : events)
        out << node_ids[e.source] << ',' << node_ids[e.target] << ','
            << format_double(e.time) << '\n';
    if (!out) throw DataError("failed writing '" + path + "'");
}

void write_labels(const std::string& path, const std::string& item_column,
                  const std::vector<std::string>& ids, const std::vector<int>& labels,
                  const IoStamp& stamp) {
    if (ids.size() != labels.size())
        throw std::invalid_argument("ids and labels differ in length");
    std::ofstream out = open_output(path);
    out << stamp_comment("labels", stamp);
    out << item_column << ",cluster\n";
    for (size_t i = 0; i < ids.size(); ++i)
        out << ids[i] << ',' << (labels[i] + 1) << '\n';
    if (!out) throw DataError("failed writing '" + path + "'");
}

std::vector<std::pair<std::string, int>> read_labels(const std::string& path) {
    std::vector<std::pair<std::string, int>> labels;
    for_each_content_line(path, [&](const std::vector<std::string>& fields, int) {
        if (fields.size() != 2) return false;
        int64_t label = 0;
        if (!parse_long(fields[1], label)) return false;
        labels.emplace_back(fields[0], static_cast<int>(label));
        return true;
    });
    if (labels.empty()) throw DataError(path + ": no label records");
    return labels;
}

void write_intensities(const std::string& path, const std::vector<IntensityCurve>& curves,
                       const TimeGrid& grid, const IoStamp& stamp) {
    std::ofstream out = open_output(path);
    out << stamp_comment("intensities", stamp);
    out << "row_cluster,col_cluster,interval,t_end,increment,cumulative\n";
    auto cell = [](double v) { return std::isnan(v) ? std::string("NA") : format_double(v); };
    for (const IntensityCurve& curve : curves) {
        for (int u = 0; u < grid.n_intervals(); ++u) {
            out << (curve.row_cluster + 1) << ',' << (curve.col_cluster + 1) << ',' << (u + 1)
                << ',' << format_double(grid.breakpoint(u + 1)) << ','
                << cell(curve.increments[u]) << ',' << cell(curve.cumulative[u + 1]) << '\n';
        }
    }
    if (!out) throw DataError("failed writing '" + path + "'");
}

void write_icl_trace(const std::string& path, const std::vector<RestartReport>& restarts,
                     const IoStamp& stamp) {
    std::ofstream out = open_output(path);
    out << stamp_comment("icl-trace", stamp);
    out << "restart,step,log_icl\n";
    for (size_t r = 0; r < restarts.size(); ++r) {
        const auto& trace = restarts[r].icl_trace;
        for (size_t s = 0; s < trace.size(); ++s)
            out << (r + 1) << ',' << s << ',' << format_double(trace[s]) << '\n';
    }
    if (!out) throw DataError("failed writing '" + path + "'");
}

}  // namespace tsbm
