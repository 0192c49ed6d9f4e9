#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tsbm/errors.hpp"
#include "tsbm/intensity.hpp"
#include "tsbm/search.hpp"
#include "tsbm/tensor.hpp"
#include "tsbm/time_grid.hpp"

namespace tsbm {

// Provenance stamp carried by every emitted file: a hash of the run
// configuration plus the seed, written as a leading '# tsbm ...' comment
// (or as JSON fields). Parsers skip comment lines, so stamped files
// round-trip cleanly.
struct IoStamp {
    std::string config_hash;
    uint64_t seed = 0;
};

// FNV-1a 64-bit hash of a canonical configuration string, in hex.
std::string config_hash(const std::string& canonical);

// Timestamped interactions with raw node identifiers mapped onto dense
// 0-based indices in order of first appearance.
struct EventData {
    std::vector<Event> events;
    std::vector<std::string> node_ids;  // dense index -> raw token
};

// Delimited text: comma, semicolon, tab or space separated; columns
// source, target, time. '#' lines and blank lines are skipped, and a leading
// header row is skipped when its time field does not parse as a number.
EventData read_events(const std::string& path);

// Pre-binned counts. Raw node tokens are mapped like read_events; interval
// indices are shifted by index_base (the value of the first interval).
struct BinnedData {
    struct Cell {
        int source = 0;
        int target = 0;
        int interval = 0;  // 0-based after shifting
        int64_t count = 0;
    };
    std::vector<Cell> cells;
    std::vector<std::string> node_ids;
    int n_intervals = 0;  // highest interval seen + 1
};

// columns names the role of each input column in order, a permutation of
// {"source", "target", "interval", "count"}.
BinnedData read_binned(const std::string& path, const std::array<std::string, 4>& columns,
                       int index_base);

InteractionTensor tensor_from_binned(const BinnedData& data, const TimeGrid& grid);

// Tensor interchange format: CSV of the non-zero cells as
// "source,target,interval,count" with 1-based indices, plus a JSON side-car
// at csv_path + ".meta.json" holding the node count, grid breakpoints and
// stamp. Reading requires the side-car and reproduces the tensor exactly.
void write_tensor(const std::string& csv_path, const InteractionTensor& tensor,
                  const IoStamp& stamp);
InteractionTensor read_tensor(const std::string& csv_path);

void write_events(const std::string& path, const std::vector<Event>& events,
                  const std::vector<std::string>& node_ids, const IoStamp& stamp);

// Two-column assignment file (item identifier, 1-based cluster label).
void write_labels(const std::string& path, const std::string& item_column,
                  const std::vector<std::string>& ids, const std::vector<int>& labels,
                  const IoStamp& stamp);
// (id, label) pairs in file order; labels are kept as written.
std::vector<std::pair<std::string, int>> read_labels(const std::string& path);

// Per-block intensity estimates: one row per (block pair, interval) with the
// increment and the cumulative value at the interval's right breakpoint.
// Undefined blocks (no observable pairs) are written as NA.
void write_intensities(const std::string& path, const std::vector<IntensityCurve>& curves,
                       const TimeGrid& grid, const IoStamp& stamp);

// One row per accepted operation of every restart.
void write_icl_trace(const std::string& path, const std::vector<RestartReport>& restarts,
                     const IoStamp& stamp);

}  // namespace tsbm
