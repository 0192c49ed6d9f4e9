#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "reference.hpp"
#include "tsbm/errors.hpp"
#include "tsbm/io.hpp"

using namespace tsbm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("tsbm_io_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string write_file(const TempDir& dir, const std::string& name, const std::string& body) {
    const std::string p = dir.file(name);
    std::ofstream out(p);
    out << body;
    return p;
}

const std::array<std::string, 4> kStdColumns{"source", "target", "interval", "count"};

}  // namespace

TEST_CASE("event files: delimiters, headers, comments, id interning") {
    TempDir dir;
    const std::string path = write_file(dir, "events.csv",
                                        "# interaction log\n"
                                        "sender,receiver,time\n"
                                        "alice,bob,0.5\n"
                                        "bob,alice;1.25\n"
                                        "\n"
                                        "carol\tbob\t2.0\n");
    EventData data = read_events(path);
    REQUIRE(data.node_ids.size() == 3);
    CHECK(data.node_ids[0] == "alice");
    CHECK(data.node_ids[1] == "bob");
    CHECK(data.node_ids[2] == "carol");
    REQUIRE(data.events.size() == 3);
    CHECK(data.events[0].source == 0);
    CHECK(data.events[0].target == 1);
    CHECK(data.events[0].time == 0.5);
    CHECK(data.events[1].source == 1);
    CHECK(data.events[1].target == 0);
    CHECK(data.events[2].source == 2);
    CHECK(data.events[2].time == 2.0);
}

TEST_CASE("event files: malformed rows are rejected with their line number") {
    TempDir dir;
    CHECK_THROWS_WITH_AS(read_events(write_file(dir, "bad1.csv", "a,b,0.5\nx,y\n")),
                         doctest::Contains("line 2"), DataError);
    CHECK_THROWS_WITH_AS(read_events(write_file(dir, "bad2.csv", "a,b,0.5\na,b,oops\n")),
                         doctest::Contains("line 2"), DataError);
    CHECK_THROWS_WITH_AS(read_events(write_file(dir, "bad3.csv", "a,b,0.5\nc,d,-2\n")),
                         doctest::Contains("line 2"), DataError);
    CHECK_THROWS_WITH_AS(read_events(write_file(dir, "bad4.csv", "a,b,0.5\nc,c,1.0\n")),
                         doctest::Contains("line 2"), DataError);
    CHECK_THROWS_AS(read_events(dir.file("missing.csv")), DataError);
    CHECK_THROWS_AS(read_events(write_file(dir, "empty.csv", "# nothing\n")), DataError);
}

TEST_CASE("pre-binned counts: column roles, one-based indices, accumulation") {
    TempDir dir;
    // The classic row: source 52, target 26, interval 5, 16 interactions.
    const std::string path = write_file(dir, "binned.txt",
                                        "source target interval count\n"
                                        "52 26 5 16\n"
                                        "26 52 1 2\n"
                                        "52 26 5 4\n");
    BinnedData data = read_binned(path, kStdColumns, 1);
    REQUIRE(data.node_ids.size() == 2);
    CHECK(data.node_ids[0] == "52");
    CHECK(data.node_ids[1] == "26");
    CHECK(data.n_intervals == 5);

    InteractionTensor y = tensor_from_binned(data, TimeGrid::uniform(5, 5.0));
    CHECK(y.count(0, 1, 4) == 20);  // two rows for the same cell accumulate
    CHECK(y.count(1, 0, 0) == 2);
    CHECK(y.total() == 22);
}

TEST_CASE("pre-binned counts: permuted columns and zero-based intervals") {
    TempDir dir;
    const std::string path = write_file(dir, "binned.csv",
                                        "12,0,u,v\n"
                                        "3,2,v,u\n");
    BinnedData data = read_binned(path, {"count", "interval", "source", "target"}, 0);
    REQUIRE(data.cells.size() == 2);
    CHECK(data.cells[0].count == 12);
    CHECK(data.cells[0].interval == 0);
    CHECK(data.cells[0].source == 0);  // "u"
    CHECK(data.cells[0].target == 1);  // "v"
    CHECK(data.cells[1].interval == 2);
    CHECK(data.n_intervals == 3);
}

TEST_CASE("pre-binned counts: bad records carry their provenance") {
    TempDir dir;
    CHECK_THROWS_WITH_AS(
        read_binned(write_file(dir, "b1.csv", "a,b,1,2\na,b,1\n"), kStdColumns, 1),
        doctest::Contains("line 2"), DataError);
    CHECK_THROWS_WITH_AS(
        read_binned(write_file(dir, "b2.csv", "a,b,1,2\na,b,0,3\n"), kStdColumns, 1),
        doctest::Contains("line 2"), DataError);  // interval below the index base
    CHECK_THROWS_WITH_AS(
        read_binned(write_file(dir, "b3.csv", "a,b,1,2\na,b,2,-3\n"), kStdColumns, 1),
        doctest::Contains("line 2"), DataError);

    CHECK_THROWS_WITH_AS(read_binned(write_file(dir, "b4.csv", "a,a,1,2\n"), kStdColumns, 1),
                         doctest::Contains("line 1"), DataError);

    BinnedData widest = read_binned(write_file(dir, "b5.csv", "a,b,9,1\n"), kStdColumns, 1);
    CHECK_THROWS_WITH_AS(tensor_from_binned(widest, TimeGrid::uniform(5, 5.0)),
                         doctest::Contains("9 intervals"), DataError);

    BinnedData overflow = read_binned(
        write_file(dir, "b6.csv", "a,b,1,2000000000\na,b,1,2000000000\n"), kStdColumns, 1);
    CHECK_THROWS_WITH_AS(tensor_from_binned(overflow, TimeGrid::uniform(1, 1.0)),
                         doctest::Contains("count record 1"), DataError);
}

TEST_CASE("tensor files round-trip exactly, side-car included") {
    TempDir dir;
    Rng rng(55);
    InteractionTensor y = ref::random_tensor(6, 4, 0.9, rng);
    IoStamp stamp{config_hash("spec"), 31};

    const std::string path = dir.file("tensor.csv");
    write_tensor(path, y, stamp);
    CHECK(fs::exists(path + ".meta.json"));

    InteractionTensor back = read_tensor(path);
    CHECK(back.n_nodes() == 6);
    CHECK(back.n_intervals() == 4);
    CHECK(back.grid().horizon() == doctest::Approx(4.0));
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            if (i == j) continue;
            for (int u = 0; u < 4; ++u) CHECK(back.count(i, j, u) == y.count(i, j, u));
        }

    // A non-uniform grid survives through the side-car breakpoints.
    InteractionTensor odd(3, TimeGrid({0.0, 0.5, 2.0, 2.25}));
    odd.add(0, 2, 1, 7);
    const std::string odd_path = dir.file("odd.csv");
    write_tensor(odd_path, odd, stamp);
    InteractionTensor odd_back = read_tensor(odd_path);
    CHECK(odd_back.grid().breakpoints() == std::vector<double>{0.0, 0.5, 2.0, 2.25});
    CHECK(odd_back.count(0, 2, 1) == 7);

    CHECK_THROWS_AS(read_tensor(dir.file("nope.csv")), DataError);
}

TEST_CASE("tensor files reject inconsistent rows") {
    TempDir dir;
    Rng rng(56);
    InteractionTensor y = ref::random_tensor(3, 2, 1.0, rng);
    const std::string path = dir.file("t.csv");
    write_tensor(path, y, IoStamp{});

    // Corrupt the CSV body while keeping the side-car: out-of-range node.
    std::ofstream out(path, std::ios::app);
    out << "9,1,1,3\n";
    out.close();
    CHECK_THROWS_AS(read_tensor(path), DataError);
}

TEST_CASE("label files round-trip with one-based cluster numbers") {
    TempDir dir;
    const std::string path = dir.file("labels.csv");
    write_labels(path, "node", {"alice", "bob", "carol"}, {0, 1, 0}, IoStamp{"abcd", 7});

    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    CHECK(first.find("# tsbm") == 0);
    CHECK(first.find("abcd") != std::string::npos);
    CHECK(first.find("seed=7") != std::string::npos);

    std::vector<std::pair<std::string, int>> back = read_labels(path);
    REQUIRE(back.size() == 3);
    CHECK(back[0] == std::pair<std::string, int>{"alice", 1});
    CHECK(back[1] == std::pair<std::string, int>{"bob", 2});
    CHECK(back[2] == std::pair<std::string, int>{"carol", 1});

    CHECK_THROWS_WITH_AS(read_labels(write_file(dir, "bad.csv", "node,cluster\nx,1\ny,zzz\n")),
                         doctest::Contains("line 3"), DataError);
}

TEST_CASE("event files round-trip through write_events") {
    TempDir dir;
    std::vector<Event> events{{0, 1, 0.25}, {1, 2, 0.5}, {2, 0, 1.75}};
    const std::string path = dir.file("events.csv");
    write_events(path, events, {"n1", "n2", "n3"}, IoStamp{"ffff", 3});

    EventData back = read_events(path);
    REQUIRE(back.events.size() == 3);
    CHECK(back.node_ids == std::vector<std::string>{"n1", "n2", "n3"});
    for (size_t i = 0; i < events.size(); ++i) {
        CHECK(back.events[i].source == events[i].source);
        CHECK(back.events[i].target == events[i].target);
        CHECK(back.events[i].time == events[i].time);  // %.17g is lossless
    }
}

TEST_CASE("intensity files label undefined blocks NA and carry cumulatives") {
    TempDir dir;
    IntensityCurve defined;
    defined.row_cluster = 0;
    defined.col_cluster = 1;
    defined.increments = {1.5, 0.5};
    defined.cumulative = {0.0, 1.5, 2.0};
    IntensityCurve undefined;
    undefined.row_cluster = 1;
    undefined.col_cluster = 1;
    undefined.increments = {std::nan(""), std::nan("")};
    undefined.cumulative = {0.0, std::nan(""), std::nan("")};

    const std::string path = dir.file("intensities.csv");
    write_intensities(path, {defined, undefined}, TimeGrid::uniform(2, 2.0), IoStamp{});

    std::ifstream in(path);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == 6);  // stamp, header, 2 blocks x 2 intervals
    CHECK(lines[1] == "row_cluster,col_cluster,interval,t_end,increment,cumulative");
    CHECK(lines[2] == "1,2,1,1,1.5,1.5");
    CHECK(lines[3] == "1,2,2,2,0.5,2");
    CHECK(lines[4] == "2,2,1,1,NA,NA");
    CHECK(lines[5] == "2,2,2,2,NA,NA");
}

TEST_CASE("trace files list every restart's accepted operations") {
    TempDir dir;
    RestartReport r1;
    r1.icl_trace = {-10.0, -8.0, -7.5};
    RestartReport r2;
    r2.icl_trace = {-12.0};
    const std::string path = dir.file("trace.csv");
    write_icl_trace(path, {r1, r2}, IoStamp{});

    std::ifstream in(path);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == 6);
    CHECK(lines[1] == "restart,step,log_icl");
    CHECK(lines[2] == "1,0,-10");
    CHECK(lines[4] == "1,2,-7.5");
    CHECK(lines[5] == "2,0,-12");
}

TEST_CASE("config hashes are stable and collision-averse") {
    const std::string h1 = config_hash("model=A k_max=25");
    CHECK(h1 == config_hash("model=A k_max=25"));
    CHECK(h1 != config_hash("model=A k_max=24"));
    CHECK(h1.size() == 16);
    for (char c : h1) CHECK(std::isxdigit(static_cast<unsigned char>(c)));
}
