#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>

#include "heavytail/experiments.hpp"
#include "heavytail/serialize.hpp"

using namespace heavytail;

namespace {
// strip the runtime metadata line, the only part allowed to vary across reruns
std::string without_runtime(const std::string& csv) {
    std::string out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        std::size_t nl = csv.find('\n', pos);
        if (nl == std::string::npos) nl = csv.size();
        const std::string line = csv.substr(pos, nl - pos);
        if (line.rfind("# runtime_seconds,", 0) != 0) out += line + "\n";
        pos = nl + 1;
    }
    return out;
}
}  // namespace

TEST_SUITE("serialize") {

TEST_CASE("doubles are formatted with 17 significant digits") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    CHECK(std::stod(format_double(3.141592653589793)) == 3.141592653589793);
}

TEST_CASE("non-finite values serialize as words") {
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("CSV quoting follows RFC rules") {
    CHECK(csv_quote("plain") == "plain");
    CHECK(csv_quote("a,b") == "\"a,b\"");
    CHECK(csv_quote("he said \"hi\"") == "\"he said \"\"hi\"\"\"");
    CHECK(csv_quote("line\nbreak") == "\"line\nbreak\"");
}

TEST_CASE("tables flag non-finite cells and enforce the column schema") {
    ResultTable t;
    t.experiment = "demo";
    t.columns = {"a", "b"};
    t.add_row({t.num(1.0), t.num(2.0)});
    CHECK(!t.nonfinite_values);
    t.add_row({t.num(std::numeric_limits<double>::infinity()), t.num(0.0)});
    CHECK(t.nonfinite_values);
    CHECK_THROWS_AS(t.add_row({"only-one-cell"}), std::invalid_argument);
    const std::string csv = to_csv(t);
    CHECK(csv.find("# nonfinite_values,true") != std::string::npos);
    CHECK(csv.find("inf") != std::string::npos);
}

TEST_CASE("JSON round trip preserves the table") {
    ResultTable t;
    t.experiment = "demo";
    t.columns = {"x", "value"};
    t.config_hash = "0123456789abcdef";
    t.runtime_seconds = 1.5;
    t.verdict = Verdict::inconclusive;
    t.add_row({t.num(2.0), t.num(0.25)});
    const auto j = to_json(t);
    const auto back = table_from_json(j);
    CHECK(back.experiment == t.experiment);
    CHECK(back.columns == t.columns);
    CHECK(back.rows == t.rows);
    CHECK(back.config_hash == t.config_hash);
    CHECK(back.verdict == Verdict::inconclusive);
    // schema-stable key order
    const std::string dumped = j.dump();
    CHECK(dumped.find("\"experiment\"") < dumped.find("\"columns\""));
    CHECK(dumped.find("\"columns\"") < dumped.find("\"rows\""));
    CHECK(dumped.find("\"rows\"") < dumped.find("\"metadata\""));
}

TEST_CASE("FNV-1a hash reference values") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a_hex("hello") != fnv1a_hex("hellp"));
}

TEST_CASE("spectral measure JSON round trip") {
    SpectralMeasure m;
    m.atoms = {{-1.0, 0.5}, {1.0, 0.5}};
    m.grid = {0.0, 1.0, 2.0};
    m.density = {0.1, 0.2, 0.1};
    m.tail = TailDescriptor{2.0, 1.5, 0.3};
    const auto j = measure_to_json(m);
    const auto back = measure_from_json(j);
    CHECK(back.atoms == m.atoms);
    CHECK(back.grid == m.grid);
    CHECK(back.density == m.density);
    REQUIRE(back.tail.has_value());
    CHECK(back.tail->cutoff == m.tail->cutoff);
    CHECK(back.tail->index == m.tail->index);
    CHECK(back.tail->scale == m.tail->scale);
    // key order of the on-disk format
    const std::string dumped = j.dump();
    CHECK(dumped.find("\"atoms\"") < dumped.find("\"grid\""));
    CHECK(dumped.find("\"grid\"") < dumped.find("\"density\""));
    CHECK(dumped.find("\"density\"") < dumped.find("\"tail\""));
}

TEST_CASE("reruns with the same config produce byte-identical output") {
    const ordered_json cfg = ordered_json::parse(R"({
        "experiment": "breiman",
        "theta": {"type": "uniform01"},
        "model": {"family": "pareto", "alpha": 1.0},
        "alpha": 1.0,
        "x_values": [10.0, 100.0],
        "tolerance": 1e-6
    })");
    auto t1 = run_experiment("breiman", cfg);
    auto t2 = run_experiment("breiman", cfg);
    t1.config_hash = t2.config_hash = fnv1a_hex(cfg.dump());
    CHECK(without_runtime(to_csv(t1)) == without_runtime(to_csv(t2)));
    CHECK(to_json(t1)["rows"] == to_json(t2)["rows"]);
}

TEST_CASE("config experiment tag must match the invoked experiment") {
    const ordered_json cfg = ordered_json::parse(R"({"experiment": "breiman"})");
    CHECK_THROWS_AS(run_experiment("mellin", cfg), std::invalid_argument);
    CHECK_THROWS_AS(run_experiment("no-such-op", ordered_json::object()),
                    std::invalid_argument);
}

}  // TEST_SUITE
