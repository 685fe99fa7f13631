#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "afesim/config.hpp"
#include "afesim/io.hpp"

using namespace afesim;
using Catch::Approx;

TEST_CASE("config parsing") {
    std::istringstream in(R"(# device description
[stack]
ar = 24
v_fb = -0.5

[transistor]
n_ss = 1.2
)");
    const auto kv = config::parse_stream(in);
    CHECK(config::to_number(kv, "stack.ar", 0.0) == 24.0);
    CHECK(config::to_number(kv, "stack.v_fb", 0.0) == -0.5);
    CHECK(config::to_number(kv, "transistor.n_ss", 0.0) == 1.2);
    CHECK(config::to_number(kv, "stack.missing", 7.5) == 7.5);
}

TEST_CASE("config errors carry the line number") {
    std::istringstream in("[stack]\nar = 16\nbogus line without equals\n");
    try {
        config::parse_stream(in);
        FAIL("expected a parse error");
    } catch (const config::ConfigError& e) {
        CHECK(e.line == 3);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("non-numeric values are rejected") {
    std::istringstream in("[stack]\nar = sixteen\n");
    const auto kv = config::parse_stream(in);
    CHECK_THROWS_AS(config::to_number(kv, "stack.ar", 0.0), config::ConfigError);
}

TEST_CASE("device loading applies overrides over the reference") {
    std::istringstream in("[stack]\nar = 8\n[transistor]\nw = 2e-5\n");
    const auto kv = config::parse_stream(in);
    const auto dev = config::load_device(kv);
    CHECK(dev.stack.ar == 8.0);
    CHECK(dev.mos.w == Approx(2e-5));
    const auto ref = calibration::reference_device();
    CHECK(dev.mos.v_t0 == ref.mos.v_t0); // untouched fields keep the defaults
}

TEST_CASE("invalid device parameters are rejected") {
    std::istringstream in("[stack]\nar = -4\n");
    const auto kv = config::parse_stream(in);
    CHECK_THROWS_AS(config::load_device(kv), config::ConfigError);
}

TEST_CASE("missing file error names the path") {
    try {
        config::parse_file("/nonexistent/afesim.conf");
        FAIL("expected an error");
    } catch (const config::ConfigError& e) {
        CHECK(std::string(e.what()).find("/nonexistent/afesim.conf") != std::string::npos);
    }
}

TEST_CASE("deterministic number formatting") {
    CHECK(io::num(0.1) == "0.1");
    CHECK(io::num(1e-9) == "1e-09");
    CHECK(io::num(12.3136e-3) == "0.0123136");
    CHECK(io::num(io::num(3.0) == "3" ? 3.0 : 0.0) == "3");
}

TEST_CASE("csv writer and reader round trip") {
    io::CsvWriter w({"a", "b"});
    w.row({io::num(1.5), "on"});
    w.row({io::num(2.5e-7), "off"});
    const std::string path = "/tmp/afesim_test_roundtrip.csv";
    io::write_file(path, w.str());
    const auto t = io::read_csv(path);
    REQUIRE(t.header.size() == 2);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][0] == "1.5");
    CHECK(t.rows[1][0] == "2.5e-07");
    CHECK(t.rows[1][1] == "off");
}

TEST_CASE("tech loading by name") {
    std::istringstream in("[tech]\nname = sram6t\n");
    const auto t = config::load_tech(config::parse_stream(in));
    CHECK(t.tech == array_model::Tech::Sram6T);
    CHECK(t.p_cell == Approx(48.1e-6 / 1024.0));
}
