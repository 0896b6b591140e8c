#include <cstdlib>
#include <random>
#include <sstream>

#include "doctest.h"

#include "cfm/config.hpp"
#include "cfm/error.hpp"
#include "cfm/generators.hpp"
#include "cfm/io.hpp"
#include "test_support.hpp"

using namespace cfm;

namespace {

std::string config_error_field(const std::string& text) {
    try {
        (void)config::parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<no error>";
}

std::string config_error_message(const std::string& text) {
    try {
        (void)config::parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "<no error>";
}

}  // namespace

TEST_SUITE("number formatting") {
    TEST_CASE("shortest round trip") {
        CHECK(io::format_fraction(1.0) == "1.0");
        CHECK(io::format_fraction(0.5) == "0.5");
        CHECK(io::format_shortest(600.0) == "600");
        CHECK(io::format_shortest(0.1) == "0.1");
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 10000; ++i) {
            const double v = u(rng);
            CHECK(io::parse_double(io::format_fraction(v)) == v);
        }
        CHECK_THROWS_AS(io::parse_double("abc", 4), ParseError);
        CHECK_THROWS_AS(io::parse_double("1.5x"), ParseError);
    }
}

TEST_SUITE("matrix files") {
    TEST_CASE("write then read is bitwise identical") {
        std::mt19937_64 rng(2);
        for (int trial = 0; trial < 50; ++trial) {
            const auto m = cfm::testing::random_matrix(1 + rng() % 40, rng, 0.3);
            std::stringstream ss;
            io::write_matrix(ss, m, "cfm test seed=1");
            CHECK(ss.str().rfind("# cfm test seed=1\n", 0) == 0);
            CHECK(io::read_matrix(ss) == m);
        }
    }

    TEST_CASE("format") {
        std::stringstream ss;
        io::write_matrix(ss, CirculationMatrix::from_triplets(1, {{0, 0, 1.0}}));
        CHECK(ss.str() == "cfm 1 1\n1 1 1.0\n");
    }

    TEST_CASE("invalid column is rejected with its index") {
        std::istringstream in("cfm 2 3\n1 1 0.6\n2 1 0.4\n2 2 0.9\n");
        try {
            (void)io::read_matrix(in);
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("column 2") != std::string::npos);
        }
    }

    TEST_CASE("negative entries and negative implied diagonals are rejected") {
        std::istringstream neg("cfm 2 3\n1 1 1.2\n2 1 -0.2\n2 2 1.0\n");
        CHECK_THROWS_AS(io::read_matrix(neg), ValidationError);
        std::istringstream diag("cfm 3 4\n2 1 0.7\n3 1 0.5\n2 2 1\n3 3 1\n");
        try {
            (void)io::read_matrix(diag);
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("column 1") != std::string::npos);
        }
    }

    TEST_CASE("structural errors carry the line") {
        const auto line_of = [](const std::string& text) -> std::size_t {
            std::istringstream in(text);
            try {
                (void)io::read_matrix(in);
            } catch (const ParseError& e) {
                return e.line();
            }
            return 0;
        };
        CHECK(line_of("cfm 2 2\n1 1 1.0\n2 x 1.0\n") == 3);
        CHECK(line_of("cfm 2 2\n1 1 1.0\n3 2 1.0\n") == 3);
        CHECK(line_of("# c\ncfm 2 2\n1 1 1.0\n1 1 1.0\n") == 4);
        CHECK(line_of("matrix 2 2\n") == 1);
        std::istringstream short_file("cfm 2 3\n1 1 1\n2 2 1\n");
        CHECK_THROWS_AS(io::read_matrix(short_file), ParseError);
        CHECK_THROWS(io::load_matrix("/nonexistent/m.cfm"));
    }

    TEST_CASE("generated matrices survive a file round trip") {
        gen::TopologySpec t;
        t.kind = gen::TopologySpec::Kind::ScaleFree;
        t.n = 200;
        t.m = 3;
        const auto m = gen::generate_matrix(t, gen::SpendingSpec{}, 11);
        std::stringstream ss;
        io::write_matrix(ss, m);
        const auto back = io::read_matrix(ss);
        REQUIRE(back.nnz() == m.nnz());
        for (std::size_t k = 0; k < m.nnz(); ++k) CHECK(std::abs(back.values()[k] - m.values()[k]) <= 1e-15);
        CHECK(back == m);
    }
}

TEST_SUITE("amount files") {
    TEST_CASE("whitespace and commas") {
        std::istringstream in("# wealth\n100, 200\n300\n");
        CHECK(io::read_amounts(in) == std::vector<double>{100, 200, 300});
        std::istringstream bad("1 -2\n");
        CHECK_THROWS(io::read_amounts(bad));
    }
}

TEST_SUITE("snapshot files") {
    TEST_CASE("full table round trip") {
        SimulationTrace tr;
        tr.n = 2;
        tr.snapshots.push_back({0, 3.0, std::vector<double>{1.0, 2.0}, std::nullopt});
        tr.snapshots.push_back({4, 3.0, std::vector<double>{1.5, 1.5}, std::nullopt});
        std::stringstream ss;
        io::write_full_snapshots(ss, tr, "cfm fp");
        const auto t = io::read_snapshots(ss);
        CHECK(t.full);
        CHECK(t.n == 2);
        REQUIRE(t.rows.size() == 2);
        CHECK(t.rows[1].tau == 4);
        CHECK(*t.rows[1].values == std::vector<double>{1.5, 1.5});
    }

    TEST_CASE("taus must increase") {
        std::istringstream in("tau,total,a1\n2,1,1\n1,1,1\n");
        CHECK_THROWS_AS(io::read_snapshots(in), ParseError);
    }

    TEST_CASE("summary rows accept an undefined gini") {
        std::istringstream in("# fp\ntau,total,gini,top1,top10\n0,0,undefined,0,0\n");
        const auto t = io::read_snapshots(in);
        CHECK_FALSE(t.full);
        CHECK_FALSE(t.rows[0].summary->gini.has_value());
    }
}

TEST_SUITE("config") {
    const std::string minimal = R"({"n": 10, "seed": 3, "T": 5, "topology": {"kind": "ring"}})";

    TEST_CASE("minimal config resolves with defaults echoed") {
        const auto cfg = config::parse_config_text(minimal);
        CHECK(cfg.n == 10);
        CHECK(cfg.steps == 5);
        CHECK(cfg.mode == NumericMode::Float);
        const auto j = cfg.to_json();
        CHECK(j["mode"] == "float");
        CHECK(j["topology"]["k"] == 1);
        CHECK(j.contains("spending"));
        CHECK(j["spending"]["propensity"]["kind"] == "beta");
        CHECK(j.contains("initial_wealth"));
        CHECK(j.contains("snapshots"));
        CHECK(j["schedule"]["kind"] == "stationary");
        // the resolved dump parses back to the same configuration
        CHECK(config::parse_config(nlohmann::json::parse(j.dump())).hash() == cfg.hash());
    }

    TEST_CASE("schema violations name the field") {
        CHECK(config_error_field(R"({"n": 10, "seed": 3, "T": -1, "topology": {"kind": "ring"}})") == "T");
        CHECK(config_error_field(R"({"n": 10, "seed": 3, "topology": {"kind": "ring"}})") == "T");
        CHECK(config_error_field(R"({"n": 10, "seed": 3, "T": 1, "topology": {"kind": "ring", "kk": 2}})") ==
              "topology.kk");
        CHECK(config_error_field(R"({"n": 10, "seed": 3, "T": 1, "topolgy": {"kind": "ring"}})") != "<no error>");
        CHECK(config_error_field(
                  R"({"n": 10, "seed": 3, "T": 1, "topology": {"kind": "random-directed", "p_edge": 2}})") ==
              "topology.p_edge");
        CHECK(config_error_field(R"({"n": 10, "T": 1, "topology": {"kind": "ring"}})") == "seed");
        CHECK(config_error_field(R"({"n": 10, "seed": 1, "T": 1, "mode": "decimal", "topology": {"kind": "ring"}})") ==
              "mode");
        CHECK(config_error_field("{not json") != "<no error>");
    }

    TEST_CASE("initial wealth kinds are mutually exclusive") {
        const auto msg = config_error_message(
            R"({"n": 3, "seed": 1, "T": 1, "topology": {"kind": "ring"},
                "initial_wealth": {"equal": 5, "from_file": "x.txt"}})");
        CHECK(msg.find("mutually exclusive") != std::string::npos);
        CHECK(msg.find("initial_wealth") != std::string::npos);
    }

    TEST_CASE("integer mode needs whole units") {
        CHECK(config_error_field(R"({"n": 3, "seed": 1, "T": 1, "mode": "integer", "topology": {"kind": "ring"},
                                     "initial_wealth": {"equal": 2.5}})") == "initial_wealth");
    }

    TEST_CASE("environment overrides output and verbosity only") {
        auto cfg = config::parse_config_text(minimal);
        const auto hash = cfg.hash();
        ::setenv("CFM_OUT_DIR", "/tmp/cfm-env-out", 1);
        ::setenv("CFM_VERBOSITY", "quiet", 1);
        config::apply_environment(cfg);
        ::unsetenv("CFM_OUT_DIR");
        ::unsetenv("CFM_VERBOSITY");
        CHECK(cfg.output_dir == "/tmp/cfm-env-out");
        CHECK(cfg.quiet);
        CHECK(cfg.hash() == hash);
    }

    TEST_CASE("seed changes the hash, output dir does not") {
        auto a = config::parse_config_text(minimal);
        auto b = a;
        b.output_dir = "elsewhere";
        CHECK(a.hash() == b.hash());
        b.seed = 4;
        CHECK(a.hash() != b.hash());
        CHECK(a.fingerprint().find("seed=3") != std::string::npos);
        CHECK(a.fingerprint().find(gen::kRngAlgorithm) != std::string::npos);
    }

    TEST_CASE("initial wealth vectors") {
        auto cfg = config::parse_config_text(
            R"({"n": 4, "seed": 1, "T": 1, "topology": {"kind": "ring"},
                "initial_wealth": {"point_mass": {"agent": 4, "amount": 10}}})");
        CHECK(config::initial_wealth(cfg) == std::vector<double>{0, 0, 0, 10});
        cfg = config::parse_config_text(
            R"({"n": 50, "seed": 1, "T": 1, "topology": {"kind": "ring"},
                "initial_wealth": {"uniform": {"low": 1, "high": 2}}})");
        const auto x = config::initial_wealth(cfg);
        for (double v : x) CHECK((v >= 1.0 && v <= 2.0));
        CHECK(config::initial_wealth(cfg) == x);
    }
}
