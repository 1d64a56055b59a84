#include "doctest.h"

#include "pteem/config.hpp"
#include "pteem/errors.hpp"

#include <sstream>
#include <string>

using namespace pteem;

namespace {

std::vector<KeyValue> parse(const std::string& text) {
    std::istringstream in(text);
    return parse_ini(in, "test.ini");
}

} // namespace

TEST_CASE("ini parsing handles comments, sections and whitespace") {
    auto kvs = parse("# header comment\n"
                     "seed = 12\n"
                     "; another comment\n"
                     "\n"
                     "[mixture2d]\n"
                     "  runs =  7 \n"
                     "[galaxy]\n"
                     "data = /tmp/v.txt\n");
    REQUIRE(kvs.size() == 3);
    CHECK(kvs[0].section == "");
    CHECK(kvs[0].key == "seed");
    CHECK(kvs[0].value == "12");
    CHECK(kvs[0].line == 2);
    CHECK(kvs[1].section == "mixture2d");
    CHECK(kvs[1].key == "runs");
    CHECK(kvs[1].value == "7");
    CHECK(kvs[1].line == 6);
    CHECK(kvs[2].section == "galaxy");
    CHECK(kvs[2].key == "data");
    CHECK(kvs[2].origin == "test.ini");
}

TEST_CASE("ini parsing rejects malformed lines") {
    CHECK_THROWS_AS((void)parse("[unclosed\n"), config_error);
    CHECK_THROWS_AS((void)parse("[]\n"), config_error);
    CHECK_THROWS_AS((void)parse("just words\n"), config_error);
    CHECK_THROWS_AS((void)parse("= value\n"), config_error);
    CHECK_THROWS_WITH_AS((void)parse("seed = 1\noops\n"),
                         doctest::Contains("test.ini:2"), config_error);
    CHECK_THROWS_WITH_AS((void)load_ini("/nonexistent/p.ini"),
                         doctest::Contains("cannot open"), config_error);
}

TEST_CASE("settings getters convert and validate") {
    Settings s;
    s.set("runs", "42");
    s.set("p_ee", "0.25");
    s.set("unequal", "TRUE");
    s.set("flag2", "off");
    s.set("seed", "18446744073709551615");
    s.set("badint", "12x");
    s.set("badreal", "1.2.3");
    s.set("badbool", "maybe");

    CHECK(s.has("runs"));
    CHECK_FALSE(s.has("missing"));
    CHECK(s.get_int("runs", 0) == 42);
    CHECK(s.get_int("missing", -7) == -7);
    CHECK(s.get_real("p_ee", 0.0) == 0.25);
    CHECK(s.get_bool("unequal", false));
    CHECK_FALSE(s.get_bool("flag2", true));
    CHECK(s.get_bool("missing", true));
    CHECK(s.get_seed("seed", 0) == 18446744073709551615ull);
    CHECK(s.get_string("missing", "dflt") == "dflt");
    CHECK_THROWS_WITH_AS((void)s.get_int("badint", 0), doctest::Contains("badint"),
                         config_error);
    CHECK_THROWS_AS((void)s.get_real("badreal", 0.0), config_error);
    CHECK_THROWS_AS((void)s.get_bool("badbool", false), config_error);
    CHECK_THROWS_AS((void)s.get_seed("badint", 0), config_error);
    // later set wins
    s.set("runs", "9");
    CHECK(s.get_int("runs", 0) == 9);
}

TEST_CASE("apply_ini routes entries to the requested section") {
    auto kvs = parse("seed = 99\n"
                     "[galaxy]\n"
                     "data = velocities.txt\n"
                     "runs = 5\n"
                     "[mixture2d]\n"
                     "runs = 3\n");
    {
        Settings s;
        apply_ini(s, kvs, "mixture2d");
        CHECK(s.get_seed("seed", 0) == 99); // top-level key applies everywhere
        CHECK(s.get_int("runs", 0) == 3);   // from [mixture2d], not [galaxy]
        CHECK_FALSE(s.has("data"));         // galaxy-only key not leaked
    }
    {
        Settings s;
        apply_ini(s, kvs, "galaxy");
        CHECK(s.get_int("runs", 0) == 5);
        CHECK(s.get_string("data", "") == "velocities.txt");
    }
    // top-level key that only one section understands is skipped elsewhere
    {
        auto kv2 = parse("data = top.txt\n");
        Settings s;
        apply_ini(s, kv2, "mixture2d");
        CHECK_FALSE(s.has("data"));
        apply_ini(s, kv2, "galaxy");
        CHECK(s.get_string("data", "") == "top.txt");
    }
}

TEST_CASE("apply_ini rejects unknown sections and keys with line info") {
    Settings s;
    CHECK_THROWS_WITH_AS(apply_ini(s, parse("[nosuch]\nx = 1\n"), "mixture2d"),
                         doctest::Contains("unknown section"), config_error);
    CHECK_THROWS_WITH_AS(apply_ini(s, parse("[galaxy]\nwibble = 1\n"), "mixture2d"),
                         doctest::Contains("test.ini:2"), config_error);
    CHECK_THROWS_WITH_AS(apply_ini(s, parse("wibble = 1\n"), "mixture2d"),
                         doctest::Contains("unknown key"), config_error);
    CHECK_THROWS_AS(apply_ini(s, parse(""), "walrus"), config_error);
}

TEST_CASE("algorithm names parse exactly") {
    CHECK(parse_algorithm("pt") == Algorithm::pt);
    CHECK(parse_algorithm("pteem") == Algorithm::pteem);
    CHECK(parse_algorithm("ees") == Algorithm::ees);
    CHECK_THROWS_AS((void)parse_algorithm("PT"), config_error);
    CHECK_THROWS_AS((void)parse_algorithm(""), config_error);
}

TEST_CASE("mixture invocation defaults and overrides") {
    {
        Settings s;
        auto inv = mixture_invocation_from(s);
        REQUIRE(inv.algorithms.size() == 1);
        CHECK(inv.algorithms[0] == Algorithm::pteem);
        CHECK(inv.config.runs == 100);
        CHECK(inv.config.burnin == 2500);
        CHECK(inv.config.kept == 2500);
        CHECK(inv.config.ring_init == 500);
        CHECK(inv.config.p_ee == 0.1);
        CHECK(inv.config.threads == 1);
        CHECK_FALSE(inv.config.unequal);
    }
    {
        Settings s;
        s.set("algorithm", "all");
        s.set("runs", "4");
        s.set("samples", "111");
        s.set("unequal", "yes");
        s.set("seed", "777");
        auto inv = mixture_invocation_from(s);
        CHECK(inv.algorithms ==
              std::vector<Algorithm>{Algorithm::pteem, Algorithm::pt, Algorithm::ees});
        CHECK(inv.config.runs == 4);
        CHECK(inv.config.kept == 111);
        CHECK(inv.config.unequal);
        CHECK(inv.config.seed == 777);
    }
    Settings bad;
    bad.set("burnin", "0");
    CHECK_THROWS_WITH_AS((void)mixture_invocation_from(bad),
                         doctest::Contains("must be positive"), config_error);
    bad = Settings{};
    bad.set("p_ee", "1.0");
    CHECK_THROWS_AS((void)mixture_invocation_from(bad), config_error);
    bad = Settings{};
    bad.set("p_ee", "0");
    CHECK_THROWS_AS((void)mixture_invocation_from(bad), config_error);
    bad = Settings{};
    bad.set("runs", "99999999");
    CHECK_THROWS_WITH_AS((void)mixture_invocation_from(bad),
                         doctest::Contains("implausibly large"), config_error);
}

TEST_CASE("galaxy config defaults and restrictions") {
    {
        Settings s;
        auto c = galaxy_config_from(s);
        CHECK(c.algorithm == Algorithm::pteem);
        CHECK(c.runs == 100);
        CHECK(c.burnin == 2000);
        CHECK(c.kept == 10000);
        CHECK(c.data_path == "data/galaxy.txt");
    }
    {
        Settings s;
        s.set("algorithm", "pt");
        s.set("data", "x.txt");
        s.set("samples", "50");
        auto c = galaxy_config_from(s);
        CHECK(c.algorithm == Algorithm::pt);
        CHECK(c.data_path == "x.txt");
        CHECK(c.kept == 50);
    }
    Settings s;
    s.set("algorithm", "ees");
    CHECK_THROWS_AS((void)galaxy_config_from(s), config_error);
}

TEST_CASE("motif config defaults and restrictions") {
    {
        Settings s;
        auto c = tfbs_config_from(s);
        CHECK(c.algorithm == Algorithm::pteem);
        CHECK(c.runs == 3);
        CHECK(c.burnin == 200);
        CHECK(c.kept == 800);
        CHECK(c.ring_init == 100);
        CHECK(c.p_ee == 0.1);
    }
    {
        Settings s;
        s.set("algorithm", "ees");
        s.set("ring_init", "42");
        auto c = tfbs_config_from(s);
        CHECK(c.algorithm == Algorithm::ees);
        CHECK(c.ring_init == 42);
    }
    Settings s;
    s.set("algorithm", "pt");
    CHECK_THROWS_AS((void)tfbs_config_from(s), config_error);
}
