#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fas/config.hpp"
#include "fas/report.hpp"

#include "json.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace fas;
namespace fs = std::filesystem;

namespace {

std::string scratch_path(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "faslab_config_test";
    fs::create_directories(dir);
    return (dir / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("parsing accepts comments, blanks and loose spacing") {
    const Config c = Config::from_text("# leading comment\n"
                                       "\n"
                                       "grid.n=2\n"
                                       "  grid.h   =   0.0625  # trailing note\n"
                                       "solver.eps = 0.25\n"
                                       "freq.k_list = 1, 2.5 ,3\n"
                                       "potential.bumps = 0.1,0,0,0.4,0.8\n");
    CHECK(c.has("grid.n"));
    CHECK(c.has("grid.h"));
    CHECK(!c.has("grid.L"));
    CHECK(c.get_int("grid.n", 0) == 2);
    CHECK(c.get_double("grid.h", 0.0) == 0.0625);
    CHECK(c.get_double("grid.L", 1.5) == 1.5);
    const auto ks = c.get_double_list("freq.k_list", {});
    REQUIRE(ks.size() == 3);
    CHECK(ks[0] == 1.0);
    CHECK(ks[1] == 2.5);
    CHECK(ks[2] == 3.0);
    CHECK(c.get_string("potential.bumps", "") == "0.1,0,0,0.4,0.8");
}

TEST_CASE("malformed lines and values are rejected with the field name") {
    CHECK_THROWS_AS(Config::from_text("grid.n 2\n"), ConfigError);
    CHECK_THROWS_AS(Config::from_text("bad key! = 2\n"), ConfigError);
    CHECK_THROWS_AS(Config::from_text("grid.n = 2\ngrid.n = 3\n"), ConfigError);

    const Config c = Config::from_text("grid.h = abc\n"
                                       "grid.n = 2.5\n"
                                       "carleman.with_potential = maybe\n"
                                       "ensemble.seed = -4\n"
                                       "freq.k_list = 1,,3\n"
                                       "empty.value =\n");
    CHECK_THROWS_WITH_AS(c.get_double("grid.h", 0.0),
                         "config: grid.h has a malformed number 'abc'", ConfigError);
    CHECK_THROWS_AS(c.get_int("grid.n", 0), ConfigError);
    CHECK_THROWS_AS(c.get_bool("carleman.with_potential", false), ConfigError);
    CHECK_THROWS_AS(c.get_u64("ensemble.seed", 0), ConfigError);
    CHECK_THROWS_AS(c.get_double_list("freq.k_list", {}), ConfigError);
    CHECK_THROWS_AS(c.require_string("empty.value"), ConfigError);
    CHECK_THROWS_AS(c.require_string("missing.key"), ConfigError);

    CHECK_THROWS_AS(Config::from_file(scratch_path("does_not_exist.cfg")), ConfigError);
}

TEST_CASE("hash is order-insensitive and value-sensitive") {
    const Config a = Config::from_text("grid.n = 2\ngrid.h = 0.0625\n");
    const Config b = Config::from_text("grid.h = 0.0625\ngrid.n = 2\n");
    const Config c = Config::from_text("grid.n = 2\ngrid.h = 0.03125\n");
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());
    CHECK(a.hash().size() == 16);
    for (const char ch : a.hash()) CHECK(std::isxdigit(static_cast<unsigned char>(ch)));
}

TEST_CASE("unknown keys are rejected exactly") {
    const Config c = Config::from_text("grid.n = 2\ngrid.hh = 0.1\n");
    CHECK_NOTHROW(c.check_keys({"grid.n", "grid.hh"}));
    CHECK_THROWS_WITH_AS(c.check_keys({"grid.n", "grid.h"}),
                         "config: unknown key 'grid.hh'", ConfigError);
}

TEST_CASE("grid and ensemble sections build typed configs") {
    const Config c = Config::from_text("grid.n = 3\n"
                                       "grid.L = 1.75\n"
                                       "grid.h = 0.125\n"
                                       "grid.t0 = -2\n"
                                       "grid.T = 5\n"
                                       "ensemble.count = 6\n"
                                       "ensemble.seed = 42\n"
                                       "ensemble.r_min = 0.25\n");
    const GridConfig g = grid_from_config(c);
    CHECK(g.n == 3);
    CHECK(g.L == 1.75);
    CHECK(g.h == 0.125);
    CHECK(g.t0 == -2.0);
    CHECK(g.T == 5.0);
    CHECK(g.sponge_width == 0.35); // untouched default

    const EnsembleSpec e = ensemble_from_config(c);
    CHECK(e.count == 6);
    CHECK(e.seed == 42);
    CHECK(e.r_min == 0.25);
    CHECK(e.bumps_max == 3); // untouched default
}

TEST_CASE("inline bump lists parse and rebuild") {
    const Config c = Config::from_text(
        "potential.bumps = 0.1,-0.1,0,0.4,0.8 ; -0.15,0.2,0,0.35,-0.6\n");
    const Potential V = potential_from_config(c, "potential", 2);
    REQUIRE(V.bumps().size() == 2);
    CHECK(V.bumps()[0].center[0] == 0.1);
    CHECK(V.bumps()[1].amp == -0.6);
    CHECK(V.value({0.1, -0.1, 0.0}) != 0.0);

    // round trip through the inline form
    const Config c2 = Config::from_text("potential.bumps = " + bumps_to_string(V) + "\n");
    const Potential W = potential_from_config(c2, "potential", 2);
    const Vec probe{0.05, 0.12, 0.0};
    CHECK(W.value(probe) == V.value(probe));

    // absent section means the zero potential
    const Potential Z = potential_from_config(c, "potential2", 2);
    CHECK(Z.is_zero());

    CHECK_THROWS_AS(
        potential_from_config(Config::from_text("potential.bumps = 1,2,3\n"), "potential", 2),
        ConfigError);
    CHECK_THROWS_AS(
        potential_from_config(Config::from_text("potential.bumps = 0,0,0,x,1\n"),
                              "potential", 2),
        ConfigError);
}

TEST_CASE("potential files round-trip through JSON") {
    const std::string path = scratch_path("potentials.json");
    {
        nlohmann::json doc;
        doc["n"] = 2;
        doc["potentials"] = {
            {{{"center", {0.1, -0.1, 0.0}}, {"r", 0.4}, {"amp", 0.8}}},
            {{{"center", {-0.15, 0.2, 0.0}}, {"r", 0.35}, {"amp", 0.6}},
             {{"center", {0.0, 0.3, 0.0}}, {"r", 0.2}, {"amp", -0.5}}},
        };
        std::ofstream out(path);
        out << doc.dump(2);
    }
    const Config c = Config::from_text("potential.file = " + path +
                                       "\npotential.index = 1\n");
    const Potential V = potential_from_config(c, "potential", 2);
    REQUIRE(V.bumps().size() == 2);
    CHECK(V.bumps()[0].r == 0.35);
    CHECK(V.bumps()[1].amp == -0.5);

    // index 0 by default
    const Config c0 = Config::from_text("potential.file = " + path + "\n");
    CHECK(potential_from_config(c0, "potential", 2).bumps().size() == 1);

    CHECK_THROWS_AS(potential_from_config(c, "potential", 3), ConfigError); // n mismatch
    const Config cbad = Config::from_text("potential.file = " + path +
                                          "\npotential.index = 7\n");
    CHECK_THROWS_AS(potential_from_config(cbad, "potential", 2), ConfigError);
    const Config cmiss =
        Config::from_text("potential.file = " + scratch_path("nope.json") + "\n");
    CHECK_THROWS_AS(potential_from_config(cmiss, "potential", 2), ConfigError);
    const Config cboth = Config::from_text("potential.file = " + path +
                                           "\npotential.bumps = 0,0,0,0.4,1\n");
    CHECK_THROWS_AS(potential_from_config(cboth, "potential", 2), ConfigError);
}

TEST_CASE("doubles are printed in their shortest exact form") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(0.0625) == "0.0625");
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(-3.5e-7) == "-3.5e-07");
    const double third = 1.0 / 3.0;
    CHECK(std::strtod(format_double(third).c_str(), nullptr) == third);
    const double pi = 3.14159265358979323846;
    CHECK(std::strtod(format_double(pi).c_str(), nullptr) == pi);
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(INFINITY) == "inf");
}

TEST_CASE("csv artifacts carry a provenance header over a stable body") {
    const std::string path = scratch_path("table.csv");
    const MetaInfo meta{"solve", "0123456789abcdef", "n=2 h=0.0625"};
    {
        CsvFile csv(path, meta, "x,y");
        csv.row(csv_row({format_double(0.5), format_double(1.0 / 3.0)}));
        csv.row(csv_row({format_double(-1.0), "0"}));
    }
    const std::string text = slurp(path);
    CHECK(text.find("# tool = faslab") != std::string::npos);
    CHECK(text.find("# command = solve") != std::string::npos);
    CHECK(text.find("# config_hash = 0123456789abcdef") != std::string::npos);
    CHECK(text.find("# grid = n=2 h=0.0625") != std::string::npos);
    CHECK(text.find("# generated_at = ") != std::string::npos);
    CHECK(text.find("x,y\n0.5,0.3333333333333333") != std::string::npos);
    CHECK(text.find("-1,0\n") != std::string::npos);
}

TEST_CASE("json summaries embed meta and results") {
    const std::string path = scratch_path("summary.json");
    const MetaInfo meta{"stability", "feedbeeffeedbeef", "n=2 h=0.0625"};
    write_json_summary(path, meta, {{"c_emp", 1.75}, {"retained", 3}});
    const nlohmann::json doc = nlohmann::json::parse(slurp(path));
    CHECK(doc["meta"]["command"] == "stability");
    CHECK(doc["meta"]["config_hash"] == "feedbeeffeedbeef");
    CHECK(doc["meta"]["version"] == kFaslabVersion);
    CHECK(doc["meta"].contains("generated_at"));
    CHECK(doc["results"]["c_emp"] == 1.75);
    CHECK(doc["results"]["retained"] == 3);
}

TEST_CASE("svg charts are self-contained and tolerate log-scale zeros") {
    const std::string path = scratch_path("chart.svg");
    const ChartSeries a{"first", {{0.5, 1.6}, {1.0, 0.9}, {2.0, 0.4}, {4.0, 0.2}}};
    const ChartSeries b{"second", {{0.5, 0.0}, {1.0, 0.5}, {2.0, 0.1}}}; // zero dropped
    svg_line_chart(path, "decay", "s", "h", {a, b}, true);
    const std::string text = slurp(path);
    CHECK(text.find("<svg") != std::string::npos);
    CHECK(text.rfind("</svg>\n") != std::string::npos);
    CHECK(text.find("decay") != std::string::npos);
    CHECK(text.find("first") != std::string::npos);
    CHECK(text.find("second") != std::string::npos);
    const std::size_t first_poly = text.find("<polyline");
    REQUIRE(first_poly != std::string::npos);
    CHECK(text.find("<polyline", first_poly + 1) != std::string::npos);
    CHECK(text.find("log scale") != std::string::npos);

    // linear variant with a single flat series still renders
    svg_line_chart(scratch_path("flat.svg"), "flat", "x", "y",
                   {{"flat", {{0.0, 1.0}, {1.0, 1.0}}}}, false);
    CHECK(slurp(scratch_path("flat.svg")).find("<polyline") != std::string::npos);
}
