#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "nemlat/errors.hpp"
#include "nemlat/experiments.hpp"

using namespace nemlat;
namespace fs = std::filesystem;

namespace {

std::string bin() {
    const char* b = std::getenv("NEMLAT_BIN");
    REQUIRE_MESSAGE(b != nullptr, "NEMLAT_BIN is not set");
    return b;
}

fs::path scratch() {
    static fs::path d = [] {
        fs::path p = fs::temp_directory_path() / ("nemlat_cli_" + std::to_string(::getpid()));
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return d;
}

struct Result {
    int code;
    std::string out;
};

Result sh(const std::string& args) {
    fs::path log = scratch() / "stdout.txt";
    std::string cmd = "'" + bin() + "' " + args + " > '" + log.string() + "' 2>/dev/null";
    int st = std::system(cmd.c_str());
    std::ifstream is(log);
    std::stringstream ss;
    ss << is.rdbuf();
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, ss.str()};
}

fs::path write_config(const std::string& name, const Json& j) {
    fs::path p = scratch() / name;
    std::ofstream(p) << j.dump();
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("registry listing") {
    const auto& list = list_experiments();
    std::vector<std::string> names;
    for (const auto& e : list) names.push_back(e.name);
    CHECK(names == std::vector<std::string>{"identities", "envelope", "homogenize2d", "homogenize3d", "gradient",
                                            "counterexample", "oscillation", "vortex", "prefactor"});
    Result r = sh("--list");
    CHECK(r.code == 0);
    Json j = Json::parse(r.out);
    REQUIRE(j.size() == 9);
    for (std::size_t k = 0; k < 9; ++k) {
        CHECK(j[k]["name"] == names[k]);
        CHECK(j[k]["stochastic"] == list[k].stochastic);
        CHECK(j[k]["parameters"].size() == list[k].params.size());
    }
}

TEST_CASE("every listed default config runs") {
    Json j = list_json();
    for (const auto& e : j) {
        std::string name = e["name"];
        fs::path cfg = write_config(name + ".json", e["default_config"]);
        fs::path out = scratch() / ("default_" + name);
        Result r = sh("--config '" + cfg.string() + "' --out '" + out.string() + "' -q");
        CAPTURE(name);
        CHECK((r.code == 0 || r.code == 1));
        REQUIRE(fs::exists(out / "summary.json"));
        Json s = Json::parse(slurp(out / "summary.json"));
        CHECK(s["schema"] == 1);
        CHECK(s["experiment"] == name);
        CHECK((s["pass"] == (r.code == 0)));
        for (const auto& t : s["tables"]) {
            fs::path csv = out / (t["name"].get<std::string>() + ".csv");
            REQUIRE(fs::exists(csv));
            std::ifstream is(csv);
            CsvTable tab = read_csv(is);
            CHECK(tab.header == t["columns"].get<std::vector<std::string>>());
            CHECK(tab.rows.size() == t["rows"].size());
        }
    }
}

TEST_CASE("configuration errors exit with 2") {
    CHECK(sh("--experiment nosuch").code == 2);
    CHECK(sh("").code == 2);
    CHECK(sh("--experiment identities").code == 2);  // missing seed
    CHECK(sh("--experiment gradient --seed 3").code == 2);
    CHECK(sh("--bogus-flag").code == 2);
    fs::path unknown = write_config("unknown.json", {{"experiment", "gradient"}, {"parameters", {{"nn", 3}}}});
    CHECK(sh("--config '" + unknown.string() + "'").code == 2);
    fs::path typed = write_config("typed.json", {{"experiment", "gradient"}, {"parameters", {{"n", {32.5, 64}}}}});
    CHECK(sh("--config '" + typed.string() + "'").code == 2);
    fs::path key = write_config("key.json", {{"experiment", "gradient"}, {"extra", 1}});
    CHECK(sh("--config '" + key.string() + "'").code == 2);
    fs::path badval = write_config("badval.json", {{"experiment", "oscillation"}, {"parameters", {{"s", {1.5}}}}});
    CHECK(sh("--config '" + badval.string() + "'").code == 2);
    fs::path broken = scratch() / "broken.json";
    std::ofstream(broken) << "{\"experiment\": ";
    CHECK(sh("--config '" + broken.string() + "'").code == 2);
    CHECK(sh("--config '" + (scratch() / "absent.json").string() + "'").code == 2);
    fs::path blocker = scratch() / "blocker";
    std::ofstream(blocker) << "x";
    CHECK(sh("--experiment prefactor --out '" + (blocker / "sub").string() + "'").code == 2);

    ExperimentConfig c;
    c.experiment = "identities";
    CHECK_THROWS_AS(resolve_parameters(c), ConfigError);
    c.seed = 4;
    CHECK(resolve_parameters(c)["seed"] == 4);
    CHECK(resolve_parameters(c)["pairs"] == 10000);
}

TEST_CASE("tolerance failure exits with 1") {
    fs::path cfg = write_config("strict.json", {{"experiment", "gradient"},
                                                {"parameters", {{"n", {16, 32, 64}}, {"tol_rel", 1e-9}}}});
    CHECK(sh("--config '" + cfg.string() + "' -q").code == 1);
    fs::path ok = write_config("ok.json", {{"experiment", "gradient"},
                                           {"parameters", {{"n", {16, 32, 64}}, {"tol_rel", 0.05}}}});
    CHECK(sh("--config '" + ok.string() + "' -q").code == 0);
}

TEST_CASE("seed flag overrides the file and runs reproduce") {
    Json cfg = {{"experiment", "homogenize2d"},
                {"parameters", {{"seed", 5}, {"window", 4}, {"M", 8}, {"targets", {{0.0, 0.0}, {0.1, 0.05}}}}}};
    fs::path p = write_config("cell.json", cfg);
    fs::path a = scratch() / "cell_a", b = scratch() / "cell_b", c = scratch() / "cell_c";
    Result ra = sh("--config '" + p.string() + "' --seed 7 --out '" + a.string() + "' -q");
    CHECK((ra.code == 0 || ra.code == 1));
    Json s = Json::parse(slurp(a / "summary.json"));
    CHECK(s["parameters"]["seed"] == 7);
    sh("--config '" + p.string() + "' --seed 7 --out '" + b.string() + "' -q");
    for (const char* f : {"cell_problem.csv", "cell_0_config.csv", "cell_1_config.csv"})
        CHECK(slurp(a / f) == slurp(b / f));
    Json cell = Json::parse(slurp(a / "cell_0.json")), cell_b = Json::parse(slurp(b / "cell_0.json"));
    cell_b["config_csv"] = cell["config_csv"];
    CHECK(cell == cell_b);
    CHECK(cell["seed"] == 7);
    CHECK(cell["config_csv"] == (a / "cell_0_config.csv").string());

    sh("--config '" + p.string() + "' --out '" + c.string() + "' -q");
    CHECK(Json::parse(slurp(c / "summary.json"))["parameters"]["seed"] == 5);

    fs::path i1 = scratch() / "id1", i2 = scratch() / "id2";
    CHECK(sh("--experiment identities --seed 11 --out '" + i1.string() + "' -q").code == 0);
    CHECK(sh("--experiment identities --seed 11 --out '" + i2.string() + "' -q").code == 0);
    CHECK(slurp(i1 / "properties.csv") == slurp(i2 / "properties.csv"));
}

TEST_CASE("library run without output writes nothing") {
    ExperimentConfig c;
    c.experiment = "vortex";
    c.parameters = {{"charges", {1, 1}}, {"n", {32, 64, 128}}, {"mass_n", 64}};
    RunReport r = run(c);
    CHECK(r.artifacts.empty());
    CHECK(r.tables.size() == 4);
    Json s = r.summary();
    CHECK(s["schema"] == 1);
    for (const auto& t : s["tables"]) CHECK(!t["op"].get<std::string>().empty());
    for (const auto& ch : s["checks"]) CHECK(!ch["op"].get<std::string>().empty());
    fs::remove_all(scratch());
}
