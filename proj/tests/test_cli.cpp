#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string output;
};

Result drql(const std::string& args) {
    const std::string cmd = std::string(DRQL_CLI_PATH) + " " + args + " 2>&1";
    Result r{-1, {}};
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[512];
    while (std::fgets(buf, sizeof buf, pipe)) r.output += buf;
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("drql_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("success paths") {
    const auto dir = fresh_dir("ok");
    CHECK(drql("--help").code == 0);

    const auto q = drql("qstar --env hard --delta 0.1 --out " + (dir / "q.json").string());
    CHECK(q.code == 0);
    nlohmann::json doc;
    std::ifstream(dir / "q.json") >> doc;
    CHECK(doc["n_states"] == 4);
    CHECK(doc["report"]["norm_bound_holds"] == true);

    CHECK(drql("export-model --env hard --out " + (dir / "m.json").string()).code == 0);
    const auto v = drql("validate-model " + (dir / "m.json").string() + " --delta 0.1");
    CHECK(v.code == 0);
    CHECK(v.output.find("min support probability 0.1428571429") != std::string::npos);
    // 1/14 < 1 - exp(-0.1), so the support-size condition fails here
    CHECK(v.output.find("violated") != std::string::npos);

    const auto r = drql("run --model " + (dir / "m.json").string() +
                        " --trajectories 2 --iterations 20 --seed 3 --out " + (dir / "run").string());
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "run" / "aggregate.csv"));
    CHECK(fs::exists(dir / "run" / "convergence.gp"));

    // a saved config reruns to the same aggregate
    const auto again = drql("run --config " + (dir / "run" / "config.json").string() + " --out " +
                            (dir / "rerun").string());
    CHECK(again.code == 0);
    std::ifstream a(dir / "run" / "aggregate.csv");
    std::ifstream b(dir / "rerun" / "aggregate.csv");
    CHECK(std::string(std::istreambuf_iterator<char>(a), {}) == std::string(std::istreambuf_iterator<char>(b), {}));

    CHECK(drql("run --trajectories 2 --iterations 5 --schedule constant --alpha 0.5 --out " +
               (dir / "constant").string())
              .code == 0);
    fs::remove_all(dir);
}

TEST_CASE("default output directory comes from the environment") {
    const auto dir = fresh_dir("env");
    const std::string cmd = "DRQL_OUTPUT_DIR=" + (dir / "out").string() + " " + DRQL_CLI_PATH +
                            " run --trajectories 2 --iterations 5 > /dev/null 2>&1";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(fs::exists(dir / "out" / "aggregate.csv"));
    fs::remove_all(dir);
}

TEST_CASE("exit codes") {
    const auto dir = fresh_dir("codes");
    const std::string out = " --out " + (dir / "x").string();
    CHECK(drql("no-such-command").code == 1);
    CHECK(drql("run --trajectories 0" + out).code == 1);
    CHECK(drql("run --g 1.5" + out).code == 1);
    CHECK(drql("run --schedule cosine" + out).code == 1);
    CHECK(drql("run --config /nonexistent/config.json" + out).code == 1);
    CHECK(drql("gamma-sweep --gammas 0.7,0.8,0.9 --trajectories 2" + out).code == 1);
    CHECK(drql("qstar --env maze --out " + (dir / "q.json").string()).code == 1);
    CHECK(drql("qstar --model /nonexistent/model.json").code == 3);
    CHECK(drql("validate-model /nonexistent/model.json").code == 3);
    CHECK(drql("run --trajectories 2 --iterations 2 --out /proc/drql_cli_test").code == 3);
    // g = 0.06 hits the level cap (P(N > 40) ~ 0.08 per draw) on the first sweep
    CHECK(drql("run --g 0.06 --trajectories 2 --iterations 50" + out).code == 2);
    fs::remove_all(dir);
}

}  // TEST_SUITE
