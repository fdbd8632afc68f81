#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cdmn/cdmn.hpp"

using namespace cdmn;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(CDMN_CLI_PATH) + " " + args + " > cli_out.tmp 2> cli_err.tmp";
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp("cli_out.tmp");
    r.err = slurp("cli_err.tmp");
    return r;
}

std::string model_path(const std::string& name) {
    return std::string(CDMN_MODELS_DIR) + "/" + name;
}

} // namespace

TEST_CASE("solve prints a model and exits 0") {
    RunResult r = run_cli("solve " + model_path("map_coloring.cdmn"));
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.find("model 1:") != std::string::npos);
    REQUIRE(r.out.find("color_of_Country(Belgium) = ") != std::string::npos);
}

TEST_CASE("unsat exits 1") {
    RunResult r = run_cli("solve " + model_path("triangle2.cdmn"));
    REQUIRE(r.exit_code == 1);
    REQUIRE(r.out.find("unsat") != std::string::npos);
}

TEST_CASE("compile errors exit 2 with coordinates") {
    {
        std::ofstream bad("cli_bad.cdmn");
        bad << "Adult,C\nAge,||,Out\n>= 18,,Yes\n";
    }
    RunResult r = run_cli("solve cli_bad.cdmn");
    REQUIRE(r.exit_code == 2);
    REQUIRE(r.err.find("UnknownHitPolicy") != std::string::npos);
    std::remove("cli_bad.cdmn");
}

TEST_CASE("resource limits exit 3") {
    RunResult r = run_cli("solve " + model_path("map_coloring.cdmn") + " --max-nodes 1");
    REQUIRE(r.exit_code == 3);
}

TEST_CASE("usage errors exit 2") {
    REQUIRE(run_cli("frobnicate x.cdmn").exit_code == 2);
    REQUIRE(run_cli("solve").exit_code == 2);
    REQUIRE(run_cli("solve missing_file.cdmn").exit_code == 2);
    REQUIRE(run_cli("solve " + model_path("map_coloring.cdmn") + " --models zero").exit_code == 2);
}

TEST_CASE("check --emit-theory prints the compiled theory without solving") {
    RunResult r = run_cli("check " + model_path("maxshift.cdmn") + " --emit-theory");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out ==
            "∀doctor[Doctor], day[Day]: nb_shifts_of_Doctor_on_Day(doctor, day) ≤ 1\n");
}

TEST_CASE("--models overrides the goal table") {
    RunResult r = run_cli("solve " + model_path("map_coloring.cdmn") + " --models 2");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.find("model 2:") != std::string::npos);
    REQUIRE(r.out.find("model 3:") == std::string::npos);
}

TEST_CASE("json models round-trip through the theory") {
    RunResult r = run_cli("solve " + model_path("triangle3.cdmn") + " --format json");
    REQUIRE(r.exit_code == 0);
    json doc = json::parse(r.out);
    REQUIRE(doc["status"] == "ok");
    REQUIRE(doc["models"].size() == 6);

    CompiledModel model = compile_workbook(slurp(model_path("triangle3.cdmn")));
    for (const auto& record : doc["models"]) {
        Structure s = structure_from_json(record, model);
        for (const auto& sentence : model.theory.sentences) REQUIRE(eval_sentence(sentence, s));
    }
}

TEST_CASE("json optimization output carries the objective") {
    RunResult r = run_cli("solve " + model_path("diversity4.cdmn") + " --format json");
    REQUIRE(r.exit_code == 0);
    json doc = json::parse(r.out);
    REQUIRE(doc["status"] == "ok");
    REQUIRE(doc["objective"] == 4);
    CompiledModel model = compile_workbook(slurp(model_path("diversity4.cdmn")));
    Structure s = structure_from_json(doc["models"][0], model);
    Env env;
    REQUIRE(eval_term(*model.task.objective, s, env) == Value::integer(4));
}

TEST_CASE("identical invocations produce identical output") {
    SECTION("text output is byte-identical (stats go to stderr)") {
        RunResult a = run_cli("solve " + model_path("monkey3.cdmn"));
        RunResult b = run_cli("solve " + model_path("monkey3.cdmn"));
        REQUIRE(a.exit_code == 0);
        REQUIRE(a.out == b.out);
    }
    SECTION("json output matches after dropping the timing field") {
        RunResult a = run_cli("solve " + model_path("map_coloring.cdmn") + " --format json");
        RunResult b = run_cli("solve " + model_path("map_coloring.cdmn") + " --format json");
        json da = json::parse(a.out);
        json db = json::parse(b.out);
        da["stats"].erase("elapsed_seconds");
        db["stats"].erase("elapsed_seconds");
        REQUIRE(da == db);
    }
}
