#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "gazebc/config.hpp"
#include "gazebc/error.hpp"

using namespace gazebc;
namespace fs = std::filesystem;

namespace {

fs::path write_config(const std::string& text) {
    static int counter = 0;
    const fs::path file = fs::temp_directory_path() /
                          ("gazebc_cfg_" + std::to_string(::getpid()) + "_" +
                           std::to_string(counter++) + ".ini");
    std::ofstream(file) << text;
    return file;
}

}  // namespace

TEST_CASE("flat INI parsing with comments and whitespace") {
    const fs::path file = write_config(
        "# run settings\n"
        "data.sessions = 4\n"
        "data.seed=99   ; inline comment\n"
        "\n"
        "train.policy = mse\n"
        "train.hidden_dims = 32, 16\n"
        "env.kp = 250.5\n"
        "eval.keep_trajectories = true\n");
    const RunConfig config = load_run_config(file);
    CHECK(config.data.sessions == 4);
    CHECK(config.data.seed == 99);
    CHECK(config.train.policy == "mse");
    CHECK(config.train.hidden_dims == std::vector<int>{32, 16});
    CHECK(config.env.kp == doctest::Approx(250.5));
    CHECK(config.eval.keep_trajectories);
    fs::remove(file);
}

TEST_CASE("unknown keys are rejected with the line number") {
    const fs::path file = write_config("data.sessions = 4\ndata.bogus = 1\n");
    try {
        load_run_config(file);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string message = e.what();
        CHECK(message.find(":2:") != std::string::npos);
        CHECK(message.find("bogus") != std::string::npos);
    }
    fs::remove(file);
}

TEST_CASE("malformed lines and values are rejected") {
    for (const char* text : {"data.sessions 4\n", "sessions = 4\n",
                             "data.sessions = four\n", "train.policy = gru\n",
                             "data.scenario = mystery\n", "eval.keep_trajectories = maybe\n"}) {
        const fs::path file = write_config(text);
        CHECK_THROWS_AS(load_run_config(file), ValidationError);
        fs::remove(file);
    }
}

TEST_CASE("overrides applied after load take precedence") {
    const fs::path file = write_config("data.sessions = 4\n");
    RunConfig config = load_run_config(file);
    apply_config_key(config, "data.sessions", "9");
    CHECK(config.data.sessions == 9);
    CHECK_THROWS_AS(apply_config_key(config, "nope.nope", "1"), ValidationError);
    fs::remove(file);
}

TEST_CASE("validation catches inconsistent settings") {
    RunConfig config;
    config.validate();  // defaults are valid
    config.data.sessions = 0;
    CHECK_THROWS_AS(config.validate(), ValidationError);
    config = {};
    config.train.eta_final = 0.9;  // above eta_init
    CHECK_THROWS_AS(config.validate(), ValidationError);
    config = {};
    config.env.dt = 0.0;
    CHECK_THROWS_AS(config.validate(), ValidationError);
}

TEST_CASE("config hash is stable and sensitive") {
    RunConfig a, b;
    CHECK(config_hash(a) == config_hash(b));
    b.data.seed = 1;
    CHECK(config_hash(a) != config_hash(b));
    b = {};
    b.train.n_mcmc = 50;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("derived configs carry the right fields") {
    RunConfig config;
    config.data.seed = 5;
    config.train.n_mcmc = 30;
    config.eval.infer_n_mcmc = 40;
    config.eval.infer_n_samples = 8;
    const TrainConfig tc = config.train_config();
    CHECK(tc.seed == 5);
    CHECK(tc.langevin.n_mcmc == 30);
    const LangevinConfig lc = config.infer_langevin();
    CHECK(lc.n_mcmc == 40);
    CHECK(lc.n_samples == 8);
    const MlpConfig mlp = config.mlp_config(18, 1);
    CHECK(mlp.input_dim == 18);
    CHECK(mlp.hidden_dims == config.train.hidden_dims);
}
