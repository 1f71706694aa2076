#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

namespace {

namespace fs = std::filesystem;

const fs::path& workdir() {
    static const fs::path p = [] {
        const fs::path d = fs::temp_directory_path() / "lvc_cli_test";
        fs::create_directories(d);
        return d;
    }();
    return p;
}

struct Result {
    int code = -1;
    std::string out;
};

Result run(const std::string& args) {
    const fs::path out = workdir() / "stdout.txt";
    const std::string cmd = std::string("\"") + LVC_CLI_PATH + "\" " + args + " > \"" + out.string() + "\" 2> \"" +
                            (workdir() / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

std::string fixture(const std::string& name) { return std::string(LVC_FIXTURE_DIR) + "/" + name; }

std::string tmp(const std::string& name) { return (workdir() / name).string(); }

// Small run on synthetic data; returns the checkpoint path.
std::string trained_checkpoint() {
    static const std::string ck = [] {
        const std::string data = tmp("synth.tsv");
        EXPECT_EQ(run("synth --kind correlated --seed 4 --count 40 --out " + data).code, 0);
        std::ofstream(tmp("run.cfg")) << "model = binary_br2\nH = 4\nlayers = 1\nD_G = 6\nepochs = 2\n"
                                         "batch_size = 8\nseed = 3\ntrain = synth.tsv\ncheckpoint = model.lvc\n";
        EXPECT_EQ(run("train --quiet --config " + tmp("run.cfg")).code, 0);
        return tmp("model.lvc");
    }();
    return ck;
}

}  // namespace

TEST(Cli, UnknownSubcommandIsUsageError) { EXPECT_EQ(run("frobnicate").code, 1); }

TEST(Cli, SynthWritesCanonicalTsv) {
    const std::string path = tmp("synth_small.tsv");
    ASSERT_EQ(run("synth --kind independent --seed 2 --count 5 --out " + path).code, 0);
    std::ifstream in(path);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) ++n;
    EXPECT_EQ(n, 5);
}

TEST(Cli, StatsPrintsSummaryLine) {
    const auto r = run("stats --data " + fixture("stats_sample.tsv") + " --name sample");
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("sample\t4\t12\t33.3"), std::string::npos) << r.out;
}

TEST(Cli, MissingDataFileIsDataError) { EXPECT_EQ(run("stats --data " + tmp("nope.tsv")).code, 2); }

TEST(Cli, GradCheckPasses) {
    const auto r = run("grad-check --model binary_br_tau");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("passed"), std::string::npos);
}

TEST(Cli, BuildCorpusMatchesGolden) {
    const std::string out = tmp("built.tsv");
    ASSERT_EQ(run("build-corpus --input " + fixture("raw_tweets.txt") + " --hashtags " + LVC_DATA_DIR +
                  "/bmet_hashtags.tsv --seed 7 --output " + out)
                  .code,
              0);
    std::ifstream a(out, std::ios::binary), b(fixture("raw_tweets.expected.tsv"), std::ios::binary);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    EXPECT_EQ(sa.str(), sb.str());
}

TEST(Cli, TauWithSgmIsConfigError) {
    std::ofstream(tmp("bad.cfg")) << "model = sgm\ntau = 0.5\ntrain = synth.tsv\n";
    EXPECT_EQ(run("train --quiet --config " + tmp("bad.cfg")).code, 1);
}

TEST(Cli, TrainEvalPredict) {
    const std::string ck = trained_checkpoint();
    ASSERT_TRUE(fs::exists(ck));
    const auto e = run("eval --checkpoint " + ck + " --data " + tmp("synth.tsv"));
    ASSERT_EQ(e.code, 0);
    EXPECT_EQ(e.out.rfind("jaccard\t", 0), 0u) << e.out;

    const auto p = run("predict --checkpoint " + ck + " --text \"w01 w02 w03\"");
    ASSERT_EQ(p.code, 0);
    std::string line = p.out.substr(0, p.out.find('\n'));
    std::stringstream ss(line);
    std::string name;
    while (std::getline(ss, name, ',')) EXPECT_EQ(name.rfind("label", 0), 0u) << line;
}

TEST(Cli, EvalWithUnknownLabelIsConfigError) {
    const std::string ck = trained_checkpoint();
    std::ofstream(tmp("odd.tsv")) << "1\ta b c\tnot_a_label\n";
    EXPECT_EQ(run("eval --checkpoint " + ck + " --data " + tmp("odd.tsv")).code, 1);
}

TEST(Cli, MissingCheckpointIsDataError) {
    EXPECT_EQ(run("predict --checkpoint " + tmp("absent.lvc") + " --text hello").code, 2);
}
