// End-to-end checks of the installed CLI: runs the real binary (argv[1])
// against a bundled synthetic fixture through std::system.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "support/fixtures.hpp"

using namespace lexdist;
using namespace lexdist::testing;

namespace {

int g_failures = 0;

void check(bool ok, const std::string& what) {
  std::printf("%s  %s\n", ok ? "ok  " : "FAIL", what.c_str());
  if (!ok) ++g_failures;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: cli_tests <path-to-lexdist-binary>\n");
    return 2;
  }
  const std::string cli = argv[1];
  TempDir dir("cli");
  const std::string root = dir.path().string();

  // 40-word synthetic fixture: 10 clusters of 4, with a dev slice
  PlantedTask task = make_planted_task(777, 10, 4);
  EmbeddingTable table = planted_embeddings(task, 12, 778);
  save_embeddings(table, root + "/emb.txt");

  DatasetSplit split = task.split;
  split.dev.assign(split.train.end() - 10, split.train.end());
  split.train.erase(split.train.end() - 10, split.train.end());
  auto write_pairs = [&](const std::vector<LabeledPair>& pairs, const std::string& name) {
    std::ofstream out(root + "/" + name);
    for (const auto& p : pairs)
      out << p.word_a << '\t' << p.word_b << '\t' << to_string(p.relation) << '\n';
  };
  write_pairs(split.train, "noun.train.tsv");
  write_pairs(split.dev, "noun.dev.tsv");
  write_pairs(split.test, "noun.test.tsv");

  const std::string common = " --embeddings " + root + "/emb.txt --pairs-dir " + root +
                             " --category noun --seed 11";

  // train completes quickly and produces the artifact set
  const auto t0 = std::chrono::steady_clock::now();
  int rc = run(cli + " train" + common + " --out " + root +
               "/run1 --epochs 40 --batch 16 --lr 0.01 > " + root + "/train1.out 2> " + root +
               "/train1.err");
  const double train_secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  check(rc == 0, "train exits 0");
  check(train_secs < 60.0, "train completes under 60s (" + std::to_string(train_secs) + "s)");
  for (const char* f : {"model.json", "classifier.json", "trace.tsv", "config.json",
                        "train_features.tsv"})
    check(!slurp(root + "/run1/" + f).empty(), std::string("train writes ") + f);

  // determinism: same seed, byte-identical model and classifier
  rc = run(cli + " train" + common + " --out " + root +
           "/run2 --epochs 40 --batch 16 --lr 0.01 > /dev/null 2>&1");
  check(rc == 0, "second train exits 0");
  check(slurp(root + "/run1/model.json") == slurp(root + "/run2/model.json"),
        "model files byte-identical across reruns");
  check(slurp(root + "/run1/classifier.json") == slurp(root + "/run2/classifier.json"),
        "classifier files byte-identical across reruns");
  check(slurp(root + "/run1/trace.tsv") == slurp(root + "/run2/trace.tsv"),
        "traces byte-identical across reruns");

  // missing embedding file: exit 2, path named on stderr
  rc = run(cli + " train --embeddings " + root + "/absent.txt --pairs-dir " + root +
           " --category noun --out " + root + "/runx > /dev/null 2> " + root + "/missing.err");
  check(rc == 2, "missing embedding file exits 2");
  check(slurp(root + "/missing.err").find("absent.txt") != std::string::npos,
        "error message names the missing path");

  // bad usage: unknown flag
  rc = run(cli + " train --no-such-flag > /dev/null 2>&1");
  check(rc == 2, "unknown flag exits 2");

  // evaluate twice: byte-identical reports
  const std::string eval_cmd = cli + " evaluate" + common + " --model " + root +
                               "/run1/model.json --classifier " + root +
                               "/run1/classifier.json";
  rc = run(eval_cmd + " --out " + root + "/eval1 > " + root + "/eval1.out 2>&1");
  check(rc == 0, "evaluate exits 0");
  rc = run(eval_cmd + " --out " + root + "/eval2 > /dev/null 2>&1");
  check(rc == 0, "second evaluate exits 0");
  check(slurp(root + "/eval1/report.json") == slurp(root + "/eval2/report.json"),
        "evaluate reports byte-identical");
  check(slurp(root + "/eval1.out").find("F1_macro=") != std::string::npos,
        "evaluate prints key=value metrics");

  // score: OOV pair with a negation prefix
  rc = run(cli + " score --embeddings " + root + "/emb.txt --model " + root +
           "/run1/model.json --classifier " + root + "/run1/classifier.json -a able -b unable" +
           " --seed 11 > " + root + "/score.out 2>&1");
  check(rc == 0, "score exits 0");
  const std::string score_out = slurp(root + "/score.out");
  check(score_out.find("prefix=1") != std::string::npos, "score reports prefix=1");
  check(score_out.find("p_synonym=") != std::string::npos, "score reports probabilities");

  // neighbors: exactly 5 lines, scores descending
  rc = run(cli + " neighbors --embeddings " + root + "/emb.txt --model " + root +
           "/run1/model.json --word w0_0 --space syn --top-k 5 > " + root +
           "/nn.out 2>&1");
  check(rc == 0, "neighbors exits 0");
  {
    std::ifstream in(root + "/nn.out");
    std::string line;
    int lines = 0;
    double prev = 1e9;
    bool descending = true;
    while (std::getline(in, line)) {
      ++lines;
      const auto tab = line.find('\t');
      const double score = std::stod(line.substr(tab + 1));
      if (score > prev + 1e-12) descending = false;
      prev = score;
    }
    check(lines == 5, "neighbors prints exactly 5 lines");
    check(descending, "neighbor scores are non-increasing");
  }

  // baseline writes its report
  rc = run(cli + " baseline" + common + " --out " + root +
           "/base --k-pivots 4 --trees 30 > " + root + "/base.out 2>&1");
  check(rc == 0, "baseline exits 0");
  check(!slurp(root + "/base/baseline_report.json").empty(), "baseline writes report.json");

  // config file values apply, command line wins
  {
    std::ofstream ini(root + "/run.ini");
    ini << "[train]\nepochs=7\nbatch=16\nlr=0.01\nseed=11\n";
  }
  rc = run(cli + " train" + common + " --config " + root + "/run.ini --out " + root +
           "/cfg1 > /dev/null 2>&1");
  check(rc == 0, "train with config file exits 0");
  {
    std::ifstream in(root + "/cfg1/trace.tsv");
    std::string line;
    int rows = -1;  // header
    while (std::getline(in, line)) ++rows;
    check(rows == 7, "config-file epochs honored (7 trace rows)");
  }
  rc = run(cli + " train" + common + " --config " + root + "/run.ini --epochs 3 --out " + root +
           "/cfg2 > /dev/null 2>&1");
  check(rc == 0, "train with config file + override exits 0");
  {
    std::ifstream in(root + "/cfg2/trace.tsv");
    std::string line;
    int rows = -1;
    while (std::getline(in, line)) ++rows;
    check(rows == 3, "command line overrides the config file (3 trace rows)");
  }

  // three-class round trip through the CLI
  rc = run(cli + " train" + common + " --classes 3 --out " + root +
           "/run3 --epochs 20 --batch 16 --lr 0.01 > /dev/null 2>&1");
  check(rc == 0, "3-class train exits 0");
  rc = run(cli + " evaluate" + common + " --classes 3 --model " + root +
           "/run3/model.json --classifier " + root + "/run3/classifier.json --out " + root +
           "/eval3 > " + root + "/eval3.out 2>&1");
  check(rc == 0, "3-class evaluate exits 0");
  check(slurp(root + "/eval3/report.json").find("irrelevant") != std::string::npos,
        "3-class report covers the irrelevant class");

  // random-vector control condition in place of an embedding file
  rc = run(cli + " train --random-dim 16 --pairs-dir " + root +
           " --category noun --seed 5 --out " + root +
           "/rand --epochs 15 --batch 16 --lr 0.01 > /dev/null 2>&1");
  check(rc == 0, "train with --random-dim exits 0");
  rc = run(cli + " evaluate --random-dim 16 --pairs-dir " + root +
           " --category noun --seed 5 --model " + root + "/rand/model.json --classifier " +
           root + "/rand/classifier.json --out " + root + "/rand-eval > /dev/null 2>&1");
  check(rc == 0, "evaluate with --random-dim exits 0");

  // feature masking must match between training and evaluation
  rc = run(cli + " train" + common + " --features distiller --out " + root +
           "/masked --epochs 15 --batch 16 --lr 0.01 > /dev/null 2>&1");
  check(rc == 0, "train with a reduced feature mask exits 0");
  rc = run(cli + " evaluate" + common + " --features distiller --model " + root +
           "/masked/model.json --classifier " + root + "/masked/classifier.json --out " + root +
           "/masked-eval > /dev/null 2>&1");
  check(rc == 0, "evaluate with the matching mask exits 0");
  rc = run(cli + " evaluate" + common + " --model " + root + "/masked/model.json --classifier " +
           root + "/masked/classifier.json --out " + root + "/masked-bad > /dev/null 2>&1");
  check(rc == 2, "evaluate with a mismatched mask exits 2");

  // logistic fallback classifier
  rc = run(cli + " train" + common + " --classifier-kind logistic --out " + root +
           "/logit --epochs 15 --batch 16 --lr 0.01 > /dev/null 2>&1");
  check(rc == 0, "train with the logistic classifier exits 0");
  rc = run(cli + " score --embeddings " + root + "/emb.txt --model " + root +
           "/logit/model.json --classifier " + root + "/logit/classifier.json -a w0_0 -b w0_1" +
           " > " + root + "/logit-score.out 2>&1");
  check(rc == 0, "score with the logistic classifier exits 0");

  // single 5-column pair file
  {
    std::ofstream five(root + "/all.tsv");
    auto emit = [&](const std::vector<LabeledPair>& pairs, const char* name) {
      for (const auto& p : pairs)
        five << p.word_a << '\t' << p.word_b << '\t' << to_string(p.relation) << "\tnoun\t"
             << name << '\n';
    };
    emit(split.train, "train");
    emit(split.dev, "dev");
    emit(split.test, "test");
  }
  rc = run(cli + " train --embeddings " + root + "/emb.txt --pairs " + root +
           "/all.tsv --seed 11 --out " + root +
           "/five --epochs 15 --batch 16 --lr 0.01 > /dev/null 2>&1");
  check(rc == 0, "train from a 5-column pair file exits 0");

  if (g_failures > 0) {
    std::printf("cli_tests: %d check(s) failed\n", g_failures);
    return 1;
  }
  std::printf("cli_tests: all checks passed\n");
  return 0;
}
