#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "mstab/errors.hpp"
#include "mstab/harness.hpp"
#include "mstab/io/matrix_market.hpp"
#include "support/test_oracles.hpp"

using namespace mstab;
namespace fs = std::filesystem;
namespace mt = mstab::testing;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("mstab_harness_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream f(p);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST(MatrixMarket, ReadsIdentityCoordinateFile) {
  TempDir tmp;
  write_file(tmp.path / "eye.mtx",
             "%%MatrixMarket matrix coordinate real general\n"
             "% comment line\n"
             "2 2 2\n"
             "1 1 1.0\n"
             "2 2 1.0\n");
  CsrMatrix a = read_matrix_market(tmp.path / "eye.mtx");
  EXPECT_EQ(a.n_rows, 2u);
  EXPECT_EQ(a.nnz(), 2u);
  EXPECT_EQ(a.values[0], Complex(1.0));
}

TEST(MatrixMarket, SymmetricMarkerExpandsOffDiagonals) {
  TempDir tmp;
  write_file(tmp.path / "sym.mtx",
             "%%MatrixMarket matrix coordinate real symmetric\n"
             "3 3 3\n"
             "1 1 2.0\n"
             "2 1 5.0\n"
             "3 3 1.0\n");
  CsrMatrix a = read_matrix_market(tmp.path / "sym.mtx");
  EXPECT_EQ(a.nnz(), 4u);  // (2,1) mirrored to (1,2)
  DenseMatrix d = a.to_dense();
  EXPECT_EQ(d(0, 1), Complex(5.0));
  EXPECT_EQ(d(1, 0), Complex(5.0));
}

TEST(MatrixMarket, HermitianConjugatesMirroredEntries) {
  TempDir tmp;
  write_file(tmp.path / "herm.mtx",
             "%%MatrixMarket matrix coordinate complex hermitian\n"
             "2 2 2\n"
             "1 1 2.0 0.0\n"
             "2 1 1.0 3.0\n");
  CsrMatrix a = read_matrix_market(tmp.path / "herm.mtx");
  DenseMatrix d = a.to_dense();
  EXPECT_EQ(d(1, 0), Complex(1.0, 3.0));
  EXPECT_EQ(d(0, 1), Complex(1.0, -3.0));
}

TEST(MatrixMarket, ParseErrorsCarryLineNumbers) {
  TempDir tmp;
  write_file(tmp.path / "bad.mtx",
             "%%MatrixMarket matrix coordinate real general\n"
             "2 2 2\n"
             "1 1 1.0\n"
             "7 1 1.0\n");
  try {
    read_matrix_market(tmp.path / "bad.mtx");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(":4:"), std::string::npos);
  }
}

TEST(MatrixMarket, WriteReadRoundTrip) {
  TempDir tmp;
  std::mt19937_64 rng(3);
  for (bool real : {true, false}) {
    CsrMatrix a = mt::random_csr(9, 0.35, rng, real ? 2.0 : 0.0);
    if (!real) {
      for (Complex& z : a.values) z += Complex(0.0, 0.5);
    }
    const fs::path f = tmp.path / (real ? "r.mtx" : "c.mtx");
    write_matrix_market(a, f);
    CsrMatrix back = read_matrix_market(f);
    ASSERT_EQ(back.nnz(), a.nnz());
    for (std::size_t k = 0; k < a.nnz(); ++k) {
      EXPECT_EQ(back.col_idx[k], a.col_idx[k]);
      EXPECT_EQ(back.values[k], a.values[k]);
    }
  }
}

TEST(ReadVector, PlainAndMatrixMarketForms) {
  TempDir tmp;
  write_file(tmp.path / "v.txt", "1.5\n-2.0\n0.25\n");
  Vector v = read_vector(tmp.path / "v.txt");
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[1], Complex(-2.0));

  write_file(tmp.path / "v.mtx",
             "%%MatrixMarket matrix array real general\n"
             "3 1\n"
             "4.0\n5.0\n6.0\n");
  Vector w = read_vector(tmp.path / "v.mtx");
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w[2], Complex(6.0));
}

TEST(MakeRhs, FormulasMatchDefinitions) {
  Vector ones = make_rhs(RhsSpec{RhsSpec::Kind::Ones}, 4);
  for (const Complex& z : ones) EXPECT_EQ(z, Complex(1.0));

  // sinewave components sin(2 pi k / N), k = 1..N
  Vector sine = make_rhs(RhsSpec{RhsSpec::Kind::Sinewave}, 4);
  EXPECT_LE(std::abs(sine[0] - Complex(1.0)), 1e-15);
  EXPECT_LE(std::abs(sine[1]), 1e-15);
  EXPECT_LE(std::abs(sine[2] - Complex(-1.0)), 1e-15);
  EXPECT_LE(std::abs(sine[3]), 1e-15);

  // the two canonical right-hand sides are orthogonal
  Vector b1 = make_rhs(RhsSpec{RhsSpec::Kind::Ones}, 40);
  Vector b2 = make_rhs(RhsSpec{RhsSpec::Kind::Sinewave}, 40);
  EXPECT_LE(std::abs(dot(b1, b2)), 1e-12);

  Vector r1 = make_rhs(RhsSpec::parse("random:5"), 16);
  Vector r2 = make_rhs(RhsSpec::parse("random:5"), 16);
  for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(r1[i], r2[i]);
}

TEST(RhsSpec, ParserAcceptsAndRejects) {
  EXPECT_EQ(RhsSpec::parse("ones").kind, RhsSpec::Kind::Ones);
  EXPECT_EQ(RhsSpec::parse("sinewave").kind, RhsSpec::Kind::Sinewave);
  EXPECT_EQ(RhsSpec::parse("random").seed, 0u);
  EXPECT_EQ(RhsSpec::parse("random:42").seed, 42u);
  EXPECT_EQ(RhsSpec::parse("file:/tmp/b.mtx").path, fs::path("/tmp/b.mtx"));
  EXPECT_THROW(RhsSpec::parse("sine"), ConfigError);
  EXPECT_THROW(RhsSpec::parse("file:"), ConfigError);
}

TEST(EmitCsv, HeaderAndRowCountAndDeterminism) {
  TempDir tmp;
  ExperimentConfig cfg;
  cfg.matrix_source = TridiagSpec{2.0, 3.0, 1.0, 40};
  cfg.rhs_specs = {RhsSpec{RhsSpec::Kind::Ones}};
  cfg.method = Method::Idrstab;
  cfg.s = 2;
  cfg.log_path = tmp.path / "run.csv";
  cfg.seed = 7;

  SequenceResult res1 = run_sequence(cfg);
  auto lines1 = read_lines(indexed_log_path(*cfg.log_path, 1));
  ASSERT_FALSE(lines1.empty());
  EXPECT_EQ(lines1[0], "cycle,mv,level,resnorm,wall_ns");
  EXPECT_EQ(lines1.size(), res1.reports[0].residual_history.size() + 1);

  SequenceResult res2 = run_sequence(cfg);
  auto lines2 = read_lines(indexed_log_path(*cfg.log_path, 1));
  ASSERT_EQ(lines1.size(), lines2.size());
  for (std::size_t i = 1; i < lines1.size(); ++i) {
    // resnorm column identical across reruns; wall_ns may differ
    std::string a = lines1[i].substr(0, lines1[i].rfind(','));
    std::string b = lines2[i].substr(0, lines2[i].rfind(','));
    EXPECT_EQ(a, b);
  }
}

TEST(RunSequence, SingleGmresSolve) {
  ExperimentConfig cfg;
  cfg.matrix_source = TridiagSpec{2.0, 3.0, 1.0, 40};
  cfg.rhs_specs = {RhsSpec{RhsSpec::Kind::Ones}};
  cfg.method = Method::Gmres;
  SequenceResult res = run_sequence(cfg);
  ASSERT_EQ(res.reports.size(), 1u);
  EXPECT_EQ(res.reports[0].status, SolveStatus::Converged);
  EXPECT_FALSE(res.summary.empty());
}

TEST(RunSequence, MstabWithoutRecycleSourceIsConfigError) {
  ExperimentConfig cfg;
  cfg.matrix_source = TridiagSpec{2.0, 3.0, 1.0, 40};
  cfg.rhs_specs = {RhsSpec{RhsSpec::Kind::Sinewave}};  // single rhs, no recycle-in
  cfg.method = Method::Mstab;
  EXPECT_THROW(run_sequence(cfg), ConfigError);
}

TEST(RunSequence, MstabHandoffReproducesPairedSolves) {
  TempDir tmp;
  ExperimentConfig cfg;
  cfg.matrix_source = TridiagSpec{2.0, 3.0, 1.0, 40};
  cfg.rhs_specs = {RhsSpec{RhsSpec::Kind::Ones}, RhsSpec{RhsSpec::Kind::Sinewave}};
  cfg.method = Method::Mstab;
  cfg.s = 2;
  cfg.fetch = FetchPolicy::at_cycle(19);
  cfg.true_residual = true;
  cfg.seed = 1;
  cfg.recycle_out = tmp.path / "out.mrd";

  SequenceResult res = run_sequence(cfg);
  ASSERT_EQ(res.reports.size(), 2u);
  EXPECT_EQ(res.reports[0].status, SolveStatus::Converged);
  EXPECT_EQ(res.reports[1].status, SolveStatus::Converged);
  EXPECT_LE(res.reports[1].cycles, 12u);
  EXPECT_TRUE(fs::exists(*cfg.recycle_out));

  // third solve chained from the written recycle data
  ExperimentConfig cont = cfg;
  cont.rhs_specs = {RhsSpec{RhsSpec::Kind::Sinewave}};
  cont.recycle_in = *cfg.recycle_out;
  cont.recycle_out.reset();
  SequenceResult res2 = run_sequence(cont);
  ASSERT_EQ(res2.reports.size(), 1u);
  EXPECT_EQ(res2.reports[0].status, SolveStatus::Converged);
}

TEST(RunSequence, SridrSequenceUsesDonorOmegas) {
  ExperimentConfig cfg;
  cfg.matrix_source = TridiagSpec{2.0, 3.0, 1.0, 40};
  cfg.rhs_specs = {RhsSpec{RhsSpec::Kind::Ones}, RhsSpec{RhsSpec::Kind::Sinewave}};
  cfg.method = Method::Sridr;
  cfg.s = 2;
  cfg.ell = 1;
  cfg.fetch = FetchPolicy::at_cycle(10);
  cfg.seed = 3;
  SequenceResult res = run_sequence(cfg);
  ASSERT_EQ(res.reports.size(), 2u);
  EXPECT_EQ(res.reports[1].status, SolveStatus::Converged);
}

TEST(RunSequence, BreakdownAbortsWithPartialResults) {
  ExperimentConfig cfg;
  cfg.matrix_source = TridiagSpec{0.0, 0.0, 0.0, 8};
  cfg.rhs_specs = {RhsSpec{RhsSpec::Kind::Ones}, RhsSpec{RhsSpec::Kind::Sinewave}};
  cfg.method = Method::Idrstab;
  SequenceResult res = run_sequence(cfg);
  ASSERT_EQ(res.reports.size(), 1u);  // second solve never ran
  EXPECT_EQ(res.reports[0].status, SolveStatus::Breakdown);
}

TEST(RunSequence, EndToEndDeterminism) {
  ExperimentConfig cfg;
  cfg.matrix_source = TridiagSpec{2.0, 3.0, 1.0, 40};
  cfg.rhs_specs = {RhsSpec{RhsSpec::Kind::Ones}, RhsSpec{RhsSpec::Kind::Sinewave}};
  cfg.method = Method::Mstab;
  cfg.fetch = FetchPolicy::at_cycle(19);
  cfg.seed = 5;
  SequenceResult r1 = run_sequence(cfg);
  SequenceResult r2 = run_sequence(cfg);
  ASSERT_EQ(r1.reports.size(), r2.reports.size());
  for (std::size_t k = 0; k < r1.reports.size(); ++k) {
    ASSERT_EQ(r1.reports[k].residual_history.size(), r2.reports[k].residual_history.size());
    for (std::size_t i = 0; i < r1.reports[k].residual_history.size(); ++i)
      EXPECT_EQ(r1.reports[k].residual_history[i].resnorm,
                r2.reports[k].residual_history[i].resnorm);
  }
}

TEST(RunSequence, IdrRequiresDegreeOne) {
  ExperimentConfig cfg;
  cfg.matrix_source = TridiagSpec{2.0, 3.0, 1.0, 16};
  cfg.rhs_specs = {RhsSpec{RhsSpec::Kind::Ones}};
  cfg.method = Method::Idr;
  cfg.ell = 2;
  EXPECT_THROW(run_sequence(cfg), ConfigError);
}

TEST(IndexedLogPath, InsertsSolveIndexBeforeExtension) {
  EXPECT_EQ(indexed_log_path("/tmp/run.csv", 2), fs::path("/tmp/run_2.csv"));
  EXPECT_EQ(indexed_log_path("/tmp/run", 1), fs::path("/tmp/run_1"));
}
