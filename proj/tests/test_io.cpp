#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "dismet/errors.hpp"
#include "dismet/io.hpp"
#include "test_helpers.hpp"

using namespace dismet;
using testutil::make_ps;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("dismet_io_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

PosteriorSet sample_ps() {
  return make_ps(3, 2, {0.1, -2.5, 1.0 / 3.0, 4e-17, 123.456, -0.0625},
                 {0.5, 1.25, 0.1, 2.0, 0.75, 0.3125});
}

bool same_ps(const PosteriorSet& a, const PosteriorSet& b) {
  return a.n_samples == b.n_samples && a.n_latents == b.n_latents && a.means == b.means &&
         a.stds == b.stds;
}

}  // namespace

TEST_CASE("posterior csv round trip is bit exact") {
  TempDir dir;
  PosteriorSet ps = sample_ps();
  save_posteriors_csv(ps, dir.file("p.csv"));
  CHECK(same_ps(load_posteriors_csv(dir.file("p.csv")), ps));
  CHECK(same_ps(load_posteriors(dir.file("p.csv")), ps));  // sniffed
}

TEST_CASE("posterior binary round trip is bit exact") {
  TempDir dir;
  PosteriorSet ps = sample_ps();
  save_posteriors_binary(ps, dir.file("p.bin"));
  CHECK(same_ps(load_posteriors_binary(dir.file("p.bin")), ps));
  CHECK(same_ps(load_posteriors(dir.file("p.bin")), ps));  // sniffed
}

TEST_CASE("posterior loader rejects broken input") {
  TempDir dir;
  CHECK_THROWS_AS(load_posteriors(dir.file("absent.csv")), const Error&);

  write_text(dir.file("bad_header.csv"), "mu_0,sigma_1\n0,1\n");
  CHECK_THROWS_AS(load_posteriors_csv(dir.file("bad_header.csv")), const Error&);

  write_text(dir.file("bad_value.csv"), "mu_0,sigma_0\n0,abc\n");
  CHECK_THROWS_AS(load_posteriors_csv(dir.file("bad_value.csv")), const Error&);

  write_text(dir.file("neg_sigma.csv"), "mu_0,sigma_0\n0,-1\n");
  CHECK_THROWS_AS(load_posteriors_csv(dir.file("neg_sigma.csv")), const Error&);

  write_text(dir.file("ragged.csv"), "mu_0,sigma_0\n0,1,7\n");
  CHECK_THROWS_AS(load_posteriors_csv(dir.file("ragged.csv")), const Error&);

  PosteriorSet ps = sample_ps();
  save_posteriors_binary(ps, dir.file("tr.bin"));
  auto full = std::filesystem::file_size(dir.file("tr.bin"));
  std::filesystem::resize_file(dir.file("tr.bin"), full - 9);
  CHECK_THROWS_AS(load_posteriors_binary(dir.file("tr.bin")), const Error&);
}

TEST_CASE("factor csv accepts both header spellings") {
  TempDir dir;
  write_text(dir.file("a.csv"), "y_0,y_1\n0,2\n1,0\n");
  FactorTable a = load_factors(dir.file("a.csv"));
  CHECK(a.n_samples == 2);
  CHECK(a.n_factors == 2);
  CHECK(a.label(0, 1) == 2);
  CHECK(a.cardinality(1) == 3);  // inferred max+1

  write_text(dir.file("b.csv"), "y0,y1\n0,2\n1,0\n");
  FactorTable b = load_factors(dir.file("b.csv"));
  CHECK(b.label(1, 0) == 1);

  write_text(dir.file("c.csv"), "foo,bar\n0,1\n");
  CHECK_THROWS_AS(load_factors(dir.file("c.csv")), const Error&);
}

TEST_CASE("factor cardinality pin line") {
  TempDir dir;
  write_text(dir.file("pin.csv"), "#card=4,2\ny_0,y_1\n0,1\n2,0\n");
  FactorTable ft = load_factors(dir.file("pin.csv"));
  CHECK(ft.cardinality(0) == 4);
  CHECK(ft.cardinality(1) == 2);

  write_text(dir.file("breach.csv"), "#card=2,2\ny_0,y_1\n0,1\n5,0\n");
  CHECK_THROWS_AS(load_factors(dir.file("breach.csv")), const Error&);
}

TEST_CASE("continuous factor columns are quantized") {
  TempDir dir;
  write_text(dir.file("cont.csv"), "y_0,y_1\n0,0.1\n1,0.25\n0,0.4\n1,0.99\n");
  FactorTable ft = load_factors(dir.file("cont.csv"), 4);
  CHECK(!ft.quantized_from_continuous[0]);
  CHECK(ft.quantized_from_continuous[1]);
  CHECK(ft.cardinality(1) == 4);
  CHECK(ft.label(0, 1) == 0);   // 0.1 in the lowest of 4 bins over [0.1, 0.99]
  CHECK(ft.label(3, 1) == 3);   // max lands in the top bin
}

TEST_CASE("factor csv round trip") {
  TempDir dir;
  FactorTable ft = FactorTable::create(3, 2, {0, 1, 2, 0, 1, 1}, {3, 2});
  save_factors_csv(ft, dir.file("f.csv"));
  FactorTable back = load_factors(dir.file("f.csv"));
  CHECK(back.labels == ft.labels);
  CHECK(back.cardinalities == ft.cardinalities);
}

TEST_CASE("soft label files") {
  TempDir dir;
  FactorTable ft = FactorTable::create(2, 1, {0, 1}, {2});
  write_text(dir.file("s.csv"), "p_0,p_1\n0.75,0.25\n0.5,0.5\n");
  load_soft_labels(ft, 0, dir.file("s.csv"));
  REQUIRE(ft.soft[0].has_value());
  CHECK((*ft.soft[0])[0] == 0.75);
  CHECK((*ft.soft[0])[3] == 0.5);

  FactorTable bad = FactorTable::create(2, 1, {0, 1}, {2});
  write_text(dir.file("bad.csv"), "p_0,p_1\n0.75,0.75\n0.5,0.5\n");
  CHECK_THROWS_AS(load_soft_labels(bad, 0, dir.file("bad.csv")), const Error&);

  write_text(dir.file("short.csv"), "p_0,p_1\n1.0,0.0\n");
  CHECK_THROWS_AS(load_soft_labels(bad, 0, dir.file("short.csv")), const Error&);
}
