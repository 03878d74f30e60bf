#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "doctest.h"
#include "lwocp/coefficients.hpp"
#include "lwocp/processes.hpp"
#include "lwocp/rng.hpp"

using namespace lwocp;

TEST_CASE("moving-average responses are tomorrow's covariates, bit for bit") {
  const auto raw = gen_ma1(3, 50, 12);
  for (int i = 0; i + 1 < 50; ++i) CHECK(raw.y.row(i) == raw.x.row(i + 1));
}

TEST_CASE("moving-average generation is reproducible per seed") {
  const auto a = gen_ma1(4, 30, 99);
  const auto b = gen_ma1(4, 30, 99);
  const auto c = gen_ma1(4, 30, 100);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  CHECK(a.x != c.x);
}

TEST_CASE("moving-average moments match the two-innovation structure") {
  const int t_len = 100000;
  const auto raw = gen_ma1(1, t_len, 7);
  double mean = 0.0, var = 0.0, lag1 = 0.0, lag2 = 0.0;
  for (int i = 0; i < t_len; ++i) mean += raw.x(i, 0);
  mean /= t_len;
  for (int i = 0; i < t_len; ++i) {
    const double d = raw.x(i, 0) - mean;
    var += d * d;
    if (i + 1 < t_len) lag1 += d * (raw.x(i + 1, 0) - mean);
    if (i + 2 < t_len) lag2 += d * (raw.x(i + 2, 0) - mean);
  }
  var /= t_len;
  lag1 /= t_len - 1;
  lag2 /= t_len - 2;
  CHECK(var == doctest::Approx(2.0).epsilon(0.05));
  CHECK(lag1 == doctest::Approx(1.0).epsilon(0.06));
  CHECK(std::abs(lag2) < 0.05);
}

TEST_CASE("sticky chain holds its level through each epoch") {
  const auto trace = gen_sticky_chain_trace(0.05, 5000, 3);
  const auto& x = trace.series.x;
  for (int t = 1; t < 5000; ++t) {
    if (trace.step_in_epoch[static_cast<std::size_t>(t)] > 1) {
      CHECK(x(t, 0) == x(t - 1, 0));  // bit-identical within an epoch
    } else {
      CHECK(x(t, 0) != x(t - 1, 0));
    }
  }
}

TEST_CASE("sticky epochs have geometric mean length and step counters reset") {
  const double rho = 0.05;
  const int target_epochs = 10000;
  const auto trace = gen_sticky_chain_trace(rho, 450000, 8);

  double sum_len = 0.0;
  int epochs = 0;
  int t = 0;
  const int t_len = static_cast<int>(trace.series.length());
  while (t < t_len && epochs < target_epochs) {
    const int k = trace.epoch_length[static_cast<std::size_t>(t)];
    if (t + k > t_len) break;  // truncated final epoch
    // The step counter climbs 1..k and the epoch ends exactly at k.
    for (int s = 0; s < k; ++s)
      REQUIRE(trace.step_in_epoch[static_cast<std::size_t>(t + s)] == s + 1);
    sum_len += k;
    ++epochs;
    t += k;
  }
  REQUIRE(epochs == target_epochs);
  CHECK(sum_len / epochs == doctest::Approx(1.0 / rho).epsilon(0.03));  // +-0.6 around 20
}

TEST_CASE("sticky responses center on the latent epoch length") {
  const auto trace = gen_sticky_chain_trace(0.05, 200000, 5);
  const int t_len = static_cast<int>(trace.series.length());
  int within = 0, total = 0;
  int t = 0;
  while (t < t_len) {
    const int k = trace.epoch_length[static_cast<std::size_t>(t)];
    if (t + k > t_len) break;
    double mean_y = 0.0;
    for (int s = 0; s < k; ++s) mean_y += trace.series.y(t + s, 0);
    mean_y /= k;
    ++total;
    if (std::abs(mean_y - k) <= 3.0 / std::sqrt(static_cast<double>(k))) ++within;
    t += k;
  }
  REQUIRE(total > 5000);
  // Per-epoch means land within three standard errors ~99.7% of the time.
  CHECK(static_cast<double>(within) / total > 0.99);
}

TEST_CASE("exact chain laws match closed forms") {
  Mat identity(2, 2);
  identity << 1, 0, 0, 1;
  Vec uniform(2);
  uniform << 0.5, 0.5;
  const auto constant = gen_finite_chain(identity, uniform, 4);
  CHECK(constant.joint[encode_sequence({0, 0, 0, 0}, 2)] == 0.5);
  CHECK(constant.joint[encode_sequence({1, 1, 1, 1}, 2)] == 0.5);
  CHECK(constant.joint[encode_sequence({0, 1, 0, 0}, 2)] == 0.0);

  Mat fair(2, 2);
  fair << 0.5, 0.5, 0.5, 0.5;
  const auto iid = gen_finite_chain(fair, uniform, 3);
  for (double v : iid.joint) CHECK(v == doctest::Approx(0.125));

  Mat flip(2, 2);
  flip << 0.7, 0.3, 0.3, 0.7;
  const auto chain = gen_finite_chain(flip, uniform, 3);
  CHECK(chain.joint[encode_sequence({0, 0, 0}, 2)] == doctest::Approx(0.245));
}

TEST_CASE("chain sampler agrees with the exact joint") {
  Mat flip(2, 2);
  flip << 0.8, 0.2, 0.4, 0.6;
  Vec init(2);
  init << 2.0 / 3.0, 1.0 / 3.0;
  const int m = 4;
  const auto exact = gen_finite_chain(flip, init, m);

  Rng rng(1234);
  const int samples = 100000;
  std::vector<double> empirical(exact.joint.size(), 0.0);
  for (int s = 0; s < samples; ++s) {
    const auto z = sample_finite_chain(flip, init, m, rng);
    empirical[encode_sequence(z, 2)] += 1.0 / samples;
  }
  CHECK(tv(exact.joint, empirical) < 0.02);
}

TEST_CASE("binary moving-average law: uniform marginals and shared-bit overlap") {
  const auto p = gen_binary_ma(4);
  p.validate();

  // Single-coordinate marginals are uniform over the four symbols.
  for (int pos = 0; pos < 4; ++pos) {
    const auto m = marginal_law(p, {pos});
    for (double v : m) CHECK(v == doctest::Approx(0.25));
  }

  // Adjacent coordinates share one driving bit: TV to the product is 1/2.
  const auto pair01 = marginal_law(p, {0, 1});
  const auto m0 = marginal_law(p, {0});
  const auto m1 = marginal_law(p, {1});
  std::vector<double> prod(16);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) prod[static_cast<std::size_t>(a * 4 + b)] = m0[a] * m1[b];
  CHECK(tv(pair01, prod) == doctest::Approx(0.5));

  // Two steps apart the driving bits are disjoint: exactly independent.
  const auto pair02 = marginal_law(p, {0, 2});
  const auto m2 = marginal_law(p, {2});
  std::vector<double> prod02(16);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) prod02[static_cast<std::size_t>(a * 4 + b)] = m0[a] * m2[b];
  CHECK(tv(pair02, prod02) == 0.0);
}

TEST_CASE("finite process files round-trip") {
  const auto p = gen_binary_ma(3);
  const std::string path = "/tmp/lwocp_test_process.json";
  save_finite_process(p, path);
  const auto q = load_finite_process(path);
  CHECK(q.alphabet == p.alphabet);
  CHECK(q.length == p.length);
  CHECK(q.joint == p.joint);
  std::remove(path.c_str());
}

namespace {

void write_csv(const std::string& path, int rows, double (*f)(int)) {
  std::ofstream out(path);
  out << "stamp,value\n";
  for (int i = 0; i < rows; ++i) out << i << "," << f(i) << "\n";
}

}  // namespace

TEST_CASE("csv chunking consumes n + memory + 1 rows per chunk plus the gap") {
  const std::string path = "/tmp/lwocp_test_series.csv";
  write_csv(path, 1000, [](int i) { return std::sin(0.1 * i); });
  const auto chunks = ingest_csv(path, 1, 24, 100, 48);
  CHECK(chunks.size() == 6);
  CHECK(chunks[0].first_row == 1);
  CHECK(chunks[0].last_row == 125);
  CHECK(chunks[1].first_row == 174);  // 125 + 48 gap + 1
  for (const auto& c : chunks) CHECK(c.seq.size() == 101);
  std::remove(path.c_str());
}

TEST_CASE("csv chunking boundary cases") {
  const std::string path = "/tmp/lwocp_test_series2.csv";
  write_csv(path, 125, [](int i) { return static_cast<double>(i); });
  const auto chunks = ingest_csv(path, 1, 24, 100, 48);
  CHECK(chunks.size() == 1);  // exactly one chunk fits

  write_csv(path, 124, [](int i) { return static_cast<double>(i); });
  CHECK_THROWS_AS(ingest_csv(path, 1, 24, 100, 48), DataError);
  std::remove(path.c_str());
}

TEST_CASE("constant csv columns produce constant responses") {
  const std::string path = "/tmp/lwocp_test_series3.csv";
  write_csv(path, 30, [](int) { return 7.5; });
  const auto chunks = ingest_csv(path, 1, 4, 20, 0);
  REQUIRE(chunks.size() == 1);
  for (const auto& p : chunks[0].seq.points) {
    CHECK(p.y()[0] == 7.5);
    CHECK(p.x().history.size() == 4);
    CHECK(p.x().current.size() == 0);  // autoregressive: no exogenous covariate
  }
  std::remove(path.c_str());
}

TEST_CASE("csv errors carry the offending row") {
  const std::string path = "/tmp/lwocp_test_series4.csv";
  {
    std::ofstream out(path);
    out << "h1,h2\n1,1.5\n2,oops\n3,2.5\n";
  }
  try {
    ingest_csv(path, 1, 0, 1, 0);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }
  CHECK_THROWS_AS(ingest_csv("/tmp/definitely_missing_file.csv", 0, 0, 4, 0), DataError);
  std::remove(path.c_str());
}
