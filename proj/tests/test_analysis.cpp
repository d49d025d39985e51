#include <doctest.h>

#include <cmath>
#include <random>

#include "acq/analysis.hpp"
#include "acq/coder.hpp"
#include "acq/error.hpp"
#include "test_support.hpp"

using namespace acq;

namespace {

// Every string of length M over n symbols, in lexicographic order.
StringSet enumerate_all(std::size_t n, std::size_t length) {
  std::size_t count = 1;
  for (std::size_t i = 0; i < length; ++i) count *= n;
  std::vector<std::uint32_t> flat;
  flat.reserve(count * length);
  for (std::size_t j = 0; j < count; ++j) {
    std::size_t x = j;
    std::vector<std::uint32_t> s(length);
    for (std::size_t k = length; k-- > 0;) {
      s[k] = static_cast<std::uint32_t>(x % n);
      x /= n;
    }
    flat.insert(flat.end(), s.begin(), s.end());
  }
  return StringSet(length, std::move(flat));
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("analytic lengths of small examples") {
    const SymbolModel dyadic = SymbolModel::from_weights({2, 1, 1});
    const std::vector<std::uint32_t> abc = {0, 1, 2};
    CHECK(information_bits(abc, dyadic) == doctest::Approx(5.0));
    reset_ceiling_tie_count();
    // 1 + 5 lands exactly on an integer; the snap keeps it at 6.
    CHECK(analytic_length(abc, dyadic, 1.0) == 6);
    CHECK(ceiling_tie_count() >= 1);

    std::vector<std::uint64_t> w(27, 1);
    w[3] = 40;
    const SymbolModel m27 = SymbolModel::from_weights(w);
    const std::vector<std::uint32_t> s(20, 3);
    // 1 + 20 log2 27 = 96.0975
    CHECK(analytic_length(s, m27, 0.0) == 97);

    const std::vector<std::uint32_t> bad = {0, 7};
    CHECK_THROWS_WITH_AS(analytic_length(bad, dyadic, 1.0), "unsupported symbol",
                         DataError);
    CHECK_THROWS_AS(analytic_length(abc, dyadic, -1.0), DomainError);
  }

  TEST_CASE("length equals one plus M times the cross entropy to the escort") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = 2 + trial % 20;
      const SymbolModel m = acq::testing::random_model(rng, n);
      const auto s = acq::testing::random_message(rng, n, 1 + trial % 64);
      const double q = 0.1 * (trial % 21);
      CHECK(std::abs(cross_entropy_identity_check(s, m, q)) < 1e-9);
      const auto f = empirical_counts(s, n);
      double sum = 0.0;
      for (double x : f) sum += x;
      CHECK(sum == doctest::Approx(1.0));
    }
  }

  TEST_CASE("analytic and exact coder lengths agree") {
    std::mt19937_64 rng(5);
    int equal = 0;
    int total = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t n = 2 + trial % 27;
      const SymbolModel m = acq::testing::random_model(rng, n, 10000);
      const double q = 0.1 * (trial % 21);
      const auto qm = quantize(m, q, 32);
      const auto s = acq::testing::random_message(rng, n, 1 + trial % 40);
      const auto exact = static_cast<long>(codeword_length_exact(s, qm));
      const auto analytic = static_cast<long>(analytic_length(s, m, q));
      CHECK(std::abs(exact - analytic) <= 1);
      equal += exact == analytic;
      ++total;
    }
    CHECK(equal >= 0.99 * total);
  }

  TEST_CASE("exponential average") {
    const std::vector<double> l = {1.0, 2.0};
    CHECK(exp_avg_length(l, 1.0) == doctest::Approx(std::log2(3.0)));
    CHECK(exp_avg_length(l, 0.0) == doctest::Approx(1.5));
    CHECK(exp_avg_length(l, 1e-12) == doctest::Approx(1.5));
    const std::vector<double> w = {0.25, 0.75};
    CHECK(exp_avg_length(l, 0.0, w) == doctest::Approx(1.75));
    CHECK(exp_avg_length(l, 2.0, w) == doctest::Approx(0.5 * std::log2(0.25 * 4 + 0.75 * 16)));

    const std::vector<double> constant(100, 37.0);
    for (double t : {-0.9, -0.5, 0.0, 0.3, 1.8, 50.0}) {
      CHECK(exp_avg_length(constant, t) == doctest::Approx(37.0));
    }

    // Huge lengths must not overflow.
    std::vector<double> big;
    for (int i = 0; i < 1000; ++i) big.push_back(5000.0 + i);
    const double v = exp_avg_length(big, 1.8);
    CHECK(std::isfinite(v));
    CHECK(v <= 5999.0);
    CHECK(v >= 5999.0 - std::log2(1000.0) / 1.8 - 1e-9);

    std::mt19937_64 rng(11);
    std::vector<double> r;
    for (int i = 0; i < 200; ++i) r.push_back(static_cast<double>(rng() % 100));
    double prev = -1.0;
    for (double t = -0.95; t < 5.0; t += 0.05) {
      const double x = exp_avg_length(r, t);
      CHECK(x >= prev - 1e-9);
      prev = x;
    }

    LengthHistogram h;
    for (double x : r) ++h[static_cast<std::uint32_t>(x)];
    for (double t : {-0.5, 0.0, 0.7, 2.0}) {
      CHECK(exp_avg_length(h, t) == doctest::Approx(exp_avg_length(r, t)));
    }

    CHECK_THROWS_AS(exp_avg_length(l, -1.0), DomainError);
    CHECK_THROWS_AS(exp_avg_length(std::vector<double>{}, 1.0), DomainError);
  }

  TEST_CASE("q grid") {
    const auto g = make_q_grid();
    REQUIRE(g.size() == 21);
    CHECK(g.front() == 0.0);
    CHECK(g[3] == 0.3);
    CHECK(g[7] == 0.7);
    CHECK(g.back() == 2.0);
    CHECK(make_q_grid(0.05, 1.0, 0.05).size() == 20);
    CHECK_THROWS_AS(make_q_grid(0, 1, 0), DomainError);
    CHECK_THROWS_AS(make_q_grid(1, 0, 0.1), DomainError);
  }

  TEST_CASE("Campbell bound over a full enumeration") {
    const SymbolModel p = SymbolModel::from_weights({5, 3, 2});
    const std::size_t m = 6;
    const StringSet all = enumerate_all(3, m);
    std::vector<double> weights;
    for (std::size_t j = 0; j < all.size(); ++j) {
      weights.push_back(std::exp2(-information_bits(all[j], p)));
    }
    for (double t : {0.2, 0.8, 1.8}) {
      const double bound = static_cast<double>(m) * renyi_entropy(p, campbell_q(t));
      for (double q : make_q_grid()) {
        std::vector<double> lengths;
        for (std::size_t j = 0; j < all.size(); ++j) {
          lengths.push_back(analytic_length(all[j], p, q));
        }
        const double l = exp_avg_length(lengths, t, weights);
        CHECK(l >= bound - 1e-9);
        if (std::abs(q - campbell_q(t)) < 1e-12) CHECK(l < bound + 2.0);
      }
    }
  }

  TEST_CASE("sweep") {
    const SymbolModel p = acq::testing::zipf_model(6, 1);
    const StringSet strings = chunk(generate_iid(p, 3000, 12, 9), 12);
    const auto grid = make_q_grid();
    const std::vector<double> ts = {0.2, 0.8, 1.8};
    const SweepOutput out = sweep(strings, p, grid, ts);
    REQUIRE(out.results.size() == 3);
    CHECK(out.matrix.string_count == 3000);
    CHECK(out.matrix.length == 12);
    for (std::size_t qi = 0; qi < grid.size(); ++qi) {
      std::uint64_t n = 0;
      for (const auto& [len, c] : out.matrix.histograms[qi]) n += c;
      CHECK(n == 3000);
      for (std::size_t j = 0; j < 3000; j += 97) {
        CHECK(out.matrix.at(qi, j) == analytic_length(strings[j], p, grid[qi]));
      }
    }
    for (const auto& r : out.results) {
      CHECK(r.q_t == doctest::Approx(campbell_q(r.t)));
      REQUIRE(r.l_emp.size() == grid.size());
      const auto best = std::min_element(r.l_emp.begin(), r.l_emp.end());
      CHECK(r.argmin_q == grid[static_cast<std::size_t>(best - r.l_emp.begin())]);
      CHECK(std::abs(r.refined_argmin_q - r.argmin_q) <= 0.1 + 1e-12);
      CHECK(r.renyi_line == doctest::Approx(12 * renyi_entropy(p, r.q_t)));
      CHECK(r.gap_at_qt == doctest::Approx(r.l_emp_at_qt - r.renyi_line));
      for (std::size_t qi = 0; qi < grid.size(); ++qi) {
        std::vector<double> row;
        for (std::size_t j = 0; j < 3000; ++j) row.push_back(out.matrix.at(qi, j));
        CHECK(r.l_emp[qi] == doctest::Approx(exp_avg_length(row, r.t)));
      }
    }

    SweepOptions threaded;
    threaded.threads = 4;
    threaded.keep_matrix = false;
    const SweepOutput again = sweep(strings, p, grid, ts, threaded);
    CHECK(again.matrix.lengths.empty());
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(again.results[i].l_emp == out.results[i].l_emp);
      CHECK(again.results[i].argmin_q == out.results[i].argmin_q);
    }

    CHECK(cost_advantage(strings, p, 0.8) ==
          doctest::Approx(empirical_exp_length(string_information(strings, p), 12, p, 1.0, 0.8) -
                          out.results[1].l_emp_at_qt));

    CHECK_THROWS_AS(sweep(StringSet(), p, grid, ts), DataError);
    CHECK_THROWS_AS(sweep(strings, p, {}, ts), DomainError);
    CHECK_THROWS_AS(sweep(strings, p, {0.5, 0.2}, ts), DomainError);
  }
}
