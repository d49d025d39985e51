#include <doctest.h>

#include <cmath>
#include <random>

#include "acq/coder.hpp"
#include "acq/container.hpp"
#include "acq/error.hpp"
#include "test_support.hpp"

using namespace acq;

namespace {

const SymbolModel kDyadic = SymbolModel::from_weights({2, 1, 1});

// Exact checks of the codeword against its message interval.
void check_codeword_invariants(const Codeword& cw, const MessageInterval& iv) {
  const mpz_class one_at_scale = mpz_class(1) << iv.scale_bits;
  const mpz_class pow_len = mpz_class(1) << cw.bit_count;
  // -log2 S <= len < 2 - log2 S  <=>  2^scale <= 2^len W < 4 * 2^scale
  CHECK(pow_len * iv.width >= one_at_scale);
  CHECK(pow_len * iv.width < 4 * one_at_scale);
  // [v, v+1) / 2^len inside [base, base + width) / 2^scale.
  const mpz_class v = cw.value();
  CHECK(v * one_at_scale >= iv.base * pow_len);
  CHECK((v + 1) * one_at_scale <= (iv.base + iv.width) * pow_len);
}

}  // namespace

TEST_SUITE("coder") {
  TEST_CASE("quantize examples") {
    const SymbolModel u4 = SymbolModel::from_weights({1, 1, 1, 1});
    for (double q : {0.0, 0.5, 1.0, 2.0}) {
      CHECK(quantize(u4, q, 8).freq() == std::vector<std::uint64_t>{64, 64, 64, 64});
    }
    CHECK(quantize(u4, 1.0, 8).cum() == std::vector<std::uint64_t>{0, 64, 128, 192, 256});
    CHECK(quantize(kDyadic, 1.0, 8).freq() == std::vector<std::uint64_t>{128, 64, 64});
    // escort(q=0.5) * 256 = (106.04, 74.98, 74.98); floors sum to 254 and
    // the two largest remainders get the missing units.
    CHECK(quantize(kDyadic, 0.5, 8).freq() == std::vector<std::uint64_t>{106, 75, 75});
  }

  TEST_CASE("quantize with K = 4 as in the worked example") {
    // K below the coder minimum is rejected; the K = 4 example scales
    // exactly to K = 8.
    CHECK_THROWS_AS(quantize(kDyadic, 1.0, 4), DomainError);
    const auto qm = quantize(kDyadic, 1.0, 8);
    CHECK(qm.freq()[0] / 16 == 8);
    CHECK(qm.freq()[1] / 16 == 4);
  }

  TEST_CASE("quantize errors and floor-at-one clamp") {
    std::vector<std::uint64_t> w(257, 1);
    CHECK_THROWS_WITH_AS(quantize(SymbolModel::from_weights(w), 1.0, 8),
                         "alphabet too large for precision", DataError);
    w.resize(256);
    const auto full = quantize(SymbolModel::from_weights(w), 1.0, 8);
    for (auto f : full.freq()) CHECK(f == 1);

    std::vector<std::uint64_t> skew(40, 1);
    skew[0] = 1000000000;
    const auto qm = quantize(SymbolModel::from_weights(skew), 1.0, 8);
    std::uint64_t sum = 0;
    for (auto f : qm.freq()) {
      CHECK(f >= 1);
      sum += f;
    }
    CHECK(sum == 256);
    CHECK(qm.freq()[0] == 256 - 39);
    CHECK_THROWS_AS(quantize(kDyadic, -0.5, 32), DomainError);
  }

  TEST_CASE("quantization stability at K = 32") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 2 + trial % 60;
      const SymbolModel m = acq::testing::random_model(rng, n, 1000000);
      const double q = 0.25 * (trial % 7);
      const auto qm = quantize(m, q, 32);
      const auto e = escort(m, q);
      const double scale = std::ldexp(1.0, 32);
      std::uint64_t sum = 0;
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(static_cast<double>(qm.freq()[i]) / scale - e[i]) <=
              static_cast<double>(n) / scale);
        sum += qm.freq()[i];
      }
      CHECK(sum == (std::uint64_t{1} << 32));
      CHECK(quantize(m, q, 32).freq() == qm.freq());
    }
  }

  TEST_CASE("fingerprint depends on model, q and K") {
    const auto base = model_fingerprint(kDyadic, 0.5, 32);
    CHECK(base == model_fingerprint(kDyadic, 0.5, 32));
    CHECK(base != model_fingerprint(kDyadic, 0.5000001, 32));
    CHECK(base != model_fingerprint(kDyadic, 0.5, 31));
    CHECK(base != model_fingerprint(SymbolModel::from_weights({2, 1, 2}), 0.5, 32));
    CHECK(base != model_fingerprint(SymbolModel({"a", "b", "c"}, {2, 1, 1}), 0.5, 32));
  }

  TEST_CASE("single symbol of probability 1/2 takes 2 bits") {
    const std::uint64_t half = std::uint64_t{1} << 31;
    const QuantizedModel qm({half, half}, 32, 1.0, 42);
    const std::vector<std::uint32_t> msg = {1};
    const Codeword cw = encode(msg, qm);
    CHECK(cw.bit_count == 2);
    CHECK(cw.message_len == 1);
    // k = 1/2 + 1/4 = 0.11b
    CHECK(cw.bytes == std::vector<std::uint8_t>{0xC0});
    CHECK(decode(cw, qm) == msg);
  }

  TEST_CASE("dyadic abc has S = 1/32 and length 6") {
    const auto qm = quantize(kDyadic, 1.0, 32);
    const std::vector<std::uint32_t> abc = {0, 1, 2};
    CHECK(codeword_length_exact(abc, qm) == 6);
    const Codeword cw = encode(abc, qm);
    CHECK(cw.bit_count == 6);
    IntervalState st(qm);
    for (auto s : abc) st.push(s);
    CHECK(st.width_rational() == mpq_class(1, 32));
    // a = 0 + 1/2*1/2 + 1/8*3/4 = 11/32, k = 11/32 + 1/64 = 23/64 = 010111b
    CHECK(st.base_rational() == mpq_class(11, 32));
    CHECK(cw.value() == 23);
  }

  TEST_CASE("uniform escort over 27 symbols at M = 20 gives 97 bits") {
    std::vector<std::uint64_t> w(27);
    std::mt19937_64 rng(2);
    for (auto& x : w) x = 1 + rng() % 5000;
    const auto qm = quantize(SymbolModel::from_weights(w), 0.0, 32);
    for (int trial = 0; trial < 50; ++trial) {
      const auto msg = acq::testing::random_message(rng, 27, 20);
      CHECK(codeword_length_exact(msg, qm) == 97);
    }
  }

  TEST_CASE("interval state invariants and product-tree agreement") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 2 + trial % 9;
      const SymbolModel m = acq::testing::random_model(rng, n);
      const auto qm = quantize(m, 0.25 * (trial % 7), 8 + trial % 40);
      const auto msg = acq::testing::random_message(rng, n, 1 + trial % 50);
      IntervalState st(qm);
      mpq_class prev_width = 1;
      for (auto s : msg) {
        st.push(s);
        const mpq_class a = st.base_rational();
        const mpq_class w = st.width_rational();
        CHECK(a >= 0);
        CHECK(a + w <= 1);
        CHECK(w < prev_width);
        prev_width = w;
      }
      mpz_class product = 1;
      for (auto s : msg) product *= static_cast<unsigned long>(qm.freq()[s]);
      CHECK(st.width() == product);
      const MessageInterval iv = message_interval(msg, qm);
      CHECK(iv.base == st.base());
      CHECK(iv.width == st.width());
      CHECK(iv.scale_bits == st.scale_bits());
    }
  }

  TEST_CASE("codeword invariants and roundtrip over random cases") {
    std::mt19937_64 rng(1234);
    const double qs[] = {0.0, 0.25, 0.5, 1.0, 1.5};
    for (int trial = 0; trial < 1500; ++trial) {
      const std::size_t n = 1 + trial % 30;
      const SymbolModel m = acq::testing::random_model(rng, n, 100000);
      const auto qm = quantize(m, qs[trial % 5], 32);
      const auto msg = acq::testing::random_message(rng, n, 1 + rng() % 120);
      const Codeword cw = encode(msg, qm);
      CHECK(cw.bit_count == codeword_length_exact(msg, qm));
      check_codeword_invariants(cw, message_interval(msg, qm));
      REQUIRE(decode(cw, qm) == msg);
    }
  }

  TEST_CASE("classic AC length bound with the source probabilities") {
    // q = 1 on a dyadic model: the quantized model is exact, so S_M is the
    // true probability of the message.
    const SymbolModel m = SymbolModel::from_weights({8, 4, 2, 1, 1});
    const auto qm = quantize(m, 1.0, 32);
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 200; ++trial) {
      const auto msg = acq::testing::random_message(rng, 5, 1 + trial);
      double info = 0.0;
      for (auto s : msg) info -= std::log2(m.probs()[s]);
      const auto len = static_cast<double>(codeword_length_exact(msg, qm));
      CHECK(len < 2.0 + info);
      CHECK(len >= info);
    }
  }

  TEST_CASE("uniform escort gives constant lengths") {
    const SymbolModel m = SymbolModel::from_weights({9, 1, 3, 7});
    const auto qm = quantize(m, 0.0, 32);
    std::mt19937_64 rng(4);
    for (std::size_t len = 1; len < 30; ++len) {
      const auto a = acq::testing::random_message(rng, 4, len);
      const auto b = acq::testing::random_message(rng, 4, len);
      CHECK(encode(a, qm).bit_count == 2 * len + 1);
      CHECK(encode(b, qm).bit_count == 2 * len + 1);
      CHECK(decode(encode(a, qm), qm) == a);
    }
  }

  TEST_CASE("single-symbol alphabet") {
    const auto qm = quantize(SymbolModel::from_weights({5}), 1.0, 16);
    const std::vector<std::uint32_t> msg(10, 0);
    const Codeword cw = encode(msg, qm);
    CHECK(cw.bit_count == 1);
    CHECK(decode(cw, qm) == msg);
  }

  TEST_CASE("decode errors") {
    const auto qm = quantize(kDyadic, 0.5, 32);
    const auto other = quantize(kDyadic, 0.6, 32);
    const std::vector<std::uint32_t> msg = {0, 2, 1, 1, 0, 2};
    const Codeword cw = encode(msg, qm);
    CHECK_THROWS_WITH_AS(decode(cw, other), "model mismatch", DataError);

    Codeword empty = cw;
    empty.bit_count = 0;
    empty.bytes.clear();
    CHECK_THROWS_WITH_AS(decode(empty, qm), "corrupt codeword", DataError);

    Codeword zero_len = cw;
    zero_len.message_len = 0;
    CHECK_THROWS_AS(decode(zero_len, qm), DataError);

    const std::vector<std::uint32_t> bad = {0, 3};
    CHECK_THROWS_WITH_AS(encode(bad, qm), "unsupported symbol", DataError);
    CHECK_THROWS_AS(encode({}, qm), DomainError);
  }

  TEST_CASE("tampered codewords decode differently or are rejected") {
    std::mt19937_64 rng(77);
    int rejected = 0;
    int changed = 0;
    for (int trial = 0; trial < 300; ++trial) {
      const SymbolModel m = acq::testing::random_model(rng, 5);
      const auto qm = quantize(m, 0.5, 32);
      const auto msg = acq::testing::random_message(rng, 5, 20);
      Codeword cw = encode(msg, qm);
      const auto bit = rng() % cw.bit_count;
      cw.bytes[bit / 8] ^= static_cast<std::uint8_t>(0x80u >> (bit % 8));
      try {
        const auto back = decode(cw, qm);
        CHECK(back != msg);
        ++changed;
      } catch (const DataError&) {
        ++rejected;
      }
    }
    CHECK(rejected + changed == 300);
  }
}

TEST_SUITE("container") {
  TEST_CASE("header layout is bit-exact") {
    Container c;
    c.precision = 32;
    c.q = 0.5;
    c.codeword.bit_count = 10;
    c.codeword.message_len = 3;
    c.codeword.model_fingerprint = 0x0102030405060708ull;
    c.codeword.bytes = {0xAB, 0xC0};
    const std::string bytes = serialize_container(c);
    REQUIRE(bytes.size() == kContainerHeaderSize + 2);
    const auto u = [&](std::size_t i) { return static_cast<unsigned char>(bytes[i]); };
    CHECK(bytes.substr(0, 4) == "ACQ1");
    CHECK(u(4) == 1);
    CHECK(u(5) == 32);
    // 0.5 = 0x3FE0000000000000
    CHECK(u(6) == 0x3F);
    CHECK(u(7) == 0xE0);
    for (std::size_t i = 8; i < 14; ++i) CHECK(u(i) == 0);
    CHECK(u(21) == 3);
    for (std::size_t i = 0; i < 8; ++i) CHECK(u(22 + i) == i + 1);
    CHECK(u(37) == 10);
    CHECK(u(38) == 0xAB);
    CHECK(u(39) == 0xC0);

    const Container back = parse_container(bytes);
    CHECK(back.precision == 32);
    CHECK(back.q == 0.5);
    CHECK(back.codeword == c.codeword);
  }

  TEST_CASE("container round trip through encode/decode") {
    const SymbolModel m = acq::testing::zipf_model(6, 1);
    const auto qm = quantize(m, campbell_q(0.8), 24);
    std::mt19937_64 rng(6);
    const auto msg = acq::testing::random_message(rng, 6, 500);
    const Container c{24, campbell_q(0.8), encode(msg, qm)};
    const Container back = parse_container(serialize_container(c));
    const auto qm2 = quantize(m, back.q, back.precision);
    CHECK(decode(back.codeword, qm2) == msg);
  }

  TEST_CASE("corrupt containers are rejected") {
    Container c;
    c.codeword.bit_count = 10;
    c.codeword.message_len = 3;
    c.codeword.bytes = {0xAB, 0xC0};
    const std::string good = serialize_container(c);

    std::string bad = good;
    bad[0] = 'X';
    CHECK_THROWS_AS(parse_container(bad), DataError);
    bad = good;
    bad[4] = 2;
    CHECK_THROWS_AS(parse_container(bad), DataError);
    CHECK_THROWS_AS(parse_container(good.substr(0, 20)), DataError);
    CHECK_THROWS_AS(parse_container(good.substr(0, good.size() - 1)), DataError);
    CHECK_THROWS_AS(parse_container(good + "x"), DataError);
    bad = good;
    bad.back() = static_cast<char>(0xC1);
    CHECK_THROWS_AS(parse_container(bad), DataError);
  }
}
