#include <doctest.h>

#include <cmath>

#include "error.hpp"
#include "helpers.hpp"
#include "noise.hpp"
#include "philox.hpp"

using namespace wsarma;

TEST_CASE("philox4x32-10 known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("philox engine: block layout, discard and determinism") {
  PhiloxEngine eng(0x1234);
  const auto b0 = philox4x32({0, 0, 0, 0}, {0x1234, 0});
  CHECK(eng() == ((std::uint64_t{b0[1]} << 32) | b0[0]));
  CHECK(eng() == ((std::uint64_t{b0[3]} << 32) | b0[2]));

  for (std::uint64_t skip : {0ull, 1ull, 5ull, 31ull, 32ull, 33ull, 100ull, 1000ull}) {
    PhiloxEngine a(77, 3), b(77, 3);
    for (std::uint64_t i = 0; i < skip; ++i) a();
    b.discard(skip);
    for (int i = 0; i < 70; ++i) CHECK(a() == b());
  }
  PhiloxEngine c(5), d(5), e(6);
  CHECK(c() == d());
  CHECK(c() != e());
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
}

TEST_CASE("strong gaussian noise has variance omega") {
  NoiseConfig nc;
  nc.seed = 314;
  const auto e = generate_noise(nc, 1000000);
  CHECK(std::abs(testing::sample_variance(e) - 1.0) < 0.01);
  CHECK(std::abs(testing::sample_mean(e)) < 5.0 / 1000.0);
}

TEST_CASE("ARCH(1) noise: stationary variance and weak-white-noise structure") {
  NoiseConfig nc;
  nc.kind = NoiseKind::Arch1;
  nc.alpha1 = 0.45;
  nc.seed = 2718;
  const auto e = generate_noise(nc, 1000000);
  CHECK(std::abs(testing::sample_variance(e) / (1.0 / (1.0 - 0.45)) - 1.0) < 0.02);
  CHECK(std::abs(testing::sample_acf(e, 1)) < 0.01);
  std::vector<double> sq(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) sq[i] = e[i] * e[i];
  CHECK(testing::sample_acf(sq, 1) > 0.2);
}

TEST_CASE("alpha1 = 0 ARCH equals strong gaussian") {
  NoiseConfig a, b;
  a.seed = b.seed = 9;
  b.kind = NoiseKind::Arch1;
  b.alpha1 = 0.0;
  CHECK(generate_noise(a, 500) == generate_noise(b, 500));
}

TEST_CASE("noise config validation") {
  NoiseConfig nc;
  nc.kind = NoiseKind::Arch1;
  nc.alpha1 = -0.1;
  CHECK_THROWS_AS(generate_noise(nc, 10), Error);
  nc.alpha1 = 1.3;
  CHECK(generate_noise(nc, 10).size() == 10);
}

TEST_CASE("stream_for_replication") {
  CHECK(stream_for_replication(42, 0) != stream_for_replication(42, 1));
  CHECK(stream_for_replication(42, 7) == stream_for_replication(42, 7));
  CHECK(stream_for_replication(42, 7) != stream_for_replication(43, 7));

  std::vector<std::vector<double>> streams;
  for (std::uint64_t r = 0; r < 1000; ++r) {
    NoiseConfig nc;
    nc.seed = stream_for_replication(42, r);
    streams.push_back(generate_noise(nc, 10000));
  }
  double worst = 0.0;
  for (std::size_t r = 0; r + 1 < streams.size(); ++r) {
    const auto& a = streams[r];
    const auto& b = streams[r + 1];
    const double ma = testing::sample_mean(a), mb = testing::sample_mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
      sab += (a[t] - ma) * (b[t] - mb);
      saa += (a[t] - ma) * (a[t] - ma);
      sbb += (b[t] - mb) * (b[t] - mb);
    }
    worst = std::max(worst, std::abs(sab / std::sqrt(saa * sbb)));
  }
  CHECK(worst < 0.05);
}
