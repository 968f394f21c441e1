#include <doctest.h>

#include "turbrest/temporal_filters.hpp"

#include <algorithm>
#include <random>

using namespace turbrest;

namespace {

// Sequence of 1x1 frames from a list of values.
Sequence pixel_series(const std::vector<double>& values, int max_value = 255) {
  std::vector<Frame> frames;
  for (double v : values) frames.push_back(Frame::constant(1, 1, v, max_value));
  return Sequence(std::move(frames));
}

Sequence random_sequence(int w, int h, int n, std::mt19937_64& rng, int levels = 256) {
  std::uniform_int_distribution<int> dist(0, levels - 1);
  std::vector<Frame> frames;
  for (int k = 0; k < n; ++k) {
    ImageD px(h, w);
    for (Eigen::Index i = 0; i < px.size(); ++i) px.data()[i] = dist(rng);
    frames.emplace_back(std::move(px), 255);
  }
  return Sequence(std::move(frames));
}

}  // namespace

TEST_CASE("filter kind names") {
  CHECK(parse_filter_kind("mean") == FilterKind::Mean);
  CHECK(parse_filter_kind("median") == FilterKind::Median);
  CHECK_FALSE(parse_filter_kind("mode").has_value());
  CHECK(std::string(to_string(FilterKind::Median)) == "median");
}

TEST_CASE("two-value pixel: mean is the weighted average, median the majority") {
  const Sequence s = pixel_series({10, 20, 10, 20, 10});
  CHECK(temporal_mean(s)(0, 0) == doctest::Approx(14.0));
  CHECK(temporal_median(s)(0, 0) == 10.0);
}

TEST_CASE("median selection rules") {
  CHECK(temporal_median(pixel_series({3, 1, 2}))(0, 0) == 2.0);
  CHECK(temporal_median(pixel_series({1, 4}))(0, 0) == 1.0);
  CHECK(temporal_median(pixel_series({9}))(0, 0) == 9.0);
  // Tie between two values: the lower median takes the smaller one.
  CHECK(temporal_median(pixel_series({20, 10, 20, 10}))(0, 0) == 10.0);
}

TEST_CASE("constant sequence is a fixed point") {
  std::mt19937_64 rng(3);
  const Sequence one = random_sequence(9, 6, 1, rng);
  const Sequence seq(std::vector<Frame>(5, one[0]));
  CHECK(temporal_mean(seq) == one[0]);
  CHECK(temporal_median(seq) == one[0]);
}

TEST_CASE("window indices are centered and clamped") {
  CHECK(WindowSpec{3}.indices(0, 5) == std::vector<std::size_t>{0, 0, 1});
  CHECK(WindowSpec{3}.indices(4, 5) == std::vector<std::size_t>{3, 4, 4});
  CHECK(WindowSpec{4}.indices(2, 5) == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(WindowSpec{1}.indices(2, 5) == std::vector<std::size_t>{2});
}

TEST_CASE("sliding filter") {
  std::mt19937_64 rng(5);
  const Sequence seq = random_sequence(8, 5, 7, rng);

  SUBCASE("window 1 is the identity for both kinds") {
    CHECK(sliding_filter(seq, FilterKind::Mean, {1}) == seq);
    CHECK(sliding_filter(seq, FilterKind::Median, {1}) == seq);
  }
  SUBCASE("full window at the center frame equals the whole-sequence filter") {
    const Sequence mean = sliding_filter(seq, FilterKind::Mean, {7});
    CHECK(mean.size() == seq.size());
    CHECK(mean[3] == temporal_mean(seq));
    const Sequence med = sliding_filter(seq, FilterKind::Median, {7});
    CHECK(med[3] == temporal_median(seq));
  }
  SUBCASE("an isolated spike is removed by a 3-frame median") {
    const Sequence out = sliding_filter(pixel_series({0, 0, 10, 0, 0}), FilterKind::Median, {3});
    REQUIRE(out.size() == 5);
    for (const Frame& f : out) CHECK(f(0, 0) == 0.0);
  }
  SUBCASE("window larger than the sequence still yields one frame per input") {
    CHECK(sliding_filter(seq, FilterKind::Mean, {20}).size() == seq.size());
  }
  CHECK_THROWS_AS(sliding_filter(seq, FilterKind::Mean, {0}), Error);
}

TEST_CASE("property: median never creates new values") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<int> dim(1, 12), count(1, 9);
    const Sequence seq = random_sequence(dim(rng), dim(rng), count(rng), rng);
    const Frame med = temporal_median(seq);
    for (int y = 0; y < seq.height(); ++y) {
      for (int x = 0; x < seq.width(); ++x) {
        const bool found = std::any_of(seq.begin(), seq.end(), [&](const Frame& f) { return f(x, y) == med(x, y); });
        REQUIRE(found);
      }
    }
  }
}

TEST_CASE("property: two-value law over random configurations") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> level(0, 255), reps(1, 8);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = level(rng), b = level(rng);
    const int na = reps(rng);
    int nb = reps(rng);
    if (nb == na) ++nb;
    std::vector<double> v(na, a);
    v.insert(v.end(), nb, b);
    std::shuffle(v.begin(), v.end(), rng);
    const Sequence s = pixel_series(v);
    CHECK(temporal_mean(s)(0, 0) == doctest::Approx((a * na + b * nb) / (na + nb)).epsilon(1e-12));
    CHECK(temporal_median(s)(0, 0) == (na > nb ? a : b));
  }
}

TEST_CASE("property: whole-sequence filters ignore frame order") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const Sequence seq = random_sequence(7, 4, 6, rng);
    std::vector<Frame> shuffled(seq.begin(), seq.end());
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const Sequence perm(shuffled);
    CHECK(temporal_median(perm) == temporal_median(seq));
    const ImageD d = temporal_mean(perm).pixels() - temporal_mean(seq).pixels();
    CHECK(d.abs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("property: scaling the input scales the output") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> scale(0.01, 200.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Sequence seq = random_sequence(5, 5, 5, rng);
    const double c = scale(rng);
    std::vector<Frame> scaled;
    for (const Frame& f : seq) scaled.emplace_back(f.pixels() * c, 65535);
    const Sequence sc(scaled);
    CHECK((temporal_median(sc).pixels() - c * temporal_median(seq).pixels()).abs().maxCoeff() == 0.0);
    const double tol = 1e-12 * c * 255.0;
    CHECK((temporal_mean(sc).pixels() - c * temporal_mean(seq).pixels()).abs().maxCoeff() <= tol);
  }
}

TEST_CASE("outputs do not depend on the worker count") {
  std::mt19937_64 rng(37);
  const Sequence seq = random_sequence(33, 29, 9, rng);
  const Frame mean1 = temporal_mean(seq, 1), med1 = temporal_median(seq, 1);
  for (unsigned threads : {2u, 3u, 8u, 0u}) {
    CHECK(temporal_mean(seq, threads) == mean1);
    CHECK(temporal_median(seq, threads) == med1);
    CHECK(sliding_filter(seq, FilterKind::Median, {4}, threads) == sliding_filter(seq, FilterKind::Median, {4}, 1));
  }
  CHECK(mean1.width() == 33);
  CHECK(mean1.height() == 29);
}
