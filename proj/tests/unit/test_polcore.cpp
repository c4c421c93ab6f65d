// Copyright 2026 The polarproj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <polarproj/polcore.hpp>

#include <cmath>
#include <random>

#include "helpers.hpp"

namespace pp = polarproj;
using pp::ErrorKind;

namespace {

pp::StokesVector random_stokes(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double s0 = 1e-3 + 100.0 * u(rng);
  const double rho = u(rng);
  const double phi = 4.0 * pp::kPi * (u(rng) - 0.5);
  return {s0, s0 * rho * std::cos(2 * phi), s0 * rho * std::sin(2 * phi), 0.0};
}

double max_abs(const Eigen::Matrix4d& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("linear polarizer at pi/8 has the textbook first row") {
  const auto m = pp::linear_polarizer_mueller(pp::kPi / 8).m;
  CHECK(m(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(m(0, 1) - 0.3535533905932737622) < 1e-15);
  CHECK(std::abs(m(0, 2) - 0.3535533905932737622) < 1e-15);
  CHECK(m(0, 3) == 0.0);
  CHECK(m.row(3).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("polarizer and rotator identities hold over random angles") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(-10.0, 10.0);
  const auto m0 = pp::linear_polarizer_mueller(0.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = angle(rng);
    const auto m = pp::linear_polarizer_mueller(a);
    REQUIRE(max_abs((m * m).m - m.m) < 1e-12);
    const auto r = pp::rotator_mueller(a);
    REQUIRE(max_abs((r.transpose() * m0 * r).m - m.m) < 1e-12);
    REQUIRE(max_abs((r.transpose() * r).m - Eigen::Matrix4d::Identity()) < 1e-12);
  }
}

TEST_CASE("Malus, orthogonal pairs and sinusoid parameters agree on 10^4 random states") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> angle(-10.0, 10.0);
  for (int i = 0; i < 10000; ++i) {
    const auto s = random_stokes(rng);
    const double a = angle(rng);
    const double through = pp::intensity_through_polarizer(s, a);
    REQUIRE(std::abs(pp::apply_mueller(pp::linear_polarizer_mueller(a), s).s0 - through) <= 1e-12 * s.s0);
    REQUIRE(std::abs(through + pp::intensity_through_polarizer(s, a + pp::kHalfPi) - s.s0) <= 1e-12 * s.s0);
    const auto p = pp::sinusoid_params(s);
    const double predicted = p.i_min + (p.i_max - p.i_min) * std::pow(std::cos(a - p.phase), 2);
    REQUIRE(std::abs(predicted - through) <= 1e-12 * std::max(through, 1e-3 * s.s0));
    REQUIRE(p.phase >= 0.0);
    REQUIRE(p.phase < pp::kPi);
  }
}

TEST_CASE("light leaving a polarizer is fully polarized") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> angle(0.0, pp::kPi);
  for (int i = 0; i < 10000; ++i) {
    const auto s = random_stokes(rng);
    const auto out = pp::apply_mueller(pp::linear_polarizer_mueller(angle(rng)), s);
    if (out.s0 > 1e-9 * s.s0) REQUIRE(std::abs(pp::dolp(out) - 1.0) < 1e-9);
  }
}

TEST_CASE("DoLP and AoLP are invariant under positive scaling") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> expo(-8.0, 8.0);
  for (int i = 0; i < 10000; ++i) {
    const auto s = random_stokes(rng);
    const double k = std::exp(expo(rng));
    const pp::StokesVector t{k * s.s0, k * s.s1, k * s.s2, 0.0};
    REQUIRE(std::abs(pp::dolp(t) - pp::dolp(s)) < 1e-12);
    if (pp::dolp(s) > 1e-8) REQUIRE(pp::axial_distance(pp::aolp(t), pp::aolp(s)) < 1e-12);
  }
}

TEST_CASE("summaries of simple states") {
  const pp::StokesVector horizontal{1, 1, 0, 0};
  CHECK(pp::dolp(horizontal) == doctest::Approx(1.0));
  CHECK(pp::aolp(horizontal) == 0.0);
  const pp::StokesVector diagonal{2, 0, 1, 0};
  CHECK(pp::aolp(diagonal) == doctest::Approx(pp::kPi / 4));
  CHECK(pp::dolp(diagonal) == doctest::Approx(0.5));
  const pp::StokesVector minus45{1, 0, -0.5, 0};
  CHECK(pp::aolp(minus45) == doctest::Approx(3 * pp::kPi / 4));
  const auto sum = pp::summarize({4, 0, 0, 0});
  CHECK(sum.intensity == 4.0);
  CHECK(sum.dolp == 0.0);
  CHECK(sum.aolp == 0.0);
}

TEST_CASE("error cases of dolp and aolp") {
  CHECK_ERROR(pp::dolp({0, 0, 0, 0}), ErrorKind::ZeroIntensity);
  CHECK_ERROR(pp::dolp({-1, 0, 0, 0}), ErrorKind::ZeroIntensity);
  CHECK_ERROR(pp::aolp({1, 0, 0, 0}), ErrorKind::UndefinedAngle);
}

TEST_CASE("DoLP slightly above one clamps; far above depends on strict mode") {
  const pp::StokesVector noisy{1, 1.0000005, 0, 0};
  {
    testing::StrictScope strict(true);
    CHECK(pp::dolp(noisy) == 1.0);
    CHECK_ERROR(pp::dolp({1, 1.1, 0, 0}), ErrorKind::Unrealizable);
  }
  {
    testing::StrictScope strict(false);
    testing::WarningSink sink;
    CHECK(pp::dolp({1, 1.1, 0, 0}) == 1.0);
    CHECK(sink.messages.size() == 1);
  }
}

TEST_CASE("mixture decomposition of (2, 1, 1, 0)") {
  const pp::StokesVector s{2, 1, 1, 0};
  const auto mix = pp::mixture_decompose(s);
  CHECK(std::abs(mix.unpolarized.s0 - 0.5857864376269049512) < 1e-15);
  CHECK(mix.unpolarized.s1 == 0.0);
  CHECK(mix.unpolarized.s2 == 0.0);
  CHECK(std::abs(mix.polarized.s0 + mix.unpolarized.s0 - s.s0) < 1e-15);
  CHECK(mix.polarized.s1 == s.s1);
  CHECK(pp::dolp(mix.polarized) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("realizability check") {
  CHECK(pp::StokesVector{1, 0.6, 0.8, 0}.realizable());
  CHECK_FALSE(pp::StokesVector{1, 0.7, 0.8, 0}.realizable());
  CHECK_FALSE(pp::StokesVector{-1, 0, 0, 0}.realizable());
}

TEST_CASE("wrap_pi and axial_distance stay in range") {
  CHECK(pp::wrap_pi(-0.1) == doctest::Approx(pp::kPi - 0.1));
  CHECK(pp::wrap_pi(pp::kPi) == 0.0);
  CHECK(pp::wrap_pi(7 * pp::kPi + 0.25) == doctest::Approx(0.25));
  CHECK(pp::axial_distance(0.01, pp::kPi - 0.01) == doctest::Approx(0.02));
  CHECK(pp::axial_distance(0.3, 0.3 + pp::kPi) == doctest::Approx(0.0).epsilon(1e-12));
}
