// Copyright (c) 2026 The socdist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>

#include "socdist/errors.hpp"
#include "socdist/violation.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace socdist;
using namespace socdist::testing;

namespace {


Detection person_at(double cx, double cy, double conf = 0.9)
{
    return {{cx - 5, cy - 10, cx + 5, cy + 10}, 0, conf};
}

}  // namespace

TEST_CASE("pairwise_distances")
{
    CHECK(pairwise_distances({}).empty());
    CHECK(pairwise_distances({{1, 1}}).empty());
    CHECK(pairwise_distances({{0, 0}, {3, 4}}) == std::vector<PairDistance>{{0, 1, 5.0}});

    Rng rng(4);
    for (int k = 0; k < 100; ++k) {
        std::vector<Point2D> pts(3);
        for (auto& p : pts) p = testing::random_point(rng, 100);
        const auto got = pairwise_distances(pts);
        const auto want = oracle_pairs(pts, 1e300);
        REQUIRE(got.size() == want.size());
        for (std::size_t n = 0; n < got.size(); ++n) {
            CHECK(got[n].i == want[n].i);
            CHECK(got[n].j == want[n].j);
            CHECK(got[n].d == doctest::Approx(want[n].d).epsilon(1e-12));
        }
    }
    for (int n = 0; n < 30; ++n)
        CHECK(pairwise_distances(std::vector<Point2D>(n)).size() == static_cast<std::size_t>(n * (n - 1) / 2));
}

TEST_CASE("classify_violations examples")
{
    ViolationConfig cfg;
    REQUIRE(cfg.threshold_t == 50.0);

    SUBCASE("distance equal to the threshold is green")
    {
        const auto c = classify_violations({{0, 0}, {30, 40}}, cfg);
        CHECK(c.violations.empty());
        CHECK(c.statuses[0].color == StatusColor::Green);
        CHECK(c.statuses[1].color == StatusColor::Green);
    }
    SUBCASE("one close pair")
    {
        const auto c = classify_violations({{0, 0}, {30, 30}, {300, 300}}, cfg);
        REQUIRE(c.violations.size() == 1);
        CHECK(c.violations[0].i == 0);
        CHECK(c.violations[0].j == 1);
        CHECK(c.violations[0].d == doctest::Approx(42.43).epsilon(1e-3));
        CHECK(c.statuses[0].color == StatusColor::Red);
        CHECK(c.statuses[1].color == StatusColor::Red);
        CHECK(c.statuses[2].color == StatusColor::Green);
    }
    SUBCASE("single point")
    {
        cfg.threshold_t = 1e9;
        const auto c = classify_violations({{5, 5}}, cfg);
        CHECK(c.violations.empty());
        CHECK(c.statuses.at(0).color == StatusColor::Green);
    }
}

TEST_CASE("violation config")
{
    ViolationConfig cfg;
    cfg.threshold_t = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.threshold_t = -5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.threshold_t = NAN;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK(parse_distance_space("image") == DistanceSpace::ImagePlane);
    CHECK(parse_distance_space("birdseye") == DistanceSpace::BirdsEye);
    CHECK_THROWS_AS(parse_distance_space("top"), ConfigError);
}

TEST_CASE("classify_violations matches the double-loop oracle")
{
    Rng rng(77);
    for (int k = 0; k < 1000; ++k) {
        const auto pts = random_points(rng);
        ViolationConfig cfg;
        cfg.threshold_t = testing::uniform(rng, 1, 120);
        const auto got = classify_violations(pts, cfg);
        const auto want = oracle_pairs(pts, cfg.threshold_t);
        REQUIRE(got.violations.size() == want.size());
        for (std::size_t n = 0; n < want.size(); ++n) {
            CHECK(got.violations[n].i == want[n].i);
            CHECK(got.violations[n].j == want[n].j);
        }
        std::vector<bool> member(pts.size(), false);
        for (const auto& v : want) member[v.i] = member[v.j] = true;
        REQUIRE(got.statuses.size() == pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            CHECK((got.statuses[i].color == StatusColor::Red) == member[i]);
            CHECK(got.statuses[i].index == i);
            CHECK(got.statuses[i].point == pts[i]);
        }
    }
}

TEST_CASE("classification is permutation-equivariant and threshold-monotone")
{
    Rng rng(6);
    for (int k = 0; k < 300; ++k) {
        const auto pts = random_points(rng, 40);
        ViolationConfig cfg;
        cfg.threshold_t = testing::uniform(rng, 5, 100);
        const auto base = classify_violations(pts, cfg);

        std::vector<std::size_t> perm(pts.size());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<Point2D> shuffled(pts.size());
        for (std::size_t n = 0; n < perm.size(); ++n) shuffled[n] = pts[perm[n]];
        const auto moved = classify_violations(shuffled, cfg);

        std::set<std::pair<std::size_t, std::size_t>> a, b;
        for (const auto& v : base.violations) a.insert({v.i, v.j});
        for (const auto& v : moved.violations) {
            const auto i = perm[v.i], j = perm[v.j];
            b.insert({std::min(i, j), std::max(i, j)});
        }
        CHECK(a == b);
        for (std::size_t n = 0; n < perm.size(); ++n) CHECK(moved.statuses[n].color == base.statuses[perm[n]].color);

        ViolationConfig wider = cfg;
        wider.threshold_t = cfg.threshold_t + testing::uniform(rng, 0, 50);
        std::set<std::pair<std::size_t, std::size_t>> c;
        for (const auto& v : classify_violations(pts, wider).violations) c.insert({v.i, v.j});
        CHECK(std::includes(c.begin(), c.end(), a.begin(), a.end()));
    }
}

TEST_CASE("frame_report")
{
    ViolationConfig cfg;

    SUBCASE("empty frame")
    {
        const auto r = frame_report({3, {}}, cfg, std::nullopt);
        CHECK(r.frame_index == 3);
        CHECK(r.person_count == 0);
        CHECK(r.violation_count == 0);
        CHECK(r.statuses.empty());
    }
    SUBCASE("two persons 30 px apart")
    {
        const FrameDetections fd{0, {person_at(100, 100), person_at(130, 100)}};
        const auto r = frame_report(fd, cfg, std::nullopt);
        CHECK(r.person_count == 2);
        CHECK(r.violation_count == 1);
        CHECK(r.statuses[0].color == StatusColor::Red);
        CHECK(r.statuses[1].color == StatusColor::Red);
        CHECK(r.boxes[1] == fd.detections[1].box);

        ViolationConfig bev = cfg;
        bev.space = DistanceSpace::BirdsEye;
        const auto scaled = frame_report(fd, bev, Homography::scale(2, 2));
        CHECK(scaled.violation_count == 0);
        CHECK(scaled.statuses[0].point == Point2D{200, 200});

        CHECK(frame_report(fd, bev, Homography::identity()) == r);
    }
    SUBCASE("bottom-center anchor")
    {
        ViolationConfig bottom = cfg;
        bottom.anchor_mode = AnchorMode::BottomCenter;
        const auto r = frame_report({0, {person_at(100, 100)}}, bottom, std::nullopt);
        CHECK(r.statuses[0].point == Point2D{100, 110});
    }
    SUBCASE("bird's-eye without homography")
    {
        ViolationConfig bev = cfg;
        bev.space = DistanceSpace::BirdsEye;
        CHECK_THROWS_AS(frame_report({0, {person_at(1, 1)}}, bev, std::nullopt), ConfigError);
    }
    SUBCASE("identity homography gives identical reports on random frames")
    {
        Rng rng(12);
        ViolationConfig bev = cfg;
        bev.space = DistanceSpace::BirdsEye;
        for (int k = 0; k < 100; ++k) {
            FrameDetections fd{k, {}};
            for (int n = testing::uniform_int(rng, 0, 30); n > 0; --n)
                fd.detections.push_back({testing::random_box(rng, 400), 0, 0.9});
            const auto r = frame_report(fd, cfg, std::nullopt);
            CHECK(frame_report(fd, bev, Homography::identity()) == r);
            CHECK(r.violation_count <= r.person_count * (r.person_count - 1) / 2);
            CHECK(r.statuses.size() == r.person_count);
        }
    }
}
