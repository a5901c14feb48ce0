// Copyright 2026 The pickcell Authors
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

#include <cmath>
#include <random>

#include "common/canonical_json.hpp"
#include "common/error.hpp"
#include "common/png_io.hpp"
#include "common/rng.hpp"
#include "common/types.hpp"
#include "doctest.h"

using namespace pickcell;

TEST_CASE("canonical json sorts keys and drops whitespace") {
  Json j = {{"b", 1}, {"a", {{"d", true}, {"c", nullptr}}}, {"e", "x"}};
  CHECK(canonical_dump(j) == R"({"a":{"c":null,"d":true},"b":1,"e":"x"})");
}

TEST_CASE("canonical floats use at most nine significant digits") {
  CHECK(canonical_dump(Json(0.1)) == "0.1");
  CHECK(canonical_dump(Json(1.0 / 3.0)) == "0.333333333");
  CHECK(canonical_dump(Json(-0.0)) == "0");
  CHECK(canonical_dump(Json(1e-12)) == "1e-12");
  CHECK(canonical_dump(Json(12345678912.0)) == "1.23456789e+10");
  CHECK_THROWS_AS(canonical_dump(Json(std::nan(""))), Error);
}

TEST_CASE("canonical_float is a fixed point of re-encoding") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double x = canonical_float(d(rng));
    CHECK(canonical_float(x) == x);
    CHECK(Json::parse(canonical_dump(Json(x))).get<double>() == x);
  }
}

TEST_CASE("fixed6 prints six decimals") {
  CHECK(fixed6_dump(Json({{"x", 0.5}, {"n", 3}})) == R"({"n":3,"x":0.500000})");
}

TEST_CASE("pinhole round trip") {
  CameraIntrinsics cam;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> du(0, 320), dv(0, 240), dz(0.2, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const double u = du(rng), v = dv(rng), z = dz(rng);
    auto [pu, pv] = pinhole_project(pinhole_deproject(u, v, z, cam), cam);
    CHECK(std::abs(pu - u) < 1e-9);
    CHECK(std::abs(pv - v) < 1e-9);
  }
}

TEST_CASE("camera to bin maps the principal ray to the point below the camera") {
  CameraPose pose;
  const Vec3 p = camera_to_bin(pose) * Vec3(0, 0, pose.height);
  CHECK(p.x() == doctest::Approx(pose.x));
  CHECK(p.y() == doctest::Approx(pose.y));
  CHECK(p.z() == doctest::Approx(0.0));
  // Image +v points toward smaller bin y.
  const Vec3 q = camera_to_bin(pose) * Vec3(0, 0.1, pose.height);
  CHECK(q.y() == doctest::Approx(pose.y - 0.1));
}

TEST_CASE("box helpers") {
  BoundingBox a{0, 0, 10, 10}, b{5, 5, 15, 15};
  CHECK(intersection_area(a, b) == 25.0);
  CHECK(iou(a, b) == doctest::Approx(25.0 / 175.0));
  CHECK(union_box(a, b) == BoundingBox{0, 0, 15, 15});
  CHECK(a.contains_pixel(9, 9));
  CHECK_FALSE(a.contains_pixel(10, 0));
}

TEST_CASE("intrinsics and gripper validation") {
  CameraIntrinsics cam;
  cam.validate();
  cam.fx = 0;
  CHECK_THROWS_AS(cam.validate(), Error);
  GripperParams g;
  g.validate();
  g.jaw_thickness = 0.05;
  CHECK_THROWS_AS(g.validate(), Error);
}

TEST_CASE("depth frame holes read as sentinel") {
  DepthFrame d(4, 3, 0.5);
  CHECK(d.hole_count() == 0);
  d.set_hole(1, 2);
  CHECK(d.hole_count() == 1);
  CHECK_FALSE(d.depth(1, 2).has_value());
  CHECK(d.value(1, 2) == DepthFrame::kHole);
}

TEST_CASE("16-bit png round trip in millimeters") {
  DepthFrame d(5, 4, 0.7);
  d.set(2, 1, 0.6554);
  d.set_hole(0, 0);
  const Image16 mm = depth_to_mm(d);
  CHECK(mm.pixels[0] == 0);
  CHECK(mm.pixels[1 * 5 + 2] == 655);
  const auto bytes = encode_png_gray16(mm);
  const Image16 back = decode_png_gray16(bytes);
  CHECK(back.width == 5);
  CHECK(back.height == 4);
  CHECK(back.pixels == mm.pixels);
}

TEST_CASE("rng seeding is stable") {
  Rng a = make_rng({1, 2, 3}), b = make_rng({1, 2, 3}), c = make_rng({1, 2, 4});
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  for (int i = 0; i < 1000; ++i) {
    const double u = uniform01(a);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}
