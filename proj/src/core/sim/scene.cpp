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

#include "sim/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "common/error.hpp"

namespace pickcell::sim {
namespace {

constexpr double kPi = std::numbers::pi;

Footprint blank(double length, double width, double cell) {
  Footprint f;
  f.cell_size = cell;
  f.cols = static_cast<int>(std::lround(length / cell));
  f.rows = static_cast<int>(std::lround(width / cell));
  f.heights.assign(static_cast<std::size_t>(f.cols) * f.rows, 0.0);
  return f;
}

// Local coordinates of the center of cell (c, r).
std::pair<double, double> local_center(const Footprint& f, int c, int r) {
  return {(c + 0.5 - f.cols / 2.0) * f.cell_size, (r + 0.5 - f.rows / 2.0) * f.cell_size};
}

template <typename Fn>
void fill(Footprint& f, Fn&& height_fn) {
  for (int r = 0; r < f.rows; ++r)
    for (int c = 0; c < f.cols; ++c) {
      auto [lx, ly] = local_center(f, c, r);
      f.heights[static_cast<std::size_t>(r) * f.cols + c] = std::max(0.0, height_fn(lx, ly));
    }
}

}  // namespace

double Footprint::max_height() const {
  return heights.empty() ? 0.0 : *std::max_element(heights.begin(), heights.end());
}

std::size_t Footprint::cell_count() const {
  return static_cast<std::size_t>(std::count_if(heights.begin(), heights.end(), [](double h) { return h > 0; }));
}

double Footprint::sample(double lx, double ly) const {
  const int c = static_cast<int>(std::floor(lx / cell_size + cols / 2.0));
  const int r = static_cast<int>(std::floor(ly / cell_size + rows / 2.0));
  if (c < 0 || r < 0 || c >= cols || r >= rows) return 0.0;
  return at(c, r);
}

double Footprint::bounding_radius() const {
  return 0.5 * cell_size * std::hypot(static_cast<double>(cols), static_cast<double>(rows));
}

double Footprint::min_width() const {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 180; ++k) {
    const double a = k * kPi / 180.0;
    const double ca = std::cos(a), sa = std::sin(a);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        if (at(c, r) <= 0) continue;
        auto [lx, ly] = local_center(*this, c, r);
        const double p = lx * ca + ly * sa;
        lo = std::min(lo, p);
        hi = std::max(hi, p);
      }
    if (hi >= lo) best = std::min(best, hi - lo + cell_size);
  }
  return std::isfinite(best) ? best : 0.0;
}

ObjectTemplate::ObjectTemplate(std::string label, Footprint f)
    : class_label(std::move(label)), footprint(std::move(f)), min_width(footprint.min_width()) {}

ObjectTemplate make_box(const std::string& label, double length, double width, double height, double cell) {
  Footprint f = blank(length, width, cell);
  fill(f, [&](double, double) { return height; });
  return {label, std::move(f)};
}

ObjectTemplate make_dome(const std::string& label, double length, double width, double height, double cell) {
  Footprint f = blank(length, width, cell);
  const double a = length / 2, b = width / 2;
  fill(f, [&](double lx, double ly) {
    const double q = (lx * lx) / (a * a) + (ly * ly) / (b * b);
    return q < 1.0 ? height * std::sqrt(1.0 - q) : 0.0;
  });
  return {label, std::move(f)};
}

ObjectTemplate make_hammer(const std::string& label, double cell) {
  Footprint f = blank(0.100, 0.170, cell);
  fill(f, [](double lx, double ly) {
    if (ly >= 0.055) return 0.035;                    // head: 100 x 30 mm
    if (std::abs(lx) <= 0.012) return 0.025;          // handle: 24 mm wide
    return 0.0;
  });
  return {label, std::move(f)};
}

std::vector<ObjectTemplate> default_catalog() {
  std::vector<ObjectTemplate> out;
  out.push_back(make_hammer());
  out.push_back(make_dome("dog", 0.080, 0.050, 0.045));
  out.push_back(make_dome("eggplant", 0.140, 0.055, 0.050));
  out.push_back(make_dome("banana", 0.160, 0.036, 0.032));
  out.push_back(make_dome("duck", 0.070, 0.056, 0.050));
  // Bottle lying on its side: cylindrical cross-section, flat along its axis.
  Footprint bottle = blank(0.170, 0.060, 0.002);
  fill(bottle, [](double, double ly) {
    const double q = (2 * ly / 0.060) * (2 * ly / 0.060);
    return q < 1.0 ? 0.060 * std::sqrt(1.0 - q) : 0.0;
  });
  out.emplace_back("bottle", std::move(bottle));
  return out;
}

std::vector<std::string> catalog_labels(const std::vector<ObjectTemplate>& catalog) {
  std::vector<std::string> labels;
  for (const auto& t : catalog) labels.push_back(t.class_label);
  return labels;
}

const char* to_string(Packing p) { return p == Packing::Light ? "light" : "dense"; }

Packing packing_from_string(const std::string& s) {
  if (s == "light" || s == "Light") return Packing::Light;
  if (s == "dense" || s == "Dense") return Packing::Dense;
  fail(ErrorCode::ValidationError, "unknown packing '" + s + "'");
}

const char* to_string(FailureReason r) {
  switch (r) {
    case FailureReason::WidthExceeded: return "WidthExceeded";
    case FailureReason::PoorAlignment: return "PoorAlignment";
    case FailureReason::CollisionWithNeighbor: return "CollisionWithNeighbor";
    case FailureReason::RandomSlip: return "RandomSlip";
    case FailureReason::EmptyClosure: return "EmptyClosure";
  }
  return "Unknown";
}

SceneObject place_object(int id, const ObjectTemplate& tmpl, Pose2 pose) {
  SceneObject o;
  o.id = id;
  o.class_label = tmpl.class_label;
  o.pose = pose;
  o.footprint = tmpl.footprint;
  o.graspable_width_mm = tmpl.min_width * 1000.0;
  return o;
}

// --- serialization --------------------------------------------------------

Json Scene::to_json() const {
  Json objs = Json::array();
  for (const auto& o : objects) {
    objs.push_back({{"id", o.id},
                    {"class_label", o.class_label},
                    {"pose", {{"x", o.pose.x}, {"y", o.pose.y}, {"yaw", o.pose.yaw}}},
                    {"footprint",
                     {{"cell_size", o.footprint.cell_size},
                      {"cols", o.footprint.cols},
                      {"rows", o.footprint.rows},
                      {"heights", o.footprint.heights}}},
                    {"graspable_width_mm", o.graspable_width_mm}});
  }
  return {{"bin", {{"length", bin.length}, {"width", bin.width}, {"depth", bin.depth}}},
          {"objects", objs},
          {"rng_seed", rng_seed}};
}

Scene Scene::from_json(const Json& j) {
  try {
    Scene s;
    s.bin = {j.at("bin").at("length").get<double>(), j.at("bin").at("width").get<double>(),
             j.at("bin").at("depth").get<double>()};
    s.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    for (const auto& jo : j.at("objects")) {
      SceneObject o;
      o.id = jo.at("id").get<int>();
      o.class_label = jo.at("class_label").get<std::string>();
      o.pose = {jo.at("pose").at("x").get<double>(), jo.at("pose").at("y").get<double>(),
                jo.at("pose").at("yaw").get<double>()};
      const auto& jf = jo.at("footprint");
      o.footprint.cell_size = jf.at("cell_size").get<double>();
      o.footprint.cols = jf.at("cols").get<int>();
      o.footprint.rows = jf.at("rows").get<int>();
      o.footprint.heights = jf.at("heights").get<std::vector<double>>();
      if (o.footprint.heights.size() != static_cast<std::size_t>(o.footprint.cols) * o.footprint.rows)
        fail(ErrorCode::ParseError, "footprint size mismatch");
      o.graspable_width_mm = jo.at("graspable_width_mm").get<double>();
      s.objects.push_back(std::move(o));
    }
    return s;
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, e.what());
  }
}

std::string Scene::serialize() const { return fixed6_dump(to_json()); }

// --- geometry -------------------------------------------------------------

SceneGeometry::SceneGeometry(const Scene& scene) : scene_(&scene) {
  bases_.assign(scene.objects.size(), 0.0);
  for (const SceneObject& o : scene.objects) {
    const double r = o.footprint.bounding_radius();
    frames_.push_back({std::cos(o.pose.yaw), std::sin(o.pose.yaw), r * r});
  }
  for (std::size_t k = 0; k < scene.objects.size(); ++k) {
    const Footprint& f = scene.objects[k].footprint;
    double base = 0.0;
    if (k > 0) {
      for (int r = 0; r < f.rows; ++r)
        for (int c = 0; c < f.cols; ++c) {
          if (f.at(c, r) <= 0) continue;
          auto [x, y] = cell_center(k, c, r);
          if (auto h = height_upto(k, x, y)) base = std::max(base, *h);
        }
    }
    bases_[k] = base;
  }
}

std::pair<double, double> SceneGeometry::cell_center(std::size_t i, int c, int r) const {
  const SceneObject& o = scene_->objects[i];
  auto [lx, ly] = local_center(o.footprint, c, r);
  const double cy = frames_[i].cos_yaw, sy = frames_[i].sin_yaw;
  return {o.pose.x + cy * lx - sy * ly, o.pose.y + sy * lx + cy * ly};
}

std::optional<double> SceneGeometry::object_height(std::size_t i, double x, double y) const {
  const SceneObject& o = scene_->objects[i];
  const Frame& fr = frames_[i];
  const double dx = x - o.pose.x, dy = y - o.pose.y;
  if (dx * dx + dy * dy > fr.radius2) return std::nullopt;
  const double h = o.footprint.sample(fr.cos_yaw * dx + fr.sin_yaw * dy, -fr.sin_yaw * dx + fr.cos_yaw * dy);
  if (h <= 0) return std::nullopt;
  return bases_[i] + h;
}

std::optional<double> SceneGeometry::height_upto(std::size_t count, double x, double y) const {
  std::optional<double> best;
  for (std::size_t j = 0; j < count; ++j)
    if (auto h = object_height(j, x, y)) best = std::max(best.value_or(0.0), *h);
  return best;
}

std::optional<std::pair<std::size_t, double>> SceneGeometry::top_at(double x, double y) const {
  for (std::size_t j = scene_->objects.size(); j-- > 0;)
    if (auto h = object_height(j, x, y)) return std::make_pair(j, *h);
  return std::nullopt;
}

double SceneGeometry::surface_height(double x, double y) const {
  auto t = top_at(x, y);
  return t ? t->second : 0.0;
}

bool SceneGeometry::near(std::size_t i, double x, double y, double pad) const {
  const SceneObject& o = scene_->objects[i];
  return std::hypot(x - o.pose.x, y - o.pose.y) <= o.footprint.bounding_radius() + pad;
}

// --- adjudication ---------------------------------------------------------

GraspOutcome adjudicate(const SceneGeometry& geo, const WorldGrasp& g, const GripperParams& gripper,
                        const AdjudicationParams& params) {
  const Scene& scene = geo.scene();
  if (!(g.x >= 0 && g.x <= scene.bin.length && g.y >= 0 && g.y <= scene.bin.width))
    fail(ErrorCode::OutOfBounds, "grasp center outside the bin");

  GraspOutcome out;
  auto top = geo.top_at(g.x, g.y);
  if (!top) {
    out.failure_reason = FailureReason::EmptyClosure;
    return out;
  }
  const std::size_t target = top->first;
  out.target_object_id = scene.objects[target].id;

  // Jaw tips close at this height; anything of the target above it is squeezed.
  const double close_level = std::max(0.0, g.z - gripper.insertion_depth);
  if (close_level >= top->second) {
    out.failure_reason = FailureReason::PoorAlignment;
    return out;
  }

  const double ux = std::cos(g.yaw), uy = std::sin(g.yaw);
  const double step = params.sample_step;
  const double reach = 2.0 * scene.objects[target].footprint.bounding_radius() + step;
  double e_min = 0, e_max = 0;
  for (double s = -reach; s <= reach; s += step) {
    auto h = geo.object_height(target, g.x + s * ux, g.y + s * uy);
    if (h && *h > close_level) {
      e_min = std::min(e_min, s);
      e_max = std::max(e_max, s);
    }
  }
  const double chord = e_max - e_min + step;
  if (chord > gripper.max_opening - params.width_margin) {
    out.failure_reason = FailureReason::WidthExceeded;
    return out;
  }

  // Neighbors: nothing else between or under the jaws above the closing level.
  const double zone_depth = gripper.jaw_thickness + params.clearance;
  const double half_lateral = gripper.jaw_width / 2 + params.clearance;
  const double pad = zone_depth + half_lateral + chord;
  for (std::size_t j = 0; j < scene.objects.size(); ++j) {
    if (j == target || !geo.near(j, g.x, g.y, pad)) continue;
    auto blocks = [&](double s, double t) {
      const double x = g.x + s * ux - t * uy;
      const double y = g.y + s * uy + t * ux;
      auto h = geo.object_height(j, x, y);
      return h && *h > close_level;
    };
    bool hit = false;
    for (double s = e_min - zone_depth; s <= e_max + zone_depth && !hit; s += step) hit = blocks(s, 0.0);
    for (double s = 0; s <= zone_depth && !hit; s += 2 * step)
      for (double t = -half_lateral; t <= half_lateral && !hit; t += 2 * step)
        hit = blocks(e_max + step + s, t) || blocks(e_min - step - s, t);
    if (hit) {
      out.failure_reason = FailureReason::CollisionWithNeighbor;
      return out;
    }
  }

  out.success = true;
  out.removed_object_id = scene.objects[target].id;
  out.measured_width = chord;
  return out;
}

GraspOutcome apply_grasp(Scene& scene, const WorldGrasp& grasp, const GripperParams& gripper, double slip_rate,
                         Rng& rng, const AdjudicationParams& params) {
  GraspOutcome out;
  {
    SceneGeometry geo(scene);
    out = adjudicate(geo, grasp, gripper, params);
  }
  if (!out.success) return out;
  if (uniform01(rng) < slip_rate) {
    out.success = false;
    out.removed_object_id.reset();
    out.failure_reason = FailureReason::RandomSlip;
    out.measured_width = 0;
    return out;
  }
  const int id = *out.removed_object_id;
  std::erase_if(scene.objects, [id](const SceneObject& o) { return o.id == id; });
  return out;
}

std::optional<WorldGrasp> find_feasible_grasp(const SceneGeometry& geo, std::size_t index,
                                              const GripperParams& gripper, const AdjudicationParams& params) {
  const SceneObject& o = geo.scene().objects[index];
  struct Candidate {
    double d2, x, y, z;
  };
  std::vector<Candidate> cands;
  for (int r = 0; r < o.footprint.rows; r += 2)
    for (int c = 0; c < o.footprint.cols; c += 2) {
      if (o.footprint.at(c, r) <= 0) continue;
      auto [x, y] = geo.cell_center(index, c, r);
      auto top = geo.top_at(x, y);
      if (!top || top->first != index) continue;
      cands.push_back({(x - o.pose.x) * (x - o.pose.x) + (y - o.pose.y) * (y - o.pose.y), x, y, top->second});
    }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.d2 < b.d2; });
  const BinDims& bin = geo.scene().bin;
  for (const auto& cd : cands) {
    if (cd.x < 0 || cd.y < 0 || cd.x > bin.length || cd.y > bin.width) continue;
    for (int k = 0; k < 16; ++k) {
      WorldGrasp g{cd.x, cd.y, cd.z, k * kPi / 16};
      if (adjudicate(geo, g, gripper, params).success) return g;
    }
  }
  return std::nullopt;
}

// --- generation -----------------------------------------------------------

namespace {

class Occupancy {
 public:
  Occupancy(const BinDims& bin, double cell)
      : cell_(cell),
        cols_(static_cast<int>(std::ceil(bin.length / cell))),
        rows_(static_cast<int>(std::ceil(bin.width / cell))),
        blocked_(static_cast<std::size_t>(cols_) * rows_, 0) {}

  bool blocked(double x, double y) const {
    const int c = static_cast<int>(std::floor(x / cell_)), r = static_cast<int>(std::floor(y / cell_));
    if (c < 0 || r < 0 || c >= cols_ || r >= rows_) return true;
    return blocked_[static_cast<std::size_t>(r) * cols_ + c] != 0;
  }

  void stamp(double x, double y, double radius) {
    const int c0 = static_cast<int>(std::floor((x - radius) / cell_));
    const int c1 = static_cast<int>(std::floor((x + radius) / cell_));
    const int r0 = static_cast<int>(std::floor((y - radius) / cell_));
    const int r1 = static_cast<int>(std::floor((y + radius) / cell_));
    for (int r = std::max(0, r0); r <= std::min(rows_ - 1, r1); ++r)
      for (int c = std::max(0, c0); c <= std::min(cols_ - 1, c1); ++c) {
        const double cx = (c + 0.5) * cell_, cy = (r + 0.5) * cell_;
        if (std::hypot(cx - x, cy - y) <= radius) blocked_[static_cast<std::size_t>(r) * cols_ + c] = 1;
      }
  }

 private:
  double cell_;
  int cols_;
  int rows_;
  std::vector<std::uint8_t> blocked_;
};

bool inside_bin(const SceneGeometry& geo, std::size_t i, double margin) {
  const Scene& s = geo.scene();
  const Footprint& f = s.objects[i].footprint;
  for (int r = 0; r < f.rows; ++r)
    for (int c = 0; c < f.cols; ++c) {
      if (f.at(c, r) <= 0) continue;
      auto [x, y] = geo.cell_center(i, c, r);
      if (x < margin || y < margin || x > s.bin.length - margin || y > s.bin.width - margin) return false;
    }
  return true;
}

}  // namespace

namespace {

// One sequential placement pass. Returns false when some object cannot be
// placed within the attempt budget.
bool try_layout(Scene& scene, Rng& rng, const std::vector<ObjectTemplate>& catalog, int count, Packing packing,
                const GripperParams& gripper, const GenerateParams& params) {
  scene.objects.clear();
  Occupancy occ(scene.bin, 0.002);
  for (int id = 0; id < count; ++id) {
    const ObjectTemplate& tmpl = catalog[static_cast<std::size_t>(rng() % catalog.size())];
    bool placed = false;
    for (int attempt = 0; attempt < params.max_attempts_per_object && !placed; ++attempt) {
      Pose2 pose;
      pose.yaw = uniform01(rng) * 2 * kPi;
      pose.x = uniform01(rng) * scene.bin.length;
      pose.y = uniform01(rng) * scene.bin.width;
      scene.objects.push_back(place_object(id, tmpl, pose));
      const std::size_t idx = scene.objects.size() - 1;
      SceneGeometry geo(scene);
      bool ok = inside_bin(geo, idx, params.wall_margin);
      const Footprint& f = scene.objects[idx].footprint;
      if (ok && packing == Packing::Light) {
        for (int r = 0; r < f.rows && ok; ++r)
          for (int c = 0; c < f.cols && ok; ++c)
            if (f.at(c, r) > 0) {
              auto [x, y] = geo.cell_center(idx, c, r);
              ok = !occ.blocked(x, y);
            }
        // Only the newcomer and objects within jaw reach of it can lose grasps.
        const double reach = f.bounding_radius() + gripper.max_opening + gripper.jaw_thickness + 0.01;
        for (std::size_t j = 0; j < scene.objects.size() && ok; ++j) {
          if (j != idx && !geo.near(j, pose.x, pose.y, reach)) continue;
          ok = find_feasible_grasp(geo, j, gripper).has_value();
        }
      }
      if (ok) {
        placed = true;
        if (packing == Packing::Light)
          for (int r = 0; r < f.rows; ++r)
            for (int c = 0; c < f.cols; ++c)
              if (f.at(c, r) > 0) {
                auto [x, y] = geo.cell_center(idx, c, r);
                occ.stamp(x, y, params.min_gap);
              }
      } else {
        scene.objects.pop_back();
      }
    }
    if (!placed) return false;
  }
  return true;
}

}  // namespace

Scene generate_bin(std::uint64_t seed, const std::vector<ObjectTemplate>& catalog, int count, Packing packing,
                   const GripperParams& gripper, const GenerateParams& params) {
  if (count < 0) fail(ErrorCode::InvalidArgument, "count must be non-negative");
  if (catalog.empty()) fail(ErrorCode::InvalidArgument, "catalog is empty");

  Scene scene;
  scene.rng_seed = seed;
  Rng rng = make_rng({seed, 0x5ce4e0ULL});
  for (int layout = 0; layout < params.max_layouts; ++layout)
    if (try_layout(scene, rng, catalog, count, packing, gripper, params)) return scene;
  fail(ErrorCode::PlacementFailure, "could not place " + std::to_string(count) + " objects within " +
                                        std::to_string(params.max_layouts) + " layouts of " +
                                        std::to_string(params.max_attempts_per_object) + " attempts per object");
}

}  // namespace pickcell::sim
