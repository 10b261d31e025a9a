#include "trajcast/synthetic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace trajcast {
namespace {

using Rng = std::mt19937_64;

double draw(Rng& rng, const Range& r) {
  const double u = std::generate_canonical<double, 53>(rng);
  return r.lo + (r.hi - r.lo) * u;
}

double draw_sign(Rng& rng) { return (rng() & 1u) ? 1.0 : -1.0; }

void check_range(const Range& r, const char* name) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
    throw std::invalid_argument(std::string("synthetic spec: invalid range for ") + name);
  }
}

void check_inside(double lo, double hi, double limit, const char* what) {
  if (lo < 0.0 || hi > limit) {
    throw std::invalid_argument(std::string("synthetic spec: ") + what + " can leave the frame");
  }
}

void check_count(long long count, const char* family) {
  if (count < 0) throw std::invalid_argument(std::string("synthetic spec: negative count for ") + family);
}

void validate(const SyntheticSpec& spec) {
  spec.sequence.validate();
  if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma)) {
    throw std::invalid_argument("synthetic spec: noise_sigma must be a finite value >= 0");
  }
  if (!(spec.frame_width > 0.0) || !(spec.frame_height > 0.0)) {
    throw std::invalid_argument("synthetic spec: frame size must be positive");
  }
  const double span = static_cast<double>(spec.sequence.total_len - 1);
  const double w = spec.frame_width, h = spec.frame_height;

  const auto& cv = spec.constant_velocity;
  check_count(cv.count, "constant_velocity");
  for (auto [r, n] : {std::pair{&cv.x0, "x0"}, {&cv.y0, "y0"}, {&cv.vx, "vx"}, {&cv.vy, "vy"}}) check_range(*r, n);
  if (cv.count > 0) {
    check_inside(std::min(cv.x0.lo, cv.x0.lo + cv.vx.lo * span), std::max(cv.x0.hi, cv.x0.hi + cv.vx.hi * span), w,
                 "constant_velocity x");
    check_inside(std::min(cv.y0.lo, cv.y0.lo + cv.vy.lo * span), std::max(cv.y0.hi, cv.y0.hi + cv.vy.hi * span), h,
                 "constant_velocity y");
  }

  const auto& lc = spec.lane_change;
  check_count(lc.count, "lane_change");
  for (auto [r, n] : {std::pair{&lc.x0, "x0"}, {&lc.y0, "y0"}, {&lc.vx, "vx"}, {&lc.shift, "shift"},
                      {&lc.center, "center"}, {&lc.width, "width"}}) {
    check_range(*r, n);
  }
  if (lc.count > 0) {
    if (lc.width.lo <= 0.0) throw std::invalid_argument("synthetic spec: lane_change width must be positive");
    if (lc.shift.lo < 0.0) throw std::invalid_argument("synthetic spec: lane_change shift is a magnitude");
    check_inside(std::min(lc.x0.lo, lc.x0.lo + lc.vx.lo * span), std::max(lc.x0.hi, lc.x0.hi + lc.vx.hi * span), w,
                 "lane_change x");
    check_inside(lc.y0.lo - lc.shift.hi, lc.y0.hi + lc.shift.hi, h, "lane_change y");
  }

  const auto& arc = spec.circular_arc;
  check_count(arc.count, "circular_arc");
  for (auto [r, n] : {std::pair{&arc.cx, "cx"}, {&arc.cy, "cy"}, {&arc.radius, "radius"},
                      {&arc.angular_speed, "angular_speed"}, {&arc.phase, "phase"}}) {
    check_range(*r, n);
  }
  if (arc.count > 0) {
    if (arc.radius.lo < 0.0) throw std::invalid_argument("synthetic spec: circular_arc radius must be >= 0");
    check_inside(arc.cx.lo - arc.radius.hi, arc.cx.hi + arc.radius.hi, w, "circular_arc x");
    check_inside(arc.cy.lo - arc.radius.hi, arc.cy.hi + arc.radius.hi, h, "circular_arc y");
  }

  const auto& st = spec.stationary;
  check_count(st.count, "stationary");
  check_range(st.x0, "x0");
  check_range(st.y0, "y0");
  if (st.count > 0) {
    check_inside(st.x0.lo, st.x0.hi, w, "stationary x");
    check_inside(st.y0.lo, st.y0.hi, h, "stationary y");
  }
}

}  // namespace

SyntheticSpec SyntheticSpec::standard_suite() {
  SyntheticSpec spec;
  spec.noise_sigma = 2.0;
  spec.constant_velocity.count = 200;
  spec.lane_change.count = 100;
  spec.circular_arc.count = 50;
  spec.stationary.count = 50;
  return spec;
}

TrajectoryDataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  validate(spec);
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const std::size_t len = spec.sequence.total_len;

  std::vector<TrajectorySequence> sequences;
  auto emit = [&](MotionFamily family, auto&& path) {
    TrajectorySequence seq;
    seq.vehicle_id = sequences.size();
    seq.window_index = 0;
    seq.family = family;
    seq.points.reserve(len);
    for (std::size_t t = 0; t < len; ++t) {
      const Point2 p = path(static_cast<double>(t));
      double nx = 0.0, ny = 0.0;
      if (spec.noise_sigma > 0.0) {
        nx = spec.noise_sigma * noise(rng);
        ny = spec.noise_sigma * noise(rng);
      }
      seq.points.push_back({static_cast<std::uint64_t>(t), p.x + nx, p.y + ny});
    }
    sequences.push_back(std::move(seq));
  };

  const auto& cv = spec.constant_velocity;
  for (long long i = 0; i < cv.count; ++i) {
    const double x0 = draw(rng, cv.x0), y0 = draw(rng, cv.y0);
    const double vx = draw(rng, cv.vx), vy = draw(rng, cv.vy);
    emit(MotionFamily::constant_velocity, [=](double t) { return Point2{x0 + vx * t, y0 + vy * t}; });
  }

  const auto& lc = spec.lane_change;
  for (long long i = 0; i < lc.count; ++i) {
    const double x0 = draw(rng, lc.x0), y0 = draw(rng, lc.y0), vx = draw(rng, lc.vx);
    const double shift = draw_sign(rng) * draw(rng, lc.shift);
    const double center = draw(rng, lc.center), width = draw(rng, lc.width);
    emit(MotionFamily::lane_change, [=](double t) {
      return Point2{x0 + vx * t, y0 + shift / (1.0 + std::exp(-(t - center) / width))};
    });
  }

  const auto& arc = spec.circular_arc;
  for (long long i = 0; i < arc.count; ++i) {
    const double cx = draw(rng, arc.cx), cy = draw(rng, arc.cy), r = draw(rng, arc.radius);
    const double omega = draw_sign(rng) * draw(rng, arc.angular_speed);
    const double phase = draw(rng, arc.phase);
    emit(MotionFamily::circular_arc, [=](double t) {
      return Point2{cx + r * std::cos(phase + omega * t), cy + r * std::sin(phase + omega * t)};
    });
  }

  const auto& st = spec.stationary;
  for (long long i = 0; i < st.count; ++i) {
    const double x0 = draw(rng, st.x0), y0 = draw(rng, st.y0);
    emit(MotionFamily::stationary, [=](double) { return Point2{x0, y0}; });
  }

  return TrajectoryDataset(spec.sequence, std::move(sequences));
}

// ---------------------------------------------------------------------------
// JSON

void to_json(nlohmann::json& j, const Range& r) { j = nlohmann::json::array({r.lo, r.hi}); }

void from_json(const nlohmann::json& j, Range& r) {
  if (j.is_number()) {
    r.lo = r.hi = j.get<double>();
  } else if (j.is_array() && j.size() == 2) {
    r.lo = j[0].get<double>();
    r.hi = j[1].get<double>();
  } else {
    throw std::invalid_argument("range must be a number or a [lo, hi] pair");
  }
}

void to_json(nlohmann::json& j, const SequenceConfig& c) {
  j = {{"alpha", c.alpha}, {"total_len", c.total_len}, {"max_vehicles", c.max_vehicles}};
}

void from_json(const nlohmann::json& j, SequenceConfig& c) {
  c.alpha = j.value("alpha", c.alpha);
  c.total_len = j.value("total_len", c.total_len);
  c.max_vehicles = j.value("max_vehicles", c.max_vehicles);
}

namespace {

template <class T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

// A family entry is either a bare count or an object with "count" and ranges.
const nlohmann::json* family_object(const nlohmann::json& j, const char* key, long long& count) {
  if (!j.contains(key)) return nullptr;
  const auto& f = j.at(key);
  if (f.is_number_integer()) {
    count = f.get<long long>();
    return nullptr;
  }
  read_field(f, "count", count);
  return &f;
}

}  // namespace

void to_json(nlohmann::json& j, const SyntheticSpec& s) {
  j = nlohmann::json{
      {"sequence", s.sequence},
      {"noise_sigma", s.noise_sigma},
      {"frame_width", s.frame_width},
      {"frame_height", s.frame_height},
      {"constant_velocity",
       {{"count", s.constant_velocity.count},
        {"x0", s.constant_velocity.x0},
        {"y0", s.constant_velocity.y0},
        {"vx", s.constant_velocity.vx},
        {"vy", s.constant_velocity.vy}}},
      {"lane_change",
       {{"count", s.lane_change.count},
        {"x0", s.lane_change.x0},
        {"y0", s.lane_change.y0},
        {"vx", s.lane_change.vx},
        {"shift", s.lane_change.shift},
        {"center", s.lane_change.center},
        {"width", s.lane_change.width}}},
      {"circular_arc",
       {{"count", s.circular_arc.count},
        {"cx", s.circular_arc.cx},
        {"cy", s.circular_arc.cy},
        {"radius", s.circular_arc.radius},
        {"angular_speed", s.circular_arc.angular_speed},
        {"phase", s.circular_arc.phase}}},
      {"stationary", {{"count", s.stationary.count}, {"x0", s.stationary.x0}, {"y0", s.stationary.y0}}},
  };
}

void from_json(const nlohmann::json& j, SyntheticSpec& s) {
  if (j.contains("sequence")) s.sequence = j.at("sequence").get<SequenceConfig>();
  read_field(j, "noise_sigma", s.noise_sigma);
  read_field(j, "frame_width", s.frame_width);
  read_field(j, "frame_height", s.frame_height);

  if (const auto* f = family_object(j, "constant_velocity", s.constant_velocity.count)) {
    auto& cv = s.constant_velocity;
    read_field(*f, "x0", cv.x0);
    read_field(*f, "y0", cv.y0);
    read_field(*f, "vx", cv.vx);
    read_field(*f, "vy", cv.vy);
  }
  if (const auto* f = family_object(j, "lane_change", s.lane_change.count)) {
    auto& lc = s.lane_change;
    read_field(*f, "x0", lc.x0);
    read_field(*f, "y0", lc.y0);
    read_field(*f, "vx", lc.vx);
    read_field(*f, "shift", lc.shift);
    read_field(*f, "center", lc.center);
    read_field(*f, "width", lc.width);
  }
  if (const auto* f = family_object(j, "circular_arc", s.circular_arc.count)) {
    auto& arc = s.circular_arc;
    read_field(*f, "cx", arc.cx);
    read_field(*f, "cy", arc.cy);
    read_field(*f, "radius", arc.radius);
    read_field(*f, "angular_speed", arc.angular_speed);
    read_field(*f, "phase", arc.phase);
  }
  if (const auto* f = family_object(j, "stationary", s.stationary.count)) {
    read_field(*f, "x0", s.stationary.x0);
    read_field(*f, "y0", s.stationary.y0);
  }
}

}  // namespace trajcast
