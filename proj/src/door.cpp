#include "hado/door.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "hado/errors.hpp"
#include "hado/rng.hpp"
#include "kv_text.hpp"

namespace hado {

const char* to_string(HandleType t) {
  switch (t) {
    case HandleType::Lever: return "Lever";
    case HandleType::Knob: return "Knob";
    case HandleType::Crossbar: return "Crossbar";
    case HandleType::CabinetHandle: return "CabinetHandle";
  }
  return "?";
}

const char* to_string(SwingType s) {
  switch (s) {
    case SwingType::Push: return "Push";
    case SwingType::Pull: return "Pull";
    case SwingType::Slide: return "Slide";
  }
  return "?";
}

const char* to_string(HingeSide h) {
  return h == HingeSide::Left ? "Left" : "Right";
}

const char* to_string(UnlockDirection d) {
  switch (d) {
    case UnlockDirection::CW: return "CW";
    case UnlockDirection::CCW: return "CCW";
    case UnlockDirection::Either: return "Either";
    case UnlockDirection::None: return "None";
  }
  return "?";
}

namespace {

template <typename T>
T enum_from(const std::string& v, const std::map<std::string, T>& table,
            const char* what, int line) {
  auto it = table.find(v);
  if (it == table.end())
    throw ParseError(std::string("bad ") + what + " value '" + v + "'", line);
  return it->second;
}

const std::map<std::string, HandleType> kHandleNames = {
    {"Lever", HandleType::Lever},
    {"Knob", HandleType::Knob},
    {"Crossbar", HandleType::Crossbar},
    {"CabinetHandle", HandleType::CabinetHandle}};
const std::map<std::string, SwingType> kSwingNames = {
    {"Push", SwingType::Push}, {"Pull", SwingType::Pull}, {"Slide", SwingType::Slide}};
const std::map<std::string, HingeSide> kHingeNames = {{"Left", HingeSide::Left},
                                                      {"Right", HingeSide::Right}};
const std::map<std::string, UnlockDirection> kDirectionNames = {
    {"CW", UnlockDirection::CW},
    {"CCW", UnlockDirection::CCW},
    {"Either", UnlockDirection::Either},
    {"None", UnlockDirection::None}};

std::vector<PxSegment> parse_segments(const detail::KvLine& kv) {
  std::vector<PxSegment> segs;
  std::stringstream ss(kv.value);
  std::string part;
  while (std::getline(ss, part, ';')) {
    part = detail::trim(part);
    if (part.empty()) continue;
    std::istringstream nums(part);
    double x1, y1, x2, y2;
    if (!(nums >> x1 >> y1 >> x2 >> y2))
      throw ParseError("graspable_region segment needs 4 numbers", kv.line_number);
    double extra;
    if (nums >> extra)
      throw ParseError("graspable_region segment has trailing numbers", kv.line_number);
    segs.push_back({{x1, y1}, {x2, y2}});
  }
  return segs;
}

std::string format_num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

void HandleSpec::validate() const {
  if (unlock_direction != UnlockDirection::None && unlock_angle_rad <= 0.0)
    throw ParseError("unlock_angle_rad must be positive when a direction is set");
  if (hard_stop_slack_rad >= unlock_angle_rad &&
      unlock_direction != UnlockDirection::None)
    throw ParseError("hard_stop_slack_rad must be below unlock_angle_rad");
  if (graspable_region.empty()) throw ParseError("graspable_region must be non-empty");
  if (capture_radius_px <= 0.0) throw ParseError("capture_radius_px must be positive");
}

void DoorSpec::validate() const {
  handle.validate();
  if (std::abs(plane_normal.norm() - 1.0) > 1e-9)
    throw ParseError("plane_normal must have unit norm (door " + id + ")");
  if (swing != SwingType::Slide && max_open_angle_rad < kPi / 2.0 - 1e-12)
    throw ParseError("max_open_angle_rad must be >= pi/2 for doors (door " + id + ")");
  if (swing == SwingType::Slide && max_open_angle_rad <= 0.0)
    throw ParseError("max_extension_m must be positive (door " + id + ")");
  if (outlier_fraction < 0.0 || outlier_fraction >= 0.5)
    throw ParseError("outlier_fraction must lie in [0, 0.5) (door " + id + ")");
  if (door_width_m <= 0.0 || door_height_m <= 0.0)
    throw ParseError("door dimensions must be positive (door " + id + ")");
  if (point_cloud_noise_sigma_m < 0.0)
    throw ParseError("point_cloud_noise_sigma_m must be >= 0 (door " + id + ")");
}

bool DoorSpec::has_latch() const {
  return handle.handle_type == HandleType::Lever ||
         handle.handle_type == HandleType::Knob;
}

bool DoorSpec::solvable() const {
  if (!has_latch()) return !locked;
  return !locked && handle.unlock_direction != UnlockDirection::None;
}

std::vector<DoorSpec> parse_suite(const std::string& text, const std::string& origin) {
  std::vector<DoorSpec> doors;
  std::istringstream in(text);
  std::string raw;
  int line_number = 0;

  DoorSpec cur;
  std::set<std::string> seen;
  bool any_field = false;

  static const std::set<std::string> kRequired = {
      "id",
      "handle_type",
      "anchor_px",
      "extent_px",
      "rotation_axis_px",
      "unlock_direction",
      "rotation_radius_m",
      "unlock_angle_rad",
      "hard_stop_slack_rad",
      "graspable_region",
      "capture_radius_px",
      "swing",
      "hinge_side",
      "open_limit",  // satisfied by either max_open_angle_rad or max_extension_m
      "locked",
      "plane_origin_m",
      "plane_normal",
      "door_width_m",
      "door_height_m",
      "point_cloud_noise_sigma_m",
      "outlier_fraction"};

  auto flush = [&](int at_line) {
    if (!any_field) return;
    for (const auto& req : kRequired)
      if (!seen.count(req))
        throw ParseError("door '" + cur.id + "' missing field '" + req + "'", at_line);
    cur.validate();
    doors.push_back(cur);
    cur = DoorSpec{};
    seen.clear();
    any_field = false;
  };

  while (std::getline(in, raw)) {
    ++line_number;
    if (detail::trim(raw) == "---") {
      flush(line_number);
      continue;
    }
    detail::KvLine kv;
    if (!detail::parse_kv_line(raw, line_number, &kv)) continue;
    any_field = true;
    const std::string& k = kv.key;

    std::string seen_key = k;
    if (k == "max_open_angle_rad" || k == "max_extension_m") seen_key = "open_limit";
    if (!seen.insert(seen_key).second)
      throw ParseError("duplicate field '" + k + "'", line_number);

    if (k == "id") {
      cur.id = kv.value;
    } else if (k == "handle_type") {
      cur.handle.handle_type = enum_from(kv.value, kHandleNames, "handle_type", line_number);
    } else if (k == "anchor_px") {
      auto v = detail::parse_doubles(kv, 2);
      cur.handle.anchor_px = {v[0], v[1]};
    } else if (k == "extent_px") {
      auto v = detail::parse_doubles(kv, 2);
      cur.handle.extent_px = {v[0], v[1]};
    } else if (k == "rotation_axis_px") {
      auto v = detail::parse_doubles(kv, 2);
      cur.handle.rotation_axis_px = {v[0], v[1]};
    } else if (k == "unlock_direction") {
      cur.handle.unlock_direction =
          enum_from(kv.value, kDirectionNames, "unlock_direction", line_number);
    } else if (k == "rotation_radius_m") {
      cur.handle.rotation_radius_m = detail::parse_double(kv);
    } else if (k == "unlock_angle_rad") {
      cur.handle.unlock_angle_rad = detail::parse_double(kv);
    } else if (k == "hard_stop_slack_rad") {
      cur.handle.hard_stop_slack_rad = detail::parse_double(kv);
    } else if (k == "graspable_region") {
      cur.handle.graspable_region = parse_segments(kv);
    } else if (k == "capture_radius_px") {
      cur.handle.capture_radius_px = detail::parse_double(kv);
    } else if (k == "swing") {
      cur.swing = enum_from(kv.value, kSwingNames, "swing", line_number);
    } else if (k == "hinge_side") {
      cur.hinge_side = enum_from(kv.value, kHingeNames, "hinge_side", line_number);
    } else if (k == "max_open_angle_rad" || k == "max_extension_m") {
      cur.max_open_angle_rad = detail::parse_double(kv);
    } else if (k == "locked") {
      cur.locked = detail::parse_bool(kv);
    } else if (k == "plane_origin_m") {
      auto v = detail::parse_doubles(kv, 3);
      cur.plane_origin_m = {v[0], v[1], v[2]};
    } else if (k == "plane_normal") {
      auto v = detail::parse_doubles(kv, 3);
      cur.plane_normal = {v[0], v[1], v[2]};
    } else if (k == "door_width_m") {
      cur.door_width_m = detail::parse_double(kv);
    } else if (k == "door_height_m") {
      cur.door_height_m = detail::parse_double(kv);
    } else if (k == "point_cloud_noise_sigma_m") {
      cur.point_cloud_noise_sigma_m = detail::parse_double(kv);
    } else if (k == "outlier_fraction") {
      cur.outlier_fraction = detail::parse_double(kv);
    } else {
      throw ParseError("unknown field '" + k + "' in " + origin, line_number);
    }
  }
  flush(line_number);
  return doors;
}

std::vector<DoorSpec> load_suite(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open suite file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_suite(buf.str(), path);
}

std::string serialize_suite(const std::vector<DoorSpec>& doors) {
  std::ostringstream os;
  for (const auto& d : doors) {
    os << "id: " << d.id << "\n";
    os << "handle_type: " << to_string(d.handle.handle_type) << "\n";
    os << "anchor_px: " << format_num(d.handle.anchor_px.x) << " "
       << format_num(d.handle.anchor_px.y) << "\n";
    os << "extent_px: " << format_num(d.handle.extent_px.x) << " "
       << format_num(d.handle.extent_px.y) << "\n";
    os << "rotation_axis_px: " << format_num(d.handle.rotation_axis_px.x) << " "
       << format_num(d.handle.rotation_axis_px.y) << "\n";
    os << "unlock_direction: " << to_string(d.handle.unlock_direction) << "\n";
    os << "rotation_radius_m: " << format_num(d.handle.rotation_radius_m) << "\n";
    os << "unlock_angle_rad: " << format_num(d.handle.unlock_angle_rad) << "\n";
    os << "hard_stop_slack_rad: " << format_num(d.handle.hard_stop_slack_rad) << "\n";
    os << "graspable_region: ";
    for (std::size_t i = 0; i < d.handle.graspable_region.size(); ++i) {
      const auto& s = d.handle.graspable_region[i];
      if (i) os << " ; ";
      os << format_num(s.a.x) << " " << format_num(s.a.y) << " " << format_num(s.b.x)
         << " " << format_num(s.b.y);
    }
    os << "\n";
    os << "capture_radius_px: " << format_num(d.handle.capture_radius_px) << "\n";
    os << "swing: " << to_string(d.swing) << "\n";
    os << "hinge_side: " << to_string(d.hinge_side) << "\n";
    os << (d.swing == SwingType::Slide ? "max_extension_m: " : "max_open_angle_rad: ")
       << format_num(d.max_open_angle_rad) << "\n";
    os << "locked: " << (d.locked ? "true" : "false") << "\n";
    os << "plane_origin_m: " << format_num(d.plane_origin_m.x) << " "
       << format_num(d.plane_origin_m.y) << " " << format_num(d.plane_origin_m.z)
       << "\n";
    os << "plane_normal: " << format_num(d.plane_normal.x) << " "
       << format_num(d.plane_normal.y) << " " << format_num(d.plane_normal.z) << "\n";
    os << "door_width_m: " << format_num(d.door_width_m) << "\n";
    os << "door_height_m: " << format_num(d.door_height_m) << "\n";
    os << "point_cloud_noise_sigma_m: " << format_num(d.point_cloud_noise_sigma_m)
       << "\n";
    os << "outlier_fraction: " << format_num(d.outlier_fraction) << "\n";
    os << "---\n";
  }
  return os.str();
}

void save_suite(const std::string& path, const std::vector<DoorSpec>& doors) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write suite file: " + path);
  out << serialize_suite(doors);
}

std::uint64_t spec_hash(const DoorSpec& d) {
  const std::string text = serialize_suite({d});
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

DoorSpec random_door(std::uint64_t seed, const std::string& id) {
  Rng rng(splitmix64(seed));
  DoorSpec d;
  d.id = id;

  const int type_pick = static_cast<int>(rng.uniform_index(4));
  d.handle.handle_type = static_cast<HandleType>(type_pick);

  const double depth = rng.uniform(1.0, 1.6);
  d.plane_origin_m = {rng.uniform(-0.08, 0.08), rng.uniform(-0.08, 0.08), depth};
  d.plane_normal = {0, 0, -1};
  d.door_width_m = rng.uniform(0.75, 1.05);
  d.door_height_m = rng.uniform(1.9, 2.2);
  d.point_cloud_noise_sigma_m = rng.uniform(0.001, 0.003);
  d.outlier_fraction = rng.uniform(0.0, 0.35);
  d.max_open_angle_rad = rng.uniform(kPi / 2.0, kPi * 0.6);
  d.locked = false;

  const Vec2 anchor{rng.uniform(250, 390), rng.uniform(210, 270)};
  d.handle.anchor_px = anchor;
  d.handle.capture_radius_px = rng.uniform(6.0, 10.0);

  switch (d.handle.handle_type) {
    case HandleType::Lever: {
      const double len = rng.uniform(56, 96);
      const double th = rng.uniform(12, 18);
      const double dir = rng.bernoulli(0.5) ? 1.0 : -1.0;
      d.handle.extent_px = {len, th};
      d.handle.rotation_axis_px = anchor - Vec2{dir * len / 2.0, 0.0};
      const Vec2 tip = anchor + Vec2{dir * (len / 2.0 - th / 2.0), 0.0};
      const Vec2 inner = d.handle.rotation_axis_px + Vec2{dir * len * 0.3, 0.0};
      d.handle.graspable_region = {{inner, tip}};
      d.handle.unlock_direction = rng.bernoulli(0.1)
                                      ? UnlockDirection::Either
                                      : (rng.bernoulli(0.5) ? UnlockDirection::CW
                                                            : UnlockDirection::CCW);
      d.handle.unlock_angle_rad = rng.uniform(deg_to_rad(30), deg_to_rad(45));
      d.handle.hard_stop_slack_rad = deg_to_rad(3);
      d.handle.rotation_radius_m = (len - th / 2.0) * depth / 525.0;
      d.swing = rng.bernoulli(0.5) ? SwingType::Push : SwingType::Pull;
      break;
    }
    case HandleType::Knob: {
      const double r = rng.uniform(14, 24);
      d.handle.extent_px = {2 * r, 2 * r};
      d.handle.rotation_axis_px = anchor;
      d.handle.graspable_region = {{anchor - Vec2{r * 0.6, 0}, anchor + Vec2{r * 0.6, 0}}};
      d.handle.unlock_direction =
          rng.bernoulli(0.15) ? UnlockDirection::Either
                              : (rng.bernoulli(0.5) ? UnlockDirection::CW
                                                    : UnlockDirection::CCW);
      d.handle.unlock_angle_rad = rng.uniform(deg_to_rad(55), deg_to_rad(80));
      d.handle.hard_stop_slack_rad = deg_to_rad(3);
      d.handle.rotation_radius_m = r * depth / 525.0;
      d.swing = rng.bernoulli(0.5) ? SwingType::Push : SwingType::Pull;
      break;
    }
    case HandleType::Crossbar: {
      const double len = rng.uniform(160, 260);
      const double th = rng.uniform(14, 20);
      d.handle.extent_px = {len, th};
      const bool c_shaped = rng.bernoulli(0.4);
      const Vec2 a = anchor - Vec2{len / 2.0, 0.0};
      const Vec2 b = anchor + Vec2{len / 2.0, 0.0};
      if (c_shaped) {
        // Grip bar offset from the mounting line; the mask's arm capsules pull
        // the centroid off the bar into the opening of the C.
        const double drop = rng.uniform(34, 56);
        const double inset = len * 0.12;
        d.handle.graspable_region = {
            {{a.x + inset, anchor.y - drop}, {b.x - inset, anchor.y - drop}}};
      } else {
        d.handle.graspable_region = {{a, b}};
      }
      d.handle.rotation_axis_px = a;
      d.handle.unlock_direction = UnlockDirection::None;
      d.handle.unlock_angle_rad = 0.0;
      d.handle.hard_stop_slack_rad = 0.0;
      d.handle.rotation_radius_m = len * depth / 525.0;
      d.swing = SwingType::Push;
      break;
    }
    case HandleType::CabinetHandle: {
      const double len = rng.uniform(40, 80);
      const double th = rng.uniform(10, 14);
      const bool vertical = rng.bernoulli(0.5);
      d.handle.extent_px = vertical ? Vec2{th, len} : Vec2{len, th};
      const Vec2 half = vertical ? Vec2{0, len / 2.0 - th / 2.0}
                                 : Vec2{len / 2.0 - th / 2.0, 0};
      d.handle.graspable_region = {{anchor - half, anchor + half}};
      d.handle.rotation_axis_px = anchor;
      d.handle.unlock_direction = UnlockDirection::None;
      d.handle.unlock_angle_rad = 0.0;
      d.handle.hard_stop_slack_rad = 0.0;
      d.handle.rotation_radius_m = len * depth / 525.0;
      d.swing = rng.bernoulli(0.5) ? SwingType::Slide : SwingType::Pull;
      if (d.swing == SwingType::Slide) d.max_open_angle_rad = rng.uniform(0.25, 0.45);
      break;
    }
  }

  // A small share of hard-locked doors for bounded-termination testing.
  if (d.has_latch() && rng.bernoulli(0.08)) {
    d.locked = true;
    d.handle.unlock_direction = UnlockDirection::None;
    d.handle.unlock_angle_rad = 0.0;
    d.handle.hard_stop_slack_rad = 0.0;
  }

  d.hinge_side = anchor.x < 320 ? HingeSide::Right : HingeSide::Left;
  d.validate();
  return d;
}

}  // namespace hado
