#include <cerrno>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "buslane/row_opt.hpp"

namespace buslane {

namespace {

std::string anchor_line(std::string_view key, const LaneAnchor& a) {
  return fmt::format("{} {} {} {} {} {} {} {}\n", key, a.present ? 1 : 0, a.spatial ? 1 : 0,
                     a.pos, a.speed, a.length, a.t_depart, to_string(a.cls));
}

std::vector<std::string> split_words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

class Reader {
 public:
  explicit Reader(std::string_view text) : in_(std::string(text)) {}

  std::vector<std::string> next(std::string_view key, std::size_t fields) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      auto words = split_words(line);
      if (words.empty() || words.front().starts_with('#')) continue;
      if (words.front() != key) fail(fmt::format("expected '{}'", key));
      if (fields != kAny && words.size() != fields + 1) {
        fail(fmt::format("'{}' needs {} fields", key, fields));
      }
      words.erase(words.begin());
      return words;
    }
    fail(fmt::format("missing '{}'", key));
  }

  std::vector<std::string> raw(std::size_t fields) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      auto words = split_words(line);
      if (words.empty() || words.front().starts_with('#')) continue;
      if (words.size() != fields) fail(fmt::format("expected {} fields", fields));
      return words;
    }
    fail("unexpected end of input");
  }

  double number(const std::string& s) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE) fail(fmt::format("bad number '{}'", s));
    return v;
  }

  std::size_t count(const std::string& s) {
    const double v = number(s);
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
      fail(fmt::format("bad count '{}'", s));
    }
    return static_cast<std::size_t>(v);
  }

  VehicleClass cls(const std::string& s) {
    const auto c = parse_vehicle_class(s);
    if (!c) fail(fmt::format("bad class '{}'", s));
    return *c;
  }

  LaneAnchor anchor(std::string_view key) {
    const auto w = next(key, 7);
    LaneAnchor a;
    a.present = number(w[0]) != 0.0;
    a.spatial = number(w[1]) != 0.0;
    a.pos = number(w[2]);
    a.speed = number(w[3]);
    a.length = number(w[4]);
    a.t_depart = number(w[5]);
    a.cls = cls(w[6]);
    return a;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(fmt::format("row instance line {}: {}", line_no_, msg));
  }

  static constexpr std::size_t kAny = static_cast<std::size_t>(-1);

 private:
  std::istringstream in_;
  int line_no_ = 0;
};

}  // namespace

std::string dump_instance(const RowInstance& inst) {
  std::string out = "row-instance v1\n";
  out += fmt::format("signal {} {} {}\n", inst.signal.cycle, inst.signal.red, inst.signal.green);
  out += fmt::format("lost_time {}\n", inst.lost_time);
  out += fmt::format("headways {} {} {}\n", inst.headways.automated_pair,
                     inst.headways.automated_behind_human, inst.headways.human);
  out += fmt::format("lateral {} {}\n", inst.lateral_safe_gap, inst.lateral_comfort_decel);
  out += fmt::format("no_change_boundary {}\n", inst.no_change_boundary);
  out += anchor_line("bus_leader", inst.bus_leader);
  out += anchor_line("bus_follower", inst.bus_follower);
  out += anchor_line("general_leader", inst.general_leader);
  out += fmt::format("windows {}", inst.windows.size());
  for (const auto& w : inst.windows) out += fmt::format(" {} {}", w.start, w.end);
  out += '\n';
  out += fmt::format("candidates {}\n", inst.candidates.size());
  out += "# pos speed class t_free_general t_free_bus length id\n";
  for (const auto& c : inst.candidates) {
    out += fmt::format("{} {} {} {} {} {} {}\n", c.pos, c.speed, to_string(c.cls),
                       c.t_free_general, c.t_free_bus, c.length, c.vehicle_id);
  }
  return out;
}

RowInstance parse_instance(std::string_view text) {
  Reader r(text);
  if (r.next("row-instance", 1)[0] != "v1") r.fail("unsupported version");

  RowInstance inst;
  auto w = r.next("signal", 3);
  inst.signal.cycle = r.number(w[0]);
  inst.signal.red = r.number(w[1]);
  inst.signal.green = r.number(w[2]);
  inst.lost_time = r.number(r.next("lost_time", 1)[0]);
  w = r.next("headways", 3);
  inst.headways = {r.number(w[0]), r.number(w[1]), r.number(w[2])};
  w = r.next("lateral", 2);
  inst.lateral_safe_gap = r.number(w[0]);
  inst.lateral_comfort_decel = r.number(w[1]);
  inst.no_change_boundary = r.number(r.next("no_change_boundary", 1)[0]);
  inst.bus_leader = r.anchor("bus_leader");
  inst.bus_follower = r.anchor("bus_follower");
  inst.general_leader = r.anchor("general_leader");

  w = r.next("windows", Reader::kAny);
  if (w.empty()) r.fail("'windows' needs a count");
  const std::size_t nw = r.count(w[0]);
  if (w.size() != 1 + 2 * nw) r.fail("'windows' count does not match its values");
  for (std::size_t i = 0; i < nw; ++i) {
    inst.windows.push_back({r.number(w[1 + 2 * i]), r.number(w[2 + 2 * i])});
  }

  const std::size_t k = r.count(r.next("candidates", 1)[0]);
  for (std::size_t i = 0; i < k; ++i) {
    const auto c = r.raw(7);
    RowCandidate cand;
    cand.pos = r.number(c[0]);
    cand.speed = r.number(c[1]);
    cand.cls = r.cls(c[2]);
    cand.t_free_general = r.number(c[3]);
    cand.t_free_bus = r.number(c[4]);
    cand.length = r.number(c[5]);
    cand.vehicle_id = static_cast<int>(r.number(c[6]));
    inst.candidates.push_back(cand);
  }
  return inst;
}

}  // namespace buslane
