#include "buslane/time_space.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "buslane/microsim.hpp"

namespace buslane {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw ParseError(fmt::format("trajectory line {}: bad number '{}'", line_no, s));
  }
  return v;
}

}  // namespace

std::vector<TrajectoryRow> read_trajectory(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryHeader) {
    throw ParseError("trajectory: missing or unexpected header");
  }
  std::vector<TrajectoryRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 9) {
      throw ParseError(fmt::format("trajectory line {}: expected 9 fields", line_no));
    }
    TrajectoryRow r;
    r.tick = static_cast<long>(to_double(f[0], line_no));
    r.time = to_double(f[1], line_no);
    r.vehicle_id = static_cast<int>(to_double(f[2], line_no));
    const auto cls = parse_vehicle_class(f[3]);
    const auto mv = parse_movement(f[4]);
    if (!cls || !mv) throw ParseError(fmt::format("trajectory line {}: bad class", line_no));
    r.cls = *cls;
    r.movement = *mv;
    r.lane = static_cast<int>(to_double(f[5], line_no));
    r.pos = to_double(f[6], line_no);
    r.speed = to_double(f[7], line_no);
    rows.push_back(r);
  }
  return rows;
}

void render_time_space(std::ostream& out, std::span<const TrajectoryRow> rows,
                       const PlotOptions& opts) {
  auto in_window = [&](double t) {
    return (!opts.t_from || t >= *opts.t_from) && (!opts.t_to || t <= *opts.t_to);
  };

  // Contiguous runs per vehicle; rows arrive tick-major.
  struct Track {
    VehicleClass cls;
    std::vector<std::vector<const TrajectoryRow*>> runs;
    long last_tick = -2;
  };
  std::map<int, Track> tracks;
  double t0 = kPosInf;
  double t1 = kNegInf;
  for (const auto& r : rows) {
    if (r.lane != opts.lane || !in_window(r.time)) continue;
    auto [it, fresh] = tracks.try_emplace(r.vehicle_id, Track{r.cls, {}, -2});
    Track& tr = it->second;
    if (fresh || r.tick != tr.last_tick + 1) tr.runs.emplace_back();
    tr.runs.back().push_back(&r);
    tr.last_tick = r.tick;
    t0 = std::min(t0, r.time);
    t1 = std::max(t1, r.time);
  }
  if (tracks.empty()) {
    throw EmptySelection(fmt::format("no trajectory rows on lane {}", opts.lane));
  }
  if (t1 <= t0) t1 = t0 + 1.0;

  const double margin = 50.0;
  const double pw = opts.width - 2 * margin;
  const double ph = opts.height - 2 * margin;
  const double y_max = opts.stop_bar + 20.0;
  auto sx = [&](double t) { return margin + (t - t0) / (t1 - t0) * pw; };
  auto sy = [&](double p) { return margin + (1.0 - std::clamp(p, 0.0, y_max) / y_max) * ph; };

  out << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\">\n",
      opts.width, opts.height, opts.width, opts.height);
  out << fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
                     opts.width, opts.height);
  out << fmt::format(
      "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"14\">lane {}, "
      "{:.0f}-{:.0f} s</text>\n",
      margin, margin - 20, opts.lane, t0, t1);

  // Signal bands along the stop bar.
  const double bar_y = sy(opts.stop_bar);
  for (double c = opts.signal.cycle_start(t0); c < t1; c += opts.signal.cycle) {
    const double red_end = std::min(c + opts.signal.red, t1);
    const double green_end = std::min(c + opts.signal.cycle, t1);
    const double rs = std::max(c, t0);
    if (red_end > rs) {
      out << fmt::format(
          "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#d62728\" "
          "stroke-width=\"5\"/>\n",
          sx(rs), bar_y, sx(red_end), bar_y);
    }
    const double gs = std::max(c + opts.signal.red, t0);
    if (green_end > gs) {
      out << fmt::format(
          "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#2ca02c\" "
          "stroke-width=\"5\"/>\n",
          sx(gs), bar_y, sx(green_end), bar_y);
    }
  }

  for (const auto& [id, tr] : tracks) {
    const bool bus = tr.cls == VehicleClass::Bus;
    for (const auto& run : tr.runs) {
      out << fmt::format("<polyline data-vehicle=\"{}\" fill=\"none\" stroke=\"{}\" "
                         "stroke-width=\"{}\" points=\"",
                         id, bus ? "#1f3fbf" : "#7f7f7f", bus ? 2.5 : 0.8);
      for (std::size_t i = 0; i < run.size(); ++i) {
        out << fmt::format("{}{:.2f},{:.2f}", i ? " " : "", sx(run[i]->time), sy(run[i]->pos));
      }
      out << "\"/>\n";
    }
  }

  // Axes.
  out << fmt::format(
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n"
      "<line x1=\"{0}\" y1=\"{3}\" x2=\"{0}\" y2=\"{1}\" stroke=\"black\"/>\n",
      margin, margin + ph, margin + pw, margin);
  out << fmt::format(
      "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">time (s)</text>\n"
      "<text x=\"10\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">pos (m)</text>\n",
      margin + pw / 2, opts.height - 15, margin - 5);
  out << "</svg>\n";
}

}  // namespace buslane
