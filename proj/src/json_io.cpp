#include "chainrec/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace chainrec {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_point(const Point& p) {
  std::string s = "[";
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) s += ',';
    s += fmt_double(p[i]);
  }
  s += ']';
  return s;
}

std::string curve_to_json(const Curve& c) {
  std::string s = "{\"samples\":[";
  for (size_t i = 0; i < c.size(); ++i) {
    if (i) s += ',';
    s += '[';
    s += fmt_double(c.times()[i]);
    s += ',';
    s += fmt_point(c.points()[i]);
    s += ']';
  }
  s += "],\"jumps\":[";
  for (size_t i = 0; i < c.jump_marks().size(); ++i) {
    if (i) s += ',';
    s += std::to_string(c.jump_marks()[i]);
  }
  s += "]}";
  return s;
}

Curve curve_from_json(const nlohmann::json& j, const Metric& metric, double h_max,
                      double continuity_budget) {
  expect_keys(j, {"samples", "jumps"}, "curve");
  if (!j.contains("samples")) throw std::invalid_argument("curve: missing samples");
  std::vector<double> times;
  std::vector<Point> points;
  for (const auto& s : j.at("samples")) {
    if (!s.is_array() || s.size() != 2)
      throw std::invalid_argument("curve: each sample must be [t,[coords]]");
    times.push_back(s.at(0).get<double>());
    points.push_back(s.at(1).get<Point>());
  }
  std::vector<std::size_t> jumps;
  if (j.contains("jumps"))
    for (const auto& v : j.at("jumps")) jumps.push_back(v.get<std::size_t>());
  return Curve(std::move(times), std::move(points), std::move(jumps), metric,
               h_max, continuity_budget);
}

std::string chain_to_json(const ConleyChain& c) {
  std::string s = "{\"points\":[";
  for (size_t i = 0; i < c.points.size(); ++i) {
    if (i) s += ',';
    s += fmt_point(c.points[i]);
  }
  s += "],\"times\":[";
  for (size_t i = 0; i < c.times.size(); ++i) {
    if (i) s += ',';
    s += fmt_double(c.times[i]);
  }
  s += "]}";
  return s;
}

ConleyChain chain_from_json(const nlohmann::json& j) {
  expect_keys(j, {"points", "times"}, "chain");
  std::vector<Point> points;
  std::vector<double> times;
  for (const auto& p : j.at("points")) points.push_back(p.get<Point>());
  for (const auto& t : j.at("times")) times.push_back(t.get<double>());
  return ConleyChain(std::move(points), std::move(times));
}

void expect_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                 const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw std::invalid_argument(where + ": unknown key \"" + it.key() + "\"");
  }
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace chainrec
