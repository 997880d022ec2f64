#include "zap/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace zap {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_number(const std::string& field, std::size_t line_no,
                    const std::string& column) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || begin == end) {
    throw InputError("line " + std::to_string(line_no) +
                     ": cannot parse numeric value '" + field +
                     "' in column '" + column + "'");
  }
  return value;
}

}  // namespace

TestingInput parse_input_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw InputError("line 1: missing header");
  const auto header = split_csv_line(line);

  int z_col = -1, u_col = -1;
  std::vector<int> x_cols;  // x_cols[j] = column index of x{j+1}
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& name = header[c];
    if (name == "z") {
      z_col = static_cast<int>(c);
    } else if (name == "u") {
      u_col = static_cast<int>(c);
    } else if (name.size() > 1 && name[0] == 'x') {
      std::size_t idx = 0;
      const auto [ptr, ec] = std::from_chars(
          name.data() + 1, name.data() + name.size(), idx);
      if (ec != std::errc{} || ptr != name.data() + name.size() || idx == 0) {
        throw InputError("line 1: unknown column '" + name + "'");
      }
      if (x_cols.size() < idx) x_cols.resize(idx, -1);
      x_cols[idx - 1] = static_cast<int>(c);
    } else {
      throw InputError("line 1: unknown column '" + name + "'");
    }
  }
  if (z_col < 0 && u_col < 0) {
    throw InputError("line 1: need a 'z' or 'u' column");
  }
  if (z_col >= 0 && u_col >= 0) {
    throw InputError("line 1: provide exactly one of 'z' or 'u'");
  }
  for (std::size_t j = 0; j < x_cols.size(); ++j) {
    if (x_cols[j] < 0) {
      throw InputError("line 1: covariate columns must be numbered x1..xp; x" +
                       std::to_string(j + 1) + " is missing");
    }
  }
  const std::size_t p = x_cols.size();

  std::vector<double> primary;
  std::vector<double> x;
  std::size_t line_no = 1;
  std::size_t clamp_warnings = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw InputError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    const int col = z_col >= 0 ? z_col : u_col;
    const double v = parse_number(fields[static_cast<std::size_t>(col)],
                                  line_no, z_col >= 0 ? "z" : "u");
    if (u_col >= 0) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw InputError("line " + std::to_string(line_no) +
                         ": u-value outside [0,1]");
      }
      if (v <= kEpsU || v >= 1.0 - kEpsU) ++clamp_warnings;
    }
    primary.push_back(v);
    for (std::size_t j = 0; j < p; ++j) {
      x.push_back(parse_number(fields[static_cast<std::size_t>(x_cols[j])],
                               line_no, "x" + std::to_string(j + 1)));
    }
  }
  if (primary.empty()) throw InputError("no data rows in '" + path + "'");
  if (clamp_warnings > 0) {
    std::cerr << "warning: " << clamp_warnings
              << " u-value(s) on the unit-interval boundary were clamped\n";
  }
  return z_col >= 0 ? TestingInput::from_z(std::move(primary), std::move(x), p)
                    : TestingInput::from_u(std::move(primary), std::move(x), p);
}

std::string params_to_json(const BetaMixtureParams& params) {
  nlohmann::json j;
  j["theta_l"] = params.theta_l;
  j["theta_r"] = params.theta_r;
  j["beta_l"] = params.beta_l;
  j["beta_r"] = params.beta_r;
  j["gamma_l"] = params.gamma_l;
  j["gamma_r"] = params.gamma_r;
  return j.dump(2) + "\n";
}

BetaMixtureParams params_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  BetaMixtureParams params;
  params.theta_l = j.at("theta_l").get<std::vector<double>>();
  params.theta_r = j.at("theta_r").get<std::vector<double>>();
  params.beta_l = j.at("beta_l").get<std::vector<double>>();
  params.beta_r = j.at("beta_r").get<std::vector<double>>();
  params.gamma_l = j.at("gamma_l").get<double>();
  params.gamma_r = j.at("gamma_r").get<double>();
  params.validate();
  return params;
}

void write_params_json(const std::string& path,
                       const BetaMixtureParams& params) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << params_to_json(params);
}

BetaMixtureParams read_params_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open parameter file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return params_from_json(ss.str());
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // Prefer the shortest representation that round-trips.
  for (int prec = 1; prec <= 16; ++prec) {
    char shorter[40];
    std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(shorter, "%lf", &back);
    if (back == v) return shorter;
  }
  return buf;
}

}  // namespace zap
