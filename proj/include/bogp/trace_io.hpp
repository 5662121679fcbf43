#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bogp/bo_loop.hpp"
#include "bogp/common.hpp"

namespace bogp {

// 17 significant digits: enough for doubles to round-trip exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_point(const Vector& x) {
  std::string s;
  for (Index j = 0; j < x.size(); ++j) {
    if (j) s += ';';
    s += format_double(x[j]);
  }
  return s;
}

inline Vector parse_point(const std::string& s) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ';')) vals.push_back(std::stod(tok));
  Vector x(static_cast<Index>(vals.size()));
  for (Index j = 0; j < x.size(); ++j) x[j] = vals[static_cast<std::size_t>(j)];
  return x;
}

inline const char* kTraceHeader =
    "t,x,y,y_plus,mu_prev,sigma_prev,schedule_sqrt,acq_value,"
    "r_std,r_asymp,r_impr,r_inst,cum_regret,info_gain_cum,grid_size,flags";

inline std::string trace_to_csv(const Trace& trace) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const auto& r : trace.records) {
    out += std::to_string(r.t);
    out += ',';
    out += format_point(r.x);
    for (double v : {r.y, r.y_plus, r.mu_prev, r.sigma_prev, r.schedule_sqrt,
                     r.acq_value, r.r_std, r.r_asymp, r.r_impr, r.r_inst,
                     r.cum_regret, r.info_gain_cum}) {
      out += ',';
      out += format_double(v);
    }
    out += ',';
    out += std::to_string(r.grid_size);
    out += ',';
    out += r.flags;
    out += '\n';
  }
  return out;
}

inline std::vector<TraceRecord> records_from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("trace csv: empty stream");
  if (line != kTraceHeader)
    throw std::invalid_argument("trace csv: unexpected header");
  std::vector<TraceRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<std::string> cells;
    while (std::getline(ss, tok, ',')) cells.push_back(tok);
    if (line.back() == ',') cells.push_back("");  // empty trailing flags
    if (cells.size() != 16)
      throw std::invalid_argument("trace csv: malformed row '" + line + "'");
    TraceRecord r;
    r.t = std::stoi(cells[0]);
    r.x = parse_point(cells[1]);
    r.y = std::stod(cells[2]);
    r.y_plus = std::stod(cells[3]);
    r.mu_prev = std::stod(cells[4]);
    r.sigma_prev = std::stod(cells[5]);
    r.schedule_sqrt = std::stod(cells[6]);
    r.acq_value = std::stod(cells[7]);
    r.r_std = std::stod(cells[8]);
    r.r_asymp = std::stod(cells[9]);
    r.r_impr = std::stod(cells[10]);
    r.r_inst = std::stod(cells[11]);
    r.cum_regret = std::stod(cells[12]);
    r.info_gain_cum = std::stod(cells[13]);
    r.grid_size = std::stol(cells[14]);
    r.flags = cells[15];
    records.push_back(std::move(r));
  }
  return records;
}

inline std::vector<TraceRecord> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open trace file '" + path + "'");
  return records_from_csv(in);
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write file '" + path + "'");
  out << content;
}

}  // namespace bogp
