#include "mfc/csv.hpp"

#include <cstdio>
#include <fstream>

#include "mfc/error.hpp"

namespace mfc {

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string csv_header(std::size_t n) {
  std::string header = "t,e,y,y_d,u,V,w,Gamma";
  for (const char* prefix : {"x", "xistar", "xin"}) {
    for (std::size_t i = 1; i <= n; ++i) header += "," + std::string(prefix) + std::to_string(i);
  }
  return header;
}

void write_csv(std::ostream& out, const SimResult& result) {
  const SimSeries& s = result.series;
  const std::size_t n = s.x.empty() ? 0 : s.x.front().size();
  out << csv_header(n) << '\n';
  std::string line;
  for (std::size_t i = 0; i < s.size(); ++i) {
    line.clear();
    for (double v : {s.t[i], s.e[i], s.y[i], s.y_d[i], s.u[i], s.V[i], s.w[i], s.gamma[i]}) {
      if (!line.empty()) line += ',';
      line += format_double(v);
    }
    for (const auto* block : {&s.x[i], &s.xi_star[i], &s.xi_n[i]}) {
      for (double v : *block) {
        line += ',';
        line += format_double(v);
      }
    }
    out << line << '\n';
  }
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::config, "cannot write " + path.string());
  return out;
}

}  // namespace

void write_csv(const std::filesystem::path& path, const SimResult& result) {
  std::ofstream out = open_for_write(path);
  write_csv(out, result);
}

void write_diagnostics_csv(const std::filesystem::path& path, const SimResult& result) {
  std::ofstream out = open_for_write(path);
  const SimSeries& s = result.series;
  out << "t,V_alt,w_alt\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << format_double(s.t[i]) << ',' << format_double(s.V_alt[i]) << ','
        << format_double(s.w_alt[i]) << '\n';
  }
}

}  // namespace mfc
