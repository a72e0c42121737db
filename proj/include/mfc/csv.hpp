#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "mfc/sim.hpp"

namespace mfc {

// t,e,y,y_d,u,V,w,Gamma,x1..xn,xistar1..xistarn,xin1..xinn
std::string csv_header(std::size_t n);

// Full-precision (17 significant digits) rows, LF line endings.
void write_csv(std::ostream& out, const SimResult& result);
void write_csv(const std::filesystem::path& path, const SimResult& result);

// t,V_alt,w_alt: V and w along tau(x) - xi*.
void write_diagnostics_csv(const std::filesystem::path& path, const SimResult& result);

std::string format_double(double value);

}  // namespace mfc
