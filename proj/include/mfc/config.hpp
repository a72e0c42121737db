#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mfc/sim.hpp"

namespace mfc {

// Parsed configuration: one SimConfig per requested controller variant.
struct RunPlan {
  std::vector<SimConfig> runs;
};

// JSON config schema (unknown keys rejected at every level):
//   system:     {id: "perturbed_chain", params: {n, alpha, rho,
//                matched: {kind: "sum_squares"|"sine"|"zero", scale},
//                input_channel (1-based, default n)}}
//   controller: {variant: name or [names], k_poles, kt_poles, eta,
//                sign: "pure"|"layer:EPS", deriv: "oracle"|"levant:L"}
//   reference:  {kind: "sin"|"poly", params: {amplitude, frequency, phase,
//                offset} | {coeffs}}
//   init:       {x0, xistar0: [..] | "reference"}
//   sim:        {dt, horizon, decimation}
// Errors raise ErrorKind::config with the offending field path.
RunPlan parse_config(const std::string& text);
RunPlan load_config(const std::filesystem::path& path);

}  // namespace mfc
