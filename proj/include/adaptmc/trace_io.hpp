#pragma once

#include "adaptmc/controller.hpp"

#include <ostream>

namespace adaptmc {

// Trace CSV schema (stable): header row then one record per line,
//   k,x0..x{d-1},accepted,log_accept,kappa,nu,reinit,floors_active
// Records are emitted at the given cadence; reinit and truncation-exit
// records are always included. Doubles printed with %.17g so equal runs give
// byte-identical files.
void write_trace_csv(std::ostream& os, const RunTrace& trace, Eigen::Index dim,
                     long cadence = 1);

// Theta snapshot sidecar: header "k,t0..t{p-1}", one row per snapshot,
// components row-major.
void write_theta_csv(std::ostream& os, const RunTrace& trace);

}  // namespace adaptmc
