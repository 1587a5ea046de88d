#pragma once

// CSV and text report emission. Numbers in CSV use the shortest
// round-trip representation; report values use 6 significant digits.

#include <iosfwd>
#include <string>

#include "etdelay/ddesim.hpp"
#include "etdelay/pipeline.hpp"

namespace etdelay {

/// Shortest decimal text that parses back to the same double.
std::string format_shortest(double v);

/// Columns t,x1..xn,V,u1..um, one header row.
void write_trajectory_csv(std::ostream& os, const SimResult& sim);

/// Columns k,t_k,gap_from_previous (empty for k = 0).
void write_events_csv(std::ostream& os, const SimResult& sim);

/// Least-squares slope of -ln V(t) over samples with t > 0 and V > 0.
double fit_decay_rate(const SimResult& sim);

/// Stable key: value rendering of a design report. `include_sim_summary`
/// adds event statistics, the decay-rate fit, and the certification verdict.
std::string format_report(const std::string& scenario_name, const DesignReport& report,
                          bool include_sim_summary);

} // namespace etdelay
