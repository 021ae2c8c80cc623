#pragma once

// Columnar text serialization of click traces and histograms.

#include <charconv>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>

#include "smpd/simulator.hpp"

namespace smpd {

namespace detail {

/// Shortest round-trippable decimal representation; keeps emitted files
/// byte-stable across runs.
[[nodiscard]] inline std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace detail

inline void write_trace(std::ostream& os, const ClickTrace& trace) {
    os << "cycle_index,wall_time_s,cause\n";
    for (const Click& c : trace.clicks)
        os << c.cycle_index << ',' << detail::format_double(c.wall_time) << ',' << to_string(c.cause)
           << '\n';
}

[[nodiscard]] inline std::string trace_to_string(const ClickTrace& trace) {
    std::ostringstream os;
    write_trace(os, trace);
    return os.str();
}

inline void write_histogram(std::ostream& os, const FluorescenceHistogram& hist) {
    os << "t_bin_s,counts\n";
    for (std::size_t i = 0; i < hist.bin_start.size(); ++i)
        os << detail::format_double(hist.bin_start[i]) << ',' << detail::format_double(hist.counts[i])
           << '\n';
}

[[nodiscard]] inline std::string histogram_to_string(const FluorescenceHistogram& hist) {
    std::ostringstream os;
    write_histogram(os, hist);
    return os.str();
}

}  // namespace smpd
