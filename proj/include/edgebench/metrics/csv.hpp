#pragma once

#include <edgebench/dynamics/dynamics.hpp>
#include <edgebench/metrics/compare.hpp>
#include <edgebench/metrics/summary.hpp>

#include <span>
#include <string>
#include <string_view>

namespace edgebench::metrics {

/// Column order of the run summary CSV. Changing it breaks downstream
/// tooling; tests pin it against a golden header.
std::span<const std::string_view> summary_columns();

std::string summary_header();
std::string summary_row(const RunSummary& s);

std::string comparison_header();
std::string comparison_row(const ComparisonRow& row);

/// Per-slot trace: one row per (slot, MD, ES). MD-level fields (Q, power,
/// arrivals, uplink, local queue, drops, energy) repeat on every ES row of
/// that MD; link-level fields (K, channel, assoc, cores, rates, completions)
/// are specific to the row.
std::string trace_header();
void append_trace_rows(std::string& out, const dynamics::SlotRecord& rec, int num_mds,
                       int num_ess);

/// Quotes a text field when it contains a comma, quote or newline.
std::string csv_field(const std::string& s);

/// Formats a double with the shortest round-trip representation; NaN and
/// infinities print as nan / inf.
std::string format_number(double v);

} // namespace edgebench::metrics
