#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"
#include "sausage/report.hpp"
#include "sausage/space.hpp"

namespace sausagelab {

/// State shared by a subcommand run: resolved inputs, output sink and the
/// list of failed assertions.
struct RunContext {
  json config;
  std::string command;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::filesystem::path out;
  json summary = json::object();
  std::vector<std::string> failures;

  void check(bool ok, const std::string& invariant);
  void write_results(const sausage::CsvTable& table) const;
  void write_series(const std::string& name, const sausage::CsvTable& table) const;
};

void space_audit(RunContext& ctx, const sausage::MetricMeasureGraph& space);
void spectral_audit(RunContext& ctx, const sausage::MetricMeasureGraph& space);
void sausage_scaling(RunContext& ctx, const sausage::MetricMeasureGraph& space);
void survival(RunContext& ctx, const sausage::MetricMeasureGraph& space);
void certify(RunContext& ctx, const sausage::MetricMeasureGraph& space);

}  // namespace sausagelab
