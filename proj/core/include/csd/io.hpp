#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "csd/empirical.hpp"
#include "csd/fields.hpp"
#include "csd/theory.hpp"

namespace csd {

using MetaMap = std::map<std::string, std::string>;

/// CSV with columns k,w,mass,stderr; metadata rides along as leading
/// '# key=value' comment lines.
void write_csv(const DistributionTable& table, std::ostream& os, const MetaMap& meta = {});

/// CSV with columns k,count,estimate,stderr.
void write_csv(const CountingResult& result, std::ostream& os, const MetaMap& meta = {});

/// Histogram-ready (k, mass) pairs.
void write_histogram_csv(const DistributionTable& table, std::ostream& os);

std::string to_json_string(const DistributionTable& table, const MetaMap& meta = {});
std::string to_json_string(const CountingResult& result, const MetaMap& meta = {});

/// Debug export: {window, connectivity, clusters: [[site, ...], ...]}.
std::string labeling_to_json(const Labeling& labeling);

/// Flat little-endian float64 values in lex (row-major) order plus a JSON
/// sidecar header at <path>.json describing the layout.
void write_realization(const Realization& realization, const std::string& path);

}  // namespace csd
