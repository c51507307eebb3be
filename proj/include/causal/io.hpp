#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "causal/causality.hpp"
#include "causal/desk_net.hpp"
#include "causal/factors.hpp"
#include "causal/image.hpp"

// Text formats shared by the CLI and the tests. Numbers are written with 17
// significant digits so every double survives a round trip.
//
//   stack CSV   "# k=<k> n=<n>" then k*n rows of n values (map 0 rows first)
//   map CSV     "# k=<k> method=<max|lehmer>" then k rows of k values
//   factors CSV "# k=<k> direction=<d> mode=<m>" then one row of k values
//   image CSV   "# h=<h> w=<w> c=<c>" then h rows of w*c values (HWC)
//   config      key=value lines; '#' starts a comment
//
// Lines starting with '#' after the header and blank lines are ignored.

namespace causal::io {

FeatureStack read_stack_csv(std::istream& in);
void write_stack_csv(std::ostream& out, const FeatureStack& stack);

CausalityMap read_map_csv(std::istream& in);
void write_map_csv(std::ostream& out, const CausalityMap& map);

FactorVector read_factors_csv(std::istream& in);
void write_factors_csv(std::ostream& out, const FactorVector& factors);

Image read_image_csv(std::istream& in);
void write_image_csv(std::ostream& out, const Image& img);

/// Binary 8-bit PGM (P5) for one channel, PPM (P6) for three. Values are
/// clamped to [lo, hi] and mapped linearly onto 0..255.
void write_image_pnm(std::ostream& out, const Image& img, double lo = 0.0, double hi = 1.0);
/// Reads a binary P5 graymap into a one-channel image scaled to [0, 1].
Image read_pgm(std::istream& in);

/// Grayscale heatmap of a causality map, scaled by its largest entry.
void write_map_heatmap(std::ostream& out, const CausalityMap& map);

using Config = std::map<std::string, std::string>;
/// Throws InvalidInput on malformed lines or repeated keys.
Config read_config(std::istream& in);

std::string params_to_json(const DeskNetParams& params);
DeskNetParams params_from_json(const std::string& text);

/// Writes `content` to a temporary sibling, then renames it over `path`.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

}  // namespace causal::io
