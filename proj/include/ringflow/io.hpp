#pragma once

#include <string>
#include <vector>

#include "ringflow/checks.hpp"
#include "ringflow/flow.hpp"

namespace ringflow {

inline constexpr int kFormatVersion = 1;

// Domain spec: {"format_version": 1, "outer": {...}, "inner": {...}} with
// shapes keyed by "type" (disk, ellipse, polygon, point, segment, capsule).
// Throws ParseError naming the offending key, VersionMismatch, ValidationError.
ConvexRing parse_domain(const std::string& text);
std::string domain_to_json(const ConvexRing& ring);
ConvexRing load_domain(const std::string& path);
void save_domain(const std::string& path, const ConvexRing& ring);

// Field snapshot: text header (lattice, capture radius, class legend, domain
// spec), one row of node classes and one row of values per lattice row.
// Values carry 17 significant digits so the round trip is bit-exact.
std::string field_to_text(const ScalarField& field);
ScalarField parse_field(const std::string& text);
void save_field(const std::string& path, const ScalarField& field);
ScalarField load_field(const std::string& path);

// CSV with header id,s,x1,x2,V,speed,termination; the termination flag is set
// on the last row of each streamline only. Loaded seeds are first vertices.
std::string streamlines_to_csv(const std::vector<Streamline>& lines);
std::vector<Streamline> parse_streamlines(const std::string& text);
void save_streamlines(const std::string& path, const std::vector<Streamline>& lines);
std::vector<Streamline> load_streamlines(const std::string& path);

std::string merge_tree_to_json(const MergeTree& tree);
MergeTree parse_merge_tree(const std::string& text);
void save_merge_tree(const std::string& path, const MergeTree& tree);

std::string report_to_json(const std::vector<Verdict>& verdicts);
std::vector<Verdict> parse_report(const std::string& text);
void save_report(const std::string& path, const std::vector<Verdict>& verdicts);

// "name  status  key=value ... | key=value ... (note)" on one line.
std::string verdict_line(const Verdict& v);

struct StrokeStyle {
    std::string color = "#000000";
    double width = 1.0;  // pixels
};

struct RenderSpec {
    int canvas = 800;  // pixels along the longer side of the domain
    std::vector<double> levels{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    StrokeStyle level_curve{"#7f7f7f", 0.75};
    StrokeStyle streamline{"#1f4e9c", 1.0};
    StrokeStyle cl_point{"#c0392b", 1.0};
    StrokeStyle gamma{"#000000", 2.0};
    StrokeStyle boundary{"#000000", 1.5};
    double cl_radius = 3.0;  // marker radius, pixels
};

// Throws ValidationError unless levels are strictly increasing inside (0, 1).
void validate(const RenderSpec& spec);

// SVG 1.1 with the outer boundary, Gamma, level curves, streamlines and the
// merge tree's ClPoints, in that order. Coordinates use four decimals.
std::string render_svg(const ScalarField& field, const std::vector<Streamline>& lines,
                       const MergeTree& tree, const RenderSpec& spec = {});
void save_svg(const std::string& path, const ScalarField& field,
              const std::vector<Streamline>& lines, const MergeTree& tree,
              const RenderSpec& spec = {});

std::string read_text(const std::string& path);
// Throws IoError.
void write_text(const std::string& path, const std::string& text);

}  // namespace ringflow
