#pragma once

#include <iosfwd>
#include <string>

#include "gna/config.hpp"
#include "gna/engine.hpp"

namespace gna {

// Canonical text formats.  Records are emitted in a fixed sorted order
// (ascending node ids, sorted link and bridge lists), so two semantically
// equal values always serialize to identical bytes.
//
// Snapshot ("gna-snapshot v1"):
//   gna-snapshot v1
//   mode directed|undirected
//   time <t>
//   next-id <watermark>
//   nodes <count>
//   node <id> <state>           (one per node)
//   links <count>
//   link <src> <dst> <state>    (one per link)
//   end
//
// Trajectory ("gna-trajectory v1"): header, the initial snapshot between
// begin-initial/end-initial, then one begin-event/end-event block per step
// carrying the old subnetwork, its bridges, the replacement and the node
// correspondence.

std::string serialize_snapshot(const GnaConfig& config);
GnaConfig parse_snapshot(const std::string& text);

std::string serialize_event(const RewriteEvent& event);

std::string serialize_trajectory(const Trajectory& traj);
Trajectory parse_trajectory(const std::string& text);

// Minimal import shim for GraphML-style XML snapshots: reads <node>/<edge>
// elements of the first <graph>, taking node states from <data> children
// whose key attribute equals `state_key` (nodes without one get `fallback`).
// Original string ids are mapped to engine ids in sorted order.
GnaConfig import_graphml(const std::string& xml_text,
                         const std::string& state_key = "state",
                         const std::string& fallback = "0");

// File helpers.  write_file_atomic writes to "<path>.tmp" then renames.
std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace gna
