#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace emstress {

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Point2, Point2) = default;
};

double dot(Point2 a, Point2 b);
double norm(Point2 a);

/// Input record for one wire segment, SI units.
struct SegmentSpec {
    int id = 0;
    double length = 0.0;           ///< m
    double current_density = 0.0;  ///< A/m^2, signed along node_a -> node_b
    int node_a = 0;
    int node_b = 0;
    double width = 0.3e-6;         ///< m
    double spacing = 0.3e-6;       ///< m
    /// Angle of the node_a -> node_b axis in the layout plane. Required for
    /// trees that are not a simple path.
    std::optional<double> direction_deg;
};

using Segment = SegmentSpec;

enum class NodeKind { terminal, junction };

struct Incidence {
    int segment = 0;
    /// +1 if the segment's local +x axis points away from the node (the node
    /// is the segment's node_a), -1 otherwise. This is the inward normal n_j.
    int orientation = 0;
};

struct Node {
    int id = 0;
    NodeKind kind = NodeKind::terminal;
    std::vector<Incidence> incident;
};

class InterconnectTree {
public:
    /// Validates topology and classifies nodes. Throws GeometryError on
    /// cycles, disconnected graphs, dangling or inconsistent node ids.
    static InterconnectTree build(std::vector<SegmentSpec> segments);

    const std::vector<Segment>& segments() const { return segments_; }
    const Segment& segment(int id) const { return segments_.at(static_cast<std::size_t>(id)); }
    const std::vector<Node>& nodes() const { return nodes_; }
    const Node& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }

    std::vector<int> terminals() const;
    std::vector<int> junctions() const;
    double total_length() const;
    /// True when every node has degree <= 2 and no segment carries an
    /// explicit direction; such trees unfold onto a single axis.
    bool is_straight() const;

private:
    std::vector<Segment> segments_;
    std::vector<Node> nodes_;
};

/// Placement of one segment on the unfolded axis (or plane).
struct Interval {
    int segment = 0;
    Point2 start;       ///< coordinate of the node_a end
    Point2 end;         ///< coordinate of the node_b end
    Point2 direction;   ///< unit vector of the local +x axis
    double length = 0.0;
};

struct JunctionMember {
    int segment = 0;
    int orientation = 0;   ///< n_j
    double local = 0.0;    ///< 0 or segment length
    Point2 coord;
};

/// P_m = {c_m, V_m}: one member per incident segment. The center is the end
/// of the segment through which the junction was reached during layout; every
/// neighbor sits exactly one virtual distance away from it.
struct JunctionGroup {
    int node = 0;
    JunctionMember center;
    std::vector<JunctionMember> neighbors;
};

struct TerminalPoint {
    int node = 0;
    JunctionMember point;
};

struct Location {
    int segment = 0;
    double local = 0.0;
};

class UnfoldedDomain {
public:
    UnfoldedDomain(const InterconnectTree& tree, double virtual_distance);

    int dimension() const { return dimension_; }
    double virtual_distance() const { return virtual_distance_; }
    const std::vector<Interval>& intervals() const { return intervals_; }
    const Interval& interval(int segment) const { return intervals_.at(static_cast<std::size_t>(segment)); }
    const std::vector<JunctionGroup>& junction_groups() const { return groups_; }
    const std::vector<TerminalPoint>& terminals() const { return terminals_; }

    /// Unfolded coordinate of a physical point.
    Point2 point(int segment, double local) const;
    /// Inverse of point(). Throws GeometryError for coordinates in a virtual
    /// gap or outside every interval.
    Location locate(Point2 coordinate) const;
    Location locate(double x) const { return locate(Point2{x, 0.0}); }

private:
    int dimension_ = 1;
    double virtual_distance_ = 0.0;
    std::vector<Interval> intervals_;
    std::vector<JunctionGroup> groups_;
    std::vector<TerminalPoint> terminals_;
};

inline UnfoldedDomain unfold(const InterconnectTree& tree, double virtual_distance)
{
    return UnfoldedDomain(tree, virtual_distance);
}

} // namespace emstress
