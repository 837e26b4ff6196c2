#include "emstress/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <sstream>

namespace emstress {

double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
double norm(Point2 a) { return std::hypot(a.x, a.y); }

namespace {

[[noreturn]] void fail(const std::string& what) { throw GeometryError(what); }

} // namespace

InterconnectTree InterconnectTree::build(std::vector<SegmentSpec> segments)
{
    if (segments.empty())
        fail("interconnect tree has no segments");

    std::sort(segments.begin(), segments.end(),
              [](const SegmentSpec& a, const SegmentSpec& b) { return a.id < b.id; });
    int max_node = -1;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto& s = segments[i];
        if (s.id != static_cast<int>(i)) {
            std::ostringstream msg;
            msg << "segment ids must be dense integers starting at 0; expected " << i << ", got " << s.id;
            fail(msg.str());
        }
        if (!(s.length > 0.0) || !(s.width > 0.0) || !(s.spacing > 0.0))
            fail("segment " + std::to_string(s.id) + ": length, width and spacing must be positive");
        if (!std::isfinite(s.current_density))
            fail("segment " + std::to_string(s.id) + ": current density is not finite");
        if (s.node_a < 0 || s.node_b < 0)
            fail("segment " + std::to_string(s.id) + ": negative node id");
        if (s.node_a == s.node_b)
            fail("segment " + std::to_string(s.id) + ": node_a equals node_b");
        max_node = std::max({max_node, s.node_a, s.node_b});
    }

    InterconnectTree tree;
    tree.segments_ = std::move(segments);
    tree.nodes_.resize(static_cast<std::size_t>(max_node + 1));
    for (int n = 0; n <= max_node; ++n)
        tree.nodes_[static_cast<std::size_t>(n)].id = n;
    for (const auto& s : tree.segments_) {
        tree.nodes_[static_cast<std::size_t>(s.node_a)].incident.push_back({s.id, +1});
        tree.nodes_[static_cast<std::size_t>(s.node_b)].incident.push_back({s.id, -1});
    }
    for (auto& n : tree.nodes_) {
        if (n.incident.empty())
            fail("dangling node reference: node " + std::to_string(n.id) + " is not used by any segment");
        n.kind = n.incident.size() == 1 ? NodeKind::terminal : NodeKind::junction;
    }

    // A connected graph with V nodes is a tree iff it has V - 1 edges.
    std::vector<bool> seen(tree.nodes_.size(), false);
    std::deque<int> queue{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (const auto& inc : tree.nodes_[static_cast<std::size_t>(u)].incident) {
            const auto& s = tree.segments_[static_cast<std::size_t>(inc.segment)];
            const int v = s.node_a == u ? s.node_b : s.node_a;
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = true;
                ++reached;
                queue.push_back(v);
            }
        }
    }
    if (reached != tree.nodes_.size())
        fail("interconnect graph is disconnected");
    if (tree.segments_.size() != tree.nodes_.size() - 1)
        fail("cycle detected: interconnect graph is not a tree");
    return tree;
}

std::vector<int> InterconnectTree::terminals() const
{
    std::vector<int> out;
    for (const auto& n : nodes_)
        if (n.kind == NodeKind::terminal)
            out.push_back(n.id);
    return out;
}

std::vector<int> InterconnectTree::junctions() const
{
    std::vector<int> out;
    for (const auto& n : nodes_)
        if (n.kind == NodeKind::junction)
            out.push_back(n.id);
    return out;
}

double InterconnectTree::total_length() const
{
    double sum = 0.0;
    for (const auto& s : segments_)
        sum += s.length;
    return sum;
}

bool InterconnectTree::is_straight() const
{
    for (const auto& s : segments_)
        if (s.direction_deg)
            return false;
    for (const auto& n : nodes_)
        if (n.incident.size() > 2)
            return false;
    return true;
}

UnfoldedDomain::UnfoldedDomain(const InterconnectTree& tree, double virtual_distance)
    : virtual_distance_(virtual_distance)
{
    if (!(virtual_distance > 0.0))
        throw GeometryError("virtual distance must be positive");

    const bool straight = tree.is_straight();
    if (!straight) {
        for (const auto& s : tree.segments())
            if (!s.direction_deg)
                throw GeometryError("segment " + std::to_string(s.id) +
                                    ": direction_deg is required for trees that are not a straight path");
    }

    const auto& segments = tree.segments();
    intervals_.resize(segments.size());
    std::vector<Point2> local_axis(segments.size());
    std::vector<bool> axis_known(segments.size(), false);
    if (!straight) {
        for (const auto& s : segments) {
            const double a = *s.direction_deg * std::numbers::pi / 180.0;
            local_axis[static_cast<std::size_t>(s.id)] = {std::cos(a), std::sin(a)};
            axis_known[static_cast<std::size_t>(s.id)] = true;
        }
    }

    const int root = tree.terminals().front();
    std::vector<Point2> node_coord(tree.nodes().size());
    std::vector<int> parent_segment(tree.nodes().size(), -1);
    std::vector<bool> placed(tree.nodes().size(), false);
    placed[static_cast<std::size_t>(root)] = true;
    std::deque<int> queue{root};

    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        const auto& node = tree.node(u);
        std::vector<Incidence> order = node.incident;
        std::sort(order.begin(), order.end(),
                  [](const Incidence& a, const Incidence& b) { return a.segment < b.segment; });
        for (const auto& inc : order) {
            if (inc.segment == parent_segment[static_cast<std::size_t>(u)])
                continue;
            const auto& s = tree.segment(inc.segment);
            const auto sid = static_cast<std::size_t>(s.id);
            if (!axis_known[sid]) {
                // Straight path: walking away from the root is always +X.
                local_axis[sid] = {inc.orientation > 0 ? 1.0 : -1.0, 0.0};
                axis_known[sid] = true;
            }
            const Point2 away = static_cast<double>(inc.orientation) * local_axis[sid];
            const bool shifted = node.kind == NodeKind::junction;
            const Point2 near_end = shifted ? node_coord[static_cast<std::size_t>(u)] + virtual_distance * away
                                            : node_coord[static_cast<std::size_t>(u)];
            const Point2 far_end = near_end + s.length * away;
            const int v = s.node_a == u ? s.node_b : s.node_a;

            Interval iv;
            iv.segment = s.id;
            iv.direction = local_axis[sid];
            iv.length = s.length;
            iv.start = inc.orientation > 0 ? near_end : far_end;
            iv.end = inc.orientation > 0 ? far_end : near_end;
            intervals_[sid] = iv;

            node_coord[static_cast<std::size_t>(v)] = far_end;
            parent_segment[static_cast<std::size_t>(v)] = s.id;
            placed[static_cast<std::size_t>(v)] = true;
            queue.push_back(v);
        }
    }

    dimension_ = 1;
    for (const auto& iv : intervals_)
        if (iv.start.y != 0.0 || iv.end.y != 0.0 || iv.direction.y != 0.0)
            dimension_ = 2;

    auto member = [&](int node_id, const Incidence& inc) {
        const auto& s = tree.segment(inc.segment);
        JunctionMember m;
        m.segment = s.id;
        m.orientation = inc.orientation;
        m.local = inc.orientation > 0 ? 0.0 : s.length;
        m.coord = point(s.id, m.local);
        (void)node_id;
        return m;
    };

    for (const auto& node : tree.nodes()) {
        if (node.kind == NodeKind::terminal) {
            terminals_.push_back({node.id, member(node.id, node.incident.front())});
            continue;
        }
        JunctionGroup g;
        g.node = node.id;
        const int anchor = parent_segment[static_cast<std::size_t>(node.id)];
        std::vector<Incidence> order = node.incident;
        std::sort(order.begin(), order.end(),
                  [](const Incidence& a, const Incidence& b) { return a.segment < b.segment; });
        for (const auto& inc : order) {
            if (inc.segment == anchor)
                g.center = member(node.id, inc);
            else
                g.neighbors.push_back(member(node.id, inc));
        }
        groups_.push_back(std::move(g));
    }
}

Point2 UnfoldedDomain::point(int segment, double local) const
{
    const auto& iv = interval(segment);
    return iv.start + local * iv.direction;
}

Location UnfoldedDomain::locate(Point2 c) const
{
    double scale = 0.0;
    for (const auto& iv : intervals_)
        scale = std::max({scale, std::abs(iv.start.x), std::abs(iv.start.y), std::abs(iv.end.x),
                          std::abs(iv.end.y), iv.length});
    const double tol = 64.0 * std::numeric_limits<double>::epsilon() * scale;

    for (const auto& iv : intervals_) {
        const Point2 rel = c - iv.start;
        const double along = dot(rel, iv.direction);
        const double across = std::abs(rel.x * iv.direction.y - rel.y * iv.direction.x);
        if (across <= tol && along >= -tol && along <= iv.length + tol)
            return {iv.segment, std::clamp(along, 0.0, iv.length)};
    }
    for (const auto& g : groups_)
        if (norm(c - g.center.coord) <= virtual_distance_ + tol)
            throw GeometryError("coordinate falls in a virtual gap at junction node " + std::to_string(g.node));
    throw GeometryError("coordinate lies outside the unfolded domain");
}

} // namespace emstress
