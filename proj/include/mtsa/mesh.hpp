#ifndef MTSA_MESH_HPP
#define MTSA_MESH_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mtsa/core.hpp"

namespace mtsa {

struct Node {
    int id = -1;
    double x = 0.0;
    double y = 0.0;
};

struct Triangle {
    std::array<int, 3> n{-1, -1, -1};
    int region_tag = 0;
};

struct BoundaryEdge {
    std::array<int, 2> n{-1, -1};
    int curve_tag = 0;
};

enum class TraceSide { external_1, external_2, virtual_interface };

/// Ordered 1D chain of nodes on an interface or boundary curve,
/// parametrized by arc length. Virtual traces (collapsed-layer carriers)
/// own their coordinates and have node_ids == -1.
struct TraceMesh {
    std::vector<int> node_ids;
    std::vector<double> s;
    std::vector<Vec2> xy;
    TraceSide side = TraceSide::external_1;
    int curve_tag = -1;

    std::size_t size() const { return s.size(); }
    std::size_t segments() const { return s.empty() ? 0 : s.size() - 1; }
    double length() const { return s.empty() ? 0.0 : s.back() - s.front(); }
};

/// One collapsed insulation layer: the trace pair bounding it plus the
/// virtual carrier trace and the physical thickness it stands for.
struct CollapsedInterface {
    std::string name;
    int gamma1_trace = -1;   // coarse/external side 1
    int gamma2_trace = -1;   // external side 2
    int gammahat_trace = -1; // virtual carrier (copy of the finer side)
    double thickness = 0.0;
};

struct Mesh {
    std::vector<Node> nodes;
    std::vector<Triangle> triangles;
    std::vector<BoundaryEdge> boundary_edges;
    std::vector<TraceMesh> traces;
    std::map<std::string, int> tags;
    std::vector<CollapsedInterface> interfaces;
    std::map<std::string, double> interface_thickness;

    int tag(const std::string& name) const {
        auto it = tags.find(name);
        if (it == tags.end()) throw Error("unknown tag name: " + name);
        return it->second;
    }
    bool has_tag(const std::string& name) const { return tags.count(name) != 0; }
    std::string name_of(int tag_value) const {
        for (const auto& [k, v] : tags)
            if (v == tag_value) return k;
        return "tag_" + std::to_string(tag_value);
    }

    double signed_area(const Triangle& t) const {
        const Node& a = nodes[t.n[0]];
        const Node& b = nodes[t.n[1]];
        const Node& c = nodes[t.n[2]];
        return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
    }

    double total_area() const {
        double a = 0.0;
        for (const auto& t : triangles) a += signed_area(t);
        return a;
    }
};

struct ValidationReport {
    std::vector<std::string> entries;
    int reoriented = 0;
    bool ok() const { return entries.empty(); }
};

/// Flips triangles with negative signed area in place; returns the flip count.
inline int canonicalize_orientation(Mesh& mesh) {
    int flipped = 0;
    for (auto& t : mesh.triangles) {
        if (mesh.signed_area(t) < 0.0) {
            std::swap(t.n[1], t.n[2]);
            ++flipped;
        }
    }
    return flipped;
}

inline ValidationReport validate(const Mesh& mesh) {
    ValidationReport rep;
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        const Node& n = mesh.nodes[i];
        if (n.id != static_cast<int>(i))
            rep.entries.push_back("node id not contiguous at index " + std::to_string(i));
        if (!std::isfinite(n.x) || !std::isfinite(n.y))
            rep.entries.push_back("non-finite coordinates at node " + std::to_string(i));
    }
    const int nn = static_cast<int>(mesh.nodes.size());

    std::map<std::pair<int, int>, int> edge_use;
    auto edge_key = [](int a, int b) {
        return std::make_pair(std::min(a, b), std::max(a, b));
    };
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
        const Triangle& t = mesh.triangles[i];
        bool in_range = true;
        for (int k = 0; k < 3; ++k)
            if (t.n[k] < 0 || t.n[k] >= nn) {
                rep.entries.push_back("node index out of range in element " + std::to_string(i));
                in_range = false;
            }
        if (!in_range) continue;
        if (t.n[0] == t.n[1] || t.n[1] == t.n[2] || t.n[0] == t.n[2]) {
            rep.entries.push_back("degenerate element " + std::to_string(i));
            continue;
        }
        if (mesh.signed_area(t) <= 0.0)
            rep.entries.push_back("non-positive orientation in element " + std::to_string(i));
        for (int k = 0; k < 3; ++k)
            edge_use[edge_key(t.n[k], t.n[(k + 1) % 3])]++;
    }
    for (const auto& [e, cnt] : edge_use)
        if (cnt > 2)
            rep.entries.push_back("edge shared by more than two elements (" +
                                  std::to_string(e.first) + "," + std::to_string(e.second) + ")");

    std::set<int> region_tags, curve_tags;
    for (const auto& [name, v] : mesh.tags) (void)name, curve_tags.insert(v), region_tags.insert(v);
    for (const auto& t : mesh.triangles)
        if (!region_tags.count(t.region_tag))
            rep.entries.push_back("undeclared region tag " + std::to_string(t.region_tag));
    for (const auto& e : mesh.boundary_edges) {
        if (e.n[0] < 0 || e.n[0] >= nn || e.n[1] < 0 || e.n[1] >= nn) {
            rep.entries.push_back("boundary edge node out of range");
            continue;
        }
        if (!curve_tags.count(e.curve_tag))
            rep.entries.push_back("undeclared curve tag " + std::to_string(e.curve_tag));
        auto it = edge_use.find(edge_key(e.n[0], e.n[1]));
        if (it == edge_use.end() || it->second != 1)
            rep.entries.push_back("boundary edge (" + std::to_string(e.n[0]) + "," +
                                  std::to_string(e.n[1]) + ") not owned by exactly one element");
    }

    // Hanging nodes: a node strictly inside a once-used (boundary) edge.
    for (const auto& [e, cnt] : edge_use) {
        if (cnt != 1) continue;
        const Node& a = mesh.nodes[e.first];
        const Node& b = mesh.nodes[e.second];
        const Vec2 d{b.x - a.x, b.y - a.y};
        const double len2 = d.dot(d);
        if (len2 <= 0.0) continue;
        for (const auto& n : mesh.nodes) {
            if (n.id == e.first || n.id == e.second) continue;
            const Vec2 r{n.x - a.x, n.y - a.y};
            const double t = r.dot(d) / len2;
            if (t <= 0.0 || t >= 1.0) continue;
            const Vec2 p{a.x + t * d.x - n.x, a.y + t * d.y - n.y};
            if (p.norm() < kGeomTol)
                rep.entries.push_back("hanging node " + std::to_string(n.id) + " on edge (" +
                                      std::to_string(e.first) + "," + std::to_string(e.second) + ")");
        }
    }
    return rep;
}

/// validate() after fixing inverted elements; the report notes the flip count.
inline ValidationReport validate_canonicalized(Mesh& mesh) {
    int flipped = canonicalize_orientation(mesh);
    ValidationReport rep = validate(mesh);
    rep.reoriented = flipped;
    return rep;
}

/// Chains the boundary edges carrying `curve_tag` into an open, arc-length
/// ordered trace. Orientation is canonical: the owning subdomain lies on
/// the left of the direction of travel.
inline TraceMesh extract_trace(const Mesh& mesh, int curve_tag) {
    std::vector<BoundaryEdge> edges;
    for (const auto& e : mesh.boundary_edges)
        if (e.curve_tag == curve_tag) edges.push_back(e);
    if (edges.empty()) throw Error("no edges with curve tag " + std::to_string(curve_tag));

    std::map<int, std::vector<int>> adj;  // node -> incident edge indices
    for (std::size_t i = 0; i < edges.size(); ++i) {
        adj[edges[i].n[0]].push_back(static_cast<int>(i));
        adj[edges[i].n[1]].push_back(static_cast<int>(i));
    }
    std::vector<int> endpoints;
    for (const auto& [node, inc] : adj) {
        if (inc.size() > 2)
            throw Error("branching chain at node " + std::to_string(node) + " for curve tag " +
                        std::to_string(curve_tag));
        if (inc.size() == 1) endpoints.push_back(node);
    }
    if (endpoints.size() != 2)
        throw Error("curve tag " + std::to_string(curve_tag) + " does not form one open chain");

    // Walk from the smaller endpoint; orientation fixed afterwards.
    int start = std::min(endpoints[0], endpoints[1]);
    std::vector<int> chain{start};
    std::vector<char> used(edges.size(), 0);
    int cur = start;
    for (std::size_t step = 0; step < edges.size(); ++step) {
        int next_edge = -1;
        for (int ei : adj[cur])
            if (!used[ei]) { next_edge = ei; break; }
        if (next_edge < 0) break;
        used[next_edge] = 1;
        cur = (edges[next_edge].n[0] == cur) ? edges[next_edge].n[1] : edges[next_edge].n[0];
        chain.push_back(cur);
    }
    if (chain.size() != edges.size() + 1)
        throw Error("disconnected chain for curve tag " + std::to_string(curve_tag));

    // Owning-triangle side of the first edge decides orientation.
    auto find_owner_third = [&](int a, int b) -> int {
        for (const auto& t : mesh.triangles)
            for (int k = 0; k < 3; ++k) {
                int u = t.n[k], v = t.n[(k + 1) % 3], w = t.n[(k + 2) % 3];
                if ((u == a && v == b) || (u == b && v == a)) return w;
            }
        throw Error("trace edge not owned by any element");
    };
    int a = chain[0], b = chain[1];
    int c = find_owner_third(a, b);
    const Node& na = mesh.nodes[a];
    const Node& nb = mesh.nodes[b];
    const Node& nc = mesh.nodes[c];
    double cross = (nb.x - na.x) * (nc.y - na.y) - (nc.x - na.x) * (nb.y - na.y);
    if (cross < 0.0) std::reverse(chain.begin(), chain.end());

    TraceMesh tr;
    tr.curve_tag = curve_tag;
    tr.node_ids = chain;
    tr.s.resize(chain.size());
    tr.xy.resize(chain.size());
    double s = 0.0;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const Node& n = mesh.nodes[chain[i]];
        tr.xy[i] = {n.x, n.y};
        if (i > 0) {
            double ds = (tr.xy[i] - tr.xy[i - 1]).norm();
            if (ds < kGeomTol) throw Error("zero-length segment in trace");
            s += ds;
        }
        tr.s[i] = s;
    }
    return tr;
}

// ---------------------------------------------------------------------------
// Structured generation

namespace detail {

/// Accumulates structured rectangular patches, merging coincident nodes.
class MeshBuilder {
  public:
    int add_node(double x, double y) {
        // Quantum 1e-10 m: well below half of any mesh size, well above
        // floating-point noise of coordinate arithmetic.
        auto key = std::make_pair(static_cast<std::int64_t>(std::llround(x * 1e10)),
                                  static_cast<std::int64_t>(std::llround(y * 1e10)));
        auto it = index_.find(key);
        if (it != index_.end()) return it->second;
        int id = static_cast<int>(mesh_.nodes.size());
        mesh_.nodes.push_back({id, x, y});
        index_.emplace(key, id);
        return id;
    }

    /// Structured triangulation of [x0,x1] x [y0,y1] with nx-by-ny cells,
    /// each split along the SW-NE diagonal.
    void add_rect(double x0, double y0, double x1, double y1, int nx, int ny, int region_tag) {
        if (nx < 1 || ny < 1) throw Error("add_rect: non-positive subdivision");
        std::vector<int> ids((nx + 1) * (ny + 1));
        for (int j = 0; j <= ny; ++j) {
            double y = (j == ny) ? y1 : y0 + j * ((y1 - y0) / ny);
            for (int i = 0; i <= nx; ++i) {
                double x = (i == nx) ? x1 : x0 + i * ((x1 - x0) / nx);
                ids[j * (nx + 1) + i] = add_node(x, y);
            }
        }
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                int sw = ids[j * (nx + 1) + i];
                int se = ids[j * (nx + 1) + i + 1];
                int nw = ids[(j + 1) * (nx + 1) + i];
                int ne = ids[(j + 1) * (nx + 1) + i + 1];
                mesh_.triangles.push_back({{sw, se, ne}, region_tag});
                mesh_.triangles.push_back({{sw, ne, nw}, region_tag});
            }
    }

    /// Classifies free boundary edges: any edge lying on one of the given
    /// segments gets that segment's tag, everything else `default_tag`.
    struct TaggedSegment {
        Vec2 a, b;
        int tag;
    };
    void finish_boundary(const std::vector<TaggedSegment>& segments, int default_tag) {
        std::map<std::pair<int, int>, int> edge_use;
        auto key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
        for (const auto& t : mesh_.triangles)
            for (int k = 0; k < 3; ++k) edge_use[key(t.n[k], t.n[(k + 1) % 3])]++;
        auto on_segment = [&](const Node& n, const TaggedSegment& sg) {
            Vec2 d = sg.b - sg.a;
            double len2 = d.dot(d);
            Vec2 r{n.x - sg.a.x, n.y - sg.a.y};
            double t = r.dot(d) / len2;
            if (t < -kGeomTol || t > 1.0 + kGeomTol) return false;
            Vec2 p{sg.a.x + t * d.x - n.x, sg.a.y + t * d.y - n.y};
            return p.norm() < kGeomTol;
        };
        for (const auto& [e, cnt] : edge_use) {
            if (cnt != 1) continue;
            int tag = default_tag;
            for (const auto& sg : segments)
                if (on_segment(mesh_.nodes[e.first], sg) && on_segment(mesh_.nodes[e.second], sg)) {
                    tag = sg.tag;
                    break;
                }
            mesh_.boundary_edges.push_back({{e.first, e.second}, tag});
        }
        std::sort(mesh_.boundary_edges.begin(), mesh_.boundary_edges.end(),
                  [](const BoundaryEdge& a, const BoundaryEdge& b) {
                      return std::make_tuple(a.curve_tag, a.n[0], a.n[1]) <
                             std::make_tuple(b.curve_tag, b.n[0], b.n[1]);
                  });
    }

    Mesh take() { return std::move(mesh_); }

  private:
    Mesh mesh_;
    std::map<std::pair<std::int64_t, std::int64_t>, int> index_;
};

inline int subdivisions(double extent, double h) {
    if (h <= 0.0) throw Error("non-positive mesh size");
    int n = static_cast<int>(std::lround(extent / h));
    return std::max(1, n);
}

/// Builds the virtual carrier trace as a standalone copy of `src`.
inline TraceMesh make_virtual_trace(const TraceMesh& src) {
    TraceMesh hat = src;
    hat.side = TraceSide::virtual_interface;
    std::fill(hat.node_ids.begin(), hat.node_ids.end(), -1);
    return hat;
}

}  // namespace detail

enum class MeshMode { reference, mortar_tsa };

/// Single-region rectangle, structured. The minimal generator used by
/// tests and the "rectangle" config geometry.
inline Mesh generate_rectangle(double width, double height, double h, int region_tag = 1,
                               const std::string& region_name = "region") {
    if (width <= 0.0 || height <= 0.0) throw Error("non-positive dimensions");
    if (h > width || h > height) throw Error("mesh size h larger than the smallest feature");
    detail::MeshBuilder b;
    b.add_rect(0.0, 0.0, width, height, detail::subdivisions(width, h),
               detail::subdivisions(height, h), region_tag);
    b.finish_boundary({}, 100);
    Mesh mesh = b.take();
    mesh.tags[region_name] = region_tag;
    mesh.tags["exterior"] = 100;
    canonicalize_orientation(mesh);
    return mesh;
}

/// Two rectangular blocks separated by one insulation layer of thickness d.
/// The workhorse for the interface verification problems: reference mode
/// meshes the layer, mortar mode collapses it to a trace pair.
struct TwoBlockSpec {
    double width_left = 2e-3;
    double width_right = 2e-3;
    double height = 15e-3;
    double insulation = 5e-4;
};

inline Mesh generate_two_block(const TwoBlockSpec& spec, MeshMode mode, double h_left,
                               double h_right) {
    if (spec.width_left <= 0 || spec.width_right <= 0 || spec.height <= 0 || spec.insulation <= 0)
        throw Error("non-positive dimensions");
    const double min_feat = std::min({spec.width_left, spec.width_right, spec.height});
    if (h_left > min_feat || h_right > min_feat)
        throw Error("mesh size h larger than the smallest feature");

    const double x1 = spec.width_left;                // left face of insulation
    const double x2 = x1 + spec.insulation;           // right face of insulation
    const double x3 = x2 + spec.width_right;
    const double yt = spec.height;

    detail::MeshBuilder b;
    constexpr int kLeft = 1, kRight = 2, kIns = 3;
    constexpr int kExterior = 100, kGamma1 = 102, kGamma2 = 103;

    if (mode == MeshMode::reference) {
        const double h = h_right;
        if (h > spec.insulation) throw Error("mesh size h larger than the smallest feature");
        b.add_rect(0, 0, x1, yt, detail::subdivisions(x1, h), detail::subdivisions(yt, h), kLeft);
        b.add_rect(x1, 0, x2, yt, detail::subdivisions(spec.insulation, h),
                   detail::subdivisions(yt, h), kIns);
        b.add_rect(x2, 0, x3, yt, detail::subdivisions(spec.width_right, h),
                   detail::subdivisions(yt, h), kRight);
        b.finish_boundary({}, kExterior);
    } else {
        b.add_rect(0, 0, x1, yt, detail::subdivisions(x1, h_left), detail::subdivisions(yt, h_left),
                   kLeft);
        b.add_rect(x2, 0, x3, yt, detail::subdivisions(spec.width_right, h_right),
                   detail::subdivisions(yt, h_right), kRight);
        b.finish_boundary({{{x1, 0}, {x1, yt}, kGamma1}, {{x2, 0}, {x2, yt}, kGamma2}}, kExterior);
    }
    Mesh mesh = b.take();
    mesh.tags["left_block"] = kLeft;
    mesh.tags["right_block"] = kRight;
    if (mode == MeshMode::reference) mesh.tags["insulation"] = kIns;
    mesh.tags["exterior"] = kExterior;
    canonicalize_orientation(mesh);

    if (mode == MeshMode::mortar_tsa) {
        mesh.tags["gamma1"] = kGamma1;
        mesh.tags["gamma2"] = kGamma2;
        TraceMesh g1 = extract_trace(mesh, kGamma1);
        g1.side = TraceSide::external_1;
        TraceMesh g2 = extract_trace(mesh, kGamma2);
        g2.side = TraceSide::external_2;
        const TraceMesh& finer = (g1.segments() >= g2.segments()) ? g1 : g2;
        TraceMesh hat = detail::make_virtual_trace(finer);
        mesh.traces.push_back(g1);
        mesh.traces.push_back(g2);
        mesh.traces.push_back(hat);
        mesh.interfaces.push_back({"insulation", 0, 1, 2, spec.insulation});
        mesh.interface_thickness["insulation"] = spec.insulation;
    }
    return mesh;
}

/// Simplified accelerator magnet cross-section: steel collar at the bottom,
/// a Kapton-filled gap and the left cable above it, the right cable coupled
/// to the left one through a thin vertical insulation layer. Robin cooling
/// acts on the right cable's outer face.
struct GeometrySpec {
    double cable_width = 2e-3;
    double cable_height = 15e-3;
    double insulation = 5e-4;
    double gap_height = 1e-3;
    double collar_height = 5e-3;

    double total_width() const { return 2.0 * cable_width + insulation; }
    double cable_y0() const { return collar_height + gap_height; }
    double cable_y1() const { return cable_y0() + cable_height; }
};

inline Mesh generate_magnet_geometry(const GeometrySpec& g, MeshMode mode, double h_left,
                                     double h_right) {
    if (g.cable_width <= 0 || g.cable_height <= 0 || g.insulation <= 0 || g.gap_height <= 0 ||
        g.collar_height <= 0)
        throw Error("non-positive dimensions");
    if (h_left <= 0 || h_right <= 0) throw Error("non-positive mesh size");
    const double min_feat = std::min({g.cable_width, g.gap_height, g.collar_height});
    if (h_left > min_feat || h_right > min_feat)
        throw Error("mesh size h larger than the smallest feature");

    const double W = g.total_width();
    const double cw = g.cable_width;
    const double xi0 = cw;                  // left face of insulation
    const double xi1 = cw + g.insulation;   // right face of insulation
    const double y_gap0 = g.collar_height;
    const double y0 = g.cable_y0();
    const double y1 = g.cable_y1();

    constexpr int kCollar = 1, kGap = 2, kLeftCable = 3, kInsulation = 4, kRightCable = 5;
    constexpr int kExterior = 100, kRobin = 101, kGamma1 = 102, kGamma2 = 103;

    detail::MeshBuilder b;
    auto add_regions = [&](double hc, double hr) {
        // hc: mesh size of collar/gap/left cable, hr: right cable.
        b.add_rect(0, 0, W, y_gap0, detail::subdivisions(W, hc),
                   detail::subdivisions(g.collar_height, hc), kCollar);
        b.add_rect(0, y_gap0, cw, y0, detail::subdivisions(cw, hc),
                   detail::subdivisions(g.gap_height, hc), kGap);
        b.add_rect(0, y0, cw, y1, detail::subdivisions(cw, hc),
                   detail::subdivisions(g.cable_height, hc), kLeftCable);
        b.add_rect(xi1, y0, W, y1, detail::subdivisions(cw, hr),
                   detail::subdivisions(g.cable_height, hr), kRightCable);
    };

    std::vector<detail::MeshBuilder::TaggedSegment> segs{{{W, y0}, {W, y1}, kRobin}};
    if (mode == MeshMode::reference) {
        const double h = h_right;
        if (h > g.insulation) throw Error("mesh size h larger than the smallest feature");
        add_regions(h, h);
        b.add_rect(xi0, y0, xi1, y1, detail::subdivisions(g.insulation, h),
                   detail::subdivisions(g.cable_height, h), kInsulation);
    } else {
        add_regions(h_left, h_right);
        segs.push_back({{xi0, y0}, {xi0, y1}, kGamma1});
        segs.push_back({{xi1, y0}, {xi1, y1}, kGamma2});
    }
    b.finish_boundary(segs, kExterior);
    Mesh mesh = b.take();

    mesh.tags["collar"] = kCollar;
    mesh.tags["gap"] = kGap;
    mesh.tags["left_cable"] = kLeftCable;
    mesh.tags["right_cable"] = kRightCable;
    if (mode == MeshMode::reference) mesh.tags["insulation"] = kInsulation;
    mesh.tags["exterior"] = kExterior;
    mesh.tags["robin_right"] = kRobin;
    canonicalize_orientation(mesh);

    if (mode == MeshMode::mortar_tsa) {
        mesh.tags["gamma1"] = kGamma1;
        mesh.tags["gamma2"] = kGamma2;
        TraceMesh g1 = extract_trace(mesh, kGamma1);
        g1.side = TraceSide::external_1;
        TraceMesh g2 = extract_trace(mesh, kGamma2);
        g2.side = TraceSide::external_2;
        const TraceMesh& finer = (g1.segments() >= g2.segments()) ? g1 : g2;
        TraceMesh hat = detail::make_virtual_trace(finer);
        mesh.traces.push_back(g1);
        mesh.traces.push_back(g2);
        mesh.traces.push_back(hat);
        mesh.interfaces.push_back({"insulation", 0, 1, 2, g.insulation});
        mesh.interface_thickness["insulation"] = g.insulation;
    }
    return mesh;
}

}  // namespace mtsa

#endif
