#ifndef MTSA_POSTPROC_HPP
#define MTSA_POSTPROC_HPP

#include <fstream>
#include <set>
#include <sstream>

#include "mtsa/system.hpp"

namespace mtsa {

struct TimeSeries {
    std::vector<std::string> columns;  // without the leading "time"
    std::vector<double> times;
    std::vector<std::vector<double>> rows;  // one row per time, columns.size() entries

    void append(double time, std::vector<double> row) {
        if (!times.empty() && time <= times.back())
            throw Error("time series times must be strictly increasing");
        if (row.size() != columns.size()) throw Error("time series row width mismatch");
        times.push_back(time);
        rows.push_back(std::move(row));
    }
    int column(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return static_cast<int>(i);
        throw Error("unknown time series column: " + name);
    }
};

inline double max_in_region(const Vector& x, const Mesh& mesh, int region_tag) {
    double best = -std::numeric_limits<double>::infinity();
    bool found = false;
    for (const auto& t : mesh.triangles) {
        if (t.region_tag != region_tag) continue;
        found = true;
        for (int k = 0; k < 3; ++k) best = std::max(best, x[t.n[k]]);
    }
    if (!found) throw Error("empty region tag " + std::to_string(region_tag));
    return best;
}

struct ProfileSample {
    double x = 0.0;
    double temperature = 0.0;
    int region_tag = 0;
    std::string side;  // volume | side1 | sheet | side2
};

struct LineProfile {
    double y = 0.0;
    std::vector<ProfileSample> samples;  // ascending x
};

namespace detail {

/// P1 interpolation at (px, py); returns the region tag through `tag`.
inline bool interpolate_at(const Mesh& mesh, const Vector& x, double px, double py, double& value,
                           int& tag) {
    for (const auto& t : mesh.triangles) {
        std::array<Vec2, 3> p;
        for (int k = 0; k < 3; ++k) p[k] = {mesh.nodes[t.n[k]].x, mesh.nodes[t.n[k]].y};
        const double det =
            (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
        if (det <= 0.0) continue;
        const double l1 = ((p[1].x - px) * (p[2].y - py) - (p[2].x - px) * (p[1].y - py)) / det;
        const double l2 = ((p[2].x - px) * (p[0].y - py) - (p[0].x - px) * (p[2].y - py)) / det;
        const double l3 = 1.0 - l1 - l2;
        const double eps = 1e-12;
        if (l1 < -eps || l2 < -eps || l3 < -eps) continue;
        value = l1 * x[t.n[0]] + l2 * x[t.n[1]] + l3 * x[t.n[2]];
        tag = t.region_tag;
        return true;
    }
    return false;
}

/// Crossing of the horizontal line y = yline with a trace; returns the
/// arc-length coordinate and point, or nothing.
inline bool trace_crossing(const TraceMesh& tr, double yline, double& s_out, Vec2& p_out) {
    for (std::size_t e = 0; e + 1 < tr.size(); ++e) {
        const Vec2 a = tr.xy[e], b = tr.xy[e + 1];
        const double dy = b.y - a.y;
        double t;
        if (std::abs(dy) < kGeomTol) {
            if (std::abs(a.y - yline) > kGeomTol) continue;
            t = 0.0;
        } else {
            t = (yline - a.y) / dy;
            if (t < -1e-12 || t > 1.0 + 1e-12) continue;
        }
        s_out = tr.s[e] + t * (tr.s[e + 1] - tr.s[e]);
        p_out = {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
        return true;
    }
    return false;
}

/// P1 evaluation of per-trace-node values at arc length s.
inline double trace_value_at(const TraceMesh& tr, const std::vector<double>& vals, double s) {
    const int e = [&] {
        for (std::size_t i = 0; i + 2 < tr.size(); ++i)
            if (s <= tr.s[i + 1]) return static_cast<int>(i);
        return static_cast<int>(tr.size()) - 2;
    }();
    const double t = (s - tr.s[e]) / (tr.s[e + 1] - tr.s[e]);
    return (1.0 - t) * vals[e] + t * vals[e + 1];
}

}  // namespace detail

/// Samples the temperature field along the horizontal line y = `y`.
/// At each collapsed interface the zero-width line is expanded to the
/// physical layer thickness: both one-sided trace values and all sheet
/// values appear at their w positions.
inline LineProfile sample_line(const Vector& x, const Mesh& mesh, const DofMap& dm, double y,
                               int n_samples, double x_min, double x_max) {
    if (n_samples < 2) throw Error("need at least two samples");
    LineProfile prof;
    prof.y = y;
    for (int i = 0; i < n_samples; ++i) {
        const double px = x_min + i * ((x_max - x_min) / (n_samples - 1));
        double val;
        int tag;
        if (detail::interpolate_at(mesh, x, px, y, val, tag))
            prof.samples.push_back({px, val, tag, "volume"});
    }
    if (prof.samples.empty()) throw Error("control line outside the domain");

    for (const auto& f : dm.ifaces) {
        double s1, s2, sh;
        Vec2 p1, p2, ph;
        if (!detail::trace_crossing(*f.g1, y, s1, p1)) continue;
        if (!detail::trace_crossing(*f.g2, y, s2, p2)) continue;
        if (!detail::trace_crossing(*f.hat, y, sh, ph)) continue;

        std::vector<double> v1(f.g1->size()), v2(f.g2->size());
        for (std::size_t i = 0; i < v1.size(); ++i) v1[i] = x[f.g1->node_ids[i]];
        for (std::size_t i = 0; i < v2.size(); ++i) v2[i] = x[f.g2->node_ids[i]];
        prof.samples.push_back({p1.x, detail::trace_value_at(*f.g1, v1, s1), 0, "side1"});
        prof.samples.push_back({p2.x, detail::trace_value_at(*f.g2, v2, s2), 0, "side2"});

        // Sheets at their physical w positions, from side 1 toward side 2.
        const Vec2 dir = p2 - p1;
        const double gap = dir.norm();
        const Vec2 n = gap > kGeomTol ? dir * (1.0 / gap) : Vec2{1.0, 0.0};
        const double d = f.cfg->stack.thickness();
        for (int j = 0; j <= f.n_layers; ++j) {
            std::vector<double> vs(f.m);
            for (int i = 0; i < f.m; ++i) vs[i] = x[f.sheet_dof(j, i)];
            const double w = f.cfg->stack.breakpoints[j] - f.cfg->stack.breakpoints.front();
            const Vec2 pos = p1 + n * (gap > kGeomTol ? w * gap / d : w);
            prof.samples.push_back({pos.x, detail::trace_value_at(*f.hat, vs, sh), 0, "sheet"});
        }
    }
    std::sort(prof.samples.begin(), prof.samples.end(),
              [](const ProfileSample& a, const ProfileSample& b) { return a.x < b.x; });
    return prof;
}

/// Pointwise relative error |a-b| / max(|b|, 1e-30) of one column.
/// Requires matching time grids or interpolates onto the coarser one.
inline TimeSeries relative_error(const TimeSeries& a, const TimeSeries& b,
                                 const std::string& quantity) {
    const int ca = a.column(quantity);
    const int cb = b.column(quantity);
    const bool same = a.times == b.times;
    const std::vector<double>& grid = same                           ? a.times
                                      : (a.times.size() <= b.times.size()) ? a.times
                                                                           : b.times;
    auto value_on = [&](const TimeSeries& s, int col, double t) {
        if (t <= s.times.front()) return s.rows.front()[col];
        if (t >= s.times.back()) return s.rows.back()[col];
        std::size_t i = 1;
        while (s.times[i] < t) ++i;
        const double w = (t - s.times[i - 1]) / (s.times[i] - s.times[i - 1]);
        return (1.0 - w) * s.rows[i - 1][col] + w * s.rows[i][col];
    };
    TimeSeries err;
    err.columns = {quantity};
    for (double t : grid) {
        const double va = value_on(a, ca, t);
        const double vb = value_on(b, cb, t);
        err.append(t, {std::abs(va - vb) / std::max(std::abs(vb), 1e-30)});
    }
    if (err.times.empty()) throw Error("empty time overlap");
    return err;
}

// ---------------------------------------------------------------------------
// File output

namespace detail {

inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline void write_timeseries_csv(const TimeSeries& ts, std::ostream& out) {
    out << "time";
    for (const auto& c : ts.columns) out << "," << c;
    out << "\n";
    for (std::size_t i = 0; i < ts.times.size(); ++i) {
        out << detail::fmt17(ts.times[i]);
        for (double v : ts.rows[i]) out << "," << detail::fmt17(v);
        out << "\n";
    }
}

inline TimeSeries read_timeseries_csv(std::istream& in) {
    TimeSeries ts;
    std::string line;
    if (!std::getline(in, line)) throw Error("empty CSV");
    std::istringstream hs(line);
    std::string col;
    bool first = true;
    while (std::getline(hs, col, ',')) {
        if (first) {
            if (col != "time") throw Error("CSV must start with a time column");
            first = false;
        } else {
            ts.columns.push_back(col);
        }
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> row;
        double time = 0.0;
        bool first_cell = true;
        while (std::getline(ls, cell, ',')) {
            const double v = std::stod(cell);
            if (first_cell) {
                time = v;
                first_cell = false;
            } else {
                row.push_back(v);
            }
        }
        ts.append(time, std::move(row));
    }
    return ts;
}

inline void write_profile_csv(const LineProfile& prof, std::ostream& out) {
    out << "x,T,region_tag,side\n";
    for (const auto& s : prof.samples)
        out << detail::fmt17(s.x) << "," << detail::fmt17(s.temperature) << "," << s.region_tag
            << "," << s.side << "\n";
}

inline LineProfile read_profile_csv(std::istream& in) {
    LineProfile prof;
    std::string line;
    if (!std::getline(in, line)) throw Error("empty CSV");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        ProfileSample s;
        std::getline(ls, cell, ',');
        s.x = std::stod(cell);
        std::getline(ls, cell, ',');
        s.temperature = std::stod(cell);
        std::getline(ls, cell, ',');
        s.region_tag = std::stoi(cell);
        std::getline(ls, cell, ',');
        s.side = cell;
        prof.samples.push_back(s);
    }
    return prof;
}

/// Legacy ASCII VTK unstructured grid with nodal temperatures. Sheets of
/// each collapsed interface go to a separate polyline dataset next to it.
inline void export_fields(const Vector& x, const Mesh& mesh, const DofMap& dm,
                          const std::string& path) {
    {
        std::ofstream out(path);
        if (!out) throw Error("cannot write VTK file: " + path);
        out << "# vtk DataFile Version 3.0\ntemperature field\nASCII\n";
        out << "DATASET UNSTRUCTURED_GRID\n";
        out << "POINTS " << mesh.nodes.size() << " double\n";
        for (const auto& n : mesh.nodes)
            out << detail::fmt17(n.x) << " " << detail::fmt17(n.y) << " 0\n";
        out << "CELLS " << mesh.triangles.size() << " " << 4 * mesh.triangles.size() << "\n";
        for (const auto& t : mesh.triangles)
            out << "3 " << t.n[0] << " " << t.n[1] << " " << t.n[2] << "\n";
        out << "CELL_TYPES " << mesh.triangles.size() << "\n";
        for (std::size_t i = 0; i < mesh.triangles.size(); ++i) out << "5\n";
        out << "POINT_DATA " << mesh.nodes.size() << "\n";
        out << "SCALARS temperature double 1\nLOOKUP_TABLE default\n";
        for (const auto& n : mesh.nodes) out << detail::fmt17(x[n.id]) << "\n";
        if (!out) throw Error("I/O failure writing " + path);
    }
    for (const auto& f : dm.ifaces) {
        std::string base = path;
        const auto dot = base.rfind(".vtk");
        if (dot != std::string::npos) base = base.substr(0, dot);
        const std::string spath = base + "_tsa_" + f.name + ".vtk";
        std::ofstream out(spath);
        if (!out) throw Error("cannot write VTK file: " + spath);

        // Sheet j node i sits at the hat position pushed from side 1 by w_j.
        const Vec2 off = f.g2->xy.front() - f.g1->xy.front();
        const double gap = off.norm();
        const Vec2 n = gap > kGeomTol ? off * (1.0 / gap) : Vec2{0.0, 0.0};
        const double d = f.cfg->stack.thickness();

        const int npts = (f.n_layers + 1) * f.m;
        out << "# vtk DataFile Version 3.0\ntsa sheets " << f.name << "\nASCII\n";
        out << "DATASET UNSTRUCTURED_GRID\n";
        out << "POINTS " << npts << " double\n";
        for (int j = 0; j <= f.n_layers; ++j) {
            const double w = f.cfg->stack.breakpoints[j] - f.cfg->stack.breakpoints.front();
            for (int i = 0; i < f.m; ++i) {
                const Vec2 base_pt = f.hat->xy[i] - n * gap;  // side-1 surface
                const Vec2 p = base_pt + n * (gap > kGeomTol ? w * gap / d : 0.0);
                out << detail::fmt17(p.x) << " " << detail::fmt17(p.y) << " 0\n";
            }
        }
        const int ncell = (f.n_layers + 1) * (f.m - 1);
        out << "CELLS " << ncell << " " << 3 * ncell << "\n";
        for (int j = 0; j <= f.n_layers; ++j)
            for (int i = 0; i + 1 < f.m; ++i)
                out << "2 " << (j * f.m + i) << " " << (j * f.m + i + 1) << "\n";
        out << "CELL_TYPES " << ncell << "\n";
        for (int c = 0; c < ncell; ++c) out << "3\n";
        out << "POINT_DATA " << npts << "\n";
        out << "SCALARS temperature double 1\nLOOKUP_TABLE default\n";
        for (int j = 0; j <= f.n_layers; ++j)
            for (int i = 0; i < f.m; ++i) out << detail::fmt17(x[f.sheet_dof(j, i)]) << "\n";
        if (!out) throw Error("I/O failure writing " + spath);
    }
}

}  // namespace mtsa

#endif
