#ifndef MTSA_MSH_IO_HPP
#define MTSA_MSH_IO_HPP

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "mtsa/mesh.hpp"

namespace mtsa {

namespace detail {

class MshReader {
  public:
    explicit MshReader(std::istream& in) : in_(in) {}

    Mesh read() {
        Mesh mesh;
        bool have_format = false, have_names = false, have_nodes = false, have_elements = false;
        std::string line;
        while (next_line(line)) {
            if (line == "$MeshFormat") {
                read_format();
                have_format = true;
            } else if (line == "$PhysicalNames") {
                read_physical_names(mesh);
                have_names = true;
            } else if (line == "$Nodes") {
                read_nodes(mesh);
                have_nodes = true;
            } else if (line == "$Elements") {
                read_elements(mesh);
                have_elements = true;
            } else if (!line.empty() && line[0] == '$') {
                skip_section(line);
            } else if (!line.empty()) {
                fail("unexpected content outside section");
            }
        }
        if (!have_format) fail("missing $MeshFormat section");
        if (!have_names) fail("missing tag section $PhysicalNames");
        if (!have_nodes) fail("missing $Nodes section");
        if (!have_elements) fail("missing $Elements section");
        canonicalize_orientation(mesh);
        return mesh;
    }

  private:
    std::istream& in_;
    int lineno_ = 0;
    std::map<long, int> node_index_;

    bool next_line(std::string& line) {
        if (!std::getline(in_, line)) return false;
        ++lineno_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    }
    [[noreturn]] void fail(const std::string& msg) {
        throw Error("msh parse error at line " + std::to_string(lineno_) + ": " + msg);
    }
    std::string expect_line() {
        std::string line;
        if (!next_line(line)) fail("unexpected end of file");
        return line;
    }

    void read_format() {
        std::istringstream fm(expect_line());
        std::string version;
        int file_type = -1, data_size = -1;
        if (!(fm >> version >> file_type >> data_size)) fail("malformed $MeshFormat");
        if (version != "2.2" || file_type != 0 || data_size != 8)
            fail("unsupported mesh format (need ASCII 2.2)");
        if (expect_line() != "$EndMeshFormat") fail("expected $EndMeshFormat");
    }

    void read_physical_names(Mesh& mesh) {
        int count = 0;
        std::istringstream cs(expect_line());
        if (!(cs >> count) || count < 0) fail("malformed $PhysicalNames count");
        for (int i = 0; i < count; ++i) {
            std::istringstream ls(expect_line());
            int dim = 0, tag = 0;
            std::string name;
            if (!(ls >> dim >> tag)) fail("malformed physical name entry");
            std::getline(ls, name);
            auto a = name.find('"');
            auto b = name.rfind('"');
            if (a == std::string::npos || b == a) fail("physical name must be quoted");
            mesh.tags[name.substr(a + 1, b - a - 1)] = tag;
        }
        if (expect_line() != "$EndPhysicalNames") fail("expected $EndPhysicalNames");
    }

    void read_nodes(Mesh& mesh) {
        int count = 0;
        std::istringstream cs(expect_line());
        if (!(cs >> count) || count < 0) fail("malformed $Nodes count");
        for (int i = 0; i < count; ++i) {
            std::istringstream ls(expect_line());
            long id;
            double x, y, z;
            if (!(ls >> id >> x >> y >> z)) fail("malformed node entry");
            if (node_index_.count(id)) fail("duplicate node id");
            int idx = static_cast<int>(mesh.nodes.size());
            node_index_[id] = idx;
            mesh.nodes.push_back({idx, x, y});
        }
        if (expect_line() != "$EndNodes") fail("expected $EndNodes");
    }

    int map_node(long id) {
        auto it = node_index_.find(id);
        if (it == node_index_.end()) fail("element references unknown node");
        return it->second;
    }

    void read_elements(Mesh& mesh) {
        int count = 0;
        std::istringstream cs(expect_line());
        if (!(cs >> count) || count < 0) fail("malformed $Elements count");
        for (int i = 0; i < count; ++i) {
            std::istringstream ls(expect_line());
            long id;
            int type = 0, ntags = 0;
            if (!(ls >> id >> type >> ntags)) fail("malformed element entry");
            int physical = 0;
            for (int k = 0; k < ntags; ++k) {
                int t;
                if (!(ls >> t)) fail("malformed element tags");
                if (k == 0) physical = t;
            }
            if (type == 1) {
                long a, b;
                if (!(ls >> a >> b)) fail("malformed line element");
                mesh.boundary_edges.push_back({{map_node(a), map_node(b)}, physical});
            } else if (type == 2) {
                long a, b, c;
                if (!(ls >> a >> b >> c)) fail("malformed triangle element");
                mesh.triangles.push_back({{map_node(a), map_node(b), map_node(c)}, physical});
            } else {
                fail("unsupported element type " + std::to_string(type));
            }
        }
        if (expect_line() != "$EndElements") fail("expected $EndElements");
    }

    void skip_section(const std::string& header) {
        const std::string end = "$End" + header.substr(1);
        std::string line;
        while (next_line(line))
            if (line == end) return;
        fail("unterminated section " + header);
    }
};

}  // namespace detail

inline Mesh read_msh(std::istream& in) { return detail::MshReader(in).read(); }

inline Mesh load_msh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open mesh file: " + path);
    return read_msh(in);
}

inline void write_msh(const Mesh& mesh, std::ostream& out) {
    std::set<int> region_tags, curve_tags;
    for (const auto& t : mesh.triangles) region_tags.insert(t.region_tag);
    for (const auto& e : mesh.boundary_edges) curve_tags.insert(e.curve_tag);

    out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
    out << "$PhysicalNames\n" << mesh.tags.size() << "\n";
    for (const auto& [name, tag] : mesh.tags) {
        int dim = region_tags.count(tag) ? 2 : 1;
        out << dim << " " << tag << " \"" << name << "\"\n";
    }
    out << "$EndPhysicalNames\n";

    char buf[128];
    out << "$Nodes\n" << mesh.nodes.size() << "\n";
    for (const auto& n : mesh.nodes) {
        std::snprintf(buf, sizeof buf, "%d %.17g %.17g 0\n", n.id + 1, n.x, n.y);
        out << buf;
    }
    out << "$EndNodes\n";

    out << "$Elements\n" << (mesh.boundary_edges.size() + mesh.triangles.size()) << "\n";
    long id = 1;
    for (const auto& e : mesh.boundary_edges)
        out << id++ << " 1 2 " << e.curve_tag << " " << e.curve_tag << " " << (e.n[0] + 1) << " "
            << (e.n[1] + 1) << "\n";
    for (const auto& t : mesh.triangles)
        out << id++ << " 2 2 " << t.region_tag << " " << t.region_tag << " " << (t.n[0] + 1) << " "
            << (t.n[1] + 1) << " " << (t.n[2] + 1) << "\n";
    out << "$EndElements\n";
}

inline void save_msh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write mesh file: " + path);
    write_msh(mesh, out);
}

}  // namespace mtsa

#endif
