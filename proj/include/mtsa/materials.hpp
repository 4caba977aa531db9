#ifndef MTSA_MATERIALS_HPP
#define MTSA_MATERIALS_HPP

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mtsa/core.hpp"

namespace mtsa {

/// Piecewise log-log-linear property table, clamped outside its range.
/// Exact at breakpoints.
class PropertyCurve {
  public:
    PropertyCurve() = default;
    PropertyCurve(std::vector<double> temps, std::vector<double> values)
        : t_(std::move(temps)), v_(std::move(values)) {
        if (t_.size() != v_.size() || t_.size() < 1)
            throw Error("property curve needs matching T/value breakpoints");
        for (std::size_t i = 0; i < t_.size(); ++i) {
            if (t_[i] <= 0.0) throw Error("property breakpoints must have T > 0");
            if (v_[i] <= 0.0) throw Error("property values must be positive");
            if (i > 0 && t_[i] <= t_[i - 1])
                throw Error("property breakpoints must be strictly increasing");
        }
    }

    static PropertyCurve constant(double value) { return PropertyCurve({1.0, 500.0}, {value, value}); }

    double eval(double temperature) const {
        if (!(temperature > 0.0)) throw Error("property evaluation needs T > 0");
        if (temperature <= t_.front()) return v_.front();
        if (temperature >= t_.back()) return v_.back();
        std::size_t hi = 1;
        while (t_[hi] < temperature) ++hi;
        if (t_[hi] == temperature) return v_[hi];
        const std::size_t lo = hi - 1;
        if (v_[lo] == v_[hi]) return v_[lo];
        const double a = (std::log(temperature) - std::log(t_[lo])) /
                         (std::log(t_[hi]) - std::log(t_[lo]));
        return std::exp((1.0 - a) * std::log(v_[lo]) + a * std::log(v_[hi]));
    }

    bool is_constant() const {
        for (double v : v_)
            if (v != v_.front()) return false;
        return true;
    }

    const std::vector<double>& breakpoints() const { return t_; }
    const std::vector<double>& values() const { return v_; }

  private:
    std::vector<double> t_{1.0};
    std::vector<double> v_{1.0};
};

struct Material {
    std::string name;
    PropertyCurve kappa;  // W/(m K)
    PropertyCurve c_v;    // J/(m^3 K)

    bool is_constant() const { return kappa.is_constant() && c_v.is_constant(); }

    static Material constant(double kappa_value, double c_v_value) {
        Material m;
        m.name = "constant";
        m.kappa = PropertyCurve::constant(kappa_value);
        m.c_v = PropertyCurve::constant(c_v_value);
        return m;
    }
};

/// Constant volumetric heat source per region tag, W/m^3 (per unit
/// out-of-plane depth of the 2D model).
struct SourceSpec {
    std::map<int, double> q_by_region;

    double q(int region_tag) const {
        auto it = q_by_region.find(region_tag);
        return it == q_by_region.end() ? 0.0 : it->second;
    }
};

// Simplified cryogenic property tables. These are NOT library-grade data;
// they are smooth, positive, documented curves with the right orders of
// magnitude for composite cable, polyimide film and stainless steel.
// The same text ships as data/materials.dat.
inline const char* builtin_material_table() {
    return
        "# Simplified material property tables\n"
        "# columns: T[K]  kappa[W/(m.K)]  cv[J/(m^3.K)]\n"
        "# interpolation: piecewise linear in (log T, log value), clamped\n"
        "material nbti_composite\n"
        "1     150    45\n"
        "2     300    120\n"
        "4     600    500\n"
        "10    1300   4000\n"
        "20    1900   30000\n"
        "50    1100   500000\n"
        "100   470    2200000\n"
        "200   410    3200000\n"
        "300   400    3450000\n"
        "500   390    3600000\n"
        "material kapton\n"
        "1     0.0032   4\n"
        "2     0.0058   14\n"
        "4     0.011    55\n"
        "10    0.028    450\n"
        "20    0.045    2600\n"
        "50    0.085    26000\n"
        "100   0.12     140000\n"
        "200   0.17     650000\n"
        "300   0.20     1250000\n"
        "500   0.24     1800000\n"
        "material steel\n"
        "1     0.08   1500\n"
        "2     0.15   3200\n"
        "4     0.27   7000\n"
        "10    0.9    24000\n"
        "20    1.9    80000\n"
        "50    5.8    1000000\n"
        "100   9.4    2100000\n"
        "200   13     3300000\n"
        "300   15     3800000\n"
        "500   17     4100000\n";
}

/// Parses the documented plain-text table format.
inline std::map<std::string, Material> parse_material_table(std::istream& in) {
    std::map<std::string, Material> lib;
    std::string line, current;
    std::vector<double> t, k, c;
    auto flush = [&] {
        if (current.empty()) return;
        Material m;
        m.name = current;
        m.kappa = PropertyCurve(t, k);
        m.c_v = PropertyCurve(t, c);
        lib[current] = m;
        t.clear(), k.clear(), c.clear();
    };
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto pos = line.find('#');
        if (pos != std::string::npos) line.erase(pos);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "material") {
            flush();
            if (!(ls >> current))
                throw Error("material table line " + std::to_string(lineno) + ": missing name");
            continue;
        }
        if (current.empty())
            throw Error("material table line " + std::to_string(lineno) + ": data before name");
        double tv, kv, cv;
        std::istringstream row(line);
        if (!(row >> tv >> kv >> cv))
            throw Error("material table line " + std::to_string(lineno) + ": expected 3 columns");
        t.push_back(tv), k.push_back(kv), c.push_back(cv);
    }
    flush();
    return lib;
}

inline const std::map<std::string, Material>& builtin_materials() {
    static const std::map<std::string, Material> lib = [] {
        std::istringstream in(builtin_material_table());
        return parse_material_table(in);
    }();
    return lib;
}

/// Named preset lookup. Accepts the builtin names plus "constant(k,cv)".
inline Material preset(const std::string& name) {
    if (name.rfind("constant(", 0) == 0 && name.back() == ')') {
        std::string args = name.substr(9, name.size() - 10);
        for (auto& ch : args)
            if (ch == ',') ch = ' ';
        std::istringstream in(args);
        double k, c;
        if (!(in >> k >> c)) throw Error("bad constant material spec: " + name);
        return Material::constant(k, c);
    }
    auto it = builtin_materials().find(name);
    if (it == builtin_materials().end()) throw Error("unknown material preset: " + name);
    return it->second;
}

}  // namespace mtsa

#endif
