#include "nemlat/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "nemlat/errors.hpp"

namespace nemlat {

std::string format_number(double x) {
    if (!std::isfinite(x)) throw ParseError("non-finite value cannot be written");
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

double parse_number(const std::string& s) {
    const char* b = s.data();
    const char* e = b + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
    if (b < e && *b == '+') ++b;
    double x = 0;
    auto r = std::from_chars(b, e, x);
    if (r.ec != std::errc() || r.ptr != e || b == e) throw ParseError("not a number: '" + s + "'");
    if (!std::isfinite(x)) throw ParseError("non-finite value: '" + s + "'");
    return x;
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

int parse_index(const std::string& s) {
    double x = parse_number(s);
    if (x != std::floor(x) || std::fabs(x) > 1e9) throw ParseError("not an integer index: '" + s + "'");
    return int(x);
}

// rows keyed by site; every site exactly once
std::vector<const std::vector<std::string>*> rows_by_site(const CsvTable& t, const Grid2& g) {
    std::vector<const std::vector<std::string>*> at(g.size(), nullptr);
    for (const auto& r : t.rows) {
        long k = g.index(parse_index(r[0]), parse_index(r[1]));
        if (k < 0) throw ParseError("site " + r[0] + "," + r[1] + " is outside the grid");
        if (at[std::size_t(k)]) throw ParseError("site " + r[0] + "," + r[1] + " listed twice");
        at[std::size_t(k)] = &r;
    }
    for (auto* p : at)
        if (!p) throw ParseError("CSV does not cover every grid site");
    return at;
}

}  // namespace

void write_csv(std::ostream& os, const CsvTable& t) {
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) os << (k ? "," : "") << cells[k];
        os << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) {
        if (r.size() != t.header.size()) throw ParseError("row width differs from header");
        line(r);
    }
}

CsvTable read_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        auto cells = split(line);
        for (auto& c : cells) c = trim(c);
        if (!have_header) {
            t.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != t.header.size()) throw ParseError("row width differs from header: " + line);
        t.rows.push_back(std::move(cells));
    }
    if (!have_header) throw ParseError("missing header row");
    return t;
}

CsvTable read_csv(std::istream& is, const std::vector<std::string>& expected_header) {
    CsvTable t = read_csv(is);
    if (t.header != expected_header) {
        std::string want;
        for (const auto& h : expected_header) want += (want.empty() ? "" : ",") + h;
        throw ParseError("expected header " + want);
    }
    return t;
}

void write_directors(std::ostream& os, const DirectorField2& f) {
    CsvTable t{{"i1", "i2", "ux", "uy"}, {}};
    for (std::size_t k = 0; k < f.u.size(); ++k) {
        auto s = f.grid.site(k);
        t.rows.push_back({std::to_string(s[0]), std::to_string(s[1]), format_number(f.u[k].x()),
                          format_number(f.u[k].y())});
    }
    write_csv(os, t);
}

DirectorField2 read_directors(std::istream& is, const Grid2& g) {
    CsvTable t = read_csv(is, {"i1", "i2", "ux", "uy"});
    auto at = rows_by_site(t, g);
    std::vector<Director2> u;
    u.reserve(g.size());
    for (auto* r : at) u.emplace_back(parse_number((*r)[2]), parse_number((*r)[3]));
    return DirectorField2(g, std::move(u));
}

void write_qfield(std::ostream& os, const PCQField& f) {
    CsvTable t{{"i1", "i2", "q11", "q12", "q22"}, {}};
    for (std::size_t k = 0; k < f.q.size(); ++k) {
        auto s = f.grid.site(k);
        t.rows.push_back({std::to_string(s[0]), std::to_string(s[1]), format_number(f.q[k].q11()),
                          format_number(f.q[k].q12()), format_number(f.q[k].q22())});
    }
    write_csv(os, t);
}

PCQField read_qfield(std::istream& is, const Grid2& g) {
    CsvTable t = read_csv(is, {"i1", "i2", "q11", "q12", "q22"});
    auto at = rows_by_site(t, g);
    std::vector<QTensor2> q;
    q.reserve(g.size());
    for (auto* r : at) q.emplace_back(parse_number((*r)[2]), parse_number((*r)[3]), parse_number((*r)[4]));
    return PCQField(g, std::move(q));
}

void write_sampled(std::ostream& os, const SampledFunction1D& h) {
    CsvTable t{{"t", "value"}, {}};
    for (std::size_t k = 0; k < h.size(); ++k)
        t.rows.push_back({format_number(h.grid()[k]), format_number(h.values()[k])});
    write_csv(os, t);
}

SampledFunction1D read_sampled(std::istream& is) {
    CsvTable t = read_csv(is, {"t", "value"});
    std::vector<double> x, y;
    for (const auto& r : t.rows) {
        x.push_back(parse_number(r[0]));
        y.push_back(parse_number(r[1]));
    }
    return SampledFunction1D(std::move(x), std::move(y));
}

void write_surface(std::ostream& os, const SampledSurface& s) {
    CsvTable t{{"q1", "q2", "value"}, {}};
    for (std::size_t k = 0; k < s.nodes.size(); ++k)
        t.rows.push_back({format_number(s.nodes[k][0]), format_number(s.nodes[k][1]), format_number(s.values[k])});
    write_csv(os, t);
}

SampledSurface read_surface(std::istream& is) {
    CsvTable t = read_csv(is, {"q1", "q2", "value"});
    SampledSurface s;
    for (const auto& r : t.rows) {
        s.nodes.push_back({parse_number(r[0]), parse_number(r[1])});
        s.values.push_back(parse_number(r[2]));
    }
    validate_surface(s);
    return s;
}

void write_jacobian(std::ostream& os, const JacobianField& j) {
    CsvTable t{{"tri_index", "cx", "cy", "area", "det"}, {}};
    for (std::size_t k = 0; k < j.det.size(); ++k)
        t.rows.push_back({std::to_string(k), format_number(j.centroid[k][0]), format_number(j.centroid[k][1]),
                          format_number(j.area[k]), format_number(j.det[k])});
    write_csv(os, t);
}

Json to_json(const EnergyBreakdown& b) {
    Json classes = Json::array();
    for (const auto& c : b.classes) classes.push_back({{"name", c.name}, {"sum", c.sum}, {"bonds", c.bonds}});
    return {{"total", b.total}, {"classes", classes}};
}

EnergyBreakdown breakdown_from_json(const Json& j) {
    try {
        EnergyBreakdown b;
        b.total = j.at("total").get<double>();
        for (const auto& c : j.at("classes"))
            b.classes.push_back({c.at("name").get<std::string>(), c.at("sum").get<double>(),
                                 c.at("bonds").get<std::size_t>()});
        return b;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed energy breakdown: ") + e.what());
    }
}

Json to_json(const ConcentrationFit& f) {
    return {{"slope", f.slope}, {"intercept", f.intercept}, {"residual", f.residual}, {"eps", f.eps},
            {"energy", f.energy}};
}

Json to_json(const CellProblemResult2& r, const std::string& config_csv) {
    return {{"value_per_volume", r.value_per_volume},
            {"energy", r.energy},
            {"mean", {r.mean.q11(), r.mean.q12(), r.mean.q22()}},
            {"distance", r.distance},
            {"exhaustive", r.exhaustive},
            {"seed", r.seed},
            {"config_csv", config_csv}};
}

Json to_json(const CellProblemResult3& r, const std::string& config_csv) {
    const Sym3& m = r.mean;
    return {{"value_per_volume", r.value_per_volume},
            {"energy", r.energy},
            {"mean", {m.xx, m.xy, m.xz, m.yy, m.yz, m.zz}},
            {"distance", r.distance},
            {"exhaustive", r.exhaustive},
            {"seed", r.seed},
            {"config_csv", config_csv}};
}

}  // namespace nemlat
