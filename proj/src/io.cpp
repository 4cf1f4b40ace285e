#include "ringflow/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "ringflow/errors.hpp"

namespace ringflow {

using Json = nlohmann::ordered_json;

namespace {

std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt4(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    std::string s = buf;
    if (s == "-0.0000") s = "0.0000";
    return s;
}

double parse_double(const std::string& token, const std::string& context)
{
    double v = 0.0;
    const char* first = token.data();
    const char* last = first + token.size();
    if (!token.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw ParseError(context + ": bad number '" + token + "'");
    return v;
}

int parse_int(const std::string& token, const std::string& context)
{
    int v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw ParseError(context + ": bad integer '" + token + "'");
    return v;
}

// JSON numbers cannot hold NaN; null stands in for it.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double as_number(const Json& j, const std::string& context)
{
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (!j.is_number()) throw ParseError(context + ": expected a number");
    return j.get<double>();
}

const Json& require(const Json& obj, const std::string& key, const std::string& context)
{
    if (!obj.is_object()) throw ParseError(context + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(context + ": missing key \"" + key + "\"");
    return *it;
}

double require_number(const Json& obj, const std::string& key, const std::string& context)
{
    return as_number(require(obj, key, context), context + "." + key);
}

Vec2 require_point(const Json& obj, const std::string& key, const std::string& context)
{
    const Json& p = require(obj, key, context);
    const std::string where = context + "." + key;
    if (!p.is_array() || p.size() != 2) throw ParseError(where + ": expected [x, y]");
    return {as_number(p[0], where), as_number(p[1], where)};
}

Json point_json(Vec2 p) { return Json::array({p.x, p.y}); }

void check_version(const Json& doc, const std::string& context)
{
    const Json& v = require(doc, "format_version", context);
    if (!v.is_number_integer()) throw ParseError(context + ".format_version: expected an integer");
    if (v.get<int>() != kFormatVersion)
        throw VersionMismatch(context + ": unsupported format_version " + v.dump());
}

Json parse_json(const std::string& text, const std::string& context)
{
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(context + ": " + e.what());
    }
}

Json shape_json(const ConvexBody& body)
{
    Json j;
    j["type"] = body.type_name();
    if (auto s = body.as<PointShape>()) {
        j["center"] = point_json(s->center);
    } else if (auto s = body.as<SegmentShape>()) {
        j["a"] = point_json(s->a);
        j["b"] = point_json(s->b);
    } else if (auto s = body.as<DiskShape>()) {
        j["center"] = point_json(s->center);
        j["radius"] = s->radius;
    } else if (auto s = body.as<EllipseShape>()) {
        j["center"] = point_json(s->center);
        j["a"] = s->a;
        j["b"] = s->b;
        j["rotation"] = s->rotation;
    } else if (auto s = body.as<PolygonShape>()) {
        Json v = Json::array();
        for (Vec2 p : s->vertices) v.push_back(point_json(p));
        j["vertices"] = v;
    } else if (auto s = body.as<CapsuleShape>()) {
        j["a"] = point_json(s->a);
        j["b"] = point_json(s->b);
        j["radius"] = s->radius;
    }
    return j;
}

ConvexBody parse_shape(const Json& j, const std::string& context)
{
    const Json& type = require(j, "type", context);
    if (!type.is_string()) throw ParseError(context + ".type: expected a string");
    const std::string t = type.get<std::string>();
    if (t == "point") return ConvexBody::point(require_point(j, "center", context));
    if (t == "segment")
        return ConvexBody::segment(require_point(j, "a", context), require_point(j, "b", context));
    if (t == "disk")
        return ConvexBody::disk(require_point(j, "center", context),
                                require_number(j, "radius", context));
    if (t == "ellipse") {
        double rot = j.contains("rotation") ? require_number(j, "rotation", context) : 0.0;
        return ConvexBody::ellipse(require_point(j, "center", context),
                                   require_number(j, "a", context), require_number(j, "b", context),
                                   rot);
    }
    if (t == "polygon") {
        const Json& v = require(j, "vertices", context);
        if (!v.is_array()) throw ParseError(context + ".vertices: expected an array");
        std::vector<Vec2> pts;
        for (size_t i = 0; i < v.size(); ++i) {
            const std::string where = context + ".vertices[" + std::to_string(i) + "]";
            if (!v[i].is_array() || v[i].size() != 2) throw ParseError(where + ": expected [x, y]");
            pts.push_back({as_number(v[i][0], where), as_number(v[i][1], where)});
        }
        return ConvexBody::polygon(std::move(pts));
    }
    if (t == "capsule")
        return ConvexBody::capsule(require_point(j, "a", context), require_point(j, "b", context),
                                   require_number(j, "radius", context));
    throw ParseError(context + ".type: unknown shape '" + t + "'");
}

Json domain_json(const ConvexRing& ring)
{
    Json j;
    j["format_version"] = kFormatVersion;
    j["outer"] = shape_json(ring.outer);
    j["inner"] = shape_json(ring.inner);
    return j;
}

ConvexRing domain_from_json(const Json& j)
{
    check_version(j, "domain");
    ConvexBody outer = parse_shape(require(j, "outer", "domain"), "domain.outer");
    ConvexBody inner = parse_shape(require(j, "inner", "domain"), "domain.inner");
    return make_ring(std::move(outer), std::move(inner));
}

Status parse_status(const std::string& s)
{
    for (Status st : {Status::Pass, Status::Fail, Status::ReportOnly, Status::Skipped})
        if (to_string(st) == s) return st;
    throw ParseError("report: unknown status '" + s + "'");
}

Termination parse_termination(const std::string& s, const std::string& context)
{
    for (Termination t : {Termination::ReachedGamma, Termination::ReachedOuter,
                          Termination::Stalled, Termination::LeftDomain})
        if (to_string(t) == s) return t;
    throw ParseError(context + ": unknown termination '" + s + "'");
}

Json cl_json(const ClPoint& c)
{
    Json j;
    j["x1"] = c.location.x;
    j["x2"] = c.location.y;
    j["level"] = c.level;
    j["first"] = c.first;
    j["second"] = c.second;
    j["s_first"] = c.s_first;
    j["s_second"] = c.s_second;
    return j;
}

ClPoint cl_from_json(const Json& j, const std::string& context)
{
    ClPoint c;
    c.location = {require_number(j, "x1", context), require_number(j, "x2", context)};
    c.level = require_number(j, "level", context);
    c.first = require(j, "first", context).get<int>();
    c.second = require(j, "second", context).get<int>();
    c.s_first = require_number(j, "s_first", context);
    c.s_second = require_number(j, "s_second", context);
    return c;
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::vector<std::string> tokens(const std::string& line)
{
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

}  // namespace

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("write failed for " + path);
}

ConvexRing parse_domain(const std::string& text) { return domain_from_json(parse_json(text, "domain")); }

std::string domain_to_json(const ConvexRing& ring) { return domain_json(ring).dump(2) + "\n"; }

ConvexRing load_domain(const std::string& path) { return parse_domain(read_text(path)); }

void save_domain(const std::string& path, const ConvexRing& ring) { write_text(path, domain_to_json(ring)); }

std::string field_to_text(const ScalarField& field)
{
    const Grid& g = *field.grid;
    std::string out = "ringflow-field\nformat_version " + std::to_string(kFormatVersion) + "\n";
    out += "lattice " + std::to_string(g.nx) + " " + std::to_string(g.ny) + " " + fmt17(g.h) + " " +
           fmt17(g.origin.x) + " " + fmt17(g.origin.y) + "\n";
    out += "r_gamma " + fmt17(g.r_gamma) + "\n";
    out += "legend 0=interior 1=outer_bc 2=inner_bc 3=exterior\n";
    out += "domain " + domain_json(g.ring).dump() + "\n";
    out += "classes\n";
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) out += static_cast<char>('0' + static_cast<int>(g.cls[g.index(i, j)]));
        out += '\n';
    }
    out += "values\n";
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (i) out += ' ';
            out += fmt17(field[g.index(i, j)]);
        }
        out += '\n';
    }
    return out;
}

ScalarField parse_field(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto next = [&](const char* expect) {
        if (!std::getline(in, line)) throw ParseError(std::string("field: missing ") + expect);
        ++lineno;
        return tokens(line);
    };
    auto where = [&] { return "field line " + std::to_string(lineno); };
    auto keyed = [&](const char* key, size_t n) {
        auto t = next(key);
        if (t.empty() || t[0] != key || t.size() != n + 1)
            throw ParseError(where() + ": expected '" + key + "' with " + std::to_string(n) + " values");
        return t;
    };

    if (next("magic") != std::vector<std::string>{"ringflow-field"})
        throw ParseError(where() + ": not a field snapshot");
    auto ver = keyed("format_version", 1);
    if (parse_int(ver[1], where()) != kFormatVersion)
        throw VersionMismatch(where() + ": unsupported format_version " + ver[1]);
    auto lat = keyed("lattice", 5);
    const int nx = parse_int(lat[1], where() + " nx");
    const int ny = parse_int(lat[2], where() + " ny");
    const double h = parse_double(lat[3], where() + " h");
    const Vec2 origin{parse_double(lat[4], where() + " origin_x"), parse_double(lat[5], where() + " origin_y")};
    if (nx <= 0 || ny <= 0 || !(h > 0.0)) throw ParseError(where() + ": bad lattice");
    const double r_gamma = parse_double(keyed("r_gamma", 1)[1], where() + " r_gamma");
    if (next("legend").empty() || tokens(line)[0] != "legend") throw ParseError(where() + ": expected 'legend'");
    next("domain");
    if (line.rfind("domain ", 0) != 0) throw ParseError(where() + ": expected 'domain'");
    ConvexRing ring = domain_from_json(parse_json(line.substr(7), where() + " domain"));

    if (next("classes") != std::vector<std::string>{"classes"}) throw ParseError(where() + ": expected 'classes'");
    std::vector<NodeClass> cls(static_cast<size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        next("class row");
        if (static_cast<int>(line.size()) != nx) throw ParseError(where() + ": class row has wrong length");
        for (int i = 0; i < nx; ++i) {
            const char c = line[i];
            if (c < '0' || c > '3') throw ParseError(where() + ": bad node class '" + std::string(1, c) + "'");
            cls[static_cast<size_t>(j) * nx + i] = static_cast<NodeClass>(c - '0');
        }
    }
    if (next("values") != std::vector<std::string>{"values"}) throw ParseError(where() + ": expected 'values'");
    std::vector<double> values(cls.size());
    for (int j = 0; j < ny; ++j) {
        auto t = next("value row");
        if (static_cast<int>(t.size()) != nx) throw ParseError(where() + ": value row has wrong length");
        for (int i = 0; i < nx; ++i) values[static_cast<size_t>(j) * nx + i] = parse_double(t[i], where());
    }
    GridPtr grid = make_grid(ring, origin, h, nx, ny, r_gamma, std::move(cls));
    return {grid, std::move(values)};
}

void save_field(const std::string& path, const ScalarField& field) { write_text(path, field_to_text(field)); }

ScalarField load_field(const std::string& path) { return parse_field(read_text(path)); }

std::string streamlines_to_csv(const std::vector<Streamline>& lines)
{
    std::string out = "id,s,x1,x2,V,speed,termination\n";
    for (const Streamline& l : lines) {
        for (size_t k = 0; k < l.vertices.size(); ++k) {
            out += std::to_string(l.id) + "," + fmt17(l.s[k]) + "," + fmt17(l.vertices[k].x) + "," +
                   fmt17(l.vertices[k].y) + "," + fmt17(l.V[k]) + "," + fmt17(l.speed[k]) + ",";
            if (k + 1 == l.vertices.size()) out += to_string(l.termination);
            out += '\n';
        }
    }
    return out;
}

std::vector<Streamline> parse_streamlines(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    int lineno = 1;
    if (!std::getline(in, line) || line != "id,s,x1,x2,V,speed,termination")
        throw ParseError("streamlines line 1: bad header");
    std::vector<Streamline> out;
    bool open = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::string where = "streamlines line " + std::to_string(lineno);
        auto f = split(line, ',');
        if (f.size() != 7) throw ParseError(where + ": expected 7 fields");
        const int id = parse_int(f[0], where);
        if (!open) {
            out.emplace_back();
            out.back().id = id;
            open = true;
        } else if (out.back().id != id) {
            throw ParseError(where + ": streamline " + std::to_string(out.back().id) + " has no termination");
        }
        Streamline& l = out.back();
        const Vec2 x{parse_double(f[2], where), parse_double(f[3], where)};
        if (l.vertices.empty()) l.seed = x;
        l.vertices.push_back(x);
        l.s.push_back(parse_double(f[1], where));
        l.V.push_back(parse_double(f[4], where));
        l.speed.push_back(parse_double(f[5], where));
        if (!f[6].empty()) {
            l.termination = parse_termination(f[6], where);
            open = false;
        }
    }
    if (open) throw ParseError("streamlines: last streamline has no termination");
    return out;
}

void save_streamlines(const std::string& path, const std::vector<Streamline>& lines)
{
    write_text(path, streamlines_to_csv(lines));
}

std::vector<Streamline> load_streamlines(const std::string& path) { return parse_streamlines(read_text(path)); }

std::string merge_tree_to_json(const MergeTree& tree)
{
    Json j;
    j["format_version"] = kFormatVersion;
    j["nodes"] = tree.nodes;
    Json edges = Json::array();
    for (const MergeEdge& e : tree.edges) {
        Json je;
        je["child"] = e.child;
        je["parent"] = e.parent;
        je["cl_point"] = cl_json(e.point);
        edges.push_back(je);
    }
    j["edges"] = edges;
    j["roots"] = tree.roots;
    Json merges = Json::array();
    for (const ClPoint& c : tree.merges) merges.push_back(cl_json(c));
    j["merges"] = merges;
    return j.dump(2) + "\n";
}

MergeTree parse_merge_tree(const std::string& text)
{
    const Json j = parse_json(text, "merge tree");
    check_version(j, "merge tree");
    MergeTree t;
    try {
        t.nodes = require(j, "nodes", "merge tree").get<std::vector<int>>();
        t.roots = require(j, "roots", "merge tree").get<std::vector<int>>();
        for (const Json& e : require(j, "edges", "merge tree"))
            t.edges.push_back({require(e, "child", "merge tree.edges").get<int>(),
                               require(e, "parent", "merge tree.edges").get<int>(),
                               cl_from_json(require(e, "cl_point", "merge tree.edges"), "merge tree.edges")});
        for (const Json& c : require(j, "merges", "merge tree"))
            t.merges.push_back(cl_from_json(c, "merge tree.merges"));
    } catch (const Json::type_error& e) {
        throw ParseError(std::string("merge tree: ") + e.what());
    }
    return t;
}

void save_merge_tree(const std::string& path, const MergeTree& tree)
{
    write_text(path, merge_tree_to_json(tree));
}

std::string report_to_json(const std::vector<Verdict>& verdicts)
{
    Json j;
    j["format_version"] = kFormatVersion;
    j["all_passed"] = all_passed(verdicts);
    Json list = Json::array();
    for (const Verdict& v : verdicts) {
        Json jv;
        jv["name"] = v.name;
        jv["anchor"] = v.anchor;
        jv["status"] = to_string(v.status);
        Json m = Json::array();
        for (const auto& [k, x] : v.measured) m.push_back(Json::array({k, number(x)}));
        jv["measured"] = m;
        Json t = Json::array();
        for (const auto& [k, x] : v.thresholds) t.push_back(Json::array({k, number(x)}));
        jv["thresholds"] = t;
        jv["note"] = v.note;
        list.push_back(jv);
    }
    j["verdicts"] = list;
    return j.dump(2) + "\n";
}

std::vector<Verdict> parse_report(const std::string& text)
{
    const Json j = parse_json(text, "report");
    check_version(j, "report");
    std::vector<Verdict> out;
    auto pairs = [](const Json& arr, const std::string& context) {
        std::vector<std::pair<std::string, double>> p;
        if (!arr.is_array()) throw ParseError(context + ": expected an array");
        for (const Json& e : arr) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_string())
                throw ParseError(context + ": expected [name, value]");
            p.emplace_back(e[0].get<std::string>(), as_number(e[1], context));
        }
        return p;
    };
    for (const Json& jv : require(j, "verdicts", "report")) {
        Verdict v;
        v.name = require(jv, "name", "report.verdicts").get<std::string>();
        v.anchor = require(jv, "anchor", "report.verdicts").get<std::string>();
        v.status = parse_status(require(jv, "status", "report.verdicts").get<std::string>());
        v.measured = pairs(require(jv, "measured", "report.verdicts"), "report.verdicts.measured");
        v.thresholds = pairs(require(jv, "thresholds", "report.verdicts"), "report.verdicts.thresholds");
        v.note = require(jv, "note", "report.verdicts").get<std::string>();
        out.push_back(std::move(v));
    }
    return out;
}

void save_report(const std::string& path, const std::vector<Verdict>& verdicts)
{
    write_text(path, report_to_json(verdicts));
}

std::string verdict_line(const Verdict& v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-28s %-11s", v.name.c_str(), to_string(v.status).c_str());
    std::string out = buf;
    auto add = [&](const auto& pairs) {
        for (const auto& [k, x] : pairs) {
            std::snprintf(buf, sizeof buf, " %s=%.4g", k.c_str(), x);
            out += buf;
        }
    };
    add(v.measured);
    if (!v.thresholds.empty()) {
        out += " |";
        add(v.thresholds);
    }
    if (!v.note.empty()) out += " (" + v.note + ")";
    return out;
}

void validate(const RenderSpec& spec)
{
    if (spec.canvas < 16) throw ValidationError("render canvas must be at least 16 pixels");
    double prev = 0.0;
    for (double c : spec.levels) {
        if (!(c > prev && c < 1.0)) throw ValidationError("render levels must increase strictly inside (0, 1)");
        prev = c;
    }
}

namespace {

class SvgWriter {
public:
    SvgWriter(const BoundingBox& box, int canvas) : lo_(box.lo), hi_(box.hi)
    {
        const double w = hi_.x - lo_.x;
        const double hgt = hi_.y - lo_.y;
        const double pad = 0.04 * std::max(w, hgt);
        lo_ = lo_ - Vec2{pad, pad};
        hi_ = hi_ + Vec2{pad, pad};
        scale_ = canvas / std::max(hi_.x - lo_.x, hi_.y - lo_.y);
        width_ = scale_ * (hi_.x - lo_.x);
        height_ = scale_ * (hi_.y - lo_.y);
        out_ += "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
        out_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt4(width_) +
                "\" height=\"" + fmt4(height_) + "\" viewBox=\"0 0 " + fmt4(width_) + " " + fmt4(height_) + "\">\n";
        out_ += "<rect x=\"0\" y=\"0\" width=\"" + fmt4(width_) + "\" height=\"" + fmt4(height_) +
                "\" fill=\"#ffffff\"/>\n";
    }

    void open_group(const std::string& id, const StrokeStyle& s, bool filled = false)
    {
        out_ += "<g id=\"" + id + "\" stroke=\"" + s.color + "\" stroke-width=\"" + fmt4(s.width) + "\" fill=\"" +
                (filled ? s.color : std::string("none")) + "\" stroke-linejoin=\"round\">\n";
    }
    void close_group() { out_ += "</g>\n"; }

    void path(const std::vector<Vec2>& pts, bool closed)
    {
        if (pts.size() < 2) return;
        std::string d;
        for (size_t k = 0; k < pts.size(); ++k) {
            const Vec2 p = map(pts[k]);
            d += (k == 0 ? "M" : " L") + fmt4(p.x) + " " + fmt4(p.y);
        }
        if (closed) d += " Z";
        out_ += "<path d=\"" + d + "\"/>\n";
    }

    void circle(Vec2 c, double r_px)
    {
        const Vec2 p = map(c);
        out_ += "<circle cx=\"" + fmt4(p.x) + "\" cy=\"" + fmt4(p.y) + "\" r=\"" + fmt4(r_px) + "\"/>\n";
    }

    std::string finish() { return out_ + "</svg>\n"; }

private:
    Vec2 map(Vec2 x) const { return {scale_ * (x.x - lo_.x), scale_ * (hi_.y - x.y)}; }

    Vec2 lo_, hi_;
    double scale_ = 1.0, width_ = 0.0, height_ = 0.0;
    std::string out_;
};

std::vector<Vec2> outline(const ConvexBody& body)
{
    if (auto p = body.as<PolygonShape>()) return p->vertices;
    return boundary_samples(body, 512);
}

}  // namespace

std::string render_svg(const ScalarField& field, const std::vector<Streamline>& lines,
                       const MergeTree& tree, const RenderSpec& spec)
{
    validate(spec);
    const Grid& g = *field.grid;
    SvgWriter svg(bounding_box(g.ring.outer), spec.canvas);

    svg.open_group("boundary", spec.boundary);
    svg.path(outline(g.ring.outer), true);
    svg.close_group();

    const ConvexBody& inner = g.ring.inner;
    if (auto p = inner.as<PointShape>()) {
        svg.open_group("gamma", spec.gamma, true);
        svg.circle(p->center, 2.0 * spec.gamma.width);
    } else if (auto s = inner.as<SegmentShape>()) {
        svg.open_group("gamma", spec.gamma);
        svg.path({s->a, s->b}, false);
    } else {
        svg.open_group("gamma", spec.gamma);
        svg.path(outline(inner), true);
    }
    svg.close_group();

    svg.open_group("level-curves", spec.level_curve);
    for (double c : spec.levels) {
        LevelCurve curve;
        try {
            curve = level_curve(field, c);
        } catch (const EmptyLevel&) {
            continue;
        }
        for (const Polyline& loop : curve.loops) svg.path(loop.vertices, true);
    }
    svg.close_group();

    svg.open_group("streamlines", spec.streamline);
    for (const Streamline& l : lines) svg.path(l.vertices, false);
    svg.close_group();

    svg.open_group("cl-points", spec.cl_point, true);
    for (const MergeEdge& e : tree.edges) svg.circle(e.point.location, spec.cl_radius);
    svg.close_group();

    return svg.finish();
}

void save_svg(const std::string& path, const ScalarField& field, const std::vector<Streamline>& lines,
              const MergeTree& tree, const RenderSpec& spec)
{
    write_text(path, render_svg(field, lines, tree, spec));
}

}  // namespace ringflow
