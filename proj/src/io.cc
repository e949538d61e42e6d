#include "vershik/io.hh"

#include <fstream>
#include <map>
#include <sstream>

#include "vershik/builtins.hh"

namespace vershik {

namespace {

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

struct LineReader {
    std::istringstream in;
    std::string file;
    int lineno = 0;

    LineReader(const std::string& text, std::string f) : in(text), file(std::move(f)) {}

    bool next(std::vector<std::string>& out) {
        std::string line;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            out = tokens(line);
            if (!out.empty()) return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(file, lineno, what); }
};

int to_int(const LineReader& r, const std::string& s) {
    try {
        return std::stoi(s);
    } catch (const std::exception&) {
        r.fail("expected an integer, got '" + s + "'");
    }
}

}  // namespace

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ParseError(path, 0, "cannot open file for writing");
    out << text;
}

// --- diagrams -----------------------------------------------------------

std::string emit_diagram(const BratteliDiagram& b) {
    std::ostringstream out;
    out << "bd\n";
    out << "levels " << b.depth() << "\n";
    for (std::size_t n = 0; n < b.vertex_levels.size(); ++n) {
        out << "level " << n;
        for (const auto& v : b.vertex_levels[n]) out << ' ' << v;
        out << "\n";
    }
    for (Level n = 1; n <= b.depth(); ++n) {
        const OrderedDiagram& d = b.level(n);
        for (const auto& e : d.edges)
            out << "edge " << n << ' ' << d.sources[e.source] << ' ' << d.ranges[e.range] << ' '
                << e.order_index << "\n";
    }
    if (b.stationary())
        out << "extension stationary " << b.stationary_period << "\n";
    return out.str();
}

BratteliDiagram parse_diagram(const std::string& text, const std::string& filename) {
    LineReader r(text, filename);
    std::vector<std::string> t;
    if (!r.next(t) || t[0] != "bd") r.fail("expected 'bd' header");
    BratteliDiagram b;
    int levels = -1;
    while (r.next(t)) {
        if (t[0] == "levels") {
            levels = to_int(r, t.at(1));
            b.vertex_levels.assign(static_cast<std::size_t>(levels) + 1, {});
        } else if (t[0] == "level") {
            int n = to_int(r, t.at(1));
            if (levels < 0 || n < 0 || n > levels) r.fail("level out of range");
            b.vertex_levels[static_cast<std::size_t>(n)] =
                std::vector<std::string>(t.begin() + 2, t.end());
        } else if (t[0] == "edge") {
            if (b.edge_levels.empty()) {
                for (int n = 1; n <= levels; ++n) {
                    OrderedDiagram d;
                    d.sources = b.vertex_levels[static_cast<std::size_t>(n) - 1];
                    d.ranges = b.vertex_levels[static_cast<std::size_t>(n)];
                    b.edge_levels.push_back(std::move(d));
                }
            }
            int n = to_int(r, t.at(1));
            if (n < 1 || n > levels) r.fail("edge level out of range");
            OrderedDiagram& d = b.edge_levels[static_cast<std::size_t>(n) - 1];
            auto src = std::find(d.sources.begin(), d.sources.end(), t.at(2));
            auto rng = std::find(d.ranges.begin(), d.ranges.end(), t.at(3));
            if (src == d.sources.end()) r.fail("unknown source vertex " + t.at(2));
            if (rng == d.ranges.end()) r.fail("unknown range vertex " + t.at(3));
            d.edges.push_back({static_cast<VertexId>(src - d.sources.begin()),
                               static_cast<VertexId>(rng - d.ranges.begin()), to_int(r, t.at(4))});
        } else if (t[0] == "extension") {
            if (t.size() != 3 || t[1] != "stationary") r.fail("bad extension line");
            b.stationary_period = to_int(r, t.at(2));
        } else {
            r.fail("unknown directive '" + t[0] + "'");
        }
    }
    if (levels < 0) r.fail("missing 'levels'");
    if (b.edge_levels.empty() && levels > 0) r.fail("diagram has no edges");
    if (auto bad = validate(b); !bad.empty()) r.fail("invalid diagram: " + bad.front());
    return b;
}

// --- spaces --------------------------------------------------------------

namespace {

void emit_space(std::ostream& out, const SymbolicSpace& sp, Level depth) {
    out << "space depth " << depth << "\n";
    for (Level lv = 1; lv <= depth; ++lv) {
        out << "level " << lv;
        for (CellId c = 0; c < sp.cell_count(lv); ++c) {
            out << ' ' << sp.cell_name(lv, c);
            if (lv > 1) out << ':' << sp.cell_name(lv - 1, sp.parent(lv, c));
        }
        out << "\n";
    }
    for (int r = 0; r < sp.tail_rule_count(); ++r) {
        const TailRule& rule = sp.tail_rule(r);
        for (Level lv = 1; lv < depth; ++lv)
            for (CellId c = 0; c < sp.cell_count(lv); ++c) {
                CellId ch = rule.next(lv, c);
                if (ch != kNoCell)
                    out << "tail " << rule.name << ' ' << lv << ' ' << sp.cell_name(lv, c) << ' '
                        << sp.cell_name(lv + 1, ch) << "\n";
            }
    }
}

struct TailTable {
    std::string name;
    std::vector<std::map<CellId, CellId>> next;  // [lv-1]
};

SpacePtr parse_space(LineReader& r, std::vector<std::string>& t, Level& depth) {
    if (t.empty() || t[0] != "space" || t.size() != 3 || t[1] != "depth")
        r.fail("expected 'space depth <n>'");
    depth = to_int(r, t.at(2));
    SpaceBuilder sb;
    std::vector<std::map<std::string, CellId>> index;
    std::vector<TailTable> tails;
    Level expect = 1;
    while (true) {
        if (!r.next(t)) {
            t.clear();
            break;
        }
        if (t[0] == "level") {
            Level lv = to_int(r, t.at(1));
            if (lv != expect) r.fail("levels must appear in order");
            std::vector<std::string> names;
            std::vector<CellId> parents;
            std::map<std::string, CellId> ix;
            for (std::size_t i = 2; i < t.size(); ++i) {
                std::string cell = t[i], parent;
                if (lv > 1) {
                    auto colon = cell.rfind(':');
                    if (colon == std::string::npos) r.fail("missing parent for cell " + cell);
                    parent = cell.substr(colon + 1);
                    cell.resize(colon);
                    auto it = index.back().find(parent);
                    if (it == index.back().end()) r.fail("unknown parent " + parent);
                    parents.push_back(it->second);
                }
                ix.emplace(cell, static_cast<CellId>(names.size()));
                names.push_back(cell);
            }
            if (lv == 1)
                sb.root_level(names);
            else
                sb.level(names, parents);
            index.push_back(std::move(ix));
            ++expect;
        } else if (t[0] == "tail") {
            if (t.size() != 5) r.fail("bad tail line");
            Level lv = to_int(r, t.at(2));
            if (lv < 1 || lv >= expect) r.fail("tail level out of range");
            auto tt = std::find_if(tails.begin(), tails.end(),
                                   [&](const TailTable& x) { return x.name == t[1]; });
            if (tt == tails.end()) {
                tails.push_back({t[1], {}});
                tt = tails.end() - 1;
            }
            tt->next.resize(static_cast<std::size_t>(depth));
            auto ci = index[static_cast<std::size_t>(lv) - 1].find(t.at(3));
            auto chi = index[static_cast<std::size_t>(lv)].find(t.at(4));
            if (ci == index[static_cast<std::size_t>(lv) - 1].end()) r.fail("unknown cell " + t.at(3));
            if (chi == index[static_cast<std::size_t>(lv)].end()) r.fail("unknown child " + t.at(4));
            tt->next[static_cast<std::size_t>(lv) - 1][ci->second] = chi->second;
        } else {
            break;  // caller continues with t
        }
    }
    if (expect != depth + 1) r.fail("space block is missing levels");
    for (auto& tt : tails) {
        auto table = std::make_shared<std::vector<std::map<CellId, CellId>>>(std::move(tt.next));
        sb.tail_rule(tt.name, [table](Level lv, CellId c) {
            if (static_cast<std::size_t>(lv) > table->size()) return kNoCell;
            const auto& m = (*table)[static_cast<std::size_t>(lv) - 1];
            auto it = m.find(c);
            return it == m.end() ? kNoCell : it->second;
        });
    }
    return sb.build();
}

void emit_homeo_tables(std::ostream& out, const SymbolicSpace& sp, const PartialHomeo& f,
                       Level depth, const std::string& prefix) {
    for (Level lv = 1; lv <= depth; ++lv) {
        for (CellId c = 0; c < sp.cell_count(lv); ++c) {
            CellImage ci = f.image(lv, c);
            out << prefix << "map " << lv << ' ' << sp.cell_name(lv, c) << ' ';
            if (ci.is_resolved())
                out << sp.cell_name(lv, ci.cell);
            else
                out << (ci.kind == CellImageKind::Unresolved ? "?" : "!");
            out << "\n";
        }
        for (CellId c = 0; c < sp.cell_count(lv); ++c) {
            CellImage ci = f.preimage(lv, c);
            out << prefix << "inv " << lv << ' ' << sp.cell_name(lv, c) << ' ';
            if (ci.is_resolved())
                out << sp.cell_name(lv, ci.cell);
            else
                out << (ci.kind == CellImageKind::Unresolved ? "?" : "!");
            out << "\n";
        }
        ClopenSet dx = f.domain_exclusion(lv);
        out << prefix << "domx " << lv;
        for (CellId c : dx.cells) out << ' ' << sp.cell_name(lv, c);
        out << "\n";
        ClopenSet rx = f.range_exclusion(lv);
        out << prefix << "ranx " << lv;
        for (CellId c : rx.cells) out << ' ' << sp.cell_name(lv, c);
        out << "\n";
    }
}

CellImage parse_cell_image(LineReader& r, const SymbolicSpace& sp, Level lv, const std::string& s) {
    if (s == "?") return CellImage::unresolved();
    if (s == "!") return CellImage::outside();
    CellId c = sp.cell_index(lv, s);
    if (c == kNoCell) r.fail("unknown cell " + s);
    return CellImage::resolved(c);
}

}  // namespace

// --- systems --------------------------------------------------------------

std::string emit_system(const BratteliSystem& s, Level depth) {
    const SymbolicSpace& sp = *s.space;
    depth = std::min(depth, sp.depth_bound());
    std::ostringstream out;
    out << "sys\n";
    emit_space(out, sp, depth);
    emit_homeo_tables(out, sp, s.phi, depth, "");
    return out.str();
}

BratteliSystem parse_system(const std::string& text, const std::string& filename) {
    LineReader r(text, filename);
    std::vector<std::string> t;
    if (!r.next(t) || t[0] != "sys") r.fail("expected 'sys' header");
    if (!r.next(t)) r.fail("missing space block");
    Level depth = 0;
    SpacePtr space = parse_space(r, t, depth);
    const SymbolicSpace& sp = *space;
    auto table = std::make_shared<TableProvider>(depth);
    for (Level lv = 1; lv <= depth; ++lv) table->resize_level(lv, sp.cell_count(lv));
    while (!t.empty()) {
        if (t[0] == "map" || t[0] == "inv") {
            if (t.size() != 4) r.fail("bad map line");
            Level lv = to_int(r, t.at(1));
            CellId c = sp.cell_index(lv, t.at(2));
            if (c == kNoCell) r.fail("unknown cell " + t.at(2));
            CellImage ci = parse_cell_image(r, sp, lv, t.at(3));
            if (t[0] == "map")
                table->set_image(lv, c, ci);
            else
                table->set_preimage(lv, c, ci);
        } else if (t[0] == "domx" || t[0] == "ranx") {
            Level lv = to_int(r, t.at(1));
            ClopenSet s2{lv, {}};
            for (std::size_t i = 2; i < t.size(); ++i) {
                CellId c = sp.cell_index(lv, t[i]);
                if (c == kNoCell) r.fail("unknown cell " + t[i]);
                s2.cells.push_back(c);
            }
            std::sort(s2.cells.begin(), s2.cells.end());
            if (t[0] == "domx")
                table->set_domain_exclusion(lv, std::move(s2));
            else
                table->set_range_exclusion(lv, std::move(s2));
        } else {
            r.fail("unknown directive '" + t[0] + "'");
        }
        if (!r.next(t)) break;
    }
    BratteliSystem s;
    s.space = space;
    s.phi = PartialHomeo(space, table);
    for (Level lv = 1; lv <= depth; ++lv) {
        s.xmax.push_back(s.phi.domain_exclusion(lv));
        s.xmin.push_back(s.phi.range_exclusion(lv));
    }
    return s;
}

// --- nested sequences -------------------------------------------------------

std::string emit_nested(const NestedSequence& n, Level depth) {
    const SymbolicSpace& sp = *n.space;
    depth = std::min(depth, sp.depth_bound());
    std::ostringstream out;
    out << "ns\n";
    emit_space(out, sp, depth);
    out << "window " << n.window << "\n";
    out << "rule " << n.rule;
    if (!n.rule_param.empty()) out << ' ' << n.rule_param;
    out << "\n";
    for (int k = 1; k <= n.window; ++k)
        emit_homeo_tables(out, sp, n.map_at(k), depth, "n" + std::to_string(k) + " ");
    return out.str();
}

NestedSequence parse_nested(const std::string& text, const std::string& filename) {
    LineReader r(text, filename);
    std::vector<std::string> t;
    if (!r.next(t) || t[0] != "ns") r.fail("expected 'ns' header");
    if (!r.next(t)) r.fail("missing space block");
    Level depth = 0;
    SpacePtr space = parse_space(r, t, depth);
    const SymbolicSpace& sp = *space;
    int window = -1;
    std::string rule = "empty", rule_param;
    std::map<int, std::shared_ptr<TableProvider>> tables;
    auto table_for = [&](int k) {
        auto it = tables.find(k);
        if (it == tables.end()) {
            auto tp = std::make_shared<TableProvider>(depth);
            for (Level lv = 1; lv <= depth; ++lv) tp->resize_level(lv, sp.cell_count(lv));
            it = tables.emplace(k, std::move(tp)).first;
        }
        return it->second;
    };
    while (!t.empty()) {
        if (t[0] == "window") {
            window = to_int(r, t.at(1));
        } else if (t[0] == "rule") {
            rule = t.at(1);
            if (t.size() > 2) rule_param = t.at(2);
        } else if (t[0].size() > 1 && t[0][0] == 'n') {
            int k = to_int(r, t[0].substr(1));
            auto tp = table_for(k);
            if (t.at(1) == "map" || t.at(1) == "inv") {
                Level lv = to_int(r, t.at(2));
                CellId c = sp.cell_index(lv, t.at(3));
                if (c == kNoCell) r.fail("unknown cell " + t.at(3));
                CellImage ci = parse_cell_image(r, sp, lv, t.at(4));
                if (t.at(1) == "map")
                    tp->set_image(lv, c, ci);
                else
                    tp->set_preimage(lv, c, ci);
            } else if (t.at(1) == "domx" || t.at(1) == "ranx") {
                Level lv = to_int(r, t.at(2));
                ClopenSet s2{lv, {}};
                for (std::size_t i = 3; i < t.size(); ++i) {
                    CellId c = sp.cell_index(lv, t[i]);
                    if (c == kNoCell) r.fail("unknown cell " + t[i]);
                    s2.cells.push_back(c);
                }
                std::sort(s2.cells.begin(), s2.cells.end());
                if (t.at(1) == "domx")
                    tp->set_domain_exclusion(lv, std::move(s2));
                else
                    tp->set_range_exclusion(lv, std::move(s2));
            } else {
                r.fail("unknown nested directive '" + t.at(1) + "'");
            }
        } else {
            r.fail("unknown directive '" + t[0] + "'");
        }
        if (!r.next(t)) break;
    }
    if (window < 0) r.fail("missing 'window'");
    std::vector<PartialHomeo> maps;
    for (int k = 1; k <= window; ++k) {
        auto it = tables.find(k);
        if (it == tables.end()) r.fail("missing tables for map " + std::to_string(k));
        maps.push_back(PartialHomeo(space, it->second));
    }
    std::function<PartialHomeo(int)> extend;
    int cap = 0;
    if (rule == "odd-even-powers") {
        if (window < 2) r.fail("odd-even-powers needs maps 1 and 2");
        PartialHomeo p1 = maps[0], p2 = maps[1];
        extend = [p1, p2](int k) { return k % 2 == 1 ? power_homeo(p1, k) : power_homeo(p2, k / 2); };
        cap = 30;
    }
    // "power-phi1" is resolved inside make_nested; "dh-powers" round-trips
    // through the tabulated window plus odometer-power extension
    if (rule == "dh-powers") {
        SpacePtr keep = space;
        std::int64_t base = rule_param.empty() ? 0 : std::stoll(rule_param);
        extend = [keep, base](int k) {
            std::vector<std::int64_t> pts;
            for (int j = -k - 1; j <= 0; ++j)
                if (j != -k && j != -1) pts.push_back(base + j);
            return odometer_power(keep, k, std::move(pts));
        };
        cap = 78;
    }
    NestedSequence n = make_nested(space, std::move(maps), rule, extend, cap);
    n.rule_param = rule_param;
    if (tables.count(0)) n.map0 = PartialHomeo(space, tables.at(0));
    return n;
}

}  // namespace vershik
