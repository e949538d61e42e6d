#include "vershik/builtins.hh"

#include <algorithm>

namespace vershik {

namespace {

std::uint64_t level_mask(Level lv) { return (std::uint64_t{1} << lv) - 1; }

}  // namespace

CellId dyadic_cell(std::int64_t v, Level lv) {
    return static_cast<CellId>(static_cast<std::uint64_t>(v) & level_mask(lv));
}

SpacePtr binary_space(Level depth) {
    if (depth < 1 || depth > 24) throw PreconditionError("binary_space: depth out of range");
    SpaceBuilder sb;
    std::vector<std::string> names;
    for (Level lv = 1; lv <= depth; ++lv) {
        std::size_t n = std::size_t{1} << lv;
        names.assign(n, {});
        std::vector<CellId> parents(n);
        for (std::size_t c = 0; c < n; ++c) {
            std::string s(static_cast<std::size_t>(lv), '0');
            for (Level i = 0; i < lv; ++i)
                if (c & (std::size_t{1} << i)) s[static_cast<std::size_t>(i)] = '1';
            names[c] = std::move(s);
            parents[c] = static_cast<CellId>(c & (n / 2 - 1));
        }
        if (lv == 1)
            sb.root_level(names);
        else
            sb.level(names, parents);
    }
    sb.tail_rule("zeros", [](Level, CellId c) { return c; });
    sb.tail_rule("ones", [](Level lv, CellId c) {
        return static_cast<CellId>(c + (std::uint64_t{1} << lv));
    });
    return sb.build();
}

Point dyadic_point(const SymbolicSpace& sp, std::int64_t v) {
    Level db = sp.depth_bound();
    int rule = sp.tail_rule_index(v >= 0 ? "zeros" : "ones");
    CellId deep = dyadic_cell(v, db);
    for (Level lv = 1; lv <= db; ++lv) {
        // shortest prefix the tail rule extends back to the deep cell
        CellId c = dyadic_cell(v, lv);
        CellId cur = c;
        for (Level at = lv; at < db; ++at) cur = sp.tail_rule(rule).next(at, cur);
        if (cur == deep) {
            Point p = sp.point_from_cell(lv, c, rule);
            return p;
        }
    }
    return sp.point_from_cell(db, deep, rule);
}

namespace {

class OdometerProvider : public CellMapProvider {
  public:
    explicit OdometerProvider(std::int64_t base) : base_(base) {}

    CellImage image(Level lv, CellId c) const override {
        if (c == dyadic_cell(base_, lv)) return CellImage::unresolved();
        return CellImage::resolved(static_cast<CellId>((c + 1) & level_mask(lv)));
    }
    CellImage preimage(Level lv, CellId c) const override {
        if (c == dyadic_cell(base_ + 1, lv)) return CellImage::unresolved();
        return CellImage::resolved(static_cast<CellId>((c - 1) & level_mask(lv)));
    }
    ClopenSet domain_exclusion(Level lv) const override {
        return ClopenSet{lv, {dyadic_cell(base_, lv)}};
    }
    ClopenSet range_exclusion(Level lv) const override {
        return ClopenSet{lv, {dyadic_cell(base_ + 1, lv)}};
    }

  private:
    std::int64_t base_;
};

class OdometerPowerProvider : public CellMapProvider {
  public:
    OdometerPowerProvider(int n, std::vector<std::int64_t> excluded)
        : n_(n), excluded_(std::move(excluded)) {}

    CellImage image(Level lv, CellId c) const override {
        return CellImage::resolved(
            static_cast<CellId>((c + static_cast<std::uint64_t>(n_)) & level_mask(lv)));
    }
    CellImage preimage(Level lv, CellId c) const override {
        return CellImage::resolved(
            static_cast<CellId>((c - static_cast<std::uint64_t>(n_)) & level_mask(lv)));
    }
    ClopenSet domain_exclusion(Level lv) const override { return cells_of(excluded_, 0, lv); }
    ClopenSet range_exclusion(Level lv) const override { return cells_of(excluded_, n_, lv); }

  private:
    static ClopenSet cells_of(const std::vector<std::int64_t>& pts, int shift, Level lv) {
        ClopenSet s{lv, {}};
        for (std::int64_t p : pts) s.cells.push_back(dyadic_cell(p + shift, lv));
        std::sort(s.cells.begin(), s.cells.end());
        s.cells.erase(std::unique(s.cells.begin(), s.cells.end()), s.cells.end());
        return s;
    }

    int n_;
    std::vector<std::int64_t> excluded_;
};

}  // namespace

BratteliSystem odometer_system(Level depth, std::int64_t base) {
    BratteliSystem s;
    s.space = binary_space(depth);
    auto prov = std::make_shared<OdometerProvider>(base);
    s.phi = PartialHomeo(s.space, prov);
    for (Level lv = 1; lv <= depth; ++lv) {
        s.xmax.push_back(prov->domain_exclusion(lv));
        s.xmin.push_back(prov->range_exclusion(lv));
    }
    return s;
}

PartialHomeo odometer_power(SpacePtr space, int n, std::vector<std::int64_t> excluded) {
    if (n < 1) throw PreconditionError("odometer_power: n must be positive");
    return PartialHomeo(space, std::make_shared<OdometerPowerProvider>(n, std::move(excluded)));
}

NestedSequence dh_nested(Level depth, std::int64_t base) {
    SpacePtr space = binary_space(depth);
    auto exclusions = [base](int n) {
        std::vector<std::int64_t> pts;
        if (n == 1) {
            pts = {base - 2, base - 1, base};
        } else if (n == 2) {
            pts = {base - 3, base};
        } else {
            for (int k = -n - 1; k <= 0; ++k)
                if (k != -n && k != -1) pts.push_back(base + k);
        }
        return pts;
    };
    std::vector<PartialHomeo> maps;
    maps.push_back(odometer_power(space, 1, exclusions(1)));
    maps.push_back(odometer_power(space, 2, exclusions(2)));
    SpacePtr keep = space;
    auto extend = [keep, exclusions](int n) { return odometer_power(keep, n, exclusions(n)); };
    NestedSequence n = make_nested(space, std::move(maps), "dh-powers", extend, 78);
    n.rule_param = std::to_string(base);
    return n;
}

// --- the double-sequence example ---------------------------------------------

namespace {

// level-lv cells: ids 2(m-1)+(i-1) for the singletons (1/m, i), m <= lv,
// then 2lv = row-1 tail, 2lv+1 = row-2 tail
bool ns_is_tail(Level lv, CellId c) { return c >= static_cast<CellId>(2 * lv); }
int ns_row(Level lv, CellId c) {
    return ns_is_tail(lv, c) ? static_cast<int>(c) - 2 * lv + 1 : static_cast<int>(c % 2) + 1;
}
int ns_col(CellId c) { return static_cast<int>(c / 2) + 1; }  // singletons only
CellId ns_singleton(int m, int i) { return static_cast<CellId>(2 * (m - 1) + (i - 1)); }
CellId ns_tail(Level lv, int i) { return static_cast<CellId>(2 * lv + (i - 1)); }

// Delegating provider that absorbs the materialization boundary: cells that
// stay unresolved at the deepest level join the exclusion sets there, and
// the chains are closed upward through parents so they stay nested. Points
// indistinguishable from the exclusion limits at full resolution are treated
// as outside the domain, which is what the approximation chains mean.
class BoundaryAbsorbProvider : public CellMapProvider {
  public:
    BoundaryAbsorbProvider(const SymbolicSpace& sp, std::shared_ptr<const CellMapProvider> inner)
        : inner_(std::move(inner)) {
        Level db = sp.depth_bound();
        auto widen = [&](bool forward) {
            std::vector<ClopenSet> chain;
            for (Level lv = 1; lv <= db; ++lv)
                chain.push_back(forward ? inner_->domain_exclusion(lv)
                                        : inner_->range_exclusion(lv));
            for (CellId c = 0; c < sp.cell_count(db); ++c) {
                CellImage ci = forward ? inner_->image(db, c) : inner_->preimage(db, c);
                if (ci.kind == CellImageKind::Unresolved)
                    chain[static_cast<std::size_t>(db) - 1].cells.push_back(c);
            }
            for (Level lv = db; lv >= 2; --lv)
                for (CellId c : chain[static_cast<std::size_t>(lv) - 1].cells)
                    chain[static_cast<std::size_t>(lv) - 2].cells.push_back(sp.parent(lv, c));
            for (auto& s : chain) {
                std::sort(s.cells.begin(), s.cells.end());
                s.cells.erase(std::unique(s.cells.begin(), s.cells.end()), s.cells.end());
            }
            return chain;
        };
        dex_ = widen(true);
        rex_ = widen(false);
    }

    CellImage image(Level lv, CellId c) const override { return inner_->image(lv, c); }
    CellImage preimage(Level lv, CellId c) const override { return inner_->preimage(lv, c); }
    ClopenSet domain_exclusion(Level lv) const override {
        return dex_.at(static_cast<std::size_t>(lv) - 1);
    }
    ClopenSet range_exclusion(Level lv) const override {
        return rex_.at(static_cast<std::size_t>(lv) - 1);
    }

  private:
    std::shared_ptr<const CellMapProvider> inner_;
    std::vector<ClopenSet> dex_, rex_;
};

PartialHomeo ns_homeo(SpacePtr space, FunctionProvider::MapFn fwd, FunctionProvider::MapFn bwd,
                      FunctionProvider::ExclFn dex, FunctionProvider::ExclFn rex) {
    auto inner = std::make_shared<FunctionProvider>(std::move(fwd), std::move(bwd), std::move(dex),
                                                    std::move(rex));
    auto wrapped = std::make_shared<BoundaryAbsorbProvider>(*space, std::move(inner));
    return PartialHomeo(space, std::move(wrapped));
}

}  // namespace

SpacePtr nonsemisat_space(Level depth) {
    if (depth < 2 || depth > 64) throw PreconditionError("nonsemisat_space: depth out of range");
    SpaceBuilder sb;
    auto name = [](Level lv, CellId c) -> std::string {
        if (ns_is_tail(lv, c)) return "t" + std::to_string(ns_row(lv, c));
        return "1/" + std::to_string(ns_col(c)) + "." + std::to_string(ns_row(lv, c));
    };
    for (Level lv = 1; lv <= depth; ++lv) {
        std::size_t n = static_cast<std::size_t>(2 * lv + 2);
        std::vector<std::string> names(n);
        std::vector<CellId> parents(n);
        for (CellId c = 0; c < n; ++c) {
            names[c] = name(lv, c);
            if (lv > 1) {
                if (!ns_is_tail(lv, c))
                    parents[c] = ns_col(c) <= lv - 1 ? c : ns_tail(lv - 1, ns_row(lv, c));
                else
                    parents[c] = ns_tail(lv - 1, ns_row(lv, c));
            }
        }
        if (lv == 1)
            sb.root_level(names);
        else
            sb.level(names, parents);
    }
    sb.tail_rule("const", [depth](Level lv, CellId c) {
        return ns_is_tail(lv, c) ? kNoCell : c;  // singletons persist unchanged
    });
    sb.tail_rule("lim1", [](Level lv, CellId c) {
        return c == ns_tail(lv, 1) ? ns_tail(lv + 1, 1) : kNoCell;
    });
    sb.tail_rule("lim2", [](Level lv, CellId c) {
        return c == ns_tail(lv, 2) ? ns_tail(lv + 1, 2) : kNoCell;
    });
    return sb.build();
}

Point nonsemisat_point(const SymbolicSpace& sp, int m, int i) {
    return sp.point_from_cell(std::max<Level>(m, 1), ns_singleton(m, i), sp.tail_rule_index("const"));
}

Point nonsemisat_limit(const SymbolicSpace& sp, int i) {
    return sp.point_from_cell(1, ns_tail(1, i), sp.tail_rule_index(i == 1 ? "lim1" : "lim2"));
}

BratteliSystem nonsemisat_bratteli(Level depth) {
    BratteliSystem s;
    s.space = nonsemisat_space(depth);
    auto fwd = [](Level lv, CellId c) -> CellImage {
        if (c == ns_tail(lv, 1)) return CellImage::resolved(ns_tail(lv, 2));
        if (c == ns_tail(lv, 2)) return CellImage::unresolved();
        int m = ns_col(c);
        if (ns_row(lv, c) == 1) return CellImage::resolved(static_cast<CellId>(c + 1));
        return m + 1 <= lv ? CellImage::resolved(ns_singleton(m + 1, 1)) : CellImage::unresolved();
    };
    auto bwd = [](Level lv, CellId c) -> CellImage {
        if (c == ns_tail(lv, 2)) return CellImage::resolved(ns_tail(lv, 1));
        if (c == ns_tail(lv, 1)) return CellImage::unresolved();
        int m = ns_col(c);
        if (ns_row(lv, c) == 2) return CellImage::resolved(static_cast<CellId>(c - 1));
        if (m == 1) return CellImage::outside();  // (1,1) is the isolated minimal point
        return CellImage::resolved(ns_singleton(m - 1, 2));
    };
    auto dex = +[](Level lv) { return ClopenSet{lv, {ns_tail(lv, 2)}}; };
    auto rex = +[](Level lv) { return ClopenSet{lv, {ns_singleton(1, 1), ns_tail(lv, 1)}}; };
    s.phi = ns_homeo(s.space, fwd, bwd, dex, rex);
    for (Level lv = 1; lv <= depth; ++lv) {
        s.xmax.push_back(s.phi.domain_exclusion(lv));
        s.xmin.push_back(s.phi.range_exclusion(lv));
    }
    return s;
}

NestedSequence nonsemisat_nested(Level depth) {
    SpacePtr space = nonsemisat_space(depth);
    // phi_1: interleaves the rows while walking toward the limits
    auto fwd1 = [](Level lv, CellId c) -> CellImage {
        if (ns_is_tail(lv, c)) return CellImage::unresolved();
        int m = ns_col(c), i = ns_row(lv, c);
        if (m % 2 == 1)
            return m + 1 <= lv ? CellImage::resolved(ns_singleton(m + 1, i)) : CellImage::unresolved();
        if (i == 1) return CellImage::resolved(ns_singleton(m - 1, 2));
        return m + 1 <= lv ? CellImage::resolved(ns_singleton(m + 1, 1)) : CellImage::unresolved();
    };
    auto bwd1 = [](Level lv, CellId c) -> CellImage {
        if (ns_is_tail(lv, c)) return CellImage::unresolved();
        int m = ns_col(c), i = ns_row(lv, c);
        if (m % 2 == 0) return CellImage::resolved(ns_singleton(m - 1, i));
        if (i == 2) return m + 1 <= lv ? CellImage::resolved(ns_singleton(m + 1, 1))
                                       : CellImage::unresolved();
        if (m == 1) return CellImage::outside();
        return CellImage::resolved(ns_singleton(m - 1, 2));
    };
    auto dex1 = +[](Level lv) { return ClopenSet{lv, {ns_tail(lv, 1), ns_tail(lv, 2)}}; };
    auto rex1 = +[](Level lv) {
        return ClopenSet{lv, {ns_singleton(1, 1), ns_tail(lv, 1), ns_tail(lv, 2)}};
    };
    // phi_2: phi_1 squared on the singletons plus (0,1) -> (0,2)
    auto fwd2 = [](Level lv, CellId c) -> CellImage {
        if (c == ns_tail(lv, 1)) return CellImage::resolved(ns_tail(lv, 2));
        if (c == ns_tail(lv, 2)) return CellImage::unresolved();
        int m = ns_col(c), i = ns_row(lv, c);
        if (i == 1) return CellImage::resolved(static_cast<CellId>(c + 1));
        return m + 2 <= lv ? CellImage::resolved(ns_singleton(m + 2, 1)) : CellImage::unresolved();
    };
    auto bwd2 = [](Level lv, CellId c) -> CellImage {
        if (c == ns_tail(lv, 2)) return CellImage::resolved(ns_tail(lv, 1));
        if (c == ns_tail(lv, 1)) return CellImage::unresolved();
        int m = ns_col(c), i = ns_row(lv, c);
        if (i == 2) return CellImage::resolved(static_cast<CellId>(c - 1));
        if (m <= 2) return CellImage::outside();
        return CellImage::resolved(ns_singleton(m - 2, 2));
    };
    auto dex2 = +[](Level lv) { return ClopenSet{lv, {ns_tail(lv, 2)}}; };
    auto rex2 = +[](Level lv) {
        return ClopenSet{lv, {ns_singleton(1, 1), ns_singleton(2, 1), ns_tail(lv, 1)}};
    };
    std::vector<PartialHomeo> maps;
    maps.push_back(ns_homeo(space, fwd1, bwd1, dex1, rex1));
    maps.push_back(ns_homeo(space, fwd2, bwd2, dex2, rex2));
    PartialHomeo phi1 = maps[0], phi2 = maps[1];
    auto extend = [phi1, phi2](int n) {
        return n % 2 == 1 ? power_homeo(phi1, n) : power_homeo(phi2, n / 2);
    };
    return make_nested(space, std::move(maps), "odd-even-powers", extend, 30);
}

BratteliDiagram dyadic_diagram(Level depth) {
    BratteliDiagram b;
    b.vertex_levels.assign(static_cast<std::size_t>(depth) + 1, {"v"});
    OrderedDiagram d;
    d.sources = {"v"};
    d.ranges = {"v"};
    d.edges = {{0, 0, 0}, {0, 0, 1}};
    b.edge_levels.assign(static_cast<std::size_t>(depth), d);
    b.stationary_period = 1;
    return b;
}

std::vector<std::string> builtin_names() {
    return {"dyadic_diagram",    "odometer_system",  "dh_nested",
            "nonsemisat_space",  "nonsemisat_nested", "nonsemisat_bratteli"};
}

BuiltinObject build_builtin(const std::string& name, Level depth, std::int64_t base) {
    BuiltinObject o;
    if (name == "dyadic_diagram") {
        o.kind = "diagram";
        o.diagram = dyadic_diagram(depth);
    } else if (name == "odometer_system") {
        o.kind = "system";
        o.system = odometer_system(depth, base);
        o.space = o.system->space;
    } else if (name == "dh_nested") {
        o.kind = "nested";
        o.nested = dh_nested(depth, base == -1 ? 0 : base);
        o.space = o.nested->space;
    } else if (name == "nonsemisat_space") {
        o.kind = "space";
        o.space = nonsemisat_space(depth);
    } else if (name == "nonsemisat_nested") {
        o.kind = "nested";
        o.nested = nonsemisat_nested(depth);
        o.space = o.nested->space;
    } else if (name == "nonsemisat_bratteli") {
        o.kind = "system";
        o.system = nonsemisat_bratteli(depth);
        o.space = o.system->space;
    } else {
        throw PreconditionError("unknown builtin: " + name);
    }
    return o;
}

}  // namespace vershik
