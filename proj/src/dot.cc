#include "vershik/dot.hh"

#include <sstream>

namespace vershik {

std::string to_dot(const BratteliDiagram& b) {
    std::ostringstream out;
    out << "digraph bratteli {\n  rankdir=TB;\n  node [shape=circle];\n";
    auto id = [](std::size_t lv, VertexId v) {
        return "L" + std::to_string(lv) + "_" + std::to_string(v);
    };
    for (std::size_t lv = 0; lv < b.vertex_levels.size(); ++lv) {
        out << "  { rank=same;";
        for (VertexId v = 0; v < b.vertex_levels[lv].size(); ++v)
            out << ' ' << id(lv, v) << " [label=\"" << b.vertex_levels[lv][v] << "\"];";
        out << " }\n";
    }
    for (Level n = 1; n <= b.depth(); ++n) {
        const OrderedDiagram& d = b.level(n);
        for (const auto& e : d.edges)
            out << "  " << id(static_cast<std::size_t>(n) - 1, e.source) << " -> "
                << id(static_cast<std::size_t>(n), e.range) << " [label=\"" << e.order_index
                << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace vershik
