#pragma once

// Exhaustive reference computations used to pin expected values: shortest
// dual paths by full simple-path enumeration (exponential; small inputs only).

#include <climits>
#include <functional>

#include "tangle/dual.hpp"

namespace oracle {

inline int min_cost_path(const tangle::DualGraph& g, const std::vector<int>& sources,
                         const std::vector<int>& targets) {
    int n = int(g.adj.size());
    std::vector<char> vis(n, 0), is_target(n, 0);
    for (int t : targets) is_target[t] = 1;
    int best = INT_MAX;
    std::function<void(int, int)> dfs = [&](int u, int c) {
        if (c >= best) return;
        if (is_target[u]) {
            best = c;
            return;
        }
        vis[u] = 1;
        for (const auto& arc : g.adj[u])
            if (!vis[arc.to]) dfs(arc.to, c + arc.cost);
        vis[u] = 0;
    };
    for (int s : sources) dfs(s, 0);
    return best;
}

inline int oracle_min_vert(const tangle::Arrangement& a) {
    tangle::DualGraph g = tangle::build_dual(a);
    return min_cost_path(g, tangle::detail::terminal_nodes_on(a, g, tangle::Side::Hp),
                         tangle::detail::terminal_nodes_on(a, g, tangle::Side::Hm));
}

inline int oracle_min_ij(const tangle::Arrangement& a, int i, int j) {
    tangle::DualGraph g = tangle::build_dual(a);
    return min_cost_path(g, {g.terminal_node(a.region_terminal[i])},
                         {g.terminal_node(a.region_terminal[j])});
}

inline int oracle_min_ray(const tangle::Arrangement& a) {
    int o = a.d.find_o();
    tangle::DualGraph g = tangle::build_dual(a);
    std::vector<int> targets;
    for (int t = 0; t < int(a.terminals.size()); ++t) targets.push_back(g.terminal_node(t));
    return min_cost_path(g, a.faces_at(o), targets);
}

}  // namespace oracle
