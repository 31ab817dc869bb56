#pragma once

// The common product of both frontends: an LP system together with the
// identification of its decision inputs and output, plus size statistics.

#include <map>
#include <string>
#include <vector>

#include "wefc/lp.hpp"

namespace wefc {

struct WEFStats {
    int num_vars = 0;
    int num_constraints = 0;
    std::map<std::string, int> per_group;  // constraint count by group tag
};

struct WEFSystem {
    LPSystem lp;
    std::vector<VarId> x_vars;  // decision inputs, in declaration order
    VarId w_var = -1;
    WEFStats stats;

    void finalize_stats() {
        stats.num_vars = lp.num_vars();
        stats.num_constraints = static_cast<int>(lp.cons.size());
        stats.per_group.clear();
        for (const auto& c : lp.cons) {
            std::string g = c.label.substr(0, c.label.find(' '));
            ++stats.per_group[g];
        }
    }
};

}  // namespace wefc
