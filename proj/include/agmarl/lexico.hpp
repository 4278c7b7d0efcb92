#pragma once

#include <agmarl/agent.hpp>

#include <array>
#include <map>
#include <stdexcept>
#include <vector>

namespace agmarl {

// Buckets of L_t; boundary values belong to the upper regime.
//   Low < 0.25 <= Medium < 0.5 <= High < 0.75 <= Extreme
enum class StressRegime { Low, Medium, High, Extreme };

const char* to_string(StressRegime r);

/// Throws std::invalid_argument when stress is outside [0,1].
StressRegime regime_of(double stress);

using ObjectiveOrder = std::array<Objective, 3>;

// Objective priority sequence O_t per regime; each value is a permutation of
// {FT, UTIL, COST}.
struct OrderingTable {
    ObjectiveOrder low, medium, high, extreme;

    const ObjectiveOrder& for_regime(StressRegime r) const;
};

/// Low/Medium -> [UTIL, COST, FT]; High/Extreme -> [FT, COST, UTIL].
OrderingTable default_ordering_table();

struct SelectionConfig {
    double delta_lex = 0.05;  // in [0,1)
    OrderingTable ordering = default_ordering_table();
};

struct NoFeasibleNode : std::runtime_error {
    NoFeasibleNode() : std::runtime_error("no feasible node") {}
};

// Survivor sets of the three filtering stages plus the winner; stages[0] is
// the input set. Node ids ascend within each stage.
struct LexTrace {
    std::array<std::vector<int>, 4> stages;
    int winner = -1;
};

/// Stress-aware lexicographic filtering: per stage keeps candidates within
/// (1 - delta_lex) of the stage maximum for the regime's k-th objective;
/// remaining ties break on the lowest node id.
LexTrace lex_select_trace(const std::map<int, ActionScores>& candidates, double stress,
                          const SelectionConfig& cfg);

/// Winner only; throws NoFeasibleNode on an empty candidate set.
int lex_select(const std::map<int, ActionScores>& candidates, double stress,
               const SelectionConfig& cfg);

}  // namespace agmarl
