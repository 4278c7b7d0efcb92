#include <agmarl/lexico.hpp>

#include <algorithm>

namespace agmarl {

const char* to_string(StressRegime r) {
    switch (r) {
        case StressRegime::Low: return "Low";
        case StressRegime::Medium: return "Medium";
        case StressRegime::High: return "High";
        case StressRegime::Extreme: return "Extreme";
    }
    return "?";
}

StressRegime regime_of(double stress) {
    if (!(stress >= 0.0 && stress <= 1.0)) {
        throw std::invalid_argument("regime_of: stress outside [0,1]");
    }
    if (stress < 0.25) return StressRegime::Low;
    if (stress < 0.5) return StressRegime::Medium;
    if (stress < 0.75) return StressRegime::High;
    return StressRegime::Extreme;
}

const ObjectiveOrder& OrderingTable::for_regime(StressRegime r) const {
    switch (r) {
        case StressRegime::Low: return low;
        case StressRegime::Medium: return medium;
        case StressRegime::High: return high;
        case StressRegime::Extreme: return extreme;
    }
    throw std::logic_error("unknown regime");
}

OrderingTable default_ordering_table() {
    OrderingTable t;
    t.low = {kObjUtil, kObjCost, kObjFt};
    t.medium = {kObjUtil, kObjCost, kObjFt};
    t.high = {kObjFt, kObjCost, kObjUtil};
    t.extreme = {kObjFt, kObjCost, kObjUtil};
    return t;
}

LexTrace lex_select_trace(const std::map<int, ActionScores>& candidates, double stress,
                          const SelectionConfig& cfg) {
    if (candidates.empty()) {
        throw NoFeasibleNode();
    }
    const ObjectiveOrder& order = cfg.ordering.for_regime(regime_of(stress));

    LexTrace trace;
    std::vector<int> current;
    current.reserve(candidates.size());
    for (const auto& [id, scores] : candidates) {
        current.push_back(id);
    }
    trace.stages[0] = current;

    for (std::size_t k = 0; k < order.size(); ++k) {
        const Objective obj = order[k];
        double best = -1.0;
        for (int id : current) {
            best = std::max(best, candidates.at(id)[obj]);
        }
        const double cut = (1.0 - cfg.delta_lex) * best;
        std::vector<int> kept;
        kept.reserve(current.size());
        for (int id : current) {
            if (candidates.at(id)[obj] >= cut) kept.push_back(id);
        }
        current = std::move(kept);
        trace.stages[k + 1] = current;
    }
    trace.winner = current.front();  // ascending ids: lowest-index tie-break
    return trace;
}

int lex_select(const std::map<int, ActionScores>& candidates, double stress,
               const SelectionConfig& cfg) {
    return lex_select_trace(candidates, stress, cfg).winner;
}

}  // namespace agmarl
