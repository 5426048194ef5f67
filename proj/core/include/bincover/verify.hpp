#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bincover/distribution.hpp"

namespace bincover {

// One acceptance criterion outcome. `detail` is a single human-readable line
// with the measured quantities; `passed` is the verdict.
struct CriterionResult {
    int index = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceReport {
    bool quick = false;
    std::vector<CriterionResult> criteria;

    bool all_passed() const {
        for (const auto& c : criteria)
            if (!c.passed) return false;
        return true;
    }
};

// Named distribution battery used by the exactness criteria. Every entry's
// bin-level chain solves exactly at the default caps; the batch holds well
// over 60 distributions including 50 seeded complement-pair instances.
struct BatteryEntry {
    std::string name;
    DiscreteDistribution F;
};

std::vector<BatteryEntry> exact_battery();

// Runs the full acceptance battery. quick = true cuts Monte Carlo trial
// counts roughly tenfold and property-suite sizes to ~10^3 for smoke runs;
// the report is labeled accordingly. threads = 0 means hardware concurrency.
AcceptanceReport run_acceptance(bool quick, unsigned threads = 0);

} // namespace bincover
