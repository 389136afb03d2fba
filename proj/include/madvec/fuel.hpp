#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <string>

#include "madvec/errors.hpp"

namespace madvec {

/// Global step budget shared by every stream pull and search loop.
///
/// Semi-decidable searches (find a row outside a subspace, grow a window until
/// an intersection row appears, ...) are honest: they either succeed, or they
/// run out of fuel and raise FuelExhaustedError instead of silently guessing.
/// The budget is read once from the environment variable MADVEC_MAX_STEPS and
/// can be reset programmatically (tests use tiny budgets to exercise the
/// failure path).
class Fuel {
public:
    static constexpr std::uint64_t kDefaultBudget = 50'000'000;

    static void reset(std::uint64_t budget) {
        budget_ref().store(budget, std::memory_order_relaxed);
        used_ref().store(0, std::memory_order_relaxed);
    }

    static void reset_from_env() {
        std::uint64_t budget = kDefaultBudget;
        if (const char* env = std::getenv("MADVEC_MAX_STEPS")) {
            char* end = nullptr;
            unsigned long long v = std::strtoull(env, &end, 10);
            if (end != env && *end == '\0' && v > 0) budget = v;
        }
        reset(budget);
    }

    /// Consume one step; throws once the budget is gone.
    static void tick() {
        std::uint64_t u = used_ref().fetch_add(1, std::memory_order_relaxed) + 1;
        if (u > budget_ref().load(std::memory_order_relaxed))
            throw FuelExhaustedError(
                "step budget exhausted after " + std::to_string(u - 1) +
                " steps (raise MADVEC_MAX_STEPS to search deeper)");
    }

    static std::uint64_t used() { return used_ref().load(std::memory_order_relaxed); }
    static std::uint64_t budget() { return budget_ref().load(std::memory_order_relaxed); }

private:
    static std::atomic<std::uint64_t>& budget_ref() {
        static std::atomic<std::uint64_t> b{kDefaultBudget};
        return b;
    }
    static std::atomic<std::uint64_t>& used_ref() {
        static std::atomic<std::uint64_t> u{0};
        return u;
    }
};

}  // namespace madvec
