#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "optba/rng.hpp"

namespace optba {

// One point in the search space, positionally aligned with ParamSpace::domains().
using ParamVector = std::vector<std::int64_t>;

inline constexpr std::uint64_t kDefaultEnumerationLimit = 1'000'000;

// One named integer hyperparameter: the inclusive range [lower, upper] walked
// in multiples of step.
struct ParamDomain {
    std::string name;
    std::int64_t lower = 0;
    std::int64_t upper = 0;
    std::int64_t step = 1;

    std::uint64_t grid_size() const {
        const std::uint64_t span =
            static_cast<std::uint64_t>(upper) - static_cast<std::uint64_t>(lower);
        return span / static_cast<std::uint64_t>(step) + 1;
    }

    bool contains(std::int64_t value) const {
        if (value < lower || value > upper) return false;
        const std::uint64_t offset =
            static_cast<std::uint64_t>(value) - static_cast<std::uint64_t>(lower);
        return offset % static_cast<std::uint64_t>(step) == 0;
    }

    // Grid point at `index`, counted from lower.
    std::int64_t value_at(std::uint64_t index) const {
        return static_cast<std::int64_t>(static_cast<std::uint64_t>(lower) +
                                         index * static_cast<std::uint64_t>(step));
    }
};

// Ordered, validated collection of domains.
class ParamSpace {
public:
    ParamSpace() = default;
    explicit ParamSpace(std::vector<ParamDomain> domains);

    std::size_t dims() const { return domains_.size(); }
    const std::vector<ParamDomain>& domains() const { return domains_; }
    const ParamDomain& domain(std::size_t i) const { return domains_[i]; }
    std::vector<std::string> names() const;

    // Product of per-domain grid sizes; throws SpaceTooLarge on u64 overflow.
    std::uint64_t cardinality() const;

    // True when every domain holds a single grid point.
    bool single_point() const;

    bool valid_point(const ParamVector& v) const;
    void require_valid(const ParamVector& v) const;

private:
    std::vector<ParamDomain> domains_;
};

// One independent uniform draw per coordinate over that domain's grid points.
ParamVector sample_uniform(const ParamSpace& space, Rng& rng);

// Uniform draw from the per-coordinate sets {center_i + k*step : |k| <= ngh}
// intersected with the domain (out-of-range points are excluded, not clamped),
// resampled until at least one coordinate differs from the center. Throws
// NeighborhoodEmpty when no coordinate can move (cardinality-1 spaces).
ParamVector neighbor(const ParamSpace& space, const ParamVector& center, std::int64_t ngh,
                     Rng& rng);

// Every grid point exactly once, lexicographic in coordinate order (last
// coordinate fastest). Throws SpaceTooLarge beyond `limit`.
std::vector<ParamVector> enumerate_grid(const ParamSpace& space,
                                        std::uint64_t limit = kDefaultEnumerationLimit);

} // namespace optba
