#include "optba/param_space.hpp"

#include <algorithm>
#include <limits>
#include <unordered_set>

#include "optba/errors.hpp"

namespace optba {

namespace {

void validate_domain(const ParamDomain& d, std::size_t index) {
    const std::string at = "space[" + std::to_string(index) + "]";
    if (d.name.empty()) {
        throw ConfigError(at + ": domain name must be non-empty");
    }
    if (d.lower > d.upper) {
        throw ConfigError(at + " ('" + d.name + "'): lower (" + std::to_string(d.lower) +
                          ") > upper (" + std::to_string(d.upper) + ")");
    }
    if (d.step < 1) {
        throw ConfigError(at + " ('" + d.name + "'): step must be >= 1");
    }
    const std::uint64_t span =
        static_cast<std::uint64_t>(d.upper) - static_cast<std::uint64_t>(d.lower);
    if (span % static_cast<std::uint64_t>(d.step) != 0) {
        throw ConfigError(at + " ('" + d.name + "'): (upper - lower) must be a multiple of step");
    }
}

} // namespace

ParamSpace::ParamSpace(std::vector<ParamDomain> domains) : domains_(std::move(domains)) {
    if (domains_.empty()) {
        throw ConfigError("space: at least one domain is required");
    }
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < domains_.size(); ++i) {
        validate_domain(domains_[i], i);
        if (!seen.insert(domains_[i].name).second) {
            throw ConfigError("space: duplicate domain name '" + domains_[i].name + "'");
        }
    }
}

std::vector<std::string> ParamSpace::names() const {
    std::vector<std::string> out;
    out.reserve(domains_.size());
    for (const auto& d : domains_) out.push_back(d.name);
    return out;
}

std::uint64_t ParamSpace::cardinality() const {
    std::uint64_t product = 1;
    for (const auto& d : domains_) {
        const std::uint64_t g = d.grid_size();
        if (product > std::numeric_limits<std::uint64_t>::max() / g) {
            throw SpaceTooLarge("space cardinality overflows 64 bits");
        }
        product *= g;
    }
    return product;
}

bool ParamSpace::single_point() const {
    for (const auto& d : domains_) {
        if (d.grid_size() > 1) return false;
    }
    return true;
}

bool ParamSpace::valid_point(const ParamVector& v) const {
    if (v.size() != domains_.size()) return false;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!domains_[i].contains(v[i])) return false;
    }
    return true;
}

void ParamSpace::require_valid(const ParamVector& v) const {
    if (v.size() != domains_.size()) {
        throw DimensionMismatch("param vector has " + std::to_string(v.size()) +
                                " entries; space has " + std::to_string(domains_.size()) +
                                " domains");
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!domains_[i].contains(v[i])) {
            throw ConfigError("value " + std::to_string(v[i]) + " is not a grid point of domain '" +
                              domains_[i].name + "'");
        }
    }
}

ParamVector sample_uniform(const ParamSpace& space, Rng& rng) {
    ParamVector out;
    out.reserve(space.dims());
    for (const auto& d : space.domains()) {
        out.push_back(d.value_at(rng.uniform_below(d.grid_size())));
    }
    return out;
}

ParamVector neighbor(const ParamSpace& space, const ParamVector& center, std::int64_t ngh,
                     Rng& rng) {
    space.require_valid(center);
    if (ngh < 1) {
        throw InvalidConfig("ngh must be >= 1");
    }
    const std::size_t dims = space.dims();
    // Admissible step offsets per coordinate, measured in grid steps.
    std::vector<std::int64_t> k_min(dims);
    std::vector<std::int64_t> k_max(dims);
    bool any_move = false;
    for (std::size_t i = 0; i < dims; ++i) {
        const auto& d = space.domain(i);
        const std::int64_t down = (center[i] - d.lower) / d.step;
        const std::int64_t up = (d.upper - center[i]) / d.step;
        k_min[i] = -std::min(ngh, down);
        k_max[i] = std::min(ngh, up);
        if (k_min[i] != 0 || k_max[i] != 0) any_move = true;
    }
    if (!any_move) {
        throw NeighborhoodEmpty("every coordinate's neighbourhood collapses to its center");
    }
    ParamVector out(dims);
    while (true) {
        bool moved = false;
        for (std::size_t i = 0; i < dims; ++i) {
            const std::uint64_t count = static_cast<std::uint64_t>(k_max[i] - k_min[i]) + 1;
            const std::int64_t k =
                k_min[i] + static_cast<std::int64_t>(rng.uniform_below(count));
            out[i] = center[i] + k * space.domain(i).step;
            moved |= (k != 0);
        }
        if (moved) return out;
    }
}

std::vector<ParamVector> enumerate_grid(const ParamSpace& space, std::uint64_t limit) {
    const std::uint64_t total = space.cardinality();
    if (total > limit) {
        throw SpaceTooLarge("space cardinality " + std::to_string(total) +
                            " exceeds enumeration limit " + std::to_string(limit));
    }
    std::vector<ParamVector> out;
    out.reserve(total);
    ParamVector current;
    current.reserve(space.dims());
    for (const auto& d : space.domains()) current.push_back(d.lower);
    out.push_back(current);
    while (out.size() < total) {
        std::size_t i = space.dims();
        while (i > 0) {
            --i;
            const auto& d = space.domain(i);
            if (current[i] <= d.upper - d.step) {
                current[i] += d.step;
                break;
            }
            current[i] = d.lower;
        }
        out.push_back(current);
    }
    return out;
}

} // namespace optba
