#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lpdp {

// Guidance-window placement: "none", "first:N", "mid:N", "last:N", or an
// explicit list of step indices.
struct WindowSpec {
    enum class Kind { None, First, Mid, Last, List };

    Kind kind = Kind::None;
    int count = 0;
    std::vector<int> indices;

    static WindowSpec parse(std::string_view text);
    static WindowSpec from_indices(std::vector<int> idx);

    // per-step guided flags for a rollout of the given length; throws when
    // the window does not fit in [0, total_steps)
    std::vector<bool> mask(int total_steps) const;

    std::string str() const;
};

}  // namespace lpdp
