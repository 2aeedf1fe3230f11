#include "lpdp/window.hpp"

#include <charconv>
#include <stdexcept>

namespace lpdp {

WindowSpec WindowSpec::parse(std::string_view text) {
    WindowSpec w;
    if (text == "none" || text.empty()) {
        w.kind = Kind::None;
        return w;
    }
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw std::invalid_argument("window spec '" + std::string(text) +
                                    "' (expected none|first:N|mid:N|last:N)");
    }
    const std::string_view head = text.substr(0, colon);
    const std::string_view num = text.substr(colon + 1);
    int n = 0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), n);
    if (ec != std::errc{} || ptr != num.data() + num.size() || n < 0) {
        throw std::invalid_argument("window spec '" + std::string(text) + "': bad count");
    }
    w.count = n;
    if (head == "first") {
        w.kind = Kind::First;
    } else if (head == "mid") {
        w.kind = Kind::Mid;
    } else if (head == "last") {
        w.kind = Kind::Last;
    } else {
        throw std::invalid_argument("window spec '" + std::string(text) +
                                    "': unknown placement '" + std::string(head) + "'");
    }
    return w;
}

WindowSpec WindowSpec::from_indices(std::vector<int> idx) {
    WindowSpec w;
    w.kind = Kind::List;
    w.indices = std::move(idx);
    return w;
}

std::vector<bool> WindowSpec::mask(int total_steps) const {
    if (total_steps < 0) throw std::invalid_argument("window mask: negative step count");
    std::vector<bool> m(static_cast<std::size_t>(total_steps), false);
    auto set_range = [&](int lo, int hi) {
        if (lo < 0 || hi > total_steps) {
            throw std::invalid_argument("window " + str() + " does not fit in " +
                                        std::to_string(total_steps) + " steps");
        }
        for (int i = lo; i < hi; ++i) m[static_cast<std::size_t>(i)] = true;
    };
    switch (kind) {
        case Kind::None:
            break;
        case Kind::First:
            set_range(0, count);
            break;
        case Kind::Mid:
            set_range((total_steps - count) / 2, (total_steps - count) / 2 + count);
            break;
        case Kind::Last:
            set_range(total_steps - count, total_steps);
            break;
        case Kind::List:
            for (int i : indices) {
                if (i < 0 || i >= total_steps) {
                    throw std::invalid_argument("window index " + std::to_string(i) +
                                                " outside [0, " + std::to_string(total_steps) +
                                                ")");
                }
                m[static_cast<std::size_t>(i)] = true;
            }
            break;
    }
    return m;
}

std::string WindowSpec::str() const {
    switch (kind) {
        case Kind::None: return "none";
        case Kind::First: return "first:" + std::to_string(count);
        case Kind::Mid: return "mid:" + std::to_string(count);
        case Kind::Last: return "last:" + std::to_string(count);
        case Kind::List: {
            std::string out = "[";
            for (std::size_t i = 0; i < indices.size(); ++i) {
                if (i) out += ",";
                out += std::to_string(indices[i]);
            }
            return out + "]";
        }
    }
    return "none";
}

}  // namespace lpdp
