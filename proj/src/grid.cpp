#include "ggbm/grid.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#include "ggbm/errors.hpp"

namespace ggbm {

void GridSpec::validate() const {
    if (!std::isfinite(min) || !std::isfinite(max) || !(min < max)) {
        throw InvalidParameter("grid needs finite min < max");
    }
    if (steps < 2) {
        throw InvalidParameter("grid needs at least 2 steps");
    }
}

std::vector<double> GridSpec::points() const {
    validate();
    std::vector<double> out(static_cast<std::size_t>(steps));
    const double h = (max - min) / (steps - 1);
    for (int i = 0; i < steps; ++i) {
        out[static_cast<std::size_t>(i)] = min + h * i;
    }
    out.back() = max;
    return out;
}

namespace {

template <class T>
T parse_number(std::string_view s) {
    T v{};
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw InvalidParameter("bad number in grid spec: '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

GridSpec GridSpec::parse(std::string_view text) {
    const auto a = text.find(':');
    const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
    if (a == std::string_view::npos || b == std::string_view::npos) {
        throw InvalidParameter("grid spec must look like min:max:steps");
    }
    GridSpec g{parse_number<double>(text.substr(0, a)), parse_number<double>(text.substr(a + 1, b - a - 1)),
               parse_number<int>(text.substr(b + 1))};
    g.validate();
    return g;
}

unsigned thread_budget() {
    if (const char* env = std::getenv("GGBM_THREADS")) {
        const std::string_view s(env);
        unsigned v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec == std::errc() && ptr == s.data() + s.size() && v > 0) {
            return v;
        }
        throw InvalidParameter("GGBM_THREADS must be a positive integer");
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace ggbm
