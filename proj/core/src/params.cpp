#include "kdvduo/params.hpp"

#include <sstream>

namespace kdvduo {

ValidatedParams validate_params(const SystemParams& p) {
    auto fail = [&](const char* what, double value) {
        std::ostringstream os;
        os << "invalid parameters: " << what << " (value " << value << ")";
        throw InvalidParams(os.str());
    };
    if (!(p.b > 0.0)) fail("b > 0 violated", p.b);
    if (!(p.c > 0.0)) fail("c > 0 violated", p.c);
    const double margin = 1.0 - p.a * p.a * p.b;
    if (!(margin > 0.0)) fail("1 - a^2 b > 0 violated", margin);
    return ValidatedParams(p);
}

}  // namespace kdvduo
