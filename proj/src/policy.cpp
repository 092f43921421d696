#include <sstream>
#include <vector>

#include "parq/maps.hpp"

namespace parq {

Policy Policy::jsw(int s) {
    if (s < 1) throw std::invalid_argument("jsw: S must be >= 1");
    return {Kind::jsw, s, 0};
}

Policy Policy::jpsw(int s, int p) {
    if (s < 1) throw std::invalid_argument("jpsw: S must be >= 1");
    if (p < 0 || p > s - 1) throw std::invalid_argument("jpsw: p must lie in [0, S-1]");
    return {Kind::jpsw, s, p};
}

Policy Policy::loss(int p) {
    if (p < 1) throw std::invalid_argument("loss: p must be >= 1");
    return {Kind::loss, p, p};
}

Policy Policy::gamma(int p) {
    if (p < 1) throw std::invalid_argument("gamma: p must be >= 1");
    return {Kind::gamma, p, p};
}

Policy Policy::psi(int p) {
    if (p < 1) throw std::invalid_argument("psi: p must be >= 1");
    return {Kind::psi, p, p};
}

Policy Policy::phi(int s, int p) {
    if (s < 2 || p < 1 || p > s - 1) throw std::invalid_argument("phi: need 1 <= p <= S-1");
    return {Kind::phi, s, p};
}

bool Policy::is_monotone() const {
    switch (kind) {
        case Kind::jsw:
        case Kind::gamma:
        case Kind::psi:
        case Kind::phi: return true;
        case Kind::jpsw: return p == 0;
        case Kind::loss: return false;
    }
    return false;
}

std::string Policy::to_string() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::jsw: os << "jsw:" << servers; break;
        case Kind::jpsw: os << "jpsw:" << servers << ":" << p; break;
        case Kind::loss: os << "loss:" << p; break;
        case Kind::gamma: os << "gamma:" << p; break;
        case Kind::psi: os << "psi:" << p; break;
        case Kind::phi: os << "phi:" << servers << ":" << p; break;
    }
    return os.str();
}

Policy Policy::parse(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    auto number = [&](std::size_t i) {
        try {
            std::size_t used = 0;
            int v = std::stoi(parts.at(i), &used);
            if (used != parts[i].size()) throw std::invalid_argument("trailing text");
            return v;
        } catch (const std::exception&) {
            throw std::invalid_argument("policy '" + text + "': bad integer field");
        }
    };
    auto arity = [&](std::size_t n) {
        if (parts.size() != n + 1) throw std::invalid_argument("policy '" + text + "': wrong number of fields");
    };
    if (parts.empty()) throw std::invalid_argument("empty policy");
    const std::string& tag = parts[0];
    if (tag == "jsw") { arity(1); return jsw(number(1)); }
    if (tag == "jpsw") { arity(2); return jpsw(number(1), number(2)); }
    if (tag == "loss") { arity(1); return loss(number(1)); }
    if (tag == "gamma") { arity(1); return gamma(number(1)); }
    if (tag == "psi") { arity(1); return psi(number(1)); }
    if (tag == "phi") { arity(2); return phi(number(1), number(2)); }
    throw std::invalid_argument("unknown policy '" + tag + "'");
}

}  // namespace parq
