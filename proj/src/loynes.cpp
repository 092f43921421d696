#include "parq/loynes.hpp"

namespace parq {

Policy dominating_policy(const Policy& policy) {
    switch (policy.kind) {
        case Policy::Kind::jpsw:
            return policy.p == 0 ? Policy::jsw(policy.servers) : Policy::phi(policy.servers, policy.p);
        case Policy::Kind::loss: return Policy::psi(policy.p);
        default: return policy;
    }
}

}  // namespace parq
