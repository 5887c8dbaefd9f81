#include "uavmd/error.hpp"

namespace uavmd {

int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::config:
    case ErrorKind::parameter:
        return 2;
    case ErrorKind::io:
        return 3;
    case ErrorKind::format:
        return 4;
    case ErrorKind::numerical:
    case ErrorKind::detection:
    case ErrorKind::estimation:
    case ErrorKind::unsupported:
        return 5;
    }
    return 1;
}

} // namespace uavmd
