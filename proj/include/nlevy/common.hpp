#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace nlevy {

/// Invalid experiment configuration (bad schema, empty interval, alpha out of
/// range, ...). The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical contract was violated at run time (CFL bound, domain coverage,
/// unreachable tolerance, ...). The CLI maps this to exit code 3.
class NumericalContractError : public std::runtime_error {
public:
    explicit NumericalContractError(const std::string& what)
        : std::runtime_error(what) {}
};

class CflError : public NumericalContractError {
public:
    explicit CflError(const std::string& what) : NumericalContractError(what) {}
};

class CoverageError : public NumericalContractError {
public:
    explicit CoverageError(const std::string& what)
        : NumericalContractError(what) {}
};

class ToleranceError : public NumericalContractError {
public:
    explicit ToleranceError(const std::string& what)
        : NumericalContractError(what) {}
};

/// Full-precision decimal rendering used by every CSV/JSON emitter, so that
/// outputs are byte-comparable across reruns.
inline std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// FNV-1a over a byte string; used for config digests.
inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace nlevy
