#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "ggamma/errors.hpp"

namespace ggamma {

// Exponents of the reduced inequality.  p is the outer exponent on the
// right-hand side, q and r the outer and inner exponents on the left.
struct ParamTriple {
    double p = 1, q = 1, r = 1;

    bool operator==(const ParamTriple&) const = default;
};

inline void validate(const ParamTriple& t)
{
    for (double x : {t.p, t.q, t.r})
        if (!(x > 0) || !std::isfinite(x)) {
            std::ostringstream os;
            os << "exponents must be positive and finite, got p=" << t.p << " q=" << t.q << " r=" << t.r;
            throw InadmissibleSpec(os.str());
        }
}

enum class Case { i = 1, ii, iii, iv, v, vi, vii };

inline const char* to_string(Case c)
{
    static constexpr std::array<const char*, 7> names = {"i", "ii", "iii", "iv", "v", "vi", "vii"};
    return names[static_cast<std::size_t>(c) - 1];
}

inline Case case_from_string(const std::string& s)
{
    for (int k = 1; k <= 7; ++k)
        if (s == to_string(static_cast<Case>(k))) return static_cast<Case>(k);
    throw ClassificationFailure("unknown case tag '" + s + "'");
}

// Indices of the B quantities whose sum characterises C in each case.
inline std::vector<int> required_B(Case c)
{
    switch (c) {
    case Case::i: return {1, 2};
    case Case::ii: return {1, 2, 3};
    case Case::iii: return {1, 2, 4};
    case Case::iv: return {1, 2, 3, 5};
    case Case::v: return {1, 2, 6, 7};
    case Case::vi: return {1, 2, 3, 7, 8};
    case Case::vii: return {1, 2, 3, 5, 7, 8};
    }
    return {};
}

// Discrete constants C_{i,j} summed in each case of the discretised theorem.
inline std::vector<std::string> required_C(Case c)
{
    switch (c) {
    case Case::i: return {"C11", "C12", "C31", "C41"};
    case Case::ii: return {"C12", "C13", "C32", "C41"};
    case Case::iii: return {"C11", "C12", "C33", "C41"};
    case Case::iv: return {"C12", "C13", "C34", "C41"};
    case Case::v: return {"C14", "C15", "C31", "C41"};
    case Case::vi: return {"C15", "C16", "C32", "C41"};
    case Case::vii: return {"C15", "C16", "C34", "C41"};
    }
    return {};
}

struct CaseId {
    Case tag = Case::i;
    std::vector<int> required;
    std::vector<Case> alternates;  // cases reachable by moving off a boundary p=r, r=1 or q=1

    bool operator==(const CaseId&) const = default;
};

inline constexpr double exponent_guard = 1e-6;

namespace detail {

inline Case strict_case(double p, double q, double r)
{
    if (q >= 1) {
        if (r >= 1) return p <= r ? Case::i : Case::iii;
        return p <= r ? Case::ii : Case::iv;
    }
    if (r >= 1) return Case::v;
    return p <= r ? Case::vi : Case::vii;
}

}  // namespace detail

inline CaseId classify_case(const ParamTriple& t)
{
    validate(t);
    if (t.p > t.q) {
        std::ostringstream os;
        os << "p = " << t.p << " > q = " << t.q << ": only the convex range p <= q is covered";
        throw OutOfScope(os.str());
    }
    CaseId id;
    id.tag = detail::strict_case(t.p, t.q, t.r);
    id.required = required_B(id.tag);
    if (t.q < 1 && 1 - t.q < exponent_guard) {
        std::ostringstream os;
        os << "q = " << t.q << " is within " << exponent_guard << " of 1; q/(1-q) is numerically degenerate";
        throw ExponentDegenerate(os.str());
    }
    if (t.r < 1 && 1 - t.r < exponent_guard) {
        std::ostringstream os;
        os << "r = " << t.r << " is within " << exponent_guard << " of 1; r/(1-r) is numerically degenerate";
        throw ExponentDegenerate(os.str());
    }
    // nudge each boundary quantity both ways to find the neighbouring cases
    const double eps = 1e-9;
    const bool on_pr = t.p == t.r, on_r1 = t.r == 1, on_q1 = t.q == 1;
    if (on_pr || on_r1 || on_q1) {
        for (double dr : {-eps, 0.0, eps})
            for (double dq : {-eps, 0.0, eps}) {
                if ((dr != 0 && !(on_pr || on_r1)) || (dq != 0 && !on_q1)) continue;
                const double r = t.r * (1 + dr), q = t.q * (1 + dq);
                if (t.p > q) continue;
                const Case c = detail::strict_case(t.p, q, r);
                if (c != id.tag && std::find(id.alternates.begin(), id.alternates.end(), c) == id.alternates.end())
                    id.alternates.push_back(c);
            }
        std::sort(id.alternates.begin(), id.alternates.end());
    }
    return id;
}

// Exponents of the original embedding between two generalised Gamma spaces.
struct OriginalExponents {
    double r1 = 1, q1 = 1, r2 = 1, q2 = 1;
    bool operator==(const OriginalExponents&) const = default;
};

inline ParamTriple reduce_exponents(const OriginalExponents& o)
{
    for (double x : {o.r1, o.q1, o.r2, o.q2})
        if (!(x > 0) || !std::isfinite(x)) throw InadmissibleSpec("original exponents must be positive");
    return {o.q1 / o.r1, o.q2 / o.r1, o.r2 / o.r1};
}

}  // namespace ggamma
