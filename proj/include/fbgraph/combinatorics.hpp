#pragma once

// Sign vectors, the operators Phi_j^-/Phi_j^+/d_j acting on odd indices,
// the reduced configuration (a, p, J*) and pair-partition enumeration.
// Indices are 1-based throughout to match the usual notation for u_1..u_2q.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbgraph/errors.hpp"

namespace fbgraph {

inline constexpr int kMaxQ = 8;

using SignVector = std::vector<int>;
// std::nullopt plays the role of the STAR entry (coordinate removed).
using ExtendedVector = std::vector<std::optional<int>>;
inline constexpr std::nullopt_t STAR = std::nullopt;

enum class Op { minus, plus, del };
// sigma[k] acts on index 2k+1 (1-based odd indices 1, 3, ..., 2q-1).
using OperatorTuple = std::vector<Op>;

enum class Tau { none, del };

struct ReducedConfiguration {
    ExtendedVector alpha;
    std::vector<int> a;         // nonzero non-star entries of alpha, in order
    std::vector<int> positions; // their 1-based positions in alpha
    std::vector<int> p;         // indices i (1..I) with tau(s_i) = del
    std::vector<int> jstar;     // i with a_i + ... + a_I != 0
    std::vector<Tau> tau;
    int I() const { return static_cast<int>(a.size()); }
    int ell() const { return static_cast<int>(p.size()); }
};

using Block = std::vector<int>;
using PairPartition = std::vector<Block>;
using ThetaVector = std::vector<int>; // theta[i-1] for i = 1..I

namespace detail {

inline void check_q(int q) {
    require_domain(q >= 1, "q must be at least 1");
    require_resource(q <= kMaxQ, "q=" + std::to_string(q) + " exceeds the enumeration cap " + std::to_string(kMaxQ));
}

inline void check_sign_vector(const SignVector& eps) {
    require_structure(!eps.empty() && eps.size() % 2 == 0, "sign vector must have even positive length");
    int sum = 0;
    for (int e : eps) {
        require_structure(e == 1 || e == -1, "sign vector entries must be +1 or -1");
        sum += e;
    }
    require_structure(sum == 0, "sign vector must sum to zero");
}

} // namespace detail

inline std::string to_string(Op o) {
    switch (o) {
    case Op::minus: return "Phi-";
    case Op::plus: return "Phi+";
    case Op::del: return "del";
    }
    return "?";
}

inline Op parse_op(const std::string& s) {
    if (s == "Phi-" || s == "-") return Op::minus;
    if (s == "Phi+" || s == "+") return Op::plus;
    if (s == "del" || s == "d") return Op::del;
    throw StructuralError("unknown operator '" + s + "'");
}

inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

// All balanced sign vectors of length 2q, in lexicographic order (-1 < +1).
inline std::vector<SignVector> enumerate_A(int q) {
    detail::check_q(q);
    const int n = 2 * q;
    std::vector<SignVector> out;
    out.reserve(binomial(n, q));
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (std::popcount(mask) != q) continue;
        SignVector e(n);
        for (int i = 0; i < n; ++i) e[i] = (mask >> (n - 1 - i)) & 1u ? 1 : -1;
        out.push_back(std::move(e));
    }
    return out;
}

// All 3^q operator tuples.
inline std::vector<OperatorTuple> enumerate_Sigma(int q) {
    detail::check_q(q);
    std::vector<OperatorTuple> out;
    OperatorTuple cur(q, Op::minus);
    std::size_t total = 1;
    for (int i = 0; i < q; ++i) total *= 3;
    out.reserve(total);
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t c = code;
        for (int i = q - 1; i >= 0; --i) {
            cur[i] = static_cast<Op>(c % 3);
            c /= 3;
        }
        out.push_back(cur);
    }
    return out;
}

inline ExtendedVector to_extended(const SignVector& eps) {
    return ExtendedVector(eps.begin(), eps.end());
}

// Phi_j^- merges entry j into j-1 (or just removes it when j = 1);
// Phi_j^+ merges entry j into j+1 (or just removes it when j = 2q).
inline ExtendedVector apply_phi(const ExtendedVector& eps, int j, Op op) {
    const int n = static_cast<int>(eps.size());
    detail::require_structure(op != Op::del, "apply_phi takes Phi- or Phi+, not del");
    detail::require_structure(j >= 1 && j <= n, "operator index out of range");
    detail::require_structure(eps[j - 1].has_value(), "operator acts on an already removed entry");
    ExtendedVector out = eps;
    if (op == Op::minus) {
        if (j > 1) {
            detail::require_structure(eps[j - 2].has_value(), "Phi- needs a present left neighbour");
            *out[j - 2] += *eps[j - 1];
        } else {
            detail::require_structure(n < 2 || eps[1].has_value(), "Phi-_1 needs entry 2 present");
        }
    } else {
        if (j < n) {
            detail::require_structure(eps[j].has_value(), "Phi+ needs a present right neighbour");
            *out[j] += *eps[j - 1];
        } else {
            detail::require_structure(eps[n - 2].has_value(), "Phi+_2q needs entry 2q-1 present");
        }
    }
    out[j - 1] = STAR;
    return out;
}

// Applies the Phi operators of sigma at odd indices in increasing order.
inline ExtendedVector apply_sigma(const SignVector& eps, const OperatorTuple& sigma) {
    detail::check_sign_vector(eps);
    detail::require_structure(eps.size() == 2 * sigma.size(), "sigma length must be half the sign vector length");
    ExtendedVector alpha = to_extended(eps);
    for (std::size_t k = 0; k < sigma.size(); ++k)
        if (sigma[k] != Op::del) alpha = apply_phi(alpha, static_cast<int>(2 * k + 1), sigma[k]);
    return alpha;
}

inline ReducedConfiguration reduce(const SignVector& eps, const OperatorTuple& sigma) {
    ReducedConfiguration r;
    r.alpha = apply_sigma(eps, sigma);
    for (std::size_t j = 0; j < r.alpha.size(); ++j) {
        if (!r.alpha[j].has_value() || *r.alpha[j] == 0) continue;
        r.a.push_back(*r.alpha[j]);
        r.positions.push_back(static_cast<int>(j + 1));
        const bool derived = j % 2 == 0 && sigma[j / 2] == Op::del;
        r.tau.push_back(derived ? Tau::del : Tau::none);
        if (derived) r.p.push_back(static_cast<int>(r.a.size()));
    }
    int tail = 0;
    for (int i = r.I(); i >= 1; --i) {
        tail += r.a[i - 1];
        if (tail != 0) r.jstar.push_back(i);
    }
    std::reverse(r.jstar.begin(), r.jstar.end());
    return r;
}

// All partitions of `set` into blocks of size 1 or 2 (involutions).
inline std::vector<PairPartition> partitions_p2(const std::vector<int>& set) {
    std::vector<int> s = set;
    std::sort(s.begin(), s.end());
    detail::require_structure(std::adjacent_find(s.begin(), s.end()) == s.end(), "partition set has duplicates");
    std::vector<PairPartition> out;
    PairPartition cur;
    std::vector<bool> used(s.size(), false);
    auto rec = [&](auto&& self) -> void {
        std::size_t first = 0;
        while (first < s.size() && used[first]) ++first;
        if (first == s.size()) {
            out.push_back(cur);
            return;
        }
        used[first] = true;
        cur.push_back({s[first]});
        self(self);
        cur.pop_back();
        for (std::size_t k = first + 1; k < s.size(); ++k) {
            if (used[k]) continue;
            used[k] = true;
            cur.push_back({s[first], s[k]});
            self(self);
            cur.pop_back();
            used[k] = false;
        }
        used[first] = false;
    };
    rec(rec);
    return out;
}

inline bool is_singleton_in(const PairPartition& P, int i) {
    for (const auto& b : P)
        if (b.size() == 1 && b[0] == i) return true;
    return false;
}

// Theta(P): theta_i = 0 off singletons, +1 at i = 1, -1 at i = I, +-1 for interior singletons.
inline std::vector<ThetaVector> theta_set(const PairPartition& P, int I) {
    detail::require_domain(I >= 0, "I must be nonnegative");
    std::vector<std::vector<int>> choices(static_cast<std::size_t>(I), std::vector<int>{0});
    for (const auto& b : P) {
        detail::require_structure(!b.empty() && b.size() <= 2, "blocks must have size 1 or 2");
        for (int i : b) detail::require_structure(i >= 1 && i <= I, "block index outside 1..I");
        if (b.size() != 1) continue;
        const int i = b[0];
        if (i == 1 && i == I) choices[0] = {};
        else if (i == 1) choices[0] = {1};
        else if (i == I) choices[I - 1] = {-1};
        else choices[i - 1] = {-1, 1};
    }
    std::vector<ThetaVector> out{ThetaVector{}};
    for (const auto& c : choices) {
        std::vector<ThetaVector> next;
        for (const auto& t : out)
            for (int v : c) {
                auto u = t;
                u.push_back(v);
                next.push_back(std::move(u));
            }
        out = std::move(next);
    }
    return out;
}

inline bool theta_valid(const PairPartition& P, int I, const ThetaVector& theta) {
    if (static_cast<int>(theta.size()) != I) return false;
    for (const auto& t : theta_set(P, I))
        if (t == theta) return true;
    return false;
}

// ---- JSON -----------------------------------------------------------------

inline nlohmann::json extended_to_json(const ExtendedVector& v) {
    auto j = nlohmann::json::array();
    for (const auto& e : v) {
        if (e) j.push_back(*e);
        else j.push_back("*");
    }
    return j;
}

inline ExtendedVector extended_from_json(const nlohmann::json& j) {
    ExtendedVector v;
    for (const auto& e : j) {
        if (e.is_string()) {
            detail::require_structure(e.get<std::string>() == "*", "extended vector strings must be \"*\"");
            v.push_back(STAR);
        } else {
            v.push_back(e.get<int>());
        }
    }
    return v;
}

inline nlohmann::json sigma_to_json(const OperatorTuple& s) {
    auto j = nlohmann::json::array();
    for (Op o : s) j.push_back(to_string(o));
    return j;
}

inline OperatorTuple sigma_from_json(const nlohmann::json& j) {
    OperatorTuple s;
    for (const auto& e : j) s.push_back(parse_op(e.get<std::string>()));
    return s;
}

inline nlohmann::json to_json(const ReducedConfiguration& r) {
    nlohmann::json j;
    j["alpha"] = extended_to_json(r.alpha);
    j["a"] = r.a;
    j["positions"] = r.positions;
    j["p"] = r.p;
    j["jstar"] = r.jstar;
    auto t = nlohmann::json::array();
    for (Tau x : r.tau) t.push_back(x == Tau::del ? "DEL" : "NONE");
    j["tau"] = t;
    return j;
}

inline ReducedConfiguration reduced_from_json(const nlohmann::json& j) {
    ReducedConfiguration r;
    r.alpha = extended_from_json(j.at("alpha"));
    r.a = j.at("a").get<std::vector<int>>();
    r.positions = j.at("positions").get<std::vector<int>>();
    r.p = j.at("p").get<std::vector<int>>();
    r.jstar = j.at("jstar").get<std::vector<int>>();
    for (const auto& t : j.at("tau")) r.tau.push_back(t.get<std::string>() == "DEL" ? Tau::del : Tau::none);
    return r;
}

inline bool operator==(const ReducedConfiguration& x, const ReducedConfiguration& y) {
    return x.alpha == y.alpha && x.a == y.a && x.positions == y.positions && x.p == y.p && x.jstar == y.jstar &&
           x.tau == y.tau;
}

} // namespace fbgraph
