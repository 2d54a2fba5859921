#pragma once

// Symmetric natural matrices of even order n = 2k, the star property, the
// zigzag descent, the weights w, the quantities xi and mu, and the key
// inequality xi >= mu + k - 1. Indices are 1-based throughout, with the
// involution f(i) = n - i + 1.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"  // Error

namespace tangle {

struct SymMatrix {
    int n = 0;
    std::vector<long long> a;  // row-major n*n

    static SymMatrix zero(int n) {
        SymMatrix m;
        m.n = n;
        m.a.assign(size_t(n) * n, 0);
        return m;
    }
    long long& at(int i, int j) { return a[size_t(i - 1) * n + (j - 1)]; }
    long long at(int i, int j) const { return a[size_t(i - 1) * n + (j - 1)]; }
    void set_sym(int i, int j, long long v) {
        at(i, j) = v;
        at(j, i) = v;
    }
    void add_sym(int i, int j, long long v) {
        at(i, j) += v;
        if (i != j) at(j, i) += v;
    }
    int k() const { return n / 2; }
    bool symmetric() const {
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j)
                if (at(i, j) != at(j, i)) return false;
        return true;
    }
    bool operator==(const SymMatrix&) const = default;
};

inline int f_inv(int n, int i) { return n - i + 1; }

namespace detail {
inline long long checked_add(long long x, long long y) {
    long long r;
    if (__builtin_add_overflow(x, y, &r)) throw Error("matrix: integer overflow");
    return r;
}
inline long long checked_mul(long long x, long long y) {
    long long r;
    if (__builtin_mul_overflow(x, y, &r)) throw Error("matrix: integer overflow");
    return r;
}
}  // namespace detail

inline long long row_sum(const SymMatrix& e, int i) {
    long long s = 0;
    for (int j = 1; j <= e.n; ++j) s = detail::checked_add(s, e.at(i, j));
    return s;
}

struct StarReport {
    bool ok = true;
    std::vector<std::string> violations;
};

// Property (*): with k = n/2 and f(i) = n-i+1,
//   (*1) row sums s_i = s_{f(i)} for i in [2, k-1];
//   (*2) if k > 1: s_1 = s_{f(1)} + 1 and s_k = s_{f(k)} + 1;
//   (*3) every diagonal entry is even.
inline StarReport check_star(const SymMatrix& e) {
    StarReport r;
    auto bad = [&](const std::string& s) {
        r.ok = false;
        r.violations.push_back(s);
    };
    if (e.n <= 0 || e.n % 2) {
        bad("order must be even and positive");
        return r;
    }
    if (!e.symmetric()) {
        bad("matrix is not symmetric");
        return r;
    }
    for (int i = 1; i <= e.n; ++i)
        for (int j = 1; j <= e.n; ++j)
            if (e.at(i, j) < 0) {
                bad("negative entry at (" + std::to_string(i) + "," + std::to_string(j) + ")");
                return r;
            }
    int k = e.k();
    for (int i = 2; i <= k - 1; ++i)
        if (row_sum(e, i) != row_sum(e, f_inv(e.n, i)))
            bad("row sum " + std::to_string(i) + " differs from row sum " +
                std::to_string(f_inv(e.n, i)));
    if (k > 1) {
        if (row_sum(e, 1) != row_sum(e, f_inv(e.n, 1)) + 1)
            bad("row sum 1 must exceed row sum " + std::to_string(e.n) + " by one");
        if (row_sum(e, k) != row_sum(e, f_inv(e.n, k)) + 1)
            bad("row sum " + std::to_string(k) + " must exceed row sum " +
                std::to_string(k + 1) + " by one");
    }
    for (int i = 1; i <= e.n; ++i)
        if (e.at(i, i) % 2) bad("odd diagonal entry at (" + std::to_string(i) + ")");
    return r;
}

// A path (i_1..i_p) is a valid zigzag path for e when consecutive entries
// satisfy e(f(i_q), i_{q+1}) > 0; the descent additionally guarantees
// i_1 = f(1) = n and i_p in {k, f(k)}.
inline bool is_zigzag_path(const SymMatrix& e, const std::vector<int>& path) {
    if (path.empty()) return false;
    for (int i : path)
        if (i < 1 || i > e.n) return false;
    if (path.front() != e.n) return false;
    int k = e.k();
    if (path.back() != k && path.back() != f_inv(e.n, k)) return false;
    for (size_t q = 0; q + 1 < path.size(); ++q)
        if (e.at(f_inv(e.n, path[q]), path[q + 1]) <= 0) return false;
    return true;
}

// Descent from i_1 = n: while the current index is outside {k, f(k)}, pick
// the smallest m' with x(f(i), m') > 0, decrement that cell symmetrically
// (by 2 on the diagonal), and append m'.
inline std::vector<int> zigzag(const SymMatrix& e) {
    auto star = check_star(e);
    if (!star.ok) throw Error("zigzag: matrix fails the star property");
    int n = e.n, k = e.k();
    SymMatrix x = e;
    std::vector<int> path{n};
    long long budget = 2;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) budget = detail::checked_add(budget, x.at(i, j));
    while (path.back() != k && path.back() != f_inv(n, k)) {
        if (--budget < 0) throw Error("zigzag: descent did not terminate");
        int row = f_inv(n, path.back());
        int m = -1;
        for (int j = 1; j <= n; ++j)
            if (x.at(row, j) > 0) {
                m = j;
                break;
            }
        if (m < 0) throw Error("zigzag: stuck at index " + std::to_string(path.back()));
        x.add_sym(row, m, row == m ? -2 : -1);
        path.push_back(m);
    }
    return path;
}

// Weights: w(i,j) = |j-i| when both indices are on the same side of k,
// |f(j)-i| + 1 when i <= k < j; symmetric; zero diagonal.
inline SymMatrix w_matrix(int k) {
    if (k < 1) throw Error("w_matrix: k must be positive");
    int n = 2 * k;
    SymMatrix w = SymMatrix::zero(n);
    for (int i = 1; i <= n; ++i)
        for (int j = i; j <= n; ++j) {
            long long v;
            if (i <= k && j > k)
                v = std::abs(f_inv(n, j) - i) + 1;
            else
                v = j - i;
            w.set_sym(i, j, v);
        }
    return w;
}

inline long long xi(const SymMatrix& e) {
    SymMatrix w = w_matrix(e.k());
    long long s = 0;
    for (int i = 1; i <= e.n; ++i)
        for (int j = i + 1; j <= e.n; ++j)
            s = detail::checked_add(s, detail::checked_mul(e.at(i, j), w.at(i, j)));
    return s;
}

inline long long mu(const SymMatrix& e) {
    long long s = 0;
    int k = e.k();
    for (int i = 1; i <= k; ++i)
        for (int j = k + 1; j <= e.n; ++j) s = detail::checked_add(s, e.at(i, j));
    return s;
}

struct KeyLemmaResult {
    long long xi = 0, mu = 0;
    int k = 0;
    bool holds = false;
};

inline KeyLemmaResult key_lemma_check(const SymMatrix& e) {
    auto star = check_star(e);
    if (!star.ok) throw Error("key_lemma_check: matrix fails the star property");
    KeyLemmaResult r;
    r.xi = xi(e);
    r.mu = mu(e);
    r.k = e.k();
    r.holds = r.xi >= r.mu + r.k - 1;
    return r;
}

// Every symmetric matrix with entries in [0, max_entry] satisfying (*), in
// lexicographic order of the upper triangle (row-major, diagonal included).
inline void enumerate_star(int n, int max_entry,
                           const std::function<void(const SymMatrix&)>& yield) {
    if (n <= 0 || n % 2) throw Error("enumerate_star: order must be even and positive");
    std::vector<std::pair<int, int>> cells;
    for (int i = 1; i <= n; ++i)
        for (int j = i; j <= n; ++j) cells.push_back({i, j});
    std::vector<long long> v(cells.size(), 0);
    while (true) {
        SymMatrix e = SymMatrix::zero(n);
        for (size_t c = 0; c < cells.size(); ++c) e.set_sym(cells[c].first, cells[c].second, v[c]);
        if (check_star(e).ok) yield(e);
        // odometer: last cell varies fastest, so earlier cells are more
        // significant and the stream is lexicographic in the upper triangle
        int c = int(cells.size()) - 1;
        while (c >= 0 && v[c] == max_entry) v[c--] = 0;
        if (c < 0) break;
        ++v[c];
    }
}

inline std::vector<SymMatrix> enumerate_star_all(int n, int max_entry) {
    std::vector<SymMatrix> out;
    enumerate_star(n, max_entry, [&](const SymMatrix& e) { out.push_back(e); });
    return out;
}

// Random (*) matrix: sample every cell outside the upper-left k-by-k block,
// then choose that block to balance the row-sum constraints (greedy
// multigraph realization of the residual row sums). Entries outside the
// block stay within [0, max_entry]; balancing entries may exceed it.
inline std::optional<SymMatrix> sample_star_once(int n, int max_entry, std::mt19937_64& rng) {
    if (n <= 0 || n % 2) throw Error("sample_star: order must be even and positive");
    int k = n / 2;
    auto uni = [&](long long lo, long long hi) {
        return std::uniform_int_distribution<long long>(lo, hi)(rng);
    };
    SymMatrix e = SymMatrix::zero(n);
    for (int i = 1; i <= n; ++i)
        for (int j = i; j <= n; ++j) {
            if (i <= k && j <= k) continue;  // block chosen later
            if (i == j)
                e.set_sym(i, j, 2 * uni(0, max_entry / 2));
            else
                e.set_sym(i, j, uni(0, max_entry));
        }
    if (k == 1) {
        e.set_sym(1, 1, 2 * uni(0, max_entry / 2));
        return e;
    }
    // residual row sums the block must contribute
    std::vector<long long> need(k + 1, 0);
    long long total = 0;
    for (int i = 1; i <= k; ++i) {
        long long target = row_sum(e, f_inv(n, i)) + ((i == 1 || i == k) ? 1 : 0);
        long long have = 0;
        for (int j = k + 1; j <= n; ++j) have += e.at(i, j);
        need[i] = target - have;
        if (need[i] < 0) return std::nullopt;
        total += need[i];
    }
    if (total % 2) return std::nullopt;
    // greedy realization: repeatedly join the two largest residuals
    while (true) {
        int a = -1, b = -1;
        for (int i = 1; i <= k; ++i) {
            if (need[i] == 0) continue;
            if (a < 0 || need[i] > need[a]) {
                b = a;
                a = i;
            } else if (b < 0 || need[i] > need[b]) {
                b = i;
            }
        }
        if (a < 0) break;
        if (b < 0) {
            if (need[a] % 2) return std::nullopt;  // cannot happen: total was even
            e.add_sym(a, a, need[a]);
            need[a] = 0;
            break;
        }
        e.add_sym(a, b, 1);
        --need[a];
        --need[b];
    }
    return e;
}

inline SymMatrix sample_star(int n, int max_entry, std::mt19937_64& rng, int max_attempts = 100000) {
    for (int t = 0; t < max_attempts; ++t) {
        auto e = sample_star_once(n, max_entry, rng);
        if (e) {
            auto rep = check_star(*e);
            if (!rep.ok) throw Error("sample_star: internal balance failure");
            return *e;
        }
    }
    throw Error("sample_star: no sample produced within the attempt budget");
}

// Text format: first line n, then n rows of n space-separated naturals.
inline std::string format_matrix(const SymMatrix& e) {
    std::ostringstream out;
    out << e.n << '\n';
    for (int i = 1; i <= e.n; ++i) {
        for (int j = 1; j <= e.n; ++j) out << (j > 1 ? " " : "") << e.at(i, j);
        out << '\n';
    }
    return out.str();
}

inline SymMatrix parse_matrix(const std::string& text) {
    std::istringstream in(text);
    long long n;
    if (!(in >> n) || n <= 0 || n > 10000) throw Error("matrix parse: bad order");
    SymMatrix e = SymMatrix::zero(int(n));
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            long long v;
            if (!(in >> v)) throw Error("matrix parse: missing entry");
            if (v < 0) throw Error("matrix parse: negative entry");
            e.at(i, j) = v;
        }
    long long extra;
    if (in >> extra) throw Error("matrix parse: trailing data");
    return e;
}

}  // namespace tangle
