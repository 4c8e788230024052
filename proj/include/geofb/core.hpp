/*=============================================================================
 * Shared small utilities: dense vector arithmetic, a deterministic RNG with
 * an explicitly specified algorithm (so traces are reproducible bit-for-bit
 * across platforms and standard-library versions), and number formatting.
 *
 * Everything operates on std::vector<double>; no global state.
 *===========================================================================*/
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace geofb {

using vec = std::vector<double>;

inline constexpr double inf = std::numeric_limits<double>::infinity();

inline double dot(const vec& a, const vec& b)
{
    if (a.size() != b.size()) { throw std::invalid_argument("dot: size mismatch"); }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); i++) { s += a[i]*b[i]; }
    return s;
}

inline double nrm2(const vec& a)
{
    return std::sqrt(dot(a, a));
}

inline double nrm_inf(const vec& a)
{
    double m = 0.0;
    for (double v : a) { m = std::max(m, std::fabs(v)); }
    return m;
}

inline double dist2(const vec& a, const vec& b)
{
    if (a.size() != b.size()) { throw std::invalid_argument("dist2: size mismatch"); }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); i++) { double d = a[i]-b[i]; s += d*d; }
    return std::sqrt(s);
}

/* y <- y + t*x */
inline void axpy(double t, const vec& x, vec& y)
{
    if (x.size() != y.size()) { throw std::invalid_argument("axpy: size mismatch"); }
    for (std::size_t i = 0; i < x.size(); i++) { y[i] += t*x[i]; }
}

inline vec scaled(const vec& x, double t)
{
    vec y(x.size());
    for (std::size_t i = 0; i < x.size(); i++) { y[i] = t*x[i]; }
    return y;
}

inline vec vsub(const vec& a, const vec& b)
{
    vec y(a.size());
    for (std::size_t i = 0; i < a.size(); i++) { y[i] = a[i]-b[i]; }
    return y;
}

inline vec vadd(const vec& a, const vec& b)
{
    vec y(a.size());
    for (std::size_t i = 0; i < a.size(); i++) { y[i] = a[i]+b[i]; }
    return y;
}

/*-----------------------------------------------------------------------------
 * Deterministic RNG.  splitmix64 seeds and advances a xorshift-style stream;
 * uniform doubles take the top 53 bits; gaussians are Box-Muller (no
 * std::normal_distribution, whose algorithm is implementation-defined).
 *---------------------------------------------------------------------------*/
struct rng {
    std::uint64_t state;

    explicit rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64()
    {
        /* splitmix64 */
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /* uniform on [0,1) with 53-bit resolution */
    double uniform01()
    {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /* uniform on [lo,hi) */
    double uniform(double lo, double hi)
    {
        return lo + (hi - lo)*uniform01();
    }

    /* standard normal via Box-Muller; one value per call, no cached spare
     * (a spare would make draw order depend on call history) */
    double gaussian()
    {
        double u1 = 0.0;
        do { u1 = uniform01(); } while (u1 <= 0.0);
        double u2 = uniform01();
        return std::sqrt(-2.0*std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double rademacher()
    {
        return (next_u64() & 1ull) ? 1.0 : -1.0;
    }

    /* uniform integer in [0, n) */
    std::size_t uniform_index(std::size_t n)
    {
        if (n == 0) { throw std::invalid_argument("uniform_index: empty range"); }
        return static_cast<std::size_t>(next_u64() % n);
    }

    vec gaussian_vec(std::size_t n)
    {
        vec v(n);
        for (std::size_t i = 0; i < n; i++) { v[i] = gaussian(); }
        return v;
    }
};

/* FNV-1a, used to derive per-experiment seeds and to fingerprint problem
 * specs in trace metadata */
inline std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t mix_seed(std::uint64_t seed, const std::string& tag)
{
    rng r(seed ^ fnv1a(tag));
    return r.next_u64();
}

/* shortest exact decimal round-trip for doubles in CSV/JSON side files */
inline std::string fmt17(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

} // namespace geofb
