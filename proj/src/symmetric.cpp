#include <quadtwist/error.hpp>
#include <quadtwist/symmetric.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace quadtwist
{

Complex vandermonde(std::span<const Complex> a)
{
    Complex r = 1;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            r *= a[j] - a[i];
        }
    }
    return r;
}

Complex cross_vandermonde(std::span<const Complex> z, std::span<const Complex> a)
{
    Complex r = 1;
    for (Complex zr : z) {
        for (Complex as : a) {
            r *= zr - as;
        }
    }
    return r;
}

ContourSpec ContourSpec::for_shifts(const ShiftSet &a, double merge_gap, int nodes)
{
    ContourSpec spec;
    spec.nodes = nodes;
    std::size_t k = a.size();
    // Single-linkage clusters under the merge gap.
    std::vector<std::size_t> parent(k);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            x = parent[x] = parent[parent[x]];
        }
        return x;
    };
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            if (std::abs(a[i] - a[j]) < merge_gap) {
                parent[find(i)] = find(j);
            }
        }
    }
    std::vector<std::size_t> root_index(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t r = find(i);
        if (root_index[r] == k) {
            root_index[r] = spec.members.size();
            spec.members.emplace_back();
        }
        spec.members[root_index[r]].push_back(i);
    }
    for (const auto &m : spec.members) {
        Complex c = 0;
        for (auto i : m) {
            c += a[i];
        }
        c /= static_cast<double>(m.size());
        double extent = 0;
        for (auto i : m) {
            extent = std::max(extent, std::abs(a[i] - c));
        }
        double gap = INFINITY;
        for (std::size_t i = 0; i < k; ++i) {
            if (std::find(m.begin(), m.end(), i) == m.end()) {
                gap = std::min(gap, std::abs(a[i] - c) - extent);
            }
        }
        double r = std::min(0.05, gap / 3);
        r = std::max(r, 4 * extent);
        spec.centers.push_back(c);
        spec.radii.push_back(r);
    }
    return spec;
}

void ContourSpec::validate(const ShiftSet &a) const
{
    if (nodes < 64 || (nodes & (nodes - 1)) != 0) {
        throw ContourError("contour nodes per circle must be a power of two >= 64, got " + std::to_string(nodes));
    }
    if (centers.size() != radii.size() || centers.size() != members.size()) {
        throw ContourError("contour spec arrays differ in length");
    }
    std::vector<int> seen(a.size(), 0);
    for (std::size_t c = 0; c < centers.size(); ++c) {
        if (!(radii[c] > 0)) {
            throw ContourError("contour radius must be positive");
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
            double dist = std::abs(a[i] - centers[c]);
            bool member = std::find(members[c].begin(), members[c].end(), i) != members[c].end();
            if (member) {
                ++seen[i];
                if (dist > radii[c] / 2) {
                    throw ContourError("shift " + std::to_string(i) + " is too close to its circle");
                }
            } else if (dist < 2 * radii[c]) {
                throw ContourError("shift " + std::to_string(i) + " is within the margin of circle " +
                                   std::to_string(c));
            }
        }
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (seen[i] != 1) {
            throw ContourError("shift " + std::to_string(i) + " is not enclosed exactly once");
        }
    }
}

namespace
{

double factorial(std::size_t n)
{
    double r = 1;
    for (std::size_t i = 2; i <= n; ++i) {
        r *= static_cast<double>(i);
    }
    return r;
}

// Shared engine. Variables 0..nz-1 are z, nz..nv-1 are w (double sums only).
class Condenser
{
public:
    Condenser(const ShiftSet &a, const ContourSpec &spec, std::size_t nz, std::size_t nv, bool exact_count,
              const CondenseOptions &opt)
        : a_(a), spec_(spec), nz_(nz), nv_(nv), exact_count_(exact_count), opt_(opt)
    {
        spec.validate(a);
        owner_.assign(a.size(), 0);
        for (std::size_t c = 0; c < spec.members.size(); ++c) {
            for (auto i : spec.members[c]) {
                owner_[i] = c;
            }
        }
        std::size_t n = spec.nodes;
        roots_.resize(n);
        for (std::size_t m = 0; m < n; ++m) {
            roots_[m] = std::polar(1.0, 2 * pi * static_cast<double>(m) / static_cast<double>(n));
        }
    }

    template <typename Body>
    Complex run(Body &&body)
    {
        std::vector<std::size_t> circ(nv_, 0);
        Complex total = 0;
        assign(0, circ, total, body);
        return total;
    }

private:
    template <typename Body>
    void assign(std::size_t v, std::vector<std::size_t> &circ, Complex &total, Body &body)
    {
        std::size_t nc = spec_.centers.size();
        if (v == nv_) {
            std::vector<std::size_t> count(nc, 0);
            for (auto c : circ) {
                ++count[c];
            }
            for (std::size_t c = 0; c < nc; ++c) {
                if (count[c] > spec_.members[c].size()) {
                    return;
                }
                if (exact_count_ && count[c] != spec_.members[c].size()) {
                    return;
                }
            }
            double mult = 1;
            if (opt_.symmetric) {
                std::vector<std::size_t> cz(nc, 0), cw(nc, 0);
                for (std::size_t i = 0; i < nv_; ++i) {
                    ++(i < nz_ ? cz : cw)[circ[i]];
                }
                mult = factorial(nz_) * factorial(nv_ - nz_);
                for (std::size_t c = 0; c < nc; ++c) {
                    mult /= factorial(cz[c]) * factorial(cw[c]);
                }
            }
            total += mult * integrate(circ, body);
            return;
        }
        std::size_t start = 0;
        if (opt_.symmetric && v > 0 && v != nz_) {
            start = circ[v - 1];
        }
        for (std::size_t c = start; c < nc; ++c) {
            circ[v] = c;
            assign(v + 1, circ, total, body);
        }
    }

    template <typename Body>
    Complex integrate(const std::vector<std::size_t> &circ, Body &body)
    {
        std::vector<Complex> x(nv_);
        std::vector<Complex> wt(nv_, 1.0);
        // For residue-mode variables, the index of the shift whose factor is dropped.
        std::vector<std::size_t> skip(nv_, a_.size());
        std::vector<std::size_t> moving;
        for (std::size_t v = 0; v < nv_; ++v) {
            std::size_t c = circ[v];
            if (opt_.exact_singletons && spec_.members[c].size() == 1) {
                skip[v] = spec_.members[c][0];
                x[v] = a_[skip[v]];
            } else {
                moving.push_back(v);
            }
        }
        std::size_t n = roots_.size();
        std::vector<std::size_t> idx(moving.size(), 0);
        Complex acc = 0;
        while (true) {
            for (std::size_t q = 0; q < moving.size(); ++q) {
                std::size_t v = moving[q];
                std::size_t c = circ[v];
                Complex off = spec_.radii[c] * roots_[idx[q]];
                x[v] = spec_.centers[c] + off;
                wt[v] = off / static_cast<double>(n);
            }
            Complex denom = 1;
            for (std::size_t v = 0; v < nv_; ++v) {
                for (std::size_t i = 0; i < a_.size(); ++i) {
                    if (i != skip[v]) {
                        denom *= x[v] - a_[i];
                    }
                }
            }
            Complex w = 1;
            for (auto v : moving) {
                w *= wt[v];
            }
            acc += w * body(x) / denom;
            std::size_t q = 0;
            while (q < moving.size() && ++idx[q] == n) {
                idx[q] = 0;
                ++q;
            }
            if (q == moving.size()) {
                break;
            }
        }
        return acc;
    }

    const ShiftSet &a_;
    const ContourSpec &spec_;
    std::size_t nz_;
    std::size_t nv_;
    bool exact_count_;
    CondenseOptions opt_;
    std::vector<std::size_t> owner_;
    std::vector<Complex> roots_;
};

} // namespace

Complex condensed_sum_single(const SingleSampler &g, const ShiftSet &a, std::size_t j, const ContourSpec &spec,
                             const CondenseOptions &opt)
{
    if (j > a.size()) {
        throw ParameterError("condensed sum needs j <= |A|");
    }
    Condenser cd(a, spec, j, j, false, opt);
    double sign = (j * (j - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
    return sign * cd.run([&](const std::vector<Complex> &z) {
        Complex v = vandermonde(z);
        return g(z) * v * v;
    });
}

Complex condensed_sum_double(const DoubleSampler &f, const ShiftSet &a, std::size_t j, const ContourSpec &spec,
                             const CondenseOptions &opt)
{
    if (j > a.size()) {
        throw ParameterError("condensed sum needs j <= |A|");
    }
    Condenser cd(a, spec, j, a.size(), true, opt);
    std::size_t k = a.size();
    double sign = (k * (k - 1) / 2) % 2 == 0 ? 1.0 : -1.0;
    return sign * cd.run([&](const std::vector<Complex> &x) {
        std::span<const Complex> z(x.data(), j);
        std::span<const Complex> w(x.data() + j, x.size() - j);
        Complex vz = vandermonde(z), vw = vandermonde(w);
        return f(z, w) * cross_vandermonde(z, w) * vz * vz * vw * vw;
    });
}

} // namespace quadtwist
