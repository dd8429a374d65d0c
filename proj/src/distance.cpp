#include "binaq/distance.hpp"

#include <limits>
#include <vector>

#include "binaq/errors.hpp"

namespace binaq {

namespace {

// Sentinel squared distance for "no foreground seen"; a power of two so the
// double conversion below is exact, and far above any in-image distance.
constexpr std::int64_t kFar = std::int64_t(1) << 60;

// 1D squared-distance transform: d[q] = min_p (q-p)^2 + f[p], the lower
// envelope of parabolas (Felzenszwalb & Huttenlocher). Values at integer
// sample points are exact integers, so ties at envelope boundaries cannot
// change the result.
void envelope_1d(const std::int64_t* f, std::int64_t* d, int n,
                 std::vector<int>& v, std::vector<double>& z) {
    const double inf = std::numeric_limits<double>::infinity();
    int k = 0;
    v[0] = 0;
    z[0] = -inf;
    z[1] = inf;

    auto intersect = [&](int q, int p) {
        const double fq = static_cast<double>(f[q]) + static_cast<double>(q) * q;
        const double fp = static_cast<double>(f[p]) + static_cast<double>(p) * p;
        return (fq - fp) / (2.0 * (q - p));
    };

    for (int q = 1; q < n; ++q) {
        double s = intersect(q, v[k]);
        while (s <= z[k]) {
            --k;
            s = intersect(q, v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = inf;
    }

    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const std::int64_t dx = q - v[k];
        d[q] = dx * dx + f[v[k]];
    }
}

} // namespace

DistanceField distance_transform(const BinaryImage& reference) {
    const int w = reference.width();
    const int h = reference.height();
    if (reference.foreground_count() == 0) {
        throw DegenerateInputError("distance transform needs at least one foreground pixel");
    }

    // Vertical pass: squared distance to the nearest foreground within each
    // column (kFar when the column has none).
    Grid<std::int64_t> sq(w, h, kFar);
    const int none = h + 1;
    for (int x = 0; x < w; ++x) {
        int run = none;
        for (int y = 0; y < h; ++y) {
            run = reference.foreground(x, y) ? 0 : (run == none ? none : run + 1);
            if (run != none) sq.at(x, y) = static_cast<std::int64_t>(run) * run;
        }
        run = none;
        for (int y = h - 1; y >= 0; --y) {
            run = reference.foreground(x, y) ? 0 : (run == none ? none : run + 1);
            if (run != none) {
                const std::int64_t cand = static_cast<std::int64_t>(run) * run;
                if (cand < sq.at(x, y)) sq.at(x, y) = cand;
            }
        }
    }

    // Horizontal pass: per-row lower envelope over the column distances.
    std::vector<std::int64_t> f(w), d(w);
    std::vector<int> v(w);
    std::vector<double> z(w + 1);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) f[x] = sq.at(x, y);
        envelope_1d(f.data(), d.data(), w, v, z);
        for (int x = 0; x < w; ++x) sq.at(x, y) = d[x];
    }

    return DistanceField(std::move(sq));
}

} // namespace binaq
