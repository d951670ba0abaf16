#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "valprod/bodies.hpp"
#include "valprod/errors.hpp"

namespace valprod::testing
{
//! Convex polygon inscribed in an ellipse, with sorted random vertex angles.
inline PlanarBody random_convex_polygon(std::mt19937_64& rng, Vec2 center, double scale,
                                        int vertices = 6)
{
    std::uniform_real_distribution<double> u(0, 1);
    double const rx = scale * (0.6 + 0.8 * u(rng));
    double const ry = scale * (0.6 + 0.8 * u(rng));
    double const tilt = 6.283185307179586 * u(rng);
    while (true)
    {
        std::vector<double> angles;
        for (int k = 0; k < vertices; ++k)
            angles.push_back(6.283185307179586 * u(rng));
        std::sort(angles.begin(), angles.end());
        double gap = angles.front() + 6.283185307179586 - angles.back();
        for (int k = 1; k < vertices; ++k)
            gap = std::max(gap, angles[k] - angles[k - 1]);
        // Keep the polygon fat enough to contain its center.
        if (gap > 2.5)
            continue;
        std::vector<Vec2> pts;
        for (double a : angles)
        {
            Vec2 const e(rx * std::cos(a), ry * std::sin(a));
            pts.emplace_back(center.x() + std::cos(tilt) * e.x() - std::sin(tilt) * e.y(),
                             center.y() + std::sin(tilt) * e.x() + std::cos(tilt) * e.y());
        }
        try
        {
            return PlanarBody::polygon(pts);
        }
        catch (Error const&)
        {
        }
    }
}

//! A pair with crossing boundaries that passes the transversality test.
inline std::pair<PlanarBody, PlanarBody> random_transversal_pair(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    while (true)
    {
        PlanarBody a = random_convex_polygon(rng, Vec2(0, 0), 1.0);
        PlanarBody b = random_convex_polygon(rng, Vec2(u(rng), u(rng)), 0.9);
        if (is_transversal(a, b).transversal && !boundary_crossings(a, b).empty())
            return {std::move(a), std::move(b)};
    }
}

}  // namespace valprod::testing
