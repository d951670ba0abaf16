#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "valprod/bodies.hpp"
#include "valprod/spherical.hpp"
#include "valprod/valuations.hpp"

namespace valprod::cli
{
/*!
 * Bodies of one space read from JSON: either an array of body objects or
 * {"bodies": [...]}. Planar types: polygon (vertices), rectangle (min, max),
 * disk (center, radius), point (at), segment (a, b). Spherical types: cap
 * (center, radius), spherical-polygon (vertices), regular-polygon (center,
 * radius, sides, phase), needle (center, half_length, half_width, angle),
 * whole.
 */
struct BodySet
{
    Space space = Space::plane;
    std::vector<PlanarBody> planar;
    std::vector<sphere::SphericalBody> spherical;

    std::size_t size() const
    {
        return space == Space::plane ? planar.size() : spherical.size();
    }
};

//! Throws ParseError for malformed input and InvalidBody for bad geometry.
BodySet parse_bodies(nlohmann::json const& j);

//! Parses a JSON file; throws ParseError with the parser's diagnostic.
nlohmann::json read_json_file(std::string const& path);

//! Type names and their space, for messages.
std::string body_type_name(nlohmann::json const& body);

}  // namespace valprod::cli
