#include "body_io.hpp"

#include <fstream>

#include "valprod/errors.hpp"

namespace valprod::cli
{
using nlohmann::json;

namespace
{
double number(json const& j, char const* key)
{
    if (!j.contains(key) || !j.at(key).is_number())
        throw ParseError(std::string("body field '") + key + "' must be a number");
    return j.at(key).get<double>();
}

Vec2 vec2(json const& j)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError("expected a point [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

sphere::Vec3 vec3(json const& j)
{
    if (!j.is_array() || j.size() != 3)
        throw ParseError("expected a point [x, y, z]");
    for (auto const& c : j)
        if (!c.is_number())
            throw ParseError("expected a point [x, y, z]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json const& field(json const& j, char const* key)
{
    if (!j.contains(key))
        throw ParseError(std::string("body is missing '") + key + "'");
    return j.at(key);
}

template<class V, class F>
std::vector<V> points(json const& j, F convert)
{
    if (!j.is_array())
        throw ParseError("'vertices' must be an array");
    std::vector<V> out;
    for (auto const& p : j)
        out.push_back(convert(p));
    return out;
}

bool is_spherical_type(std::string const& t)
{
    return t == "cap" || t == "spherical-polygon" || t == "regular-polygon" || t == "needle"
           || t == "whole";
}

}  // namespace

std::string body_type_name(json const& body)
{
    if (!body.is_object() || !body.contains("type") || !body.at("type").is_string())
        throw ParseError("each body needs a string 'type'");
    return body.at("type").get<std::string>();
}

BodySet parse_bodies(json const& j)
{
    json const* list = &j;
    if (j.is_object())
    {
        if (!j.contains("bodies"))
            throw ParseError("body file needs a 'bodies' array");
        list = &j.at("bodies");
    }
    if (!list->is_array() || list->empty())
        throw ParseError("'bodies' must be a non-empty array");

    BodySet out;
    bool first = true;
    for (auto const& b : *list)
    {
        std::string const type = body_type_name(b);
        Space const space = is_spherical_type(type) ? Space::sphere : Space::plane;
        if (first)
            out.space = space;
        else if (space != out.space)
            throw ParseError("bodies mix planar and spherical types");
        first = false;

        if (type == "polygon")
            out.planar.push_back(PlanarBody::polygon(points<Vec2>(field(b, "vertices"), vec2)));
        else if (type == "rectangle")
        {
            Vec2 const lo = vec2(field(b, "min")), hi = vec2(field(b, "max"));
            out.planar.push_back(PlanarBody::rectangle(lo.x(), lo.y(), hi.x(), hi.y()));
        }
        else if (type == "disk")
            out.planar.push_back(PlanarBody::disk(vec2(field(b, "center")), number(b, "radius")));
        else if (type == "point")
            out.planar.push_back(PlanarBody::point(vec2(field(b, "at"))));
        else if (type == "segment")
            out.planar.push_back(PlanarBody::segment(vec2(field(b, "a")), vec2(field(b, "b"))));
        else if (type == "cap")
            out.spherical.push_back(
                sphere::SphericalBody::cap(vec3(field(b, "center")), number(b, "radius")));
        else if (type == "spherical-polygon")
            out.spherical.push_back(
                sphere::SphericalBody::polygon(points<sphere::Vec3>(field(b, "vertices"), vec3)));
        else if (type == "regular-polygon")
        {
            double const sides = number(b, "sides");
            out.spherical.push_back(sphere::regular_polygon(
                vec3(field(b, "center")), number(b, "radius"), static_cast<int>(sides),
                b.contains("phase") ? number(b, "phase") : 0.0));
        }
        else if (type == "needle")
            out.spherical.push_back(sphere::needle(vec3(field(b, "center")),
                                                   number(b, "half_length"),
                                                   number(b, "half_width"), number(b, "angle")));
        else if (type == "whole")
            out.spherical.push_back(sphere::SphericalBody::whole());
        else
            throw ParseError("unknown body type '" + type + "'");
    }
    return out;
}

json read_json_file(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open '" + path + "'");
    try
    {
        return json::parse(in);
    }
    catch (json::parse_error const& e)
    {
        throw ParseError("'" + path + "': " + e.what());
    }
}

}  // namespace valprod::cli
