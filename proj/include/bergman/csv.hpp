#pragma once

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "numerics.hpp"

namespace bergman {

// 17 significant digits: lossless round trip for doubles.
inline std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, sep))
        out.push_back(cur);
    if (!line.empty() && line.back() == sep)
        out.emplace_back();
    return out;
}

inline double parse_double(const std::string& s)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParseError("not a number: '" + s + "'");
    }
    if (used != s.size())
        throw ParseError("not a number: '" + s + "'");
    return v;
}

// "0.1+0.2i", "-0.3-1e-05i", "0.5", "2i"
inline Complex parse_complex(std::string s)
{
    s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return c == ' '; }), s.end());
    if (s.empty())
        throw ParseError("empty complex number");
    if (s.back() != 'i')
        return parse_double(s);
    std::string body = s.substr(0, s.size() - 1);
    for (std::size_t k = body.size(); k-- > 1;) {
        char c = body[k];
        if ((c == '+' || c == '-') && body[k - 1] != 'e' && body[k - 1] != 'E')
            return {parse_double(body.substr(0, k)), parse_double(body.substr(k))};
    }
    if (body.empty() || body == "+")
        return {0.0, 1.0};
    if (body == "-")
        return {0.0, -1.0};
    return {0.0, parse_double(body)};
}

inline std::string format_complex(Complex z)
{
    std::string im = format_double(z.imag());
    if (im.front() != '-')
        im = "+" + im;
    return format_double(z.real()) + im + "i";
}

} // namespace bergman
