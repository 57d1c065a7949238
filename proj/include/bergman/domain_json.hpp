#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "domains.hpp"

namespace bergman {

namespace detail {

inline void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& allowed, const char* where)
{
    if (!obj.is_object())
        throw ParseError(std::string(where) + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ParseError(std::string(where) + ": unknown field '" + it.key() + "'");
}

inline std::size_t read_count(const nlohmann::json& obj, const char* key, const char* where)
{
    if (!obj.contains(key))
        throw ParseError(std::string(where) + ": missing '" + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ParseError(std::string(where) + ": '" + key + "' must be a non-negative integer");
    return v.get<std::size_t>();
}

inline std::vector<double> read_reals(const nlohmann::json& obj, const char* key, const char* where)
{
    if (!obj.contains(key))
        throw ParseError(std::string(where) + ": missing '" + key + "'");
    const auto& v = obj.at(key);
    if (!v.is_array())
        throw ParseError(std::string(where) + ": '" + key + "' must be an array");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number())
            throw ParseError(std::string(where) + ": '" + key + "' must hold numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

} // namespace detail

inline DomainSpec domain_from_json(const nlohmann::json& j)
{
    detail::reject_unknown(j, {"base", "lifts"}, "spec");
    if (!j.contains("base"))
        throw ParseError("spec: missing 'base'");
    const auto& b = j.at("base");
    detail::reject_unknown(b, {"kind", "exponents", "n_star", "m_passive"}, "base");
    if (!b.contains("kind") || !b.at("kind").is_string())
        throw ParseError("base: 'kind' must be a string");
    std::string kind = b.at("kind").get<std::string>();
    BaseDomain base;
    base.n_star = detail::read_count(b, "n_star", "base");
    base.m_passive = b.contains("m_passive") ? detail::read_count(b, "m_passive", "base") : 0;
    if (kind == "GeneralizedComplexEllipsoid") {
        base.kind = BaseKind::Ellipsoid;
        base.exponents = detail::read_reals(b, "exponents", "base");
    } else if (kind == "Polydisk") {
        base.kind = BaseKind::Polydisk;
        if (b.contains("exponents"))
            base.exponents = detail::read_reals(b, "exponents", "base");
    } else {
        throw ParseError("base: unknown kind '" + kind + "'");
    }
    std::vector<LiftStep> lifts;
    if (j.contains("lifts")) {
        if (!j.at("lifts").is_array())
            throw ParseError("spec: 'lifts' must be an array");
        for (const auto& l : j.at("lifts")) {
            detail::reject_unknown(l, {"kind", "weights", "w_dim"}, "lift");
            if (!l.contains("kind") || !l.at("kind").is_string())
                throw ParseError("lift: 'kind' must be a string");
            std::string lk = l.at("kind").get<std::string>();
            LiftStep step;
            if (lk == "U")
                step.kind = LiftKind::U;
            else if (lk == "V")
                step.kind = LiftKind::V;
            else
                throw ParseError("lift: unknown kind '" + lk + "'");
            step.weights = detail::read_reals(l, "weights", "lift");
            step.w_dim = l.contains("w_dim") ? detail::read_count(l, "w_dim", "lift") : 1;
            lifts.push_back(std::move(step));
        }
    }
    try {
        return DomainSpec(std::move(base), std::move(lifts));
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("spec: ") + e.what());
    }
}

inline nlohmann::json domain_to_json(const DomainSpec& spec)
{
    nlohmann::json base = {{"kind", to_string(spec.base().kind)},
                           {"n_star", spec.base().n_star},
                           {"m_passive", spec.base().m_passive}};
    if (spec.base().kind == BaseKind::Ellipsoid)
        base["exponents"] = spec.base().exponents;
    nlohmann::json lifts = nlohmann::json::array();
    for (const auto& l : spec.lifts())
        lifts.push_back({{"kind", to_string(l.kind)}, {"weights", l.weights}, {"w_dim", l.w_dim}});
    return {{"base", base}, {"lifts", lifts}};
}

inline DomainSpec parse_domain(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return domain_from_json(j);
}

inline DomainSpec load_domain(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open spec file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_domain(ss.str());
}

} // namespace bergman
