#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#ifndef PHASECERT_FIXTURES
#define PHASECERT_FIXTURES "tests/fixtures"
#endif

inline const nlohmann::json& golden()
{
    static const nlohmann::json doc = [] {
        std::ifstream in(std::string(PHASECERT_FIXTURES) + "/golden.json");
        return nlohmann::json::parse(in);
    }();
    return doc;
}
