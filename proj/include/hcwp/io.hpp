#pragma once

// JSON and CSV encodings shared by the command-line tool and the tests.

#include <nlohmann/json.hpp>

#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "hcwp/model.hpp"
#include "hcwp/solver.hpp"

namespace hcwp::io {

using nlohmann::json;

/// %.17g: always round-trips, '.' decimal point regardless of locale.
inline std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Quotes a CSV field when it carries a separator, quote or newline.
inline std::string csv_field(std::string_view s)
{
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline json to_json(const Solution& s, const ModelParams& p)
{
    const auto z4 = s.z4.values();
    const auto z8 = s.z8.values();
    json j;
    j["k"] = p.k();
    j["i"] = p.i();
    j["lambda"] = p.lambda();
    j["z4"] = json::array({z4[0], z4[1], z4[2], z4[3]});
    j["z8"] = json(std::vector<double>(z8.begin(), z8.end()));
    j["chart"] = s.chart ? json{{"x", s.chart->x}, {"y", s.chart->y}} : json(nullptr);
    j["residual"] = s.residual;
    j["class"] = std::string(to_string(s.cls));
    j["set"] = s.set ? json(std::string(to_string(*s.set))) : json(nullptr);
    j["method"] = std::string(to_string(s.method));
    j["tangency"] = s.tangency;
    return j;
}

inline json to_json(const std::vector<Solution>& v, const ModelParams& p)
{
    json a = json::array();
    for (const Solution& s : v) a.push_back(to_json(s, p));
    return a;
}

inline json to_json(const ScanRow& r, int k, int i)
{
    json j{{"lambda", r.lambda}, {"count", r.count}};
    if (r.error) {
        j["error"] = *r.error;
    } else {
        j["solutions"] = to_json(r.solutions, ModelParams(k, i, r.lambda));
    }
    return j;
}

inline json to_json(const CriticalResult& c)
{
    json j{{"lambda_cr", c.lambda_cr},
           {"bracket", json::array({c.lo, c.hi})},
           {"count_below", c.count_below},
           {"count_above", c.count_above},
           {"method", std::string(to_string(c.method))},
           {"iterations", c.iterations}};
    if (c.candidates_below) j["candidates_below"] = *c.candidates_below;
    if (c.candidates_above) j["candidates_above"] = *c.candidates_above;
    return j;
}

/// One line "lambda,count,solutions_json" per row, header first, LF endings.
inline std::string scan_csv(const std::vector<ScanRow>& rows, int k, int i)
{
    std::string out = "lambda,count,solutions_json\n";
    for (const ScanRow& r : rows) {
        const json payload = r.error ? json{{"error", *r.error}} : to_json(r.solutions, ModelParams(k, i, r.lambda));
        out += fmt17(r.lambda) + ',' + (r.error ? std::string("-1") : std::to_string(r.count)) + ',' +
               csv_field(payload.dump()) + '\n';
    }
    return out;
}

/// Parses a solution object written by to_json and recomputes its residual.
inline double recheck_residual(const json& j)
{
    const ModelParams p(j.at("k").get<int>(), j.at("i").get<int>(), j.at("lambda").get<double>());
    const auto z = j.at("z8").get<std::vector<double>>();
    if (z.size() != 8) throw std::invalid_argument("z8 must have 8 components");
    std::array<double, 8> a{};
    std::copy(z.begin(), z.end(), a.begin());
    return max_abs(full_residual(ZVector8::from_array(a), p));
}

}  // namespace hcwp::io
