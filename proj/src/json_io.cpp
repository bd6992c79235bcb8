#include "finhom/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace finhom {

json length_to_json(const Length& l)
{
    if (l.is_exact()) return l.exact().str();
    return l.value();
}

Length length_from_json(const json& j)
{
    if (j.is_string()) return Length::parse(j.get<std::string>());
    if (j.is_number_integer()) return Length(Rational(j.get<std::int64_t>()));
    if (j.is_number()) return Length(j.get<double>());
    throw std::invalid_argument("expected a length, got " + j.dump());
}

json space_to_json(const FiniteMetricSpace& space)
{
    const std::size_t n = space.size();
    json dist = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < n; ++j) {
            if (space.is_exact())
                row.push_back(space.exact_distance(i, j).str());
            else
                row.push_back(space.value(i, j));
        }
        dist.push_back(std::move(row));
    }
    json out;
    out["n"] = n;
    out["dist"] = std::move(dist);
    if (!space.labels().empty()) out["labels"] = space.labels();
    out["mode"] = space.is_exact() ? "exact" : "approx";
    out["provenance"] = space.provenance();
    return out;
}

FiniteMetricSpace space_from_json(const json& j)
{
    if (!j.is_object()) throw std::invalid_argument("space JSON must be an object");
    const auto n = j.at("n").get<std::size_t>();
    const auto& dist = j.at("dist");
    if (!dist.is_array() || dist.size() != n) throw std::invalid_argument("'dist' must be an n x n array");
    const std::string mode = j.value("mode", std::string("exact"));
    const std::string provenance = j.value("provenance", std::string());
    FiniteMetricSpace space;
    if (mode == "exact") {
        std::vector<Rational> d;
        d.reserve(n * n);
        for (const auto& row : dist) {
            if (!row.is_array() || row.size() != n) throw std::invalid_argument("'dist' must be an n x n array");
            for (const auto& cell : row) {
                if (cell.is_string())
                    d.push_back(Rational::parse(cell.get<std::string>()));
                else if (cell.is_number_integer())
                    d.emplace_back(cell.get<std::int64_t>());
                else
                    throw std::invalid_argument("exact-mode distances must be \"p/q\" strings or integers");
            }
        }
        space = FiniteMetricSpace::exact(n, std::move(d), provenance);
    } else if (mode == "approx") {
        std::vector<double> d;
        d.reserve(n * n);
        for (const auto& row : dist) {
            if (!row.is_array() || row.size() != n) throw std::invalid_argument("'dist' must be an n x n array");
            for (const auto& cell : row) d.push_back(length_from_json(cell).value());
        }
        space = FiniteMetricSpace::approximate(n, std::move(d), kDefaultTolerance, provenance);
    } else {
        throw std::invalid_argument("unknown mode '" + mode + "'");
    }
    if (j.contains("labels")) space.set_labels(j.at("labels").get<std::vector<std::string>>());
    return space;
}

FiniteMetricSpace read_space(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return space_from_json(json::parse(in));
}

void write_space(const FiniteMetricSpace& space, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << space_to_json(space).dump() << '\n';
}

} // namespace finhom
