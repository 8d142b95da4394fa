#include "fraclab/report.hpp"

#include <fstream>

#include "fraclab/errors.hpp"

namespace fraclab {

void ExperimentReport::add_verdict(const std::string& name, bool pass, double tolerance) {
    verdicts[name] = {{"pass", pass}, {"tolerance", tolerance}};
}

bool ExperimentReport::overall_pass() const {
    for (const auto& [key, v] : verdicts.items()) {
        if (key == "overall") continue;
        if (v.is_object() && v.contains("pass") && !v["pass"].get<bool>()) return false;
    }
    return true;
}

nlohmann::json ExperimentReport::to_json() const {
    nlohmann::json j;
    j["config"] = config;
    j["measured"] = measured;
    j["predicted"] = predicted;
    j["verdicts"] = verdicts;
    j["verdicts"]["overall"] = overall_pass();
    j["meta"] = meta;
    return j;
}

ExperimentReport ExperimentReport::from_json(const nlohmann::json& j) {
    ExperimentReport r;
    r.config = j.at("config");
    r.measured = j.at("measured");
    r.predicted = j.at("predicted");
    r.verdicts = j.at("verdicts");
    r.verdicts.erase("overall");
    r.meta = j.at("meta");
    return r;
}

std::string ExperimentReport::serialize() const { return to_json().dump(2) + "\n"; }

void ExperimentReport::write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InvalidState("ExperimentReport: cannot open " + path);
    out << serialize();
    if (!out) throw InvalidState("ExperimentReport: write failed for " + path);
}

} // namespace fraclab
