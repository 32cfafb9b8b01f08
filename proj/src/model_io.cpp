#include "filterlr/model_io.hpp"

#include <fstream>
#include <sstream>

#include "filterlr/error.hpp"
#include "json.hpp"

namespace filterlr {

using nlohmann::json;

namespace {

json thresholds_json(const ThresholdSet& t) {
    json arr = json::array();
    for (std::size_t j = 0; j < t.p(); ++j) {
        arr.push_back({{"covariate", t.names[j]}, {"cuts", t.cuts[j]}});
    }
    return arr;
}

ThresholdSet thresholds_from(const json& arr) {
    if (!arr.is_array()) throw ValidationError("thresholds: expected a JSON array");
    ThresholdSet t;
    for (const auto& item : arr) {
        if (!item.is_object() || !item.contains("covariate") || !item.contains("cuts")) {
            throw ValidationError("thresholds: every entry needs \"covariate\" and \"cuts\"");
        }
        t.names.push_back(item.at("covariate").get<std::string>());
        t.cuts.push_back(item.at("cuts").get<std::vector<double>>());
    }
    t.validate();
    return t;
}

json parse(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string(what) + ": invalid JSON: " + e.what());
    }
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RuntimeError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw RuntimeError("cannot write '" + path.string() + "'");
}

std::string thresholds_to_json(const ThresholdSet& thresholds) { return thresholds_json(thresholds).dump(2) + "\n"; }

ThresholdSet thresholds_from_json(const std::string& text) {
    try {
        return thresholds_from(parse(text, "thresholds"));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("thresholds: ") + e.what());
    }
}

void save_thresholds(const ThresholdSet& thresholds, const std::filesystem::path& path) {
    write_text(path, thresholds_to_json(thresholds));
}

ThresholdSet load_thresholds(const std::filesystem::path& path) { return thresholds_from_json(read_text(path)); }

std::string model_to_json(const FilterModel& model) {
    json doc;
    doc["format"] = kModelFormat;
    doc["version"] = kModelVersion;
    doc["intercept"] = model.intercept;
    doc["lambda"] = model.lambda;
    doc["thresholds"] = thresholds_json(model.thresholds);
    doc["column_means"] = model.column_means;
    doc["theta"] = model.theta;
    doc["B"] = model.beta;
    doc["convergence"] = {{"iterations", model.iterations},
                          {"converged", model.converged},
                          {"kkt_residual", model.kkt_residual}};
    return doc.dump(2) + "\n";
}

FilterModel model_from_json(const std::string& text) {
    const json doc = parse(text, "model");
    try {
        if (!doc.is_object() || doc.value("format", std::string()) != kModelFormat) {
            throw ValidationError(std::string("model: \"format\" must be \"") + kModelFormat + "\"");
        }
        const int version = doc.at("version").get<int>();
        if (version != kModelVersion) {
            throw ValidationError("model: unsupported version " + std::to_string(version));
        }
        FilterModel m;
        m.intercept = doc.at("intercept").get<double>();
        m.lambda = doc.at("lambda").get<double>();
        m.thresholds = thresholds_from(doc.at("thresholds"));
        m.feature_names = m.thresholds.names;
        m.column_means = doc.at("column_means").get<std::vector<double>>();
        m.theta = doc.at("theta").get<std::vector<double>>();
        m.beta = doc.at("B").get<std::vector<double>>();
        const json& conv = doc.at("convergence");
        m.iterations = conv.at("iterations").get<int>();
        m.converged = conv.at("converged").get<bool>();
        m.kkt_residual = conv.at("kkt_residual").get<double>();
        m.validate();
        return m;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("model: ") + e.what());
    }
}

void save_model(const FilterModel& model, const std::filesystem::path& path) {
    write_text(path, model_to_json(model));
}

FilterModel load_model(const std::filesystem::path& path) { return model_from_json(read_text(path)); }

}  // namespace filterlr
