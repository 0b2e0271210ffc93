#include <chromaterm/model_io.hpp>

#include <chromaterm/error.hpp>
#include <chromaterm/image.hpp>

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace chromaterm {

using Json = nlohmann::ordered_json;

namespace {

Json triple(double x, double y, double z) { return Json::array({x, y, z}); }

std::array<double, 3> read_triple(const Json& j, const char* key) {
    const Json& v = j.at(key);
    if (!v.is_array() || v.size() != 3) throw data_error(std::string("'") + key + "' must be an array of three numbers");
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

}  // namespace

std::string model_to_json(const ColourModel& model) {
    Json doc;
    doc["format_version"] = kModelFormatVersion;
    doc["colour_space"] = model.colour_space();
    doc["rotation_convention"] = kRotationConvention;
    Json terms = Json::array();
    for (const auto& t : model.terms()) {
        const auto& e = t.ellipsoid;
        Json term;
        term["name"] = t.name;
        term["centre"] = triple(e.centre.L, e.centre.a, e.centre.b);
        term["semi_axes"] = triple(e.semi_axes[0], e.semi_axes[1], e.semi_axes[2]);
        term["rotation"] = triple(e.rotation[0], e.rotation[1], e.rotation[2]);
        term["steepness"] = t.steepness;
        if (t.adapted_form) {
            const auto& q = *t.adapted_form;
            term["adapted_form"] = Json::array({triple(q(0, 0), q(0, 1), q(0, 2)), triple(q(1, 0), q(1, 1), q(1, 2)),
                                                triple(q(2, 0), q(2, 1), q(2, 2))});
        }
        terms.push_back(std::move(term));
    }
    doc["terms"] = std::move(terms);
    return doc.dump(2) + "\n";
}

ColourModel model_from_json(const std::string& text) {
    try {
        const Json doc = Json::parse(text);
        const int version = doc.at("format_version").get<int>();
        if (version != kModelFormatVersion)
            throw data_error("unsupported model format_version " + std::to_string(version));
        const auto convention = doc.at("rotation_convention").get<std::string>();
        if (convention != kRotationConvention) throw data_error("unsupported rotation convention '" + convention + "'");

        std::vector<ColourTerm> terms;
        for (const Json& j : doc.at("terms")) {
            ColourTerm t;
            t.name = j.at("name").get<std::string>();
            const auto c = read_triple(j, "centre");
            t.ellipsoid.centre = {c[0], c[1], c[2]};
            t.ellipsoid.semi_axes = read_triple(j, "semi_axes");
            t.ellipsoid.rotation = read_triple(j, "rotation");
            t.steepness = j.at("steepness").get<double>();
            if (j.contains("adapted_form")) {
                const Json& rows = j.at("adapted_form");
                if (!rows.is_array() || rows.size() != 3) throw data_error("'adapted_form' must be a 3x3 array");
                Eigen::Matrix3d q;
                for (int r = 0; r < 3; ++r) {
                    if (!rows[r].is_array() || rows[r].size() != 3) throw data_error("'adapted_form' must be a 3x3 array");
                    for (int k = 0; k < 3; ++k) q(r, k) = rows[r][k].get<double>();
                }
                t.adapted_form = q;
            }
            terms.push_back(std::move(t));
        }
        return ColourModel(std::move(terms), doc.at("colour_space").get<std::string>());
    } catch (const Json::exception& e) {
        throw data_error(std::string("malformed model file: ") + e.what());
    }
}

ColourModel read_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error(path.string() + ": cannot open model file");
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return model_from_json(text.str());
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

void write_model(const std::filesystem::path& path, const ColourModel& model) {
    const std::string text = model_to_json(model);
    write_atomically(path, [&](const std::filesystem::path& tmp) {
        std::ofstream out(tmp, std::ios::binary);
        out << text;
        if (!out.flush()) throw data_error(path.string() + ": write failed");
    });
}

}  // namespace chromaterm
