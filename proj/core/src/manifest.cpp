#include "mrseg/manifest.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "mrseg/mask_io.hpp"

namespace mrseg {

using nlohmann::json;

Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open manifest: " + path.string());

    json doc;
    try {
        doc = json::parse(f);
    } catch (const json::parse_error& e) {
        throw FormatError("manifest is not valid JSON: " + std::string(e.what()));
    }

    Manifest m;
    m.base_dir = path.has_parent_path() ? path.parent_path() : ".";
    try {
        m.expert_ids = doc.at("expert_ids").get<std::vector<std::string>>();
        std::set<std::string> known(m.expert_ids.begin(), m.expert_ids.end());
        std::set<std::string> seen_cases;
        for (const auto& jc : doc.at("cases")) {
            CaseRecord rec;
            rec.case_id = jc.at("case_id").get<std::string>();
            if (!seen_cases.insert(rec.case_id).second)
                throw FormatError("duplicate case_id: " + rec.case_id);
            for (const auto& [id, p] : jc.at("expert_masks").items()) {
                if (!known.count(id))
                    throw FormatError("case " + rec.case_id +
                                      " references unknown expert_id: " + id);
                rec.expert_masks[id] = p.get<std::string>();
            }
            if (rec.expert_masks.empty())
                throw FormatError("case " + rec.case_id + " has no expert masks");
            if (jc.contains("prediction_masks"))
                for (const auto& [id, p] : jc.at("prediction_masks").items())
                    rec.prediction_masks[id] = p.get<std::string>();
            if (jc.contains("covariates"))
                for (const auto& [name, v] : jc.at("covariates").items())
                    rec.covariates[name] = v.get<double>();
            m.cases.push_back(std::move(rec));
        }
    } catch (const json::exception& e) {
        throw FormatError("malformed manifest: " + std::string(e.what()));
    }
    return m;
}

namespace {

// Loads one mask, reporting failures as diagnostics instead of throwing.
std::optional<Grid> try_load(const Manifest& m, const CaseRecord& c,
                             const std::filesystem::path& rel,
                             std::vector<Diagnostic>& out) {
    const auto full = m.resolve(rel);
    if (!std::filesystem::exists(full)) {
        out.push_back({c.case_id, "missing file: " + full.string()});
        return std::nullopt;
    }
    try {
        return load_mask(full);
    } catch (const Error& e) {
        out.push_back({c.case_id, std::string(e.what())});
        return std::nullopt;
    }
}

struct Geometry {
    Dims dims;
    Spacing spacing;
};

Geometry geometry_of(const Grid& g) {
    return std::visit([](const auto& v) { return Geometry{v.dims(), v.spacing()}; }, g);
}

}  // namespace

std::vector<Diagnostic> validate_manifest(const Manifest& manifest) {
    std::vector<Diagnostic> out;
    for (const auto& c : manifest.cases) {
        std::optional<Geometry> ref;
        std::string ref_name;
        auto check = [&](const std::string& name, const std::filesystem::path& p) {
            auto g = try_load(manifest, c, p, out);
            if (!g) return;
            const Geometry geo = geometry_of(*g);
            if (!ref) {
                ref = geo;
                ref_name = name;
            } else if (geo.dims != ref->dims || geo.spacing != ref->spacing) {
                out.push_back({c.case_id, "dims/spacing of " + name +
                                              " disagree with " + ref_name});
            }
        };
        for (const auto& [id, p] : c.expert_masks) check("expert " + id, p);
        for (const auto& [id, p] : c.prediction_masks) check("prediction " + id, p);
    }
    return out;
}

}  // namespace mrseg
