#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mrseg/grid.hpp"

namespace mrseg {

// Per-case bundle of expert masks, prediction masks, and clinical covariates.
struct CaseRecord {
    std::string case_id;
    std::map<std::string, std::filesystem::path> expert_masks;      // expert_id -> path
    std::map<std::string, std::filesystem::path> prediction_masks;  // model_id -> path
    std::map<std::string, double> covariates;  // free-form named reals (mrs_90, aspects, ...)
};

struct Manifest {
    std::vector<CaseRecord> cases;
    std::vector<std::string> expert_ids;
    std::filesystem::path base_dir;  // mask paths resolve relative to this

    std::filesystem::path resolve(const std::filesystem::path& p) const {
        return p.is_absolute() ? p : base_dir / p;
    }
};

// Parses the JSON manifest document. Throws FormatError on malformed input,
// including an expert_id referenced by a case but absent from expert_ids.
Manifest load_manifest(const std::filesystem::path& path);

struct Diagnostic {
    std::string case_id;
    std::string message;
};

// Checks that every referenced file loads and that all grids of a case agree
// on dims and spacing. Returns one diagnostic per violation, never throws.
std::vector<Diagnostic> validate_manifest(const Manifest& manifest);

}  // namespace mrseg
