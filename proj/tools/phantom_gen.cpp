// Generates the synthetic multi-expert phantom dataset used by the
// integration tests: 20 cases, 3 experts, 2 model predictions, clinical
// covariates. Fully deterministic for a given seed.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mrseg/fusion.hpp"
#include "mrseg/mask_io.hpp"
#include "mrseg/report.hpp"
#include "mrseg/rng.hpp"

namespace fs = std::filesystem;
using namespace mrseg;

namespace {

constexpr Dims kDims{20, 20, 10};

struct Blob {
    double cx, cy, cz;   // center, voxel units
    double rx, ry, rz;   // radii, voxel units
};

VoxelMask render_blob(const Blob& b, const Spacing& sp) {
    std::vector<std::uint8_t> data(kDims.count(), 0);
    if (b.rx > 0.0) {
        for (std::uint32_t z = 0; z < kDims.nz; ++z)
            for (std::uint32_t y = 0; y < kDims.ny; ++y)
                for (std::uint32_t x = 0; x < kDims.nx; ++x) {
                    const double dx = (x - b.cx) / b.rx;
                    const double dy = (y - b.cy) / b.ry;
                    const double dz = (z - b.cz) / b.rz;
                    if (dx * dx + dy * dy + dz * dz <= 1.0)
                        data[(std::size_t(z) * kDims.ny + y) * kDims.nx + x] = 1;
                }
    }
    return VoxelMask(kDims, sp, std::move(data));
}

// Radius scale classes: below-threshold, medium (B2), large (B3), largest (B4).
struct CaseSpec {
    double base_radius;  // voxels
    Spacing spacing;
};

CaseSpec spec_for(std::size_t case_idx) {
    if (case_idx < 2) return {case_idx == 0 ? 0.0 : 1.2, {0.9, 0.9, 3.0}};
    if (case_idx < 16) return {4.0 + 0.35 * double(case_idx - 2), {0.9, 0.9, 3.0}};
    if (case_idx < 18) return {5.5, {2.0, 2.0, 5.0}};
    return {6.0, {2.6, 2.6, 6.0}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic phantom dataset generator"};
    fs::path out_dir;
    std::uint64_t seed = 20;
    app.add_option("--out", out_dir, "Output directory")->required();
    app.add_option("--seed", seed, "RNG seed");
    CLI11_PARSE(app, argc, argv);

    fs::create_directories(out_dir / "masks");
    const RngStream rng(seed, "phantom");

    nlohmann::json cases = nlohmann::json::array();
    const std::vector<std::string> experts = {"A", "B", "C"};

    for (std::size_t ci = 0; ci < 20; ++ci) {
        char id[8];
        std::snprintf(id, sizeof(id), "case%02zu", ci + 1);
        const CaseSpec spec = spec_for(ci);
        const RngStream crng = rng.substream(ci);

        const Blob latent{
            8.0 + 4.0 * crng.uniform(0), 8.0 + 4.0 * crng.uniform(1),
            4.0 + 2.0 * crng.uniform(2), spec.base_radius,
            spec.base_radius * (0.9 + 0.2 * crng.uniform(3)),
            spec.base_radius * 0.55,
        };

        nlohmann::json expert_masks, prediction_masks;
        std::vector<VoxelMask> expert_grids;
        for (std::size_t e = 0; e < experts.size(); ++e) {
            const RngStream erng = crng.substream(100 + e);
            Blob b = latent;
            const double scale = 0.85 + 0.3 * erng.uniform(0);
            b.rx *= scale;
            b.ry *= 0.85 + 0.3 * erng.uniform(1);
            b.rz *= 0.85 + 0.3 * erng.uniform(2);
            b.cx += erng.uniform(3) - 0.5;
            b.cy += erng.uniform(4) - 0.5;
            const VoxelMask mask = render_blob(b, spec.spacing);
            const std::string rel = "masks/" + std::string(id) + "_expert_" + experts[e] + ".mrsg";
            save_mask(mask, out_dir / rel);
            expert_masks[experts[e]] = rel;
            expert_grids.push_back(mask);
        }

        // Model "mv": a slightly shrunk consensus; model "rnd": tracks one
        // expert with independent jitter.
        {
            Blob b = latent;
            b.rx *= 0.92;
            b.ry *= 0.92;
            b.rz *= 0.92;
            const std::string rel = "masks/" + std::string(id) + "_model_mv.mrsg";
            save_mask(render_blob(b, spec.spacing), out_dir / rel);
            prediction_masks["mv"] = rel;
        }
        {
            const RngStream mrng = crng.substream(200);
            Blob b = latent;
            b.rx *= 0.9 + 0.2 * mrng.uniform(0);
            b.ry *= 0.9 + 0.2 * mrng.uniform(1);
            b.rz *= 0.9 + 0.2 * mrng.uniform(2);
            b.cx += 0.6 * (mrng.uniform(3) - 0.5);
            const std::string rel = "masks/" + std::string(id) + "_model_rnd.mrsg";
            save_mask(render_blob(b, spec.spacing), out_dir / rel);
            prediction_masks["rnd"] = rel;
        }

        const double ref_vol = volume_ml(expert_grids[0]);
        const RngStream vrng = crng.substream(300);
        nlohmann::json covariates{
            {"mrs_30", double(std::min(6, int(ref_vol / 20.0 + 3.0 * vrng.uniform(0))))},
            {"mrs_90", double(std::min(6, int(ref_vol / 25.0 + 3.0 * vrng.uniform(1))))},
            {"aspects", double(std::max(0, 10 - int(ref_vol / 12.0 + 2.0 * vrng.uniform(2))))},
            {"ctp_core_ml", ref_vol * (0.7 + 0.6 * vrng.uniform(3))},
            {"dwi_24h_ml", ref_vol * (0.8 + 0.4 * vrng.uniform(4))},
            {"reperfused", ci % 3 == 0 ? 0.0 : 1.0},
        };

        cases.push_back({{"case_id", id},
                         {"expert_masks", expert_masks},
                         {"prediction_masks", prediction_masks},
                         {"covariates", covariates}});
    }

    nlohmann::json manifest{{"expert_ids", experts}, {"cases", cases}};
    std::ofstream f(out_dir / "manifest.json", std::ios::trunc);
    f << manifest.dump(2) << '\n';
    std::cout << "wrote phantom to " << out_dir << "\n";
    return 0;
}
