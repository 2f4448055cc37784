#include "despeckle/presets.hpp"

namespace despeckle {

const std::vector<PresetEntry>& preset_table() {
    static const std::vector<PresetEntry> table = [] {
        std::vector<PresetEntry> t;
        auto add = [&t](const char* image, const char* kind, ModelKind m, int looks,
                        double a, double b, double g, double l) {
            t.push_back({std::string(image) + "-" + kind + "-L" + std::to_string(looks),
                         m, looks, a, b, g, l});
        };
        const int L[4] = {1, 3, 5, 10};

        // peppers, gray
        {
            const double a_h[4] = {1, 2, 2, 2};
            const double l_t[4] = {0.05, 0.05, 0.05, 0.1};
            const double a_p[4] = {1, 1, 1, 2};
            const double l_p[4] = {0.1, 0.1, 0.1, 0.5};
            for (int i = 0; i < 4; ++i) {
                add("peppers", "gray", ModelKind::hpcpde, L[i], a_h[i], 3, 5, 0);
                add("peppers", "gray", ModelKind::tdfm, L[i], 1, 2, 5, l_t[i]);
                add("peppers", "gray", ModelKind::proposed, L[i], a_p[i], 10, 1, l_p[i]);
            }
        }
        // parrots, gray
        {
            const double l_t[4] = {0.05, 0.1, 0.1, 0.2};
            const double g_p[4] = {1, 1, 1, 2};
            for (int i = 0; i < 4; ++i) {
                add("parrots", "gray", ModelKind::hpcpde, L[i], 1, 3, 1, 0);
                add("parrots", "gray", ModelKind::tdfm, L[i], 1, 2, 5, l_t[i]);
                add("parrots", "gray", ModelKind::proposed, L[i], 2, 10, g_p[i], 0.05);
            }
        }
        // baboon, color
        {
            const double a_t[4] = {1, 1.1, 1.2, 1.2};
            const double a_p[4] = {1, 1, 1, 2};
            for (int i = 0; i < 4; ++i) {
                add("baboon", "color", ModelKind::hpcpde, L[i], 3, 3, 3, 0);
                add("baboon", "color", ModelKind::tdfm, L[i], a_t[i], 2, 5, 0.1);
                add("baboon", "color", ModelKind::proposed, L[i], a_p[i], 10, 3, 0.07);
            }
        }
        // caps, color
        {
            const double a_h[4] = {1, 1, 1, 2};
            const double l_t[4] = {0.5, 0.5, 0.5, 0.3};
            const double a_p[4] = {1, 1, 1, 1.8};
            const double g_p[4] = {2.5, 2.5, 2.5, 2};
            const double l_p[4] = {0.01, 0.01, 0.02, 0.05};
            for (int i = 0; i < 4; ++i) {
                add("caps", "color", ModelKind::hpcpde, L[i], a_h[i], 3, 3, 0);
                add("caps", "color", ModelKind::tdfm, L[i], 1, 2, 5, l_t[i]);
                add("caps", "color", ModelKind::proposed, L[i], a_p[i], 10, g_p[i], l_p[i]);
            }
        }
        // single-look radar / ultrasound scenes, any looks
        t.push_back({"sar1-gray", ModelKind::proposed, 0, 0.1, 4, 5, 0.007});
        t.push_back({"ultrasound2-gray", ModelKind::proposed, 0, 0.1, 4, 2, 0.001});
        return t;
    }();
    return table;
}

const PresetEntry* find_preset(const std::string& name, ModelKind model) {
    const auto& table = preset_table();
    for (const PresetEntry& e : table)
        if (e.name == name && e.model == model) return &e;

    // unique match on name alone (model-agnostic entries like the sar scenes)
    const PresetEntry* only = nullptr;
    int hits = 0;
    for (const PresetEntry& e : table)
        if (e.name == name) {
            only = &e;
            ++hits;
        }
    if (hits == 1) return only;

    // "<model>-<image>-L<looks>" alias; the embedded model wins
    auto dash = name.find('-');
    if (dash != std::string::npos) {
        const std::string head = name.substr(0, dash);
        ModelKind m;
        if (head == "proposed") m = ModelKind::proposed;
        else if (head == "tdfm") m = ModelKind::tdfm;
        else if (head == "hpcpde") m = ModelKind::hpcpde;
        else return nullptr;
        const std::string rest = name.substr(dash + 1);  // "<image>-L<looks>"
        auto mid = rest.find("-L");
        if (mid == std::string::npos) return nullptr;
        const std::string image = rest.substr(0, mid);
        for (const char* kind : {"gray", "color"}) {
            std::string full = image + "-" + kind + rest.substr(mid);
            for (const PresetEntry& e : preset_table())
                if (e.name == full && e.model == m) return &e;
        }
    }
    return nullptr;
}

void apply_preset(ModelParams& p, const PresetEntry& e) {
    p.model = e.model;
    p.alpha = e.alpha;
    p.beta = e.beta;
    p.gamma = e.gamma;
    p.lambda = e.lambda;
}

}  // namespace despeckle
