#pragma once

// KernelTable: sampled kernel values on a (t, |x|, |y|, angle) grid with the
// full provenance needed to reproduce them, serialized as a versioned binary
// file: magic "FKL1", a length-prefixed UTF-8 JSON header, then the values
// as row-major 64-bit little-endian floats.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fkl/constants.hpp"

namespace fkl {

struct KernelTable {
    std::string method;  // "trotter" | "duhamel" | "mc" | "eps_limit"
    ProblemParams params;
    std::vector<double> t_values;
    std::vector<double> source_radii;  // |x|
    std::vector<double> target_radii;  // |y|
    std::vector<double> angles;        // angle between x and y
    std::vector<double> values;        // [it][ix][iy][ia], row-major
    double error_estimate = 0.0;
    std::uint64_t seed = 0;
    std::string config_json = "{}";

    std::size_t index(std::size_t it, std::size_t ix, std::size_t iy, std::size_t ia) const {
        return ((it * source_radii.size() + ix) * target_radii.size() + iy) * angles.size() +
               ia;
    }
    double at(std::size_t it, std::size_t ix, std::size_t iy, std::size_t ia) const {
        return values[index(it, ix, iy, ia)];
    }
    double& at(std::size_t it, std::size_t ix, std::size_t iy, std::size_t ia) {
        return values[index(it, ix, iy, ia)];
    }
    std::size_t expected_size() const {
        return t_values.size() * source_radii.size() * target_radii.size() * angles.size();
    }

    nlohmann::json header() const {
        nlohmann::json h;
        h["format"] = "FKL1";
        h["method"] = method;
        h["params"] = {{"d", params.d},
                       {"alpha", params.alpha},
                       {"delta", params.delta},
                       {"eps", params.eps}};
        h["t_values"] = t_values;
        h["source_radii"] = source_radii;
        h["target_radii"] = target_radii;
        h["angles"] = angles;
        h["error_estimate"] = error_estimate;
        h["seed"] = seed;
        h["config"] = nlohmann::json::parse(config_json, nullptr, false).is_discarded()
                          ? nlohmann::json(config_json)
                          : nlohmann::json::parse(config_json);
        return h;
    }
};

inline void save_kernel_table(const KernelTable& table, const std::string& path) {
    if (table.values.size() != table.expected_size())
        throw std::runtime_error("save_kernel_table: value count does not match grid");
    std::string head = table.header().dump();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("save_kernel_table: cannot open " + path);
    out.write("FKL1", 4);
    std::uint32_t len = static_cast<std::uint32_t>(head.size());
    char lenbuf[4];
    std::memcpy(lenbuf, &len, 4);  // little-endian hosts only
    out.write(lenbuf, 4);
    out.write(head.data(), static_cast<std::streamsize>(head.size()));
    out.write(reinterpret_cast<const char*>(table.values.data()),
              static_cast<std::streamsize>(table.values.size() * sizeof(double)));
    if (!out) throw std::runtime_error("save_kernel_table: write failed for " + path);
}

inline KernelTable load_kernel_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_kernel_table: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "FKL1", 4) != 0)
        throw std::runtime_error("load_kernel_table: bad magic in " + path);
    std::uint32_t len = 0;
    in.read(reinterpret_cast<char*>(&len), 4);
    std::string head(len, '\0');
    in.read(head.data(), len);
    if (!in) throw std::runtime_error("load_kernel_table: truncated header in " + path);
    nlohmann::json h = nlohmann::json::parse(head);

    KernelTable t;
    t.method = h.at("method").get<std::string>();
    t.params.d = h.at("params").at("d").get<int>();
    t.params.alpha = h.at("params").at("alpha").get<double>();
    t.params.delta = h.at("params").at("delta").get<double>();
    t.params.eps = h.at("params").at("eps").get<double>();
    t.t_values = h.at("t_values").get<std::vector<double>>();
    t.source_radii = h.at("source_radii").get<std::vector<double>>();
    t.target_radii = h.at("target_radii").get<std::vector<double>>();
    t.angles = h.at("angles").get<std::vector<double>>();
    t.error_estimate = h.at("error_estimate").get<double>();
    t.seed = h.at("seed").get<std::uint64_t>();
    t.config_json = h.at("config").dump();
    t.values.resize(t.expected_size());
    in.read(reinterpret_cast<char*>(t.values.data()),
            static_cast<std::streamsize>(t.values.size() * sizeof(double)));
    if (!in) throw std::runtime_error("load_kernel_table: truncated values in " + path);
    return t;
}

}  // namespace fkl
