#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "twistor/errors.hpp"
#include "twistor/field.hpp"
#include "twistor/gluing_builder.hpp"

namespace twistor {

namespace io_detail {

// shortest round-trippable decimal
inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace io_detail

// CSV rows `x,y,z,re,im`, z fastest, bit-exact on round trip.
inline void write_field_csv(const ScalarField3& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw LeftDomain("cannot open '" + path + "' for writing");
    out << "x,y,z,re,im\n";
    for (int i = 0; i < f.box.res[0]; ++i)
        for (int j = 0; j < f.box.res[1]; ++j)
            for (int k = 0; k < f.box.res[2]; ++k) {
                const auto& v = f.at(i, j, k);
                out << io_detail::num(f.box.coord(0, i)) << ','
                    << io_detail::num(f.box.coord(1, j)) << ','
                    << io_detail::num(f.box.coord(2, k)) << ','
                    << io_detail::num(v.real()) << ',' << io_detail::num(v.imag())
                    << '\n';
            }
    if (!out) throw LeftDomain("write failed on '" + path + "'");
}

// Grid geometry + run metadata next to the CSV.
inline void write_field_sidecar(const ScalarField3& f, const std::string& path,
                                const nlohmann::json& metadata = {}) {
    nlohmann::json j;
    j["origin"] = f.box.origin;
    j["extent"] = f.box.extent;
    j["res"] = f.box.res;
    j["spacing"] = {f.box.spacing(0), f.box.spacing(1), f.box.spacing(2)};
    j["order"] = "z-fastest";
    if (!metadata.is_null()) j["metadata"] = metadata;
    std::ofstream out(path);
    if (!out) throw LeftDomain("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
}

inline ScalarField3 read_field_csv(const std::string& csv_path,
                                   const std::string& sidecar_path) {
    nlohmann::json j;
    {
        std::ifstream in(sidecar_path);
        if (!in) throw LeftDomain("cannot open '" + sidecar_path + "'");
        in >> j;
    }
    GridBox box;
    box.origin = j.at("origin").get<std::array<double, 3>>();
    box.extent = j.at("extent").get<std::array<double, 3>>();
    box.res = j.at("res").get<std::array<int, 3>>();
    ScalarField3 f(box);

    std::ifstream in(csv_path);
    if (!in) throw LeftDomain("cannot open '" + csv_path + "'");
    std::string line;
    std::getline(in, line);  // header
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (n >= f.values.size()) throw GridTooSmall("CSV longer than grid");
        std::istringstream row(line);
        std::string cell;
        double col[5];
        for (int c = 0; c < 5; ++c) {
            if (!std::getline(row, cell, ',')) throw GridTooSmall("short CSV row");
            col[c] = std::stod(cell);
        }
        f.values[n++] = {col[3], col[4]};
    }
    if (n != f.values.size()) throw GridTooSmall("CSV shorter than grid");
    return f;
}

// gnuplot-compatible z = 0 slice: `x y re im` with blank lines between
// x-blocks.
inline void write_slice_z0(const ScalarField3& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw LeftDomain("cannot open '" + path + "' for writing");
    int k0 = 0;
    double best = std::abs(f.box.coord(2, 0));
    for (int k = 1; k < f.box.res[2]; ++k)
        if (std::abs(f.box.coord(2, k)) < best) best = std::abs(f.box.coord(2, k)), k0 = k;
    out << "# x y re im (slice z = " << io_detail::num(f.box.coord(2, k0)) << ")\n";
    for (int i = 0; i < f.box.res[0]; ++i) {
        for (int j = 0; j < f.box.res[1]; ++j) {
            const auto& v = f.at(i, j, k0);
            out << io_detail::num(f.box.coord(0, i)) << ' '
                << io_detail::num(f.box.coord(1, j)) << ' ' << io_detail::num(v.real())
                << ' ' << io_detail::num(v.imag()) << '\n';
        }
        out << '\n';
    }
}

inline nlohmann::json sampled_gluing_to_json(const SampledGluing& sg) {
    nlohmann::json j;
    j["half_order"] = sg.half_order;
    j["t_max"] = sg.t_max;
    j["fit_residual"] = sg.fit_residual;
    j["provenance"] = {{"lambda1", {sg.lambda1.real(), sg.lambda1.imag()}},
                       {"lambda2", {sg.lambda2.real(), sg.lambda2.imag()}},
                       {"lambda3", {sg.lambda3.real(), sg.lambda3.imag()}},
                       {"Y", "canonical"}};
    auto& samples = j["lambda_samples"] = nlohmann::json::array();
    auto& coeffs = j["cheb_coeffs"] = nlohmann::json::array();
    for (std::size_t s = 0; s < sg.fits.size(); ++s) {
        const cplx lam = CircleFunction::sample_point(sg.half_order, int(s));
        samples.push_back({lam.real(), lam.imag()});
        nlohmann::json row = nlohmann::json::array();
        for (const cplx& c : sg.fits[s].coeff) row.push_back({c.real(), c.imag()});
        coeffs.push_back(std::move(row));
    }
    return j;
}

inline SampledGluing sampled_gluing_from_json(const nlohmann::json& j) {
    SampledGluing sg;
    sg.half_order = j.at("half_order").get<int>();
    sg.t_max = j.at("t_max").get<double>();
    sg.fit_residual = j.at("fit_residual").get<double>();
    const auto& prov = j.at("provenance");
    auto cnum = [](const nlohmann::json& a) { return cplx(a.at(0), a.at(1)); };
    sg.lambda1 = cnum(prov.at("lambda1"));
    sg.lambda2 = cnum(prov.at("lambda2"));
    sg.lambda3 = cnum(prov.at("lambda3"));
    for (const auto& row : j.at("cheb_coeffs")) {
        Chebyshev c;
        c.radius = sg.t_max;
        for (const auto& e : row) c.coeff.push_back(cnum(e));
        sg.fits.push_back(std::move(c));
    }
    if (int(sg.fits.size()) != 2 * sg.half_order)
        throw GridTooSmall("cheb_coeffs count does not match half_order");
    return sg;
}

inline void write_sampled_gluing(const SampledGluing& sg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw LeftDomain("cannot open '" + path + "' for writing");
    out << sampled_gluing_to_json(sg).dump(2) << '\n';
}

inline SampledGluing read_sampled_gluing(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LeftDomain("cannot open '" + path + "'");
    nlohmann::json j;
    in >> j;
    return sampled_gluing_from_json(j);
}

}  // namespace twistor
