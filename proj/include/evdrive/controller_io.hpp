#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "evdrive/errors.hpp"
#include "evdrive/hinf.hpp"
#include "evdrive/state_space.hpp"

namespace evdrive {

namespace detail {

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& M) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& what) {
    if (!j.is_array()) throw ValidationError(what + ": expected an array of rows");
    const size_t rows = j.size();
    size_t cols = 0;
    if (rows > 0) {
        if (!j[0].is_array()) throw ValidationError(what + ": expected nested row arrays");
        cols = j[0].size();
    }
    Eigen::MatrixXd M(rows, cols);
    for (size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            throw ValidationError(what + ": ragged rows");
        for (size_t k = 0; k < cols; ++k) {
            if (!j[i][k].is_number()) throw ValidationError(what + ": non-numeric entry");
            M(i, k) = j[i][k].get<double>();
        }
    }
    return M;
}

inline nlohmann::json system_to_json(const StateSpaceModel& s) {
    nlohmann::json j;
    j["A"] = matrix_to_json(s.A);
    j["B"] = matrix_to_json(s.B);
    j["C"] = matrix_to_json(s.C);
    j["D"] = matrix_to_json(s.D);
    j["input_labels"] = s.input_labels;
    j["output_labels"] = s.output_labels;
    if (s.domain == TimeDomain::discrete) j["dt"] = s.dt;
    return j;
}

inline StateSpaceModel system_from_json(const nlohmann::json& j, const std::string& what) {
    StateSpaceModel s;
    for (const auto& item : j.items()) {
        const std::string& k = item.key();
        if (k != "A" && k != "B" && k != "C" && k != "D" && k != "dt" &&
            k != "input_labels" && k != "output_labels")
            throw ValidationError(what + ": unknown key " + k);
    }
    s.A = matrix_from_json(j.at("A"), what + ".A");
    s.B = matrix_from_json(j.at("B"), what + ".B");
    s.C = matrix_from_json(j.at("C"), what + ".C");
    s.D = matrix_from_json(j.at("D"), what + ".D");
    if (j.contains("input_labels")) s.input_labels = j.at("input_labels").get<std::vector<std::string>>();
    if (j.contains("output_labels"))
        s.output_labels = j.at("output_labels").get<std::vector<std::string>>();
    if (j.contains("dt")) {
        s.domain = TimeDomain::discrete;
        s.dt = j.at("dt").get<double>();
    }
    s.validate();
    return s;
}

}  // namespace detail

inline nlohmann::json controller_to_json(const ControllerRealization& k) {
    nlohmann::json j;
    j["schema"] = "evdrive.controller/1";
    j["mode"] = to_string(k.mode_tag);
    j["gamma_achieved"] = k.gamma_achieved;
    j["continuous"] = detail::system_to_json(k.continuous_sys);
    j["discrete"] = detail::system_to_json(k.discrete_sys);
    return j;
}

inline ControllerRealization controller_from_json(const nlohmann::json& j) {
    for (const auto& item : j.items()) {
        const std::string& k = item.key();
        if (k != "schema" && k != "mode" && k != "gamma_achieved" && k != "continuous" &&
            k != "discrete")
            throw ValidationError("controller file: unknown key " + k);
    }
    if (!j.contains("schema") || j.at("schema").get<std::string>() != "evdrive.controller/1")
        throw ValidationError("controller file: unsupported schema");
    ControllerRealization k;
    k.mode_tag = mode_from_string(j.at("mode").get<std::string>());
    k.gamma_achieved = j.at("gamma_achieved").get<double>();
    if (!(k.gamma_achieved >= 0.0))
        throw ValidationError("controller file: gamma_achieved must be >= 0");
    k.continuous_sys = detail::system_from_json(j.at("continuous"), "controller.continuous");
    k.discrete_sys = detail::system_from_json(j.at("discrete"), "controller.discrete");
    if (k.discrete_sys.domain != TimeDomain::discrete)
        throw ValidationError("controller file: discrete realization missing dt");
    return k;
}

inline void save_controller(const std::string& path, const ControllerRealization& k) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write controller file: " + path);
    out << controller_to_json(k).dump(2) << "\n";
}

inline ControllerRealization load_controller(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open controller file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("controller file: JSON parse failure in " + path + ": " +
                              e.what());
    }
    return controller_from_json(j);
}

}  // namespace evdrive
