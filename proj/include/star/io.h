// Copyright 2026 The starlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "star/hamiltonian.h"
#include "star/surface_code.h"

namespace star {

/// One JSON object per line: {"coeff": 0.5, "pauli": "XZ_Y"}. Blank lines are skipped.
inline PauliHamiltonian read_hamiltonian_jsonl(std::istream &in) {
    PauliHamiltonian h;
    bool sized = false;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            auto j = nlohmann::json::parse(line);
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (it.key() != "coeff" && it.key() != "pauli") {
                    throw std::invalid_argument("unknown field '" + it.key() + "'");
                }
            }
            auto op = PauliString::from_label(j.at("pauli").get<std::string>());
            if (!sized) {
                h = PauliHamiltonian(op.num_qubits());
                sized = true;
            }
            h.add_term(j.at("coeff").get<double>(), std::move(op));
        } catch (const std::exception &e) {
            throw std::invalid_argument("hamiltonian line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!sized) {
        throw std::invalid_argument("empty Hamiltonian");
    }
    return h;
}

inline void write_hamiltonian_jsonl(std::ostream &out, const PauliHamiltonian &h) {
    for (const auto &t : h.terms()) {
        out << nlohmann::json{{"coeff", t.coeff}, {"pauli", t.op.str()}}.dump() << '\n';
    }
}

inline nlohmann::json layout_json(const CodeLayout &L) {
    nlohmann::json j;
    j["d"] = L.d;
    j["style"] = L.style == LayoutStyle::Rotated ? "rotated" : "unrotated";
    auto &data = j["data"] = nlohmann::json::array();
    for (const auto &c : L.data) {
        data.push_back({c.r, c.c});
    }
    auto &stabs = j["stabilizers"] = nlohmann::json::array();
    for (const auto &p : L.stabilizers) {
        stabs.push_back({{"type", p.x_type ? "X" : "Z"}, {"ancilla", {p.anc.r, p.anc.c}}, {"layers", p.layer_data}});
    }
    return j;
}

}  // namespace star
