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

#include "star/io.h"

#include <sstream>

#include <gtest/gtest.h>

using namespace star;

TEST(HamiltonianJsonl, RoundTrip) {
    auto h = hubbard_2d(3, 3, 1.0, 4.0);
    std::stringstream ss;
    write_hamiltonian_jsonl(ss, h);
    auto back = read_hamiltonian_jsonl(ss);
    ASSERT_EQ(back.num_qubits(), h.num_qubits());
    ASSERT_EQ(back.num_terms(), h.num_terms());
    for (size_t i = 0; i < h.num_terms(); i++) {
        EXPECT_EQ(back.terms()[i].op, h.terms()[i].op);
        EXPECT_DOUBLE_EQ(back.terms()[i].coeff, h.terms()[i].coeff);
    }
    EXPECT_DOUBLE_EQ(back.one_norm(), h.one_norm());
}

TEST(HamiltonianJsonl, SkipsBlankLinesAndMerges) {
    std::istringstream in("{\"coeff\": 0.5, \"pauli\": \"XZ\"}\n\n  \n{\"pauli\": \"XZ\", \"coeff\": 0.25}\n");
    auto h = read_hamiltonian_jsonl(in);
    ASSERT_EQ(h.num_terms(), 1u);
    EXPECT_DOUBLE_EQ(h.terms()[0].coeff, 0.75);
}

TEST(HamiltonianJsonl, StrictErrorsCarryLineNumbers) {
    auto message = [](const std::string &text) {
        std::istringstream in(text);
        try {
            read_hamiltonian_jsonl(in);
        } catch (const std::invalid_argument &e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(message("{\"coeff\": 1, \"pauli\": \"X\"}\n{\"coeff\": 1, \"pauli\": \"Z\", \"w\": 2}\n").find("line 2"), std::string::npos);
    EXPECT_NE(message("{\"coeff\": 1, \"pauli\": \"X\"}\n{\"coeff\": 1, \"pauli\": \"ZZ\"}\n").find("line 2"), std::string::npos);
    EXPECT_NE(message("{\"coeff\": 1}\n").find("line 1"), std::string::npos);
    EXPECT_NE(message("not json\n").find("line 1"), std::string::npos);
    EXPECT_NE(message("{\"coeff\": \"1\", \"pauli\": \"X\"}\n").find("line 1"), std::string::npos);
    EXPECT_NE(message("\n\n").find("empty"), std::string::npos);
}

TEST(LayoutJson, MirrorsLayout) {
    for (auto style : {LayoutStyle::Unrotated, LayoutStyle::Rotated}) {
        auto [L, logical] = build_layout(5, style);
        auto j = layout_json(L);
        EXPECT_EQ(j["d"], 5);
        EXPECT_EQ(j["style"], style == LayoutStyle::Rotated ? "rotated" : "unrotated");
        ASSERT_EQ(j["data"].size(), L.num_data());
        ASSERT_EQ(j["stabilizers"].size(), L.stabilizers.size());
        for (size_t s = 0; s < L.stabilizers.size(); s++) {
            const auto &js = j["stabilizers"][s];
            size_t support = 0;
            for (int q : js["layers"].get<std::vector<int>>()) {
                support += q >= 0;
            }
            EXPECT_EQ(support, L.stabilizers[s].op.weight());
            EXPECT_EQ(js["type"], L.stabilizers[s].x_type ? "X" : "Z");
        }
    }
}
