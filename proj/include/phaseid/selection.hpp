// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "phaseid/circuit.hpp"
#include "phaseid/matrix.hpp"

namespace phaseid::selection {

using circuit::VoltageDataset;

enum class Method { inverse_schur, greedy, exhaustive, facility, random };
std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct SelectionResult {
  IndexSet indices;
  double objective = 0.0;  // Trace sqrt(K/K_SS)
  Method method = Method::random;
  double runtime_seconds = 0.0;
};

// Line record: "<method> <m> <objective> <runtime> i0 i1 ...".
std::string to_record(const SelectionResult& r);
SelectionResult selection_from_record(const std::string& line);

// Cosine similarity kernel over customer rows. By default the rows are
// self- and batch-normalized first; raw mode uses them as stored.
SymMatrix cosine_kernel_matrix(const VoltageDataset& data,
                               bool apply_preprocessing = true);

// Trace sqrt of the Schur complement K/K_SS.
double selection_objective(const SymMatrix& k, const IndexSet& s);

// One-shot heuristic: invert K once and keep the m indices with the
// smallest diagonal entries of K^{-1} (ties to the lower index), leaving
// the largest entries in the complement block.
SelectionResult select_inverse_schur(const SymMatrix& k, size_t m);

// m rounds, each adding the index that minimizes the objective of the
// augmented set. O(N M) objective evaluations; comparison method only.
SelectionResult select_greedy(const SymMatrix& k, size_t m);

// Global minimizer by enumeration; guarded by C(n,m) <= 1e6.
SelectionResult select_exhaustive(const SymMatrix& k, size_t m);

// k-center greedy on the chordal metric d = sqrt(2 - 2 cos), started from
// the maximum-norm row; ties to the lower index.
SelectionResult select_facility_location(const VoltageDataset& data, size_t m);

// Uniform subset without replacement; objective evaluated on k.
SelectionResult select_random(const SymMatrix& k, size_t m, uint64_t seed);
IndexSet random_index_set(size_t n, size_t m, uint64_t seed);

struct LoewnerReport {
  bool holds = false;
  IndexSet maximizer;    // subset maximizing Tr((K/K_SS)^{-1})
  IndexSet witness;      // offending subset when holds == false
};

// Verifies that the inverse-trace maximizer's complement is not strictly
// above any other subset's complement in the Loewner order.
// Guarded by C(n,m) <= 1e4.
LoewnerReport check_loewner_minimality(const SymMatrix& k, size_t m);

}  // namespace phaseid::selection
