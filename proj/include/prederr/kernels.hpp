#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "prederr/domain.hpp"

// Data-parallel inner loops. Each kernel has an OpenMP version and a serial
// reference in kernels::serial with bit-identical results; per-row outputs are
// written independently and any reduction is left to the caller.
namespace prederr::kernels {

double softplus(double z);
double sigmoid(double z);

// Saturates at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

std::vector<std::size_t> unrank_combination(std::size_t n, std::size_t k,
                                            std::uint64_t rank);
bool next_combination(std::vector<std::size_t> &comb, std::size_t n);

using CombinationPredicate = std::function<bool(std::span<const std::size_t>)>;

// For each row: loss[i] = log(1 + e^z) - y z and residual[i] = sigmoid(z) - y
// with z = w.x + b.
void logistic_terms(const FeaturizedTrainingSet &rows, std::span<const double> w,
                    double b, std::span<double> loss, std::span<double> residual);

void squared_distances(const FeaturizedTrainingSet &rows,
                       std::span<const double> query, std::span<double> out);

// Lexicographically first k-subset of {0..n-1} accepted by `accept`.
// `accept` must be safe to call concurrently.
std::optional<std::vector<std::size_t>>
first_combination(std::size_t n, std::size_t k, const CombinationPredicate &accept);

namespace serial {

void logistic_terms(const FeaturizedTrainingSet &rows, std::span<const double> w,
                    double b, std::span<double> loss, std::span<double> residual);

void squared_distances(const FeaturizedTrainingSet &rows,
                       std::span<const double> query, std::span<double> out);

std::optional<std::vector<std::size_t>>
first_combination(std::size_t n, std::size_t k, const CombinationPredicate &accept);

} // namespace serial

} // namespace prederr::kernels
