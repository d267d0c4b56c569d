#pragma once

#include <span>

#include "plcsynth/parameters.hpp"
#include "plcsynth/rng.hpp"

namespace plcsynth::gev {

// Generalized extreme value law with F(x) = exp(-(1 + xi z)^{-1/xi}),
// z = (x - mu) / sigma; Gumbel at xi = 0.

double cdf(const GevParameters& p, double x);
double log_pdf(const GevParameters& p, double x);
double quantile(const GevParameters& p, double u);
// Mean; infinite for xi >= 1.
double mean(const GevParameters& p);
double sample(const GevParameters& p, RandomStream& rng);

// Sum of log_pdf, -infinity if any sample lies outside the support.
double log_likelihood(const GevParameters& p, std::span<const double> samples);

}  // namespace plcsynth::gev
