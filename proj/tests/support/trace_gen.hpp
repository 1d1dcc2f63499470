#pragma once

// Hand-rolled generators shared by the unit and acceptance tests.

#include "tracekit/schema/trace.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace tracekit::testing {

using Rng = std::mt19937_64;

std::filesystem::path fixture_dir();
std::filesystem::path golden_dir();
std::filesystem::path config_dir();

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi);  // inclusive
double uniform_real(Rng& rng, double lo, double hi);
bool coin(Rng& rng, double p = 0.5);

// Printable text, possibly with quotes, colons, '#', UTF-8 and escapes; never blank when `nonblank`.
std::string random_text(Rng& rng, std::size_t max_len, bool nonblank);

// Label that parse_facing_token maps back to `o` ("NW", "North (+Y)", "south-east", ...).
std::string facing_label(Rng& rng, schema::Octant o);

// Any document accepted by parse_trace: unique ids, monotone steps, origin start.
schema::TraceDocument random_document(Rng& rng);

// Scene for oracle properties: up to `max_entities` entities with sizes, a short trajectory.
schema::TraceDocument random_scene(Rng& rng, std::size_t max_entities);

// Clean document with no errors and no warnings.
schema::TraceDocument clean_document();

schema::TraceDocument bedroom_example();

// Random byte-level edits of `s`.
std::string mutate(Rng& rng, std::string s);

}  // namespace tracekit::testing
