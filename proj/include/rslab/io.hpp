#pragma once

#include <string>

#include <json.hpp>

#include "rslab/ensemble.hpp"

namespace rslab {

using nlohmann::json;

// %.17g: round-trippable doubles, locale-independent, byte-stable across runs.
std::string format_full(double v);

// JSON null for NaN/inf so reports stay valid JSON.
json finite_or_null(double v);

json measure_to_json(const AtomicMeasure& mu);
AtomicMeasure measure_from_json(const json& j);

// one row per sample: index,tv,tau,admissible,sup_norm,iterations,residual
std::string samples_csv(const EnsembleReport& report);

// one row per node: coordinates then the value
std::string field_csv(const GridField& field);

// one row per trial: trial,sum (standardized block sums)
std::string clt_sums_csv(const CltReport& report);

// one row per trial: trial,deviation
std::string lln_sums_csv(const LlnReport& report);

// one row per level: k,exceed_prob,partial_sum
std::string borel_cantelli_csv(const BorelCantelliReport& report);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace rslab
