#pragma once

#include <json.hpp>

#include "qft/bounds.hpp"
#include "qft/design_specs.hpp"
#include "qft/loop_shaping.hpp"
#include "qft/road_sim.hpp"
#include "qft/suspension.hpp"

namespace qft::io {

using nlohmann::json;

/// Non-finite values become strings ("inf", "-inf", "nan") so they survive JSON.
json number(double v);

json poly_to_json(const lti::Polynomiald& p);
json tf_to_json(const lti::TransferFunctiond& tf);
json state_space_to_json(const lti::StateSpaced& ss);
json plant_instance_to_json(const suspension::PlantInstance& p);
json interval_report_to_json(const suspension::IntervalReport& r);

json template_to_json(const bounds::Template& t);
json gain_set_to_json(const bounds::GainSet& s);
json bound_curve_to_json(const bounds::BoundCurve& b);
json loop_bound_to_json(const bounds::LoopBound& b);
json spread_report_to_json(const std::vector<bounds::SpreadRow>& rows);

json envelopes_to_json(const specs::EnvelopePair& env);
json step_metrics_to_json(const specs::StepMetrics& m);

json loop_report_to_json(const shaping::LoopReport& r);
json response_metrics_to_json(const road::ResponseMetrics& m);
json sim_result_to_json(const road::SimResult& r, std::size_t stride = 1);

}  // namespace qft::io
