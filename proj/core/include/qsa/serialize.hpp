#pragma once

#include <nlohmann/json.hpp>

#include "qsa/channels.hpp"
#include "qsa/entropy_opt.hpp"
#include "qsa/superadd.hpp"

namespace qsa {

using json = nlohmann::json;

/// Unit for reported entropies. Everything is computed in nats; conversion
/// happens only when a report is serialized.
enum class LogBase { e, two };

double to_log_base(double nats, LogBase base);

/// Rounds to 12 significant digits, the precision of every serialized number.
double round_sig12(double x);

/// {"dim_in", "dim_out", "kraus": [[[re, im], ...], ...]}, each operator
/// flattened row-major.
json channel_to_json(const Channel& ch);
/// Inverse of channel_to_json; the result is validated as a channel.
Channel channel_from_json(const json& j);

json state_to_json(const DensityMatrix& rho);
json to_json(const OptResult& result, LogBase base = LogBase::e);
json to_json(const LemmaReport& report, LogBase base = LogBase::e);
json to_json(const SuperaddReport& report, LogBase base = LogBase::e);
json to_json(const AdditivityReport& report, LogBase base = LogBase::e);

}  // namespace qsa
