#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "excitable/core.hpp"
#include "excitable/numerics.hpp"
#include "excitable/stimulus.hpp"

namespace excitable::cli {

/// Malformed config or CSV input. Line and column are 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line = 0, std::size_t column = 0);
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class BracketError : public Error {
public:
    using Error::Error;
};

enum class ModelKind { hh, amari, mem_temporal, mem_spatial, mem_spatiotemporal };

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);
bool is_field_model(ModelKind k);
/// Name of the plotted state component: v, u or v_E.
std::string primary_variable(ModelKind k);
std::vector<std::string> state_components(ModelKind k);

struct GridSettings {
    double half_length = 25.0;
    std::size_t n_points = 1001;

    friend bool operator==(const GridSettings&, const GridSettings&) = default;
};

struct TimeSettings {
    double t_start = 0.0;
    double t_end = 100.0;
    double dt = 0.01;

    friend bool operator==(const TimeSettings&, const TimeSettings&) = default;
};

struct OutputSettings {
    std::string dir;            // empty: resolved by the caller
    std::string name = "run";   // file name prefix
    std::size_t stride = 10;    // integrator snapshot stride
    std::size_t x_stride = 5;   // spatial subsampling of trajectory CSVs
    std::vector<std::string> variables;  // empty: the primary variable only
    bool plots = true;

    friend bool operator==(const OutputSettings&, const OutputSettings&) = default;
};

enum class Response {
    peak,       // max over the run of the primary variable (at x = 0 for fields)
    field_max,  // max over x of the primary variable at the readout time
};

std::string to_string(Response r);
Response response_from_string(const std::string& s);

struct BisectSettings {
    std::size_t pulse = 0;  // index into stimulus.pulses whose amplitude is varied
    bool isolate = true;    // drop the other pulses during classification
    double lo = 0.0;
    double hi = 1.0;
    std::size_t iterations = 20;
    Response response = Response::peak;
    double level = 0.0;  // response > level classifies as superthreshold
    std::optional<double> readout;       // field_max readout time; also ends the run
    std::optional<double> window_start;  // classification runs start here from rest
    std::size_t probes = 2;              // interior points re-checked in the final bracket

    friend bool operator==(const BisectSettings&, const BisectSettings&) = default;
};

struct ScenarioConfig {
    ModelKind model = ModelKind::mem_temporal;
    HHParams hh;
    AmariParams amari;
    MemTemporalParams temporal;
    MemSynapticParams synaptic;
    GridSettings grid;
    TimeSettings time;
    StimulusProgram stimulus;
    std::vector<double> readouts;
    ConvolutionMethod convolution = ConvolutionMethod::spectral;
    bool convergence_check = false;
    OutputSettings output;
    std::optional<BisectSettings> bisect;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Defaults for the model kind: table parameters, its usual target population.
ScenarioConfig default_config(ModelKind k);

/// Parses a JSON scenario. Unknown keys and type mismatches raise ParseError;
/// parameter invariants raise ValidationError listing every violation.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Fully resolved config: every parameter the model uses, no hidden defaults.
nlohmann::json to_json(const ScenarioConfig& c);
ScenarioConfig from_json(const nlohmann::json& j);

std::vector<std::string> validate(const ScenarioConfig& c);

SpatialGrid make_grid(const ScenarioConfig& c);
TimeGrid make_time(const ScenarioConfig& c);

std::string read_file(const std::filesystem::path& path);

}  // namespace excitable::cli
