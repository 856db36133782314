#include "excitable/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace excitable::cli {

using nlohmann::json;

namespace {

std::string with_position(const std::string& message, std::size_t line, std::size_t column) {
    if (line == 0) return message;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
}

// Walks one JSON object, remembering which keys were consumed so that any
// leftover key can be reported as unknown.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail("expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    void number(const std::string& key, double& out) {
        if (!has(key)) return;
        const json& v = raw(key);
        if (!v.is_number()) fail_key(key, "expected a number");
        out = v.get<double>();
    }

    void count(const std::string& key, std::size_t& out) {
        if (!has(key)) return;
        const json& v = raw(key);
        if (v.is_number_unsigned()) {
            out = v.get<std::size_t>();
        } else if (v.is_number_float() && v.get<double>() >= 0 && std::floor(v.get<double>()) == v.get<double>()) {
            out = static_cast<std::size_t>(v.get<double>());
        } else {
            fail_key(key, "expected a non-negative integer");
        }
    }

    void boolean(const std::string& key, bool& out) {
        if (!has(key)) return;
        const json& v = raw(key);
        if (!v.is_boolean()) fail_key(key, "expected true or false");
        out = v.get<bool>();
    }

    void string(const std::string& key, std::string& out) {
        if (!has(key)) return;
        const json& v = raw(key);
        if (!v.is_string()) fail_key(key, "expected a string");
        out = v.get<std::string>();
    }

    template <typename Parse>
    void enumeration(const std::string& key, Parse parse) {
        if (!has(key)) return;
        std::string s;
        string(key, s);
        try {
            parse(s);
        } catch (const std::exception& e) {
            fail_key(key, e.what());
        }
    }

    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) throw ParseError("unknown key '" + child(it.key()) + "'");
        }
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError((path_.empty() ? std::string("config") : path_) + ": " + what);
    }
    [[noreturn]] void fail_key(const std::string& key, const std::string& what) const {
        throw ParseError(child(key) + ": " + what);
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

KernelNormalization parse_normalization(const std::string& s) { return kernel_normalization_from_string(s); }

void read_hh(Reader r, HHParams& p) {
    r.number("C", p.C);
    r.number("g_na", p.g_na);
    r.number("g_k", p.g_k);
    r.number("g_l", p.g_l);
    r.number("e_na", p.e_na);
    r.number("e_k", p.e_k);
    r.number("e_l", p.e_l);
    r.finish();
}

void read_amari(Reader r, AmariParams& p) {
    r.number("tau", p.tau);
    r.number("sigma_e", p.sigma_e);
    r.number("sigma_i", p.sigma_i);
    r.number("theta", p.theta);
    r.number("slope", p.slope);
    r.enumeration("normalization", [&](const std::string& s) { p.normalization = parse_normalization(s); });
    r.number("gain_e", p.gain_e);
    r.number("gain_i", p.gain_i);
    r.finish();
}

void read_temporal(Reader r, MemTemporalParams& p) {
    r.number("C", p.C);
    r.number("g_l", p.g_l);
    r.number("g_e", p.g_e);
    r.number("g_i", p.g_i);
    r.number("e_e", p.e_e);
    r.number("e_i", p.e_i);
    r.number("tau_e", p.tau_e);
    r.number("tau_i", p.tau_i);
    r.number("v_th_e", p.v_th_e);
    r.number("v_th_i", p.v_th_i);
    r.finish();
}

void read_synapse(Reader r, SynapseParams& p) {
    r.number("sigma", p.sigma);
    r.number("tau", p.tau);
    r.number("v_th", p.v_th);
    r.number("g_max", p.g_max);
    r.number("e_rev", p.e_rev);
    r.enumeration("normalization", [&](const std::string& s) { p.normalization = parse_normalization(s); });
    r.finish();
}

void read_synaptic(Reader r, MemSynapticParams& p) {
    r.number("C", p.C);
    r.number("g_l", p.g_l);
    if (r.has("excitatory")) read_synapse(Reader(r.raw("excitatory"), r.child("excitatory")), p.excitatory);
    if (r.has("inhibitory")) read_synapse(Reader(r.raw("inhibitory"), r.child("inhibitory")), p.inhibitory);
    r.finish();
}

void read_params(Reader r, ScenarioConfig& c) {
    switch (c.model) {
    case ModelKind::hh: return read_hh(std::move(r), c.hh);
    case ModelKind::amari: return read_amari(std::move(r), c.amari);
    case ModelKind::mem_temporal: return read_temporal(std::move(r), c.temporal);
    case ModelKind::mem_spatial: return read_synaptic(std::move(r), c.synaptic);
    case ModelKind::mem_spatiotemporal:
        if (r.has("intrinsic")) read_temporal(Reader(r.raw("intrinsic"), r.child("intrinsic")), c.temporal);
        if (r.has("synaptic")) read_synaptic(Reader(r.raw("synaptic"), r.child("synaptic")), c.synaptic);
        r.finish();
        return;
    }
}

Pulse read_pulse(const json& j, const std::string& path) {
    Reader r(j, path);
    std::string type;
    r.string("type", type);
    if (type == "gaussian") {
        GaussianPulse p;
        r.number("amplitude", p.amplitude);
        r.number("sigma_x", p.sigma_x);
        r.number("sigma_t", p.sigma_t);
        r.number("t0", p.t0);
        r.finish();
        return p;
    }
    if (type == "rectangular") {
        RectangularPulse p;
        r.number("amplitude", p.amplitude);
        r.number("t_on", p.t_on);
        r.number("t_off", p.t_off);
        r.finish();
        return p;
    }
    r.fail_key("type", "expected \"gaussian\" or \"rectangular\", got \"" + type + "\"");
}

void read_stimulus(Reader r, StimulusProgram& s) {
    r.enumeration("target", [&](const std::string& t) { s.target = stimulus_target_from_string(t); });
    if (r.has("pulses")) {
        const json& arr = r.raw("pulses");
        if (!arr.is_array()) r.fail_key("pulses", "expected an array");
        s.pulses.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            s.pulses.push_back(read_pulse(arr[i], r.child("pulses") + "[" + std::to_string(i) + "]"));
        }
    }
    r.finish();
}

void read_output(Reader r, OutputSettings& o) {
    r.string("dir", o.dir);
    r.string("name", o.name);
    r.count("stride", o.stride);
    r.count("x_stride", o.x_stride);
    r.boolean("plots", o.plots);
    if (r.has("variables")) {
        const json& arr = r.raw("variables");
        if (!arr.is_array()) r.fail_key("variables", "expected an array of strings");
        o.variables.clear();
        for (const auto& v : arr) {
            if (!v.is_string()) r.fail_key("variables", "expected an array of strings");
            o.variables.push_back(v.get<std::string>());
        }
    }
    r.finish();
}

BisectSettings read_bisect(Reader r) {
    BisectSettings b;
    r.count("pulse", b.pulse);
    r.boolean("isolate", b.isolate);
    r.number("lo", b.lo);
    r.number("hi", b.hi);
    r.count("iterations", b.iterations);
    r.enumeration("response", [&](const std::string& s) { b.response = response_from_string(s); });
    r.number("level", b.level);
    if (r.has("readout")) {
        double t = 0;
        r.number("readout", t);
        b.readout = t;
    }
    if (r.has("window_start")) {
        double t = 0;
        r.number("window_start", t);
        b.window_start = t;
    }
    r.count("probes", b.probes);
    r.finish();
    return b;
}

json synapse_json(const SynapseParams& p) {
    return {{"sigma", p.sigma}, {"tau", p.tau},     {"v_th", p.v_th},
            {"g_max", p.g_max}, {"e_rev", p.e_rev}, {"normalization", to_string(p.normalization)}};
}

json temporal_json(const MemTemporalParams& p) {
    return {{"C", p.C},         {"g_l", p.g_l},     {"g_e", p.g_e},     {"g_i", p.g_i},
            {"e_e", p.e_e},     {"e_i", p.e_i},     {"tau_e", p.tau_e}, {"tau_i", p.tau_i},
            {"v_th_e", p.v_th_e}, {"v_th_i", p.v_th_i}};
}

json synaptic_json(const MemSynapticParams& p) {
    return {{"C", p.C},
            {"g_l", p.g_l},
            {"excitatory", synapse_json(p.excitatory)},
            {"inhibitory", synapse_json(p.inhibitory)}};
}

json params_json(const ScenarioConfig& c) {
    switch (c.model) {
    case ModelKind::hh:
        return {{"C", c.hh.C},       {"g_na", c.hh.g_na}, {"g_k", c.hh.g_k}, {"g_l", c.hh.g_l},
                {"e_na", c.hh.e_na}, {"e_k", c.hh.e_k},   {"e_l", c.hh.e_l}};
    case ModelKind::amari:
        return {{"tau", c.amari.tau},       {"sigma_e", c.amari.sigma_e},
                {"sigma_i", c.amari.sigma_i}, {"theta", c.amari.theta},
                {"slope", c.amari.slope},   {"normalization", to_string(c.amari.normalization)},
                {"gain_e", c.amari.gain_e}, {"gain_i", c.amari.gain_i}};
    case ModelKind::mem_temporal: return temporal_json(c.temporal);
    case ModelKind::mem_spatial: return synaptic_json(c.synaptic);
    case ModelKind::mem_spatiotemporal:
        return {{"intrinsic", temporal_json(c.temporal)}, {"synaptic", synaptic_json(c.synaptic)}};
    }
    return json::object();
}

json pulse_json(const Pulse& p) {
    if (const auto* g = std::get_if<GaussianPulse>(&p)) {
        return {{"type", "gaussian"}, {"amplitude", g->amplitude}, {"sigma_x", g->sigma_x},
                {"sigma_t", g->sigma_t}, {"t0", g->t0}};
    }
    const auto& r = std::get<RectangularPulse>(p);
    return {{"type", "rectangular"}, {"amplitude", r.amplitude}, {"t_on", r.t_on}, {"t_off", r.t_off}};
}

std::pair<std::size_t, std::size_t> line_and_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : Error(with_position(message, line, column)), line_(line), column_(column) {}

std::string to_string(ModelKind k) {
    switch (k) {
    case ModelKind::hh: return "hh";
    case ModelKind::amari: return "amari";
    case ModelKind::mem_temporal: return "mem-temporal";
    case ModelKind::mem_spatial: return "mem-spatial";
    case ModelKind::mem_spatiotemporal: return "mem-spatiotemporal";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
    for (auto k : {ModelKind::hh, ModelKind::amari, ModelKind::mem_temporal, ModelKind::mem_spatial,
                   ModelKind::mem_spatiotemporal}) {
        if (to_string(k) == s) return k;
    }
    throw ParseError("unknown model kind '" + s +
                     "' (expected hh, amari, mem-temporal, mem-spatial or mem-spatiotemporal)");
}

bool is_field_model(ModelKind k) {
    return k == ModelKind::amari || k == ModelKind::mem_spatial || k == ModelKind::mem_spatiotemporal;
}

std::string primary_variable(ModelKind k) {
    switch (k) {
    case ModelKind::amari: return "u";
    case ModelKind::mem_spatial:
    case ModelKind::mem_spatiotemporal: return "v_E";
    default: return "v";
    }
}

std::vector<std::string> state_components(ModelKind k) {
    switch (k) {
    case ModelKind::hh: return {"v", "m", "h", "n"};
    case ModelKind::amari: return {"u"};
    case ModelKind::mem_temporal: return {"v", "v_e", "v_i"};
    case ModelKind::mem_spatial: return {"v_E", "v_I", "s_E", "s_I"};
    case ModelKind::mem_spatiotemporal: return {"v_E", "v_I", "ve_E", "vi_E", "ve_I", "vi_I", "s_E", "s_I"};
    }
    return {};
}

std::string to_string(Response r) { return r == Response::peak ? "peak" : "field_max"; }

Response response_from_string(const std::string& s) {
    if (s == "peak") return Response::peak;
    if (s == "field_max") return Response::field_max;
    throw ParseError("unknown response '" + s + "' (expected peak or field_max)");
}

ScenarioConfig default_config(ModelKind k) {
    ScenarioConfig c;
    c.model = k;
    c.stimulus.target = is_field_model(k) ? StimulusTarget::excitatory : StimulusTarget::point;
    c.output.stride = is_field_model(k) ? 100 : 10;
    c.output.name = to_string(k);
    return c;
}

ScenarioConfig from_json(const json& j) {
    Reader r(j, "");
    if (!r.has("model")) throw ParseError("missing required key 'model'");
    std::string kind;
    r.string("model", kind);
    ScenarioConfig c = default_config(model_kind_from_string(kind));

    if (r.has("params")) read_params(Reader(r.raw("params"), "params"), c);
    if (r.has("grid")) {
        Reader g(r.raw("grid"), "grid");
        g.number("half_length", c.grid.half_length);
        g.count("n_points", c.grid.n_points);
        g.finish();
    }
    if (r.has("time")) {
        Reader t(r.raw("time"), "time");
        t.number("t_start", c.time.t_start);
        t.number("t_end", c.time.t_end);
        t.number("dt", c.time.dt);
        t.finish();
    }
    if (r.has("stimulus")) read_stimulus(Reader(r.raw("stimulus"), "stimulus"), c.stimulus);
    if (r.has("readouts")) {
        const json& arr = r.raw("readouts");
        if (!arr.is_array()) r.fail_key("readouts", "expected an array of times");
        for (const auto& v : arr) {
            if (!v.is_number()) r.fail_key("readouts", "expected an array of times");
            c.readouts.push_back(v.get<double>());
        }
    }
    r.enumeration("convolution", [&](const std::string& s) {
        if (s == "spectral") {
            c.convolution = ConvolutionMethod::spectral;
        } else if (s == "direct") {
            c.convolution = ConvolutionMethod::direct;
        } else {
            throw ParseError("expected spectral or direct");
        }
    });
    r.boolean("convergence_check", c.convergence_check);
    if (r.has("output")) read_output(Reader(r.raw("output"), "output"), c.output);
    if (r.has("bisect")) c.bisect = read_bisect(Reader(r.raw("bisect"), "bisect"));
    r.finish();

    auto violations = validate(c);
    if (!violations.empty()) throw ValidationError(std::move(violations));
    return c;
}

ScenarioConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_and_column(text, e.byte);
        std::string what = e.what();
        if (auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
        throw ParseError(what, line, col);
    }
    return from_json(j);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ScenarioConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

json to_json(const ScenarioConfig& c) {
    json j;
    j["model"] = to_string(c.model);
    j["params"] = params_json(c);
    if (is_field_model(c.model)) {
        j["grid"] = {{"half_length", c.grid.half_length}, {"n_points", c.grid.n_points}};
        j["convolution"] = c.convolution == ConvolutionMethod::spectral ? "spectral" : "direct";
    }
    j["time"] = {{"t_start", c.time.t_start}, {"t_end", c.time.t_end}, {"dt", c.time.dt}};
    json pulses = json::array();
    for (const auto& p : c.stimulus.pulses) pulses.push_back(pulse_json(p));
    j["stimulus"] = {{"target", to_string(c.stimulus.target)}, {"pulses", pulses}};
    j["readouts"] = c.readouts;
    j["convergence_check"] = c.convergence_check;
    j["output"] = {{"dir", c.output.dir},         {"name", c.output.name},
                   {"stride", c.output.stride},   {"x_stride", c.output.x_stride},
                   {"variables", c.output.variables}, {"plots", c.output.plots}};
    if (c.bisect) {
        const auto& b = *c.bisect;
        json jb = {{"pulse", b.pulse},
                   {"isolate", b.isolate},
                   {"lo", b.lo},
                   {"hi", b.hi},
                   {"iterations", b.iterations},
                   {"response", to_string(b.response)},
                   {"level", b.level},
                   {"probes", b.probes}};
        if (b.readout) jb["readout"] = *b.readout;
        if (b.window_start) jb["window_start"] = *b.window_start;
        j["bisect"] = jb;
    }
    return j;
}

std::vector<std::string> validate(const ScenarioConfig& c) {
    std::vector<std::string> v;
    auto append = [&](std::vector<std::string> more) { v.insert(v.end(), more.begin(), more.end()); };
    switch (c.model) {
    case ModelKind::hh: append(excitable::validate(c.hh)); break;
    case ModelKind::amari: append(excitable::validate(c.amari)); break;
    case ModelKind::mem_temporal: append(excitable::validate(c.temporal)); break;
    case ModelKind::mem_spatial: append(excitable::validate(c.synaptic)); break;
    case ModelKind::mem_spatiotemporal:
        append(excitable::validate(c.temporal));
        append(excitable::validate(c.synaptic));
        break;
    }
    if (is_field_model(c.model)) {
        if (!(c.grid.half_length > 0)) v.push_back("grid.half_length > 0");
        if (c.grid.n_points < 3 || c.grid.n_points % 2 == 0) v.push_back("grid.n_points odd and >= 3");
        if (c.stimulus.target == StimulusTarget::point) v.push_back("stimulus.target 'point' needs a point model");
    }
    if (!(c.time.dt > 0)) v.push_back("time.dt > 0");
    if (!(c.time.t_end > c.time.t_start)) v.push_back("time.t_end > time.t_start");
    for (double t : c.readouts) {
        if (!(t >= c.time.t_start && t <= c.time.t_end)) {
            v.push_back("readout " + std::to_string(t) + " inside the time window");
        }
    }
    if (c.output.stride == 0) v.push_back("output.stride >= 1");
    if (c.output.x_stride == 0) v.push_back("output.x_stride >= 1");
    const auto comps = state_components(c.model);
    for (const auto& name : c.output.variables) {
        if (std::find(comps.begin(), comps.end(), name) == comps.end()) {
            v.push_back("output variable '" + name + "' is a state component of " + to_string(c.model));
        }
    }
    append(c.stimulus.validate());
    if (c.bisect) {
        const auto& b = *c.bisect;
        if (b.pulse >= c.stimulus.pulses.size()) v.push_back("bisect.pulse indexes an existing pulse");
        if (b.lo > b.hi) v.push_back("bisect.lo <= bisect.hi");
        if (b.response == Response::field_max && !is_field_model(c.model)) {
            v.push_back("bisect.response field_max needs a field model");
        }
        if (b.response == Response::field_max && !b.readout) v.push_back("bisect.readout set for field_max");
    }
    return v;
}

SpatialGrid make_grid(const ScenarioConfig& c) {
    if (!is_field_model(c.model)) return SpatialGrid::make(1.0, 3);
    return SpatialGrid::make(c.grid.half_length, c.grid.n_points);
}

TimeGrid make_time(const ScenarioConfig& c) { return TimeGrid::make(c.time.t_start, c.time.t_end, c.time.dt); }

}  // namespace excitable::cli
