#include <cmath>
#include <fstream>
#include <set>

#include "gkls/experiments.hpp"

namespace gkls {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::config, msg); }

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where)
{
    if (!obj.is_object()) config_error(where + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) config_error("unknown key '" + it.key() + "' in " + where);
}

double get_real(const json& v, const std::string& key)
{
    if (!v.is_number()) config_error("'" + key + "' must be a number");
    double x = v.get<double>();
    if (!std::isfinite(x)) config_error("'" + key + "' must be finite");
    return x;
}

int get_int(const json& v, const std::string& key)
{
    if (!v.is_number_integer()) config_error("'" + key + "' must be an integer");
    return v.get<int>();
}

cplx get_complex(const json& v, const std::string& key)
{
    if (v.is_number()) return get_real(v, key);
    if (v.is_array() && v.size() == 2) return {get_real(v[0], key), get_real(v[1], key)};
    config_error("'" + key + "' must be a number or a [re, im] pair");
}

json complex_json(cplx z)
{
    if (z.imag() == 0.0) return z.real();
    return json::array({z.real(), z.imag()});
}

Matrix parse_state_matrix(const json& v)
{
    check_keys(v, {"name", "re", "im"}, "initial_state");
    if (!v.contains("re")) config_error("explicit initial_state needs 're'");
    Matrix m = Matrix::Zero(2, 2);
    auto fill = [&](const json& rows, bool imag) {
        if (!rows.is_array() || rows.size() != 2) config_error("initial_state entries must be 2x2");
        for (int r = 0; r < 2; ++r) {
            if (!rows[r].is_array() || rows[r].size() != 2)
                config_error("initial_state entries must be 2x2");
            for (int c = 0; c < 2; ++c) {
                double x = get_real(rows[r][c], "initial_state");
                m(r, c) += imag ? cplx(0.0, x) : cplx(x, 0.0);
            }
        }
    };
    fill(v["re"], false);
    if (v.contains("im")) fill(v["im"], true);
    try {
        DensityMatrix check{Operator(m)};
    } catch (const Error& e) {
        config_error(std::string("initial_state is not a valid qubit state: ") + e.what());
    }
    return m;
}

}  // namespace

const char* version() { return GKLS_VERSION_STRING; }

const std::vector<std::string>& experiment_names()
{
    static const std::vector<std::string> names{"fig2",     "jc-sim",       "eigenops",
                                                "attractor", "coefficients", "touchard"};
    return names;
}

JCParams JCConfig::resolve(cplx alpha_value) const
{
    if (omega_eg && detuning) config_error("jc: give omega_eg or detuning, not both");
    if (g && rabi_frequency) config_error("jc: give g or rabi_frequency, not both");
    if (!(omega_c > 0.0)) config_error("jc: omega_c must be positive");
    const double det = omega_eg ? *omega_eg - omega_c : detuning.value_or(0.0);
    if (g) {
        if (*g < 0.0) config_error("jc: g must be non-negative");
        JCParams p;
        p.omega_c = omega_c;
        p.omega_eg = omega_c + det;
        p.g = *g;
        p.alpha = alpha_value;
        return p;
    }
    const double rabi = rabi_frequency.value_or(2.0);
    if (std::abs(alpha_value) == 0.0) {
        JCParams p;
        p.omega_c = omega_c;
        p.omega_eg = omega_c + det;
        p.g = 0.0;
        return p;
    }
    return JCParams::from_rabi(omega_c, det, rabi, alpha_value);
}

Matrix named_qubit_state(const std::string& name)
{
    const double h = 1.0 / std::sqrt(2.0);
    Vector v(2);
    if (name == "g") v << 1.0, 0.0;
    else if (name == "e") v << 0.0, 1.0;
    else if (name == "plus") v << h, h;
    else if (name == "minus") v << h, -h;
    else if (name == "plus_y") v << h, cplx(0.0, h);
    else if (name == "minus_y") v << h, cplx(0.0, -h);
    else config_error("unknown initial_state '" + name + "'");
    return v * v.adjoint();
}

ExperimentConfig default_config(const std::string& experiment)
{
    bool known = false;
    for (const auto& n : experiment_names()) known |= n == experiment;
    if (!known) config_error("unknown experiment '" + experiment + "'");
    ExperimentConfig cfg;
    cfg.experiment = experiment;
    cfg.initial_state = named_qubit_state(cfg.initial_state_name);
    cfg.output = "gkls-out/" + experiment;
    if (experiment == "attractor" || experiment == "coefficients") {
        BathSpec b;
        b.temperature = 0.5;
        b.model = SpectralModel::ohmic;
        b.eta = 0.05;
        b.cutoff = 10.0;
        cfg.bath = b;
    }
    if (experiment == "jc-sim") cfg.grid.t1 = 20.0;
    return cfg;
}

ExperimentConfig parse_config(const json& j, const std::string& experiment)
{
    ExperimentConfig cfg = default_config(experiment);
    check_keys(j, {"experiment", "jc", "alphas", "bath", "grid", "initial_state", "output", "sweep",
                   "touchard"},
               "config");
    if (j.contains("experiment")) {
        if (!j["experiment"].is_string()) config_error("'experiment' must be a string");
        if (j["experiment"].get<std::string>() != experiment)
            config_error("config is for experiment '" + j["experiment"].get<std::string>() +
                         "', not '" + experiment + "'");
    }
    if (j.contains("jc")) {
        const json& v = j["jc"];
        check_keys(v, {"omega_c", "omega_eg", "detuning", "g", "rabi_frequency", "alpha"}, "jc");
        if (v.contains("omega_c")) cfg.jc.omega_c = get_real(v["omega_c"], "omega_c");
        if (v.contains("omega_eg")) cfg.jc.omega_eg = get_real(v["omega_eg"], "omega_eg");
        if (v.contains("detuning")) cfg.jc.detuning = get_real(v["detuning"], "detuning");
        if (v.contains("g")) cfg.jc.g = get_real(v["g"], "g");
        if (v.contains("rabi_frequency"))
            cfg.jc.rabi_frequency = get_real(v["rabi_frequency"], "rabi_frequency");
        if (v.contains("alpha")) cfg.jc.alpha = get_complex(v["alpha"], "alpha");
        cfg.jc.resolve();
    }
    if (j.contains("alphas")) {
        if (!j["alphas"].is_array() || j["alphas"].empty())
            config_error("'alphas' must be a non-empty list");
        cfg.alphas.clear();
        for (const auto& a : j["alphas"]) cfg.alphas.push_back(get_complex(a, "alphas"));
    }
    if (j.contains("bath")) {
        const json& v = j["bath"];
        check_keys(v, {"temperature", "model", "eta", "cutoff", "band_lo", "band_hi"}, "bath");
        BathSpec b = cfg.bath.value_or(BathSpec{});
        if (v.contains("temperature")) b.temperature = get_real(v["temperature"], "temperature");
        if (v.contains("model")) {
            if (!v["model"].is_string()) config_error("'model' must be a string");
            b.model = spectral_model_from_string(v["model"].get<std::string>());
        }
        if (v.contains("eta")) b.eta = get_real(v["eta"], "eta");
        if (v.contains("cutoff")) b.cutoff = get_real(v["cutoff"], "cutoff");
        if (v.contains("band_lo")) b.band_lo = get_real(v["band_lo"], "band_lo");
        if (v.contains("band_hi")) b.band_hi = get_real(v["band_hi"], "band_hi");
        try {
            b.validate();
        } catch (const Error& e) {
            config_error(std::string("bath: ") + e.what());
        }
        cfg.bath = b;
    }
    if (j.contains("grid")) {
        const json& v = j["grid"];
        check_keys(v, {"t0", "t1", "steps", "normalized"}, "grid");
        if (v.contains("t0")) cfg.grid.t0 = get_real(v["t0"], "t0");
        if (v.contains("t1")) cfg.grid.t1 = get_real(v["t1"], "t1");
        if (v.contains("steps")) cfg.grid.steps = get_int(v["steps"], "steps");
        if (v.contains("normalized")) {
            if (!v["normalized"].is_boolean()) config_error("'normalized' must be a boolean");
            cfg.grid.normalized = v["normalized"].get<bool>();
        }
        if (!(cfg.grid.t1 > cfg.grid.t0) || cfg.grid.steps < 1)
            config_error("grid needs t1 > t0 and steps >= 1");
    }
    if (j.contains("initial_state")) {
        const json& v = j["initial_state"];
        if (v.is_string()) {
            cfg.initial_state_name = v.get<std::string>();
            cfg.initial_state = named_qubit_state(cfg.initial_state_name);
        } else {
            // Entries define the state; "name" is only a label (as in the summary echo).
            cfg.initial_state = parse_state_matrix(v);
            cfg.initial_state_name = "explicit";
            if (v.contains("name")) {
                if (!v["name"].is_string()) config_error("initial_state name must be a string");
                cfg.initial_state_name = v["name"].get<std::string>();
            }
        }
    }
    if (j.contains("output")) {
        if (!j["output"].is_string()) config_error("'output' must be a string");
        cfg.output = j["output"].get<std::string>();
    }
    if (j.contains("sweep")) {
        const json& v = j["sweep"];
        check_keys(v, {"parameter", "from", "to", "points"}, "sweep");
        if (v.contains("parameter")) {
            if (!v["parameter"].is_string()) config_error("'parameter' must be a string");
            cfg.sweep.parameter = v["parameter"].get<std::string>();
            if (cfg.sweep.parameter != "detuning" && cfg.sweep.parameter != "temperature")
                config_error("sweep parameter must be 'detuning' or 'temperature'");
        }
        if (v.contains("from")) cfg.sweep.from = get_real(v["from"], "from");
        if (v.contains("to")) cfg.sweep.to = get_real(v["to"], "to");
        if (v.contains("points")) cfg.sweep.points = get_int(v["points"], "points");
        if (cfg.sweep.points < 1) config_error("sweep needs at least one point");
    }
    if (j.contains("touchard")) {
        const json& v = j["touchard"];
        check_keys(v, {"orders", "xs"}, "touchard");
        if (v.contains("orders")) {
            cfg.touchard.orders.clear();
            for (const auto& o : v["orders"]) {
                int k = get_int(o, "orders");
                if (k < 0 || k > 12) config_error("touchard orders must be in [0, 12]");
                cfg.touchard.orders.push_back(k);
            }
        }
        if (v.contains("xs")) {
            cfg.touchard.xs.clear();
            for (const auto& x : v["xs"]) {
                double xv = get_real(x, "xs");
                if (!(xv > 0.0)) config_error("touchard xs must be positive");
                cfg.touchard.xs.push_back(xv);
            }
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::string& experiment)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        config_error("cannot parse '" + path + "': " + e.what());
    }
    return parse_config(j, experiment);
}

void apply_overrides(ExperimentConfig& cfg, const Overrides& o)
{
    if (o.out) cfg.output = *o.out;
    if (o.alphas) {
        if (o.alphas->empty()) config_error("--alpha needs at least one value");
        cfg.alphas = *o.alphas;
        cfg.jc.alpha = o.alphas->front();
    }
    if (o.tmax) {
        if (!(*o.tmax > cfg.grid.t0)) config_error("--tmax must exceed the grid start");
        cfg.grid.t1 = *o.tmax;
    }
    if (o.steps) {
        if (*o.steps < 1) config_error("--steps must be positive");
        cfg.grid.steps = *o.steps;
    }
}

json config_to_json(const ExperimentConfig& cfg)
{
    json jc = {{"omega_c", cfg.jc.omega_c}, {"alpha", complex_json(cfg.jc.alpha)}};
    if (cfg.jc.omega_eg) jc["omega_eg"] = *cfg.jc.omega_eg;
    if (cfg.jc.detuning) jc["detuning"] = *cfg.jc.detuning;
    if (cfg.jc.g) jc["g"] = *cfg.jc.g;
    if (cfg.jc.rabi_frequency) jc["rabi_frequency"] = *cfg.jc.rabi_frequency;
    json alphas = json::array();
    for (cplx a : cfg.alphas) alphas.push_back(complex_json(a));
    json state = json::object();
    json re = json::array(), im = json::array();
    for (int r = 0; r < 2; ++r) {
        re.push_back({cfg.initial_state(r, 0).real(), cfg.initial_state(r, 1).real()});
        im.push_back({cfg.initial_state(r, 0).imag(), cfg.initial_state(r, 1).imag()});
    }
    json out = {
        {"experiment", cfg.experiment},
        {"jc", jc},
        {"alphas", alphas},
        {"grid",
         {{"t0", cfg.grid.t0}, {"t1", cfg.grid.t1}, {"steps", cfg.grid.steps},
          {"normalized", cfg.grid.normalized}}},
        {"initial_state", {{"name", cfg.initial_state_name}, {"re", re}, {"im", im}}},
        {"output", cfg.output},
        {"sweep",
         {{"parameter", cfg.sweep.parameter}, {"from", cfg.sweep.from}, {"to", cfg.sweep.to},
          {"points", cfg.sweep.points}}},
        {"touchard", {{"orders", cfg.touchard.orders}, {"xs", cfg.touchard.xs}}},
    };
    if (cfg.bath) {
        const BathSpec& b = *cfg.bath;
        out["bath"] = {{"temperature", b.temperature}, {"model", to_string(b.model)},
                       {"eta", b.eta},                 {"cutoff", b.cutoff},
                       {"band_lo", b.band_lo},         {"band_hi", b.band_hi}};
    }
    return out;
}

}  // namespace gkls
