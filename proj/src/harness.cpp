#include "chebwin/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>

namespace chebwin {

using nlohmann::json;

PipelineError::PipelineError(int window, const std::string& what)
    : std::runtime_error("window " + std::to_string(window) + ": " + what), window_(window) {}

// ---------------------------------------------------------------------------
// Configuration

int RunConfig::window_count() const {
    return static_cast<int>(std::ceil(horizon / window.tau - 1e-9));
}

void RunConfig::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError(what); };
    try {
        window.validate();
        NodeSelectorState sel{eps_th, kappa, gamma1, gamma2, window.M_init, window.M_min, window.M_max};
        sel.validate();
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }

    PlantSpec spec;
    try {
        spec = make_plant(plant, plant_params, seed);
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
    const Eigen::Index n = spec.dimension;

    if (!(horizon > 0.0) || !std::isfinite(horizon)) fail("horizon must be positive");
    if (!(sim_step > 0.0) || sim_step > window.tau) fail("sim_step must lie in (0, tau]");
    const int W = window_count();
    if (std::abs(W * window.tau - horizon) > 1e-9 * std::max(1.0, horizon)) {
        fail("horizon must be a whole number of windows (short final window rejected)");
    }
    const double steps_per_window = window.tau / sim_step;
    if (std::abs(steps_per_window - std::round(steps_per_window)) > 1e-6) fail("sim_step must divide tau");
    if (x0.size() != n) fail("x0 has the wrong dimension for the plant");
    if (xhat0.size() != n) fail("xhat0 has the wrong dimension for the plant");
    if (Z.rows() != n || Z.cols() != n) fail("gain.Z must be N_P x N_P");
    if (Q.rows() != n || Q.cols() != n) fail("gain.Q must be N_P x N_P");
    if (eta1.size() != 0 && (eta1.rows() != window.M_init + 1 || eta1.cols() != n)) {
        fail("eta1 must be (M_init+1) x N_P");
    }
    if (ridge < 0.0) fail("regularizer.ridge must be nonnegative");
    if (noise_std < 0.0) fail("noise_std must be nonnegative");
    if (!(dynamics_tol > 0.0) || !(state_tol > 0.0)) fail("report tolerances must be positive");
    try {
        (void)solve_gain(Z, Q);
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
}

RunConfig default_stuart_landau_config() {
    RunConfig c;
    c.eta1.resize(3, 2);
    c.eta1.col(0).setConstant(0.05);
    c.eta1.col(1).setConstant(-0.05);
    return c;
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        rows.push_back(r);
    }
    return rows;
}

json vector_to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::MatrixXd matrix_from_json(const json& j, const char* what) {
    if (!j.is_array()) throw ConfigError(std::string(what) + " must be a nested array");
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return {};
    const auto cols = static_cast<Eigen::Index>(j.at(0).size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& r = j.at(static_cast<std::size_t>(i));
        if (!r.is_array() || static_cast<Eigen::Index>(r.size()) != cols) {
            throw ConfigError(std::string(what) + " rows must have equal length");
        }
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = r.at(static_cast<std::size_t>(k)).get<double>();
    }
    return m;
}

Eigen::VectorXd vector_from_json(const json& j, const char* what) {
    if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array");
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

template <typename T>
void read_opt(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

void to_json(json& j, const RunConfig& c) {
    j = json{
        {"plant", {{"name", c.plant}, {"params", c.plant_params}}},
        {"seed", c.seed},
        {"window",
         {{"tau", c.window.tau},
          {"delta_t", c.window.delta_t},
          {"M_init", c.window.M_init},
          {"M_min", c.window.M_min},
          {"M_max", c.window.M_max}}},
        {"selector", {{"eps_th", c.eps_th}, {"kappa", c.kappa}, {"gamma1", c.gamma1}, {"gamma2", c.gamma2}}},
        {"gain", {{"Z", matrix_to_json(c.Z)}, {"Q", matrix_to_json(c.Q)}}},
        {"regularizer", {{"ridge", c.ridge}, {"prior", c.prior == PriorMode::Zero ? "zero" : "warm_start"}}},
        {"horizon", c.horizon},
        {"sim_step", c.sim_step},
        {"x0", vector_to_json(c.x0)},
        {"xhat0", vector_to_json(c.xhat0)},
        {"eta1", matrix_to_json(c.eta1)},
        {"reset_first_window", c.reset_first_window},
        {"noise_std", c.noise_std},
        {"report", {{"dynamics_tol", c.dynamics_tol}, {"state_tol", c.state_tol}}},
        {"out_dir", c.out_dir},
    };
}

void from_json(const json& j, RunConfig& c) {
    try {
        if (!j.is_object()) throw ConfigError("config must be a JSON object");
        if (j.contains("plant")) {
            const auto& p = j.at("plant");
            read_opt(p, "name", c.plant);
            if (p.contains("params")) c.plant_params = p.at("params").get<std::map<std::string, double>>();
        }
        read_opt(j, "seed", c.seed);
        if (j.contains("window")) {
            const auto& w = j.at("window");
            read_opt(w, "tau", c.window.tau);
            read_opt(w, "delta_t", c.window.delta_t);
            read_opt(w, "M_init", c.window.M_init);
            read_opt(w, "M_min", c.window.M_min);
            read_opt(w, "M_max", c.window.M_max);
        }
        if (j.contains("selector")) {
            const auto& s = j.at("selector");
            read_opt(s, "eps_th", c.eps_th);
            read_opt(s, "kappa", c.kappa);
            read_opt(s, "gamma1", c.gamma1);
            read_opt(s, "gamma2", c.gamma2);
        }
        if (j.contains("gain")) {
            const auto& g = j.at("gain");
            if (g.contains("Z")) c.Z = matrix_from_json(g.at("Z"), "gain.Z");
            if (g.contains("Q")) c.Q = matrix_from_json(g.at("Q"), "gain.Q");
        }
        if (j.contains("regularizer")) {
            const auto& r = j.at("regularizer");
            read_opt(r, "ridge", c.ridge);
            if (r.contains("prior")) {
                const auto mode = r.at("prior").get<std::string>();
                if (mode == "zero") c.prior = PriorMode::Zero;
                else if (mode == "warm_start") c.prior = PriorMode::WarmStart;
                else throw ConfigError("regularizer.prior must be \"zero\" or \"warm_start\"");
            }
        }
        read_opt(j, "horizon", c.horizon);
        read_opt(j, "sim_step", c.sim_step);
        if (j.contains("x0")) c.x0 = vector_from_json(j.at("x0"), "x0");
        if (j.contains("xhat0")) c.xhat0 = vector_from_json(j.at("xhat0"), "xhat0");
        if (j.contains("eta1")) c.eta1 = matrix_from_json(j.at("eta1"), "eta1");
        read_opt(j, "reset_first_window", c.reset_first_window);
        read_opt(j, "noise_std", c.noise_std);
        if (j.contains("report")) {
            read_opt(j.at("report"), "dynamics_tol", c.dynamics_tol);
            read_opt(j.at("report"), "state_tol", c.state_tol);
        }
        read_opt(j, "out_dir", c.out_dir);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("cannot parse '" + path.string() + "': " + e.what());
    }
    const json& doc = (j.is_object() && j.contains("config") && j.contains("totals")) ? j.at("config") : j;
    RunConfig c;
    from_json(doc, c);
    return c;
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

// Last time at which the error exceeded tol; 0 when it never does.
template <typename ErrorFn>
double convergence_time(const std::vector<TrajectoryRow>& rows, double tol, ErrorFn err) {
    double last = 0.0;
    for (const auto& r : rows) {
        if (err(r) > tol) last = r.t;
    }
    return last;
}

}  // namespace

RunReport run_experiment(const RunConfig& config) {
    config.validate();
    const auto wall_start = std::chrono::steady_clock::now();

    RunReport rep;
    rep.config = config;

    const PlantSpec plant = make_plant(config.plant, config.plant_params, config.seed);
    const Eigen::Index n = plant.dimension;
    Trace trace = [&] {
        try {
            return simulate(plant, config.x0, config.horizon, config.sim_step);
        } catch (const NumericalError& e) {
            throw PipelineError(0, e.what());
        }
    }();

    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    StateOracle oracle = [&](double t) -> Eigen::VectorXd {
        Eigen::VectorXd x = trace.query(t);
        if (config.noise_std > 0.0) {
            for (Eigen::Index i = 0; i < x.size(); ++i) x[i] += config.noise_std * noise(rng);
        }
        return x;
    };
    Sensor sensor(oracle, config.window.delta_t);

    const GainDesign gain = solve_gain(config.Z, config.Q);
    rep.gain_meets_stability_condition = gain.meets_stability_condition;

    NodeSelectorState selector{config.eps_th, config.kappa, config.gamma1, config.gamma2,
                               config.window.M_init, config.window.M_min, config.window.M_max};

    EstimatorState est;
    est.x_hat = config.xhat0;
    est.gain = gain;

    std::optional<CoefficientSet> eta_prev;
    Interval iv_prev;
    const int W = config.window_count();
    rep.windows.reserve(static_cast<std::size_t>(W));

    for (int w = 1; w <= W; ++w) {
        try {
            WindowSummary ws;
            ws.index = w;
            ws.M = selector.M_current;
            ws.interval = window_interval(w, config.window.tau);
            const Interval& iv = ws.interval;

            const WindowRecord rec = build_window_record(w, config.window, ws.M, sensor);
            ws.node_times = rec.node_times;
            ws.node_samples = ws.M + 1;

            // Feedforward for this window: the continuation of last window's fit.
            if (eta_prev) {
                ws.theta = solve_theta(*eta_prev, iv_prev, iv);
            } else {
                ws.theta.window_index = 1;
                ws.theta.kind = CoefficientKind::Theta;
                ws.theta.matrix = config.eta1.size() ? config.eta1
                                                     : Eigen::MatrixXd::Zero(config.window.M_init + 1, n);
            }

            if (w > 1 || config.reset_first_window) {
                est = advance_window(est, ws.theta, iv, rec.window_start_state);
            } else {
                est.active_theta = ws.theta;
                est.active_interval = iv;
                est.anchor_state = rec.window_start_state;
                est.t = iv.a;
            }
            ws.state_error_start = trace.query(iv.a) - est.x_hat;
            const std::vector<EstimatorSample> path = integrate_window(est, config.sim_step);
            ws.state_error_end = trace.query(iv.b) - est.x_hat;

            RegularizerConfig reg = RegularizerConfig::ridge(ws.M, static_cast<int>(n), config.ridge);
            if (config.prior == PriorMode::WarmStart && eta_prev && eta_prev->degree() == ws.M) {
                reg.eta0 = eta_prev->matrix;
            }
            ws.eta = fit_window(rec, reg);

            const ErrorReport er = average_error(rec, ws.theta, iv, config.eps_th, config.kappa);
            ws.avg_error = er.avg_error;
            ws.max_node_error = er.max_node_error;
            ws.regime = er.regime;
            ws.M_next = update_node_count(selector, er);
            ws.theta_bound_term = theta_error_bound_term(ws.theta);

            // Window w owns (t^{w-1}, t^w]; only window 1 also emits its start.
            for (std::size_t i = (w == 1 ? 0 : 1); i < path.size(); ++i) {
                TrajectoryRow row;
                row.t = path[i].t;
                row.window = w;
                row.x = trace.query(row.t);
                row.x_hat = path[i].x_hat;
                row.F = plant_rhs(plant, row.x);
                row.F_hat_theta = predict_dynamics(ws.theta, iv, row.t);
                row.F_hat_eta = predict_dynamics(ws.eta, iv, row.t);
                rep.trajectory.push_back(std::move(row));
            }

            rep.total_node_samples += static_cast<std::size_t>(ws.node_samples);
            selector.M_current = ws.M_next;
            eta_prev = ws.eta;
            iv_prev = iv;
            rep.windows.push_back(std::move(ws));
        } catch (const PipelineError&) {
            throw;
        } catch (const std::exception& e) {
            throw PipelineError(w, e.what());
        }
    }

    rep.window_start_samples = sensor.start_reads();
    rep.lagged_samples = sensor.lagged_reads();
    rep.periodic_equivalent_samples = static_cast<std::size_t>(std::lround(config.horizon / config.sim_step));
    rep.dynamics_convergence_time = convergence_time(
        rep.trajectory, config.dynamics_tol, [](const TrajectoryRow& r) { return (r.F - r.F_hat_theta).norm(); });
    rep.state_convergence_time = convergence_time(rep.trajectory, config.state_tol,
                                                  [](const TrajectoryRow& r) { return (r.x - r.x_hat).norm(); });
    rep.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return rep;
}

// ---------------------------------------------------------------------------
// Output

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    out << std::setprecision(17);
    return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& p) {
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + p.string() + "'");
}

void write_trajectory(const RunReport& rep, const std::filesystem::path& p) {
    auto out = open_out(p);
    const Eigen::Index n = rep.trajectory.empty() ? 0 : rep.trajectory.front().x.size();
    out << "t";
    for (Eigen::Index j = 1; j <= n; ++j) out << ",x" << j;
    for (Eigen::Index j = 1; j <= n; ++j) out << ",xhat" << j;
    for (Eigen::Index j = 1; j <= n; ++j) out << ",F" << j << ",Fhat" << j;
    for (Eigen::Index j = 1; j <= n; ++j) out << ",xtilde" << j;
    for (Eigen::Index j = 1; j <= n; ++j) out << ",Fhat_eta" << j;
    out << "\r\n";
    for (const auto& r : rep.trajectory) {
        out << r.t;
        for (Eigen::Index j = 0; j < n; ++j) out << ',' << r.x[j];
        for (Eigen::Index j = 0; j < n; ++j) out << ',' << r.x_hat[j];
        for (Eigen::Index j = 0; j < n; ++j) out << ',' << r.F[j] << ',' << r.F_hat_theta[j];
        for (Eigen::Index j = 0; j < n; ++j) out << ',' << (r.x[j] - r.x_hat[j]);
        for (Eigen::Index j = 0; j < n; ++j) out << ',' << r.F_hat_eta[j];
        out << "\r\n";
    }
    close_out(out, p);
}

void write_windows(const RunReport& rep, const std::filesystem::path& p) {
    auto out = open_out(p);
    out << "w,t_start,t_end,M_w,avg_error,regime,samples\r\n";
    for (const auto& w : rep.windows) {
        out << w.index << ',' << w.interval.a << ',' << w.interval.b << ',' << w.M << ',' << w.avg_error << ','
            << to_string(w.regime) << ',' << w.node_samples << "\r\n";
    }
    close_out(out, p);
}

void write_plot_data(const RunReport& rep, const std::filesystem::path& dir, std::vector<std::filesystem::path>& files) {
    const Eigen::Index n = rep.trajectory.empty() ? 0 : rep.trajectory.front().x.size();
    {
        const auto p = dir / "plot_dynamics.csv";
        auto out = open_out(p);
        out << "t";
        for (Eigen::Index j = 1; j <= n; ++j) out << ",F" << j << ",Fhat" << j;
        out << "\r\n";
        for (const auto& r : rep.trajectory) {
            out << r.t;
            for (Eigen::Index j = 0; j < n; ++j) out << ',' << r.F[j] << ',' << r.F_hat_theta[j];
            out << "\r\n";
        }
        close_out(out, p);
        files.push_back(p);
    }
    {
        const auto p = dir / "plot_node_count.csv";
        auto out = open_out(p);
        out << "w,t_start,M_w\r\n";
        for (const auto& w : rep.windows) out << w.index << ',' << w.interval.a << ',' << w.M << "\r\n";
        close_out(out, p);
        files.push_back(p);
    }
    {
        const auto p = dir / "plot_states.csv";
        auto out = open_out(p);
        out << "t";
        for (Eigen::Index j = 1; j <= n; ++j) out << ",x" << j << ",xhat" << j;
        out << "\r\n";
        for (const auto& r : rep.trajectory) {
            out << r.t;
            for (Eigen::Index j = 0; j < n; ++j) out << ',' << r.x[j] << ',' << r.x_hat[j];
            out << "\r\n";
        }
        close_out(out, p);
        files.push_back(p);
    }
    {
        const auto p = dir / "plot_state_error.csv";
        auto out = open_out(p);
        out << "t";
        for (Eigen::Index j = 1; j <= n; ++j) out << ",xtilde" << j;
        out << "\r\n";
        for (const auto& r : rep.trajectory) {
            out << r.t;
            for (Eigen::Index j = 0; j < n; ++j) out << ',' << (r.x[j] - r.x_hat[j]);
            out << "\r\n";
        }
        close_out(out, p);
        files.push_back(p);
    }
}

}  // namespace

json manifest(const RunReport& rep) {
    json node_counts = json::array();
    for (const auto& w : rep.windows) node_counts.push_back(w.M);
    return json{
        {"tool", "chebwin"},
        {"version", kToolVersion},
        {"config", rep.config},
        {"totals",
         {{"windows", rep.windows.size()},
          {"node_samples", rep.total_node_samples},
          {"window_start_samples", rep.window_start_samples},
          {"lagged_samples", rep.lagged_samples},
          {"periodic_equivalent_samples", rep.periodic_equivalent_samples},
          {"final_node_count", rep.windows.empty() ? 0 : rep.windows.back().M_next},
          {"dynamics_convergence_time", rep.dynamics_convergence_time},
          {"state_convergence_time", rep.state_convergence_time},
          {"gain_meets_stability_condition", rep.gain_meets_stability_condition}}},
        {"node_counts", node_counts},
        {"wall_clock_seconds", rep.wall_clock_seconds},
    };
}

std::vector<std::filesystem::path> export_csv(const RunReport& rep, const std::filesystem::path& out_dir,
                                              bool plot_data) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create '" + out_dir.string() + "': " + ec.message());

    std::vector<std::filesystem::path> files;
    files.push_back(out_dir / "trajectory.csv");
    write_trajectory(rep, files.back());
    files.push_back(out_dir / "windows.csv");
    write_windows(rep, files.back());
    files.push_back(out_dir / "manifest.json");
    {
        auto out = open_out(files.back());
        out << manifest(rep).dump(2) << '\n';
        close_out(out, files.back());
    }
    if (plot_data) write_plot_data(rep, out_dir, files);
    return files;
}

std::string summarize(const RunReport& rep) {
    std::ostringstream os;
    const auto& c = rep.config;
    os << "plant            : " << c.plant << " (N_P = " << c.x0.size() << ")\n";
    os << "windows          : " << rep.windows.size() << " x " << c.window.tau << " s\n";
    os << "node samples     : " << rep.total_node_samples << " aperiodic (+" << rep.window_start_samples
       << " window-start, +" << rep.lagged_samples << " lagged)\n";
    os << "periodic equiv.  : " << rep.periodic_equivalent_samples << " samples at " << c.sim_step << " s\n";
    if (!rep.windows.empty()) {
        os << "node counts      :";
        for (const auto& w : rep.windows) os << ' ' << w.M;
        os << "\nfinal node count : " << rep.windows.back().M_next << '\n';
    }
    os << "F_hat converged  : t > " << rep.dynamics_convergence_time << " s (tol " << c.dynamics_tol << ")\n";
    os << "x_hat converged  : t > " << rep.state_convergence_time << " s (tol " << c.state_tol << ")\n";
    if (!rep.gain_meets_stability_condition) os << "warning          : lambda_min(Q) <= 3\n";
    os << "wall clock       : " << rep.wall_clock_seconds << " s\n";
    return os.str();
}

void set_parameter(RunConfig& c, const std::string& name, double v) {
    auto as_int = [&](int& out) {
        if (v != std::floor(v)) throw ConfigError("parameter '" + name + "' must be an integer");
        out = static_cast<int>(v);
    };
    if (name == "eps_th") c.eps_th = v;
    else if (name == "kappa") c.kappa = v;
    else if (name == "gamma1") c.gamma1 = v;
    else if (name == "gamma2") c.gamma2 = v;
    else if (name == "tau") c.window.tau = v;
    else if (name == "delta_t") c.window.delta_t = v;
    else if (name == "horizon") c.horizon = v;
    else if (name == "sim_step") c.sim_step = v;
    else if (name == "ridge") c.ridge = v;
    else if (name == "noise_std") c.noise_std = v;
    else if (name == "M_max") as_int(c.window.M_max);
    else if (name == "M_init") {
        as_int(c.window.M_init);
        c.eta1.resize(0, 0);
    } else if (name == "seed") {
        if (v < 0 || v != std::floor(v)) throw ConfigError("seed must be a nonnegative integer");
        c.seed = static_cast<std::uint64_t>(v);
    } else if (name.rfind("plant.", 0) == 0) {
        c.plant_params[name.substr(6)] = v;
    } else {
        throw ConfigError("unknown sweep parameter '" + name + "'");
    }
}

std::vector<SweepResult> sweep(const RunConfig& base, const std::string& param, const std::vector<double>& values) {
    std::vector<std::future<SweepResult>> jobs;
    jobs.reserve(values.size());
    for (double v : values) {
        RunConfig cfg = base;
        set_parameter(cfg, param, v);
        jobs.push_back(std::async(std::launch::async, [cfg = std::move(cfg), v]() {
            SweepResult r;
            r.value = v;
            try {
                r.report = run_experiment(cfg);
                r.ok = true;
            } catch (const std::exception& e) {
                r.error = e.what();
            }
            return r;
        }));
    }
    std::vector<SweepResult> out;
    out.reserve(jobs.size());
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

}  // namespace chebwin
