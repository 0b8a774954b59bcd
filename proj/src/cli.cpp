#include "decoscatter/cli.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "decoscatter/reduced_density.hpp"
#include "decoscatter/scattering.hpp"

namespace deco {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument("config: " + msg); }

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string hex16(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Strict object reader: every key must be consumed, every value type-checked.
class Section {
  public:
    Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) fail(path_ + ": expected an object");
    }

    double number(const char* key, double fallback) {
        const json* v = take(key);
        if (!v) return fallback;
        if (!v->is_number()) fail(path_ + "." + key + ": expected a number");
        return v->get<double>();
    }

    int integer(const char* key, int fallback) {
        const json* v = take(key);
        if (!v) return fallback;
        if (!v->is_number_integer()) fail(path_ + "." + key + ": expected an integer");
        return v->get<int>();
    }

    std::string text(const char* key, const std::string& fallback) {
        const json* v = take(key);
        if (!v) return fallback;
        if (!v->is_string()) fail(path_ + "." + key + ": expected a string");
        return v->get<std::string>();
    }

    const json* child(const char* key) { return take(key); }

    void finish() const {
        for (const auto& item : obj_.items())
            if (!consumed_.contains(item.key())) fail(path_ + ": unknown key '" + item.key() + "'");
    }

  private:
    const json* take(const char* key) {
        consumed_.insert(key);
        const auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    const json& obj_;
    std::string path_;
    std::set<std::string> consumed_;
};

PacketSpec parse_packet(const json* node, const std::string& path, const PacketSpec& defaults) {
    PacketSpec spec = defaults;
    if (!node) return spec;
    Section s(*node, path);
    spec.k0 = s.number("k0", spec.k0);
    spec.sigma0 = s.number("sigma0", spec.sigma0);
    spec.y0 = s.number("y0", spec.y0);
    spec.narrowness_threshold = s.number("narrowness_threshold", spec.narrowness_threshold);
    s.finish();
    return spec;
}

struct Table {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string render_csv(const Table& table, const std::string& config_hash) {
    std::ostringstream out;
    for (std::size_t c = 0; c < table.header.size(); ++c)
        out << (c ? "," : "") << table.header[c];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
        out << '\n';
    }
    out << "# manifest " << config_hash << '\n';
    return out.str();
}

const char* delta_mode_name(DeltaMode mode) {
    return mode == DeltaMode::SingleBin ? "single_bin" : "narrow_gaussian";
}

const char* jump_name(JumpChoice jump) {
    return jump == JumpChoice::Position ? "position" : "momentum";
}

json packet_json(const PacketSpec& spec) {
    return {{"k0", spec.k0},
            {"sigma0", spec.sigma0},
            {"y0", spec.y0},
            {"narrowness_threshold", spec.narrowness_threshold}};
}

// ---------------------------------------------------------------- experiments

void run_amplitudes(const ExperimentConfig& cfg, json& payload, std::vector<Table>& tables) {
    const double k = cfg.k_probe > 0.0 ? cfg.k_probe : cfg.spec.k0;
    const std::vector<SpinSector> sectors = enumerate_sectors(cfg.params);

    Table table;
    table.name = cfg.experiment;
    table.header = {"j",     "twice_ms", "weight", "g",
                    "re_A",  "im_A",     "re_B",   "im_B",
                    "p_reflect", "p_transmit", "phase_vs_hard_wall"};
    json rows = json::array();
    double unitarity_defect = 0.0;
    for (const SpinSector& s : sectors) {
        const ChannelAmplitudes amp = amplitudes(k, s, cfg.params);
        double phase = std::numeric_limits<double>::quiet_NaN();
        if (s.twice_ms != 0) phase = reflected_phase_vs_hard_wall(amp);
        const double pr = std::norm(amp.A), pt = std::norm(amp.B);
        unitarity_defect = std::max(unitarity_defect, std::abs(pr + pt - 1.0));
        table.rows.push_back({std::to_string(s.j), std::to_string(s.twice_ms),
                              fmt(static_cast<double>(s.weight)), fmt(amp.g), fmt(amp.A.real()),
                              fmt(amp.A.imag()), fmt(amp.B.real()), fmt(amp.B.imag()), fmt(pr),
                              fmt(pt), fmt(phase)});
        rows.push_back({{"j", s.j},
                        {"twice_ms", s.twice_ms},
                        {"weight", static_cast<double>(s.weight)},
                        {"g", amp.g},
                        {"A", {amp.A.real(), amp.A.imag()}},
                        {"B", {amp.B.real(), amp.B.imag()}},
                        {"p_reflect", pr},
                        {"p_transmit", pt},
                        {"phase_vs_hard_wall", phase}});
    }
    const auto [p_reflect, p_transmit] = bath_averaged_probabilities(k, sectors, cfg.params);
    payload["k"] = k;
    payload["sectors"] = rows;
    payload["summary"] = {{"p_reflect", p_reflect},
                          {"p_transmit", p_transmit},
                          {"unitarity_max_defect", unitarity_defect}};
    tables.push_back(std::move(table));
}

void run_narrow(const ExperimentConfig& cfg, json& payload, std::vector<Table>& tables) {
    const std::vector<SpinSector> sectors = enumerate_sectors(cfg.params);
    const NarrowPacketDensity d = narrow_packet_density(cfg.spec, sectors, cfg.params);
    const double entropy = narrow_entropy(d);

    Table table;
    table.name = cfg.experiment;
    table.header = {"quantity", "value"};
    table.rows = {{"p_transmit", fmt(d.p_T)},
                  {"p_reflect", fmt(d.p_R)},
                  {"offdiag_re", fmt(d.offdiag.real())},
                  {"offdiag_im", fmt(d.offdiag.imag())},
                  {"entropy", fmt(entropy)},
                  {"ln2_gap", fmt(std::numbers::ln2 - entropy)}};
    payload["summary"] = {{"p_transmit", d.p_T},
                          {"p_reflect", d.p_R},
                          {"offdiag", {d.offdiag.real(), d.offdiag.imag()}},
                          {"entropy", entropy},
                          {"ln2_gap", std::numbers::ln2 - entropy}};
    tables.push_back(std::move(table));
}

void run_full_density(const ExperimentConfig& cfg, json& payload, std::vector<Table>& tables) {
    const MomentumGrid grid = make_grid(cfg.grid_n, cfg.spec.k0 + 8.0 / cfg.spec.sigma0);
    const std::vector<SpinSector> sectors = enumerate_sectors(cfg.params);
    const Eigen::VectorXcd incoming = sampled_incoming(cfg.spec, grid);

    std::vector<Eigen::VectorXcd> states;
    states.reserve(sectors.size());
    for (const SpinSector& s : sectors)
        states.push_back(outgoing_sector_state(s, cfg.spec, grid, cfg.params));

    const int n = grid.n;
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXcd mirror = Eigen::VectorXcd::Zero(n);  // rho(k, -k) per bin
    for (std::size_t s = 0; s < sectors.size(); ++s) {
        const double w = static_cast<double>(sectors[s].weight);
        for (int i = 0; i < n; ++i) diag[i] += w * std::norm(states[s][i]);
        for (int i = 1; i < n; ++i)
            mirror[i] += w * states[s][i] * std::conj(states[s][grid.mirror_index(i)]);
    }

    long double trace = 0.0L, kinetic = 0.0L, p_right = 0.0L;
    for (int i = 0; i < n; ++i) {
        trace += diag[i] * grid.dk;
        kinetic += diag[i] * grid.dk * grid.values[i] * grid.values[i] / (2.0 * cfg.params.m);
        if (i > n / 2) p_right += diag[i] * grid.dk;
    }
    p_right += 0.5 * diag[n / 2] * grid.dk;

    long double purity = 0.0L;
    for (std::size_t a = 0; a < states.size(); ++a)
        for (std::size_t b = 0; b < states.size(); ++b) {
            const std::complex<double> overlap = states[a].dot(states[b]) * grid.dk;
            purity += static_cast<double>(sectors[a].weight) *
                      static_cast<double>(sectors[b].weight) * std::norm(overlap);
        }
    const double entropy = gram_entropy(sectors, cfg.spec, grid, cfg.params);

    Table table;
    table.name = cfg.experiment;
    table.header = {"k",       "in_density", "rho_diag", "rho_diag_mirror",
                    "re_coh",  "im_coh",     "abs_coh",  "suppression"};
    double max_mirror = 0.0;
    for (int i = n / 2 + 1; i < n; ++i) {
        const int mi = grid.mirror_index(i);
        const double denom = diag[i] * diag[mi];
        const double supp = denom > 1e-28 ? std::abs(mirror[i]) / std::sqrt(denom)
                                          : std::numeric_limits<double>::quiet_NaN();
        max_mirror = std::max(max_mirror, std::abs(mirror[i]));
        table.rows.push_back({fmt(grid.values[i]), fmt(std::norm(incoming[i])), fmt(diag[i]),
                              fmt(diag[mi]), fmt(mirror[i].real()), fmt(mirror[i].imag()),
                              fmt(std::abs(mirror[i])), fmt(supp)});
    }

    payload["summary"] = {{"trace", static_cast<double>(trace)},
                          {"p_transmit", static_cast<double>(p_right)},
                          {"p_reflect", static_cast<double>(trace - p_right)},
                          {"entropy", entropy},
                          {"purity", static_cast<double>(purity)},
                          {"mean_kinetic_energy", static_cast<double>(kinetic)},
                          {"max_abs_mirror_coherence", max_mirror},
                          {"grid", {{"n", grid.n}, {"dk", grid.dk}}}};
    tables.push_back(std::move(table));
}

// Packet-averaged closed-form channel probabilities for one sector.
std::pair<double, double> sector_quadrature(const SpinSector& sector, const PacketSpec& spec,
                                            const ModelParams& params) {
    const MomentumGrid grid = make_grid(4096, spec.k0 + 8.0 / spec.sigma0);
    const Eigen::VectorXcd f = sampled_incoming(spec, grid);
    long double pt = 0.0L, pr = 0.0L;
    for (int i = grid.n / 2 + 1; i < grid.n; ++i) {
        const double density = std::norm(f[i]) * grid.dk;
        const ChannelAmplitudes amp = amplitudes(grid.values[i], sector, params);
        pt += std::norm(amp.B) * density;
        pr += std::norm(amp.A) * density;
    }
    return {static_cast<double>(pt), static_cast<double>(pr)};
}

void run_oracle_validate(const ExperimentConfig& cfg, json& payload, std::vector<Table>& tables) {
    const GridOracleConfig& ocfg = cfg.oracle;
    const std::vector<SectorTrajectory> trajs = evolve_all_sectors(ocfg, cfg.threads);
    const std::vector<SpinSector> sectors = enumerate_sectors(ocfg.params);

    Table sector_table;
    sector_table.name = cfg.experiment;
    sector_table.header = {"j",           "twice_ms",    "weight",      "p_T_grid",
                           "p_R_grid",    "p_T_closed",  "p_R_closed",  "abs_diff_T",
                           "energy_drift_rel"};
    json sector_rows = json::array();
    long double pt_grid = 0.0L, pr_grid = 0.0L, pt_closed = 0.0L, pr_closed = 0.0L;
    double max_prob_diff = 0.0, max_energy_drift = 0.0;
    for (std::size_t s = 0; s < trajs.size(); ++s) {
        const auto [pt, pr] = extract_channel_probabilities(trajs[s], ocfg);
        const auto [qt, qr] = sector_quadrature(sectors[s], ocfg.spec, ocfg.params);
        double drift = 0.0;
        for (double en : trajs[s].energy)
            drift = std::max(drift, std::abs(en - trajs[s].energy[0]));
        drift /= std::abs(trajs[s].energy[0]);
        const double w = static_cast<double>(sectors[s].weight);
        pt_grid += w * pt;
        pr_grid += w * pr;
        pt_closed += w * qt;
        pr_closed += w * qr;
        max_prob_diff = std::max(max_prob_diff, std::abs(pt - qt));
        max_energy_drift = std::max(max_energy_drift, drift);
        sector_table.rows.push_back({std::to_string(sectors[s].j),
                                     std::to_string(sectors[s].twice_ms), fmt(w), fmt(pt), fmt(pr),
                                     fmt(qt), fmt(qr), fmt(std::abs(pt - qt)), fmt(drift)});
        sector_rows.push_back({{"j", sectors[s].j},
                               {"p_T_grid", pt},
                               {"p_R_grid", pr},
                               {"p_T_closed", qt},
                               {"p_R_closed", qr},
                               {"energy_drift_rel", drift}});
    }

    const DensityMatrix rho_grid = oracle_density_matrix(trajs, ocfg, 512);
    const DensityMatrix rho_closed = assemble(sectors, ocfg.spec, rho_grid.grid, ocfg.params);
    const double rho_scale = rho_closed.elements.cwiseAbs().maxCoeff();
    const double rho_diff = (rho_grid.elements - rho_closed.elements).cwiseAbs().maxCoeff();

    const MomentSeries moments = interaction_energy_moments(trajs, ocfg);
    Table moment_table;
    moment_table.name = cfg.experiment + "_moments";
    moment_table.header = {"t", "V_mean", "V2_regularized"};
    double max_v = 0.0, max_v2 = 0.0, t_at_max_v = 0.0;
    long double v_integral = 0.0L;
    for (std::size_t i = 0; i < moments.t.size(); ++i) {
        moment_table.rows.push_back({fmt(moments.t[i]), fmt(moments.V[i]), fmt(moments.V2[i])});
        if (std::abs(moments.V[i]) > max_v) {
            max_v = std::abs(moments.V[i]);
            t_at_max_v = moments.t[i];
        }
        max_v2 = std::max(max_v2, moments.V2[i]);
        v_integral += moments.V[i] * ocfg.dt;
    }

    payload["sectors"] = sector_rows;
    payload["moments"] = {{"t", moments.t}, {"V_mean", moments.V}, {"V2_regularized", moments.V2}};
    payload["summary"] = {
        {"p_transmit_grid", static_cast<double>(pt_grid)},
        {"p_reflect_grid", static_cast<double>(pr_grid)},
        {"p_transmit_closed", static_cast<double>(pt_closed)},
        {"p_reflect_closed", static_cast<double>(pr_closed)},
        {"max_sector_prob_diff", max_prob_diff},
        {"max_energy_drift_rel", max_energy_drift},
        {"rho_max_abs_diff", rho_diff},
        {"rho_scale", rho_scale},
        {"max_abs_V_mean", max_v},
        {"t_at_max_abs_V_mean", t_at_max_v},
        {"max_V2_regularized", max_v2},
        {"V_mean_time_integral", static_cast<double>(v_integral)},
        {"regularization_cutoff", moments.cutoff}};
    tables.push_back(std::move(sector_table));
    tables.push_back(std::move(moment_table));
}

void run_lindblad(const ExperimentConfig& cfg, json& payload, std::vector<Table>& tables) {
    const LindbladResult res = evolve_lindblad(cfg.lindblad);
    const LindbladSeries& s = res.series;

    Table table;
    table.name = cfg.experiment;
    table.header = {"t", "trace", "purity", "energy", "entropy", "p2", "min_eigenvalue"};
    for (std::size_t i = 0; i < s.t.size(); ++i)
        table.rows.push_back({fmt(s.t[i]), fmt(s.trace[i]), fmt(s.purity[i]), fmt(s.energy[i]),
                              fmt(s.entropy[i]), fmt(s.p2[i]), fmt(s.min_eigenvalue[i])});

    payload["series"] = {{"t", s.t},           {"trace", s.trace}, {"purity", s.purity},
                         {"energy", s.energy}, {"entropy", s.entropy}, {"p2", s.p2},
                         {"min_eigenvalue", s.min_eigenvalue}};
    payload["summary"] = {
        {"jump", jump_name(cfg.lindblad.jump)},
        {"momentum_spread_rate", momentum_spread_rate(s)},
        {"entropy_gain", s.entropy.back() - s.entropy.front()},
        {"energy_change_rel", (s.energy.back() - s.energy.front()) / s.energy.front()},
        {"final_purity", s.purity.back()}};
    tables.push_back(std::move(table));
}

void run_contrast(const ExperimentConfig& cfg, json& payload, std::vector<Table>& tables) {
    const MomentumGrid grid = make_grid(512, cfg.spec.k0 + 8.0 / cfg.spec.sigma0);
    const std::vector<SpinSector> sectors = enumerate_sectors(cfg.params);
    const Eigen::VectorXcd incoming = sampled_incoming(cfg.spec, grid);

    long double e_in = 0.0L, e_out = 0.0L;
    for (int i = 0; i < grid.n; ++i)
        e_in += std::norm(incoming[i]) * grid.dk * grid.values[i] * grid.values[i] /
                (2.0 * cfg.params.m);
    for (const SpinSector& s : sectors) {
        const Eigen::VectorXcd state = outgoing_sector_state(s, cfg.spec, grid, cfg.params);
        long double e = 0.0L;
        for (int i = 0; i < grid.n; ++i)
            e += std::norm(state[i]) * grid.dk * grid.values[i] * grid.values[i] /
                 (2.0 * cfg.params.m);
        e_out += s.weight * e;
    }
    ExactSummary exact;
    exact.entropy_gain = gram_entropy(sectors, cfg.spec, grid, cfg.params);
    exact.energy_change_rel =
        static_cast<double>((e_out - e_in) / e_in);

    const ContrastReport report = contrast_report(cfg.lindblad, exact);
    Table table;
    table.name = cfg.experiment;
    table.header = {"mechanism", "entropy_gain", "energy_change_rel", "heating_rate"};
    json rows = json::array();
    for (const MechanismSummary& row : report.rows) {
        table.rows.push_back(
            {row.label, fmt(row.entropy_gain), fmt(row.energy_change_rel), fmt(row.heating_rate)});
        rows.push_back({{"mechanism", row.label},
                        {"entropy_gain", row.entropy_gain},
                        {"energy_change_rel", row.energy_change_rel},
                        {"heating_rate", row.heating_rate}});
    }
    payload["rows"] = rows;
    payload["summary"] = {{"exact_entropy_gain", exact.entropy_gain},
                          {"exact_energy_change_rel", exact.energy_change_rel}};
    tables.push_back(std::move(table));
}

void run_entropy_scan(const ExperimentConfig& cfg, json& payload, std::vector<Table>& tables) {
    const ScanResult scan = entropy_scan(cfg);
    Table table;
    table.name = cfg.experiment;
    table.header = {"k0", "p_reflect", "entropy"};
    for (std::size_t i = 0; i < scan.k0.size(); ++i)
        table.rows.push_back({fmt(scan.k0[i]), fmt(scan.p_reflect[i]), fmt(scan.entropy[i])});
    payload["scan"] = {{"k0", scan.k0}, {"p_reflect", scan.p_reflect}, {"entropy", scan.entropy}};
    payload["summary"] = {{"max_entropy", scan.max_entropy},
                          {"k0_at_max", scan.k0_at_max},
                          {"ln2_gap", std::numbers::ln2 - scan.max_entropy}};
    tables.push_back(std::move(table));
}

std::pair<double, double> scan_bounds(const ExperimentConfig& cfg) {
    const double scale = cfg.params.m * std::abs(cfg.params.mu);
    const double lo = cfg.scan_k_min > 0.0 ? cfg.scan_k_min : 0.01 * scale;
    const double hi = cfg.scan_k_max > 0.0 ? cfg.scan_k_max : 100.0 * scale * cfg.params.N;
    return {lo, hi};
}

}  // namespace

// ------------------------------------------------------------------- parsing

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(std::string("not valid JSON: ") + e.what());
    }

    ExperimentConfig cfg;
    Section top(root, "config");
    cfg.experiment = top.text("experiment", "");  // may come from the command line instead
    if (!cfg.experiment.empty() &&
        std::find(std::begin(kExperiments), std::end(kExperiments), cfg.experiment) ==
            std::end(kExperiments))
        fail("experiment: unknown experiment '" + cfg.experiment + "'");

    if (const json* node = top.child("model")) {
        Section s(*node, "model");
        cfg.params.m = s.number("m", cfg.params.m);
        cfg.params.mu = s.number("mu", cfg.params.mu);
        cfg.params.N = s.integer("N", cfg.params.N);
        s.finish();
    }
    cfg.spec = parse_packet(top.child("packet"), "packet", cfg.spec);

    if (const json* node = top.child("grid")) {
        Section s(*node, "grid");
        cfg.grid_n = s.integer("n", cfg.grid_n);
        s.finish();
    }

    if (const json* node = top.child("oracle")) {
        Section s(*node, "oracle");
        cfg.oracle.y_extent = s.number("y_extent", cfg.oracle.y_extent);
        cfg.oracle.n_y = s.integer("n_y", cfg.oracle.n_y);
        cfg.oracle.dt = s.number("dt", cfg.oracle.dt);
        cfg.oracle.t_final = s.number("t_final", cfg.oracle.t_final);
        cfg.oracle.gaussian_width = s.number("gaussian_width", cfg.oracle.gaussian_width);
        cfg.oracle.snapshot_stride = s.integer("snapshot_stride", cfg.oracle.snapshot_stride);
        const std::string mode = s.text("delta_mode", delta_mode_name(cfg.oracle.delta_mode));
        if (mode == "single_bin")
            cfg.oracle.delta_mode = DeltaMode::SingleBin;
        else if (mode == "narrow_gaussian")
            cfg.oracle.delta_mode = DeltaMode::NarrowGaussian;
        else
            fail("oracle.delta_mode: expected 'single_bin' or 'narrow_gaussian'");
        s.finish();
    }

    if (const json* node = top.child("scan")) {
        Section s(*node, "scan");
        cfg.scan_points = s.integer("points", cfg.scan_points);
        cfg.scan_k_min = s.number("k_min", cfg.scan_k_min);
        cfg.scan_k_max = s.number("k_max", cfg.scan_k_max);
        s.finish();
    }

    if (const json* node = top.child("lindblad")) {
        Section s(*node, "lindblad");
        cfg.lindblad.n_y = s.integer("n_y", cfg.lindblad.n_y);
        cfg.lindblad.y_extent = s.number("y_extent", cfg.lindblad.y_extent);
        cfg.lindblad.gamma = s.number("gamma", cfg.lindblad.gamma);
        cfg.lindblad.dt = s.number("dt", cfg.lindblad.dt);
        cfg.lindblad.t_final = s.number("t_final", cfg.lindblad.t_final);
        cfg.lindblad.sample_stride = s.integer("sample_stride", cfg.lindblad.sample_stride);
        const std::string jump = s.text("jump", jump_name(cfg.lindblad.jump));
        if (jump == "position")
            cfg.lindblad.jump = JumpChoice::Position;
        else if (jump == "momentum")
            cfg.lindblad.jump = JumpChoice::Momentum;
        else
            fail("lindblad.jump: expected 'position' or 'momentum'");
        cfg.lindblad.spec = parse_packet(s.child("packet"), "lindblad.packet", cfg.lindblad.spec);
        s.finish();
    }

    if (const json* node = top.child("output")) {
        Section s(*node, "output");
        if (const json* formats = s.child("formats")) {
            if (!formats->is_array()) fail("output.formats: expected an array of strings");
            cfg.formats.clear();
            for (const json& f : *formats) {
                if (!f.is_string()) fail("output.formats: expected an array of strings");
                cfg.formats.push_back(f.get<std::string>());
            }
        }
        s.finish();
    }

    cfg.k_probe = top.number("k_probe", cfg.k_probe);
    cfg.threads = top.integer("threads", cfg.threads);
    top.finish();

    cfg.oracle.spec = cfg.spec;
    cfg.oracle.params = cfg.params;
    cfg.lindblad.params = cfg.params;
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void validate_config(const ExperimentConfig& cfg) {
    if (std::find(std::begin(kExperiments), std::end(kExperiments), cfg.experiment) ==
        std::end(kExperiments))
        fail("experiment: unknown experiment '" + cfg.experiment + "'");
    cfg.params.validate();
    cfg.spec.validate();
    if (cfg.formats.empty()) fail("output.formats: need at least one of 'csv', 'json'");
    for (const std::string& f : cfg.formats)
        if (f != "csv" && f != "json") fail("output.formats: unknown format '" + f + "'");
    if (cfg.threads < 1 || cfg.threads > 256) fail("threads: must be in [1, 256]");

    if (cfg.experiment == "amplitudes") {
        if (cfg.k_probe < 0.0 || !std::isfinite(cfg.k_probe))
            fail("k_probe: must be a finite momentum > 0 (or 0 to use packet.k0)");
    } else if (cfg.experiment == "narrow") {
        if (cfg.spec.narrowness() < cfg.spec.narrowness_threshold)
            fail("packet: sigma0*k0 below the narrow-packet threshold; use full-density");
    } else if (cfg.experiment == "full-density") {
        if (!power_of_two(cfg.grid_n) || cfg.grid_n < 16)
            fail("grid.n: must be a power of two >= 16");
        if (cfg.params.N > 512)
            fail("model.N: full-density is dense in the sector count; use N <= 512");
    } else if (cfg.experiment == "oracle-validate") {
        cfg.oracle.validate();
    } else if (cfg.experiment == "entropy-scan") {
        if (cfg.scan_points < 2) fail("scan.points: need at least 2");
        const auto [lo, hi] = scan_bounds(cfg);
        if (!(lo > 0.0) || !(hi > lo))
            fail("scan: momentum bounds must satisfy 0 < k_min < k_max (is mu zero?)");
    } else if (cfg.experiment == "lindblad" || cfg.experiment == "contrast") {
        cfg.lindblad.validate();
        if (cfg.experiment == "contrast" && cfg.params.N > 512)
            fail("model.N: contrast assembles the exact channel densely; use N <= 512");
    }
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string canonical_config_json(const ExperimentConfig& cfg) {
    json j;
    j["experiment"] = cfg.experiment;
    j["model"] = {{"m", cfg.params.m}, {"mu", cfg.params.mu}, {"N", cfg.params.N}};
    j["packet"] = packet_json(cfg.spec);
    j["grid"] = {{"n", cfg.grid_n}};
    j["oracle"] = {{"y_extent", cfg.oracle.y_extent},
                   {"n_y", cfg.oracle.n_y},
                   {"dt", cfg.oracle.dt},
                   {"t_final", cfg.oracle.t_final},
                   {"delta_mode", delta_mode_name(cfg.oracle.delta_mode)},
                   {"gaussian_width", cfg.oracle.gaussian_width},
                   {"snapshot_stride", cfg.oracle.snapshot_stride}};
    j["scan"] = {{"points", cfg.scan_points}, {"k_min", cfg.scan_k_min}, {"k_max", cfg.scan_k_max}};
    j["lindblad"] = {{"n_y", cfg.lindblad.n_y},
                     {"y_extent", cfg.lindblad.y_extent},
                     {"gamma", cfg.lindblad.gamma},
                     {"jump", jump_name(cfg.lindblad.jump)},
                     {"dt", cfg.lindblad.dt},
                     {"t_final", cfg.lindblad.t_final},
                     {"sample_stride", cfg.lindblad.sample_stride},
                     {"packet", packet_json(cfg.lindblad.spec)}};
    j["k_probe"] = cfg.k_probe;
    return j.dump();
}

ScanResult entropy_scan(const ExperimentConfig& cfg) {
    const auto [lo, hi] = scan_bounds(cfg);
    const std::vector<SpinSector> sectors = enumerate_sectors(cfg.params);
    ScanResult scan;
    scan.k0.reserve(cfg.scan_points);
    const double step = std::log(hi / lo) / (cfg.scan_points - 1);
    for (int i = 0; i < cfg.scan_points; ++i) {
        const double k = lo * std::exp(i * step);
        const auto [p_reflect, p_transmit] = bath_averaged_probabilities(k, sectors, cfg.params);
        const double s = binary_entropy(p_reflect);
        if (s > std::numbers::ln2 + 1e-10)
            throw std::runtime_error("entropy scan: point above ln 2 at k0 = " + fmt(k));
        scan.k0.push_back(k);
        scan.p_reflect.push_back(p_reflect);
        scan.entropy.push_back(s);
        if (s >= scan.max_entropy) {
            scan.max_entropy = s;
            scan.k0_at_max = k;
        }
        (void)p_transmit;
    }
    return scan;
}

RunResult run(const ExperimentConfig& input) {
    ExperimentConfig cfg = input;
    cfg.oracle.spec = cfg.spec;  // top-level packet/model are the single source
    cfg.oracle.params = cfg.params;
    cfg.lindblad.params = cfg.params;
    validate_config(cfg);
    const std::string canonical = canonical_config_json(cfg);
    const std::string hash = hex16(fnv1a64(canonical));

    json payload;
    payload["experiment"] = cfg.experiment;
    payload["config_fnv1a64"] = hash;
    std::vector<Table> tables;
    if (cfg.experiment == "amplitudes")
        run_amplitudes(cfg, payload, tables);
    else if (cfg.experiment == "narrow")
        run_narrow(cfg, payload, tables);
    else if (cfg.experiment == "full-density")
        run_full_density(cfg, payload, tables);
    else if (cfg.experiment == "oracle-validate")
        run_oracle_validate(cfg, payload, tables);
    else if (cfg.experiment == "entropy-scan")
        run_entropy_scan(cfg, payload, tables);
    else if (cfg.experiment == "lindblad")
        run_lindblad(cfg, payload, tables);
    else if (cfg.experiment == "contrast")
        run_contrast(cfg, payload, tables);
    else
        fail("experiment: unknown experiment '" + cfg.experiment + "'");

    RunResult result;
    for (const std::string& format : cfg.formats) {
        if (format == "csv")
            for (const Table& table : tables)
                result.files.push_back({table.name + ".csv", render_csv(table, hash)});
        if (format == "json")
            result.files.push_back({cfg.experiment + ".json", payload.dump(2) + "\n"});
    }

    json manifest;
    manifest["experiment"] = cfg.experiment;
    manifest["config_fnv1a64"] = hash;
    manifest["canonical_config"] = json::parse(canonical);
    json files = json::array();
    for (const OutputFile& f : result.files)
        files.push_back({{"name", f.name},
                         {"bytes", f.contents.size()},
                         {"fnv1a64", hex16(fnv1a64(f.contents))}});
    manifest["files"] = files;
    result.files.push_back({"manifest.json", manifest.dump(2) + "\n"});
    return result;
}

void write_outputs(const RunResult& result, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    for (const OutputFile& f : result.files) {
        const std::filesystem::path path = std::filesystem::path(out_dir) / f.name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
        out.write(f.contents.data(), static_cast<std::streamsize>(f.contents.size()));
        if (!out) throw std::runtime_error("short write on '" + path.string() + "'");
    }
}

}  // namespace deco
