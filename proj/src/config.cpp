#include "ch3/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "ch3/waves.hpp"

namespace ch3 {

namespace {

struct Entry {
    std::string value;
    std::string where;  // "file:line" or "env"
};

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

using Entries = std::vector<std::pair<std::string, Entry>>;

Entries parse_text(const std::string& text, const std::string& origin) {
    Entries entries;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        const std::string where = origin + ":" + std::to_string(lineno);
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected key = value, got '" + stripped + "'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": empty key");
        entries.emplace_back(key, Entry{value, where});
    }
    return entries;
}

double parse_number(const Entry& e, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(e.value, &used);
        if (used != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError(e.where + ": expected a number for " + key + ", got '" + e.value + "'");
    }
}

bool parse_bool(const Entry& e, const std::string& key) {
    if (e.value == "true" || e.value == "1" || e.value == "on") return true;
    if (e.value == "false" || e.value == "0" || e.value == "off") return false;
    throw ConfigError(e.where + ": expected true/false for " + key + ", got '" + e.value + "'");
}

std::vector<double> parse_list(const Entry& e, const std::string& key) {
    std::vector<double> out;
    std::istringstream in(e.value);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_number(Entry{item, e.where}, key));
    }
    if (out.empty()) throw ConfigError(e.where + ": expected a comma list for " + key);
    return out;
}

std::array<double, 3> parse_triple(const Entry& e, const std::string& key) {
    const auto list = parse_list(e, key);
    if (list.size() != 3)
        throw ConfigError(e.where + ": " + key + " needs exactly 3 comma-separated values");
    return {list[0], list[1], list[2]};
}

SimConfig materialize(const Entries& entries) {
    SimConfig cfg;
    using Setter = std::function<void(const Entry&)>;
    const std::map<std::string, Setter> setters = {
        {"grid.n",
         [&](const Entry& e) { cfg.grid_n = static_cast<std::size_t>(parse_number(e, "grid.n")); }},
        {"grid.L", [&](const Entry& e) { cfg.grid_L = parse_number(e, "grid.L"); }},
        {"initial.generator", [&](const Entry& e) { cfg.generator = e.value; }},
        {"initial.amplitude",
         [&](const Entry& e) { cfg.amplitude = parse_triple(e, "initial.amplitude"); }},
        {"initial.center", [&](const Entry& e) { cfg.center = parse_triple(e, "initial.center"); }},
        {"initial.width", [&](const Entry& e) { cfg.width = parse_triple(e, "initial.width"); }},
        {"initial.tail_rate",
         [&](const Entry& e) { cfg.tail_rate = parse_number(e, "initial.tail_rate"); }},
        {"initial.mollify_epsilon",
         [&](const Entry& e) { cfg.mollify_epsilon = parse_number(e, "initial.mollify_epsilon"); }},
        {"initial.peakon_positions",
         [&](const Entry& e) { cfg.peakon_positions = parse_list(e, "initial.peakon_positions"); }},
        {"initial.peakon_p",
         [&](const Entry& e) { cfg.peakon_p = parse_list(e, "initial.peakon_p"); }},
        {"initial.peakon_r",
         [&](const Entry& e) { cfg.peakon_r = parse_list(e, "initial.peakon_r"); }},
        {"initial.peakon_s",
         [&](const Entry& e) { cfg.peakon_s = parse_list(e, "initial.peakon_s"); }},
        {"initial.front_amplitude",
         [&](const Entry& e) { cfg.front_amplitude = parse_number(e, "initial.front_amplitude"); }},
        {"initial.front_width",
         [&](const Entry& e) { cfg.front_width = parse_number(e, "initial.front_width"); }},
        {"initial.front_envelope",
         [&](const Entry& e) { cfg.front_envelope = parse_number(e, "initial.front_envelope"); }},
        {"control.dt", [&](const Entry& e) { cfg.dt = parse_number(e, "control.dt"); }},
        {"control.cfl", [&](const Entry& e) { cfg.cfl = parse_number(e, "control.cfl"); }},
        {"control.dt_min", [&](const Entry& e) { cfg.dt_min = parse_number(e, "control.dt_min"); }},
        {"control.slope_threshold",
         [&](const Entry& e) { cfg.slope_threshold = parse_number(e, "control.slope_threshold"); }},
        {"run.t_end", [&](const Entry& e) { cfg.t_end = parse_number(e, "run.t_end"); }},
        {"run.cadence", [&](const Entry& e) { cfg.cadence = parse_number(e, "run.cadence"); }},
        {"diagnostics.riccati",
         [&](const Entry& e) { cfg.riccati = parse_bool(e, "diagnostics.riccati"); }},
        {"diagnostics.decay_sides", [&](const Entry& e) { cfg.decay_sides = e.value; }},
        {"diagnostics.weighted", [&](const Entry& e) { cfg.weighted = e.value; }},
        {"diagnostics.potential_lambda",
         [&](const Entry& e) {
             cfg.potential_lambda = parse_number(e, "diagnostics.potential_lambda");
         }},
        {"diagnostics.potential_p",
         [&](const Entry& e) {
             cfg.potential_p = static_cast<int>(parse_number(e, "diagnostics.potential_p"));
         }},
        {"output.dir", [&](const Entry& e) { cfg.out_dir = e.value; }},
        {"output.snapshots",
         [&](const Entry& e) { cfg.snapshots = parse_bool(e, "output.snapshots"); }},
        {"seed",
         [&](const Entry& e) { cfg.seed = static_cast<unsigned long>(parse_number(e, "seed")); }},
        {"blowup.deltas",
         [&](const Entry& e) { cfg.blowup_deltas = parse_list(e, "blowup.deltas"); }},
        {"kernel.alphas",
         [&](const Entry& e) { cfg.kernel_alphas = parse_list(e, "kernel.alphas"); }},
        {"kernel.Ns",
         [&](const Entry& e) {
             cfg.kernel_Ns.clear();
             for (double v : parse_list(e, "kernel.Ns")) cfg.kernel_Ns.push_back(static_cast<int>(v));
         }},
    };

    for (const auto& [key, entry] : entries) {
        const auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError(entry.where + ": unknown key '" + key + "'");
        it->second(entry);
    }

    // Cheap structural validation; numeric domains are enforced by the owning
    // modules when the objects are built.
    static const char* known[] = {"zero",   "gaussian_triple", "sech_triple", "potential_sech",
                                  "peakon", "steep_front",     "random_smooth"};
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* g) { return cfg.generator == g; }) == std::end(known))
        throw ConfigError("initial.generator: unknown generator '" + cfg.generator + "'");
    if (cfg.decay_sides != "none" && cfg.decay_sides != "left" && cfg.decay_sides != "right" &&
        cfg.decay_sides != "both")
        throw ConfigError("diagnostics.decay_sides: expected none|left|right|both, got '" +
                          cfg.decay_sides + "'");
    if (!(cfg.cfl > 0.0) || cfg.cfl > 1.0)
        throw ConfigError("control.cfl: must lie in (0, 1]");
    if (!(cfg.dt > 0.0) || !(cfg.dt_min > 0.0) || cfg.dt_min >= cfg.dt)
        throw ConfigError("control.dt/dt_min: need 0 < dt_min < dt");
    if (!(cfg.cadence > 0.0)) throw ConfigError("run.cadence: must be positive");
    return cfg;
}

Entries env_entries() {
    // CH3LAB_GRID_N=... overrides grid.n; dots map to underscores. The fixed
    // key list makes the reverse mapping unambiguous.
    static const char* keys[] = {
        "grid.n", "grid.L", "initial.generator", "initial.amplitude", "initial.center",
        "initial.width", "initial.tail_rate", "initial.mollify_epsilon",
        "initial.peakon_positions", "initial.peakon_p", "initial.peakon_r", "initial.peakon_s",
        "initial.front_amplitude", "initial.front_width", "initial.front_envelope", "control.dt",
        "control.cfl", "control.dt_min", "control.slope_threshold", "run.t_end", "run.cadence",
        "diagnostics.riccati", "diagnostics.decay_sides", "diagnostics.weighted",
        "diagnostics.potential_lambda", "diagnostics.potential_p", "output.dir",
        "output.snapshots", "seed", "blowup.deltas", "kernel.alphas", "kernel.Ns"};
    Entries entries;
    for (const char* key : keys) {
        std::string name = "CH3LAB_";
        for (const char* p = key; *p; ++p)
            name += *p == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(*p)));
        if (const char* value = std::getenv(name.c_str()))
            entries.emplace_back(key, Entry{value, "env " + name});
    }
    return entries;
}

}  // namespace

SimConfig config_from_text(const std::string& text, const std::string& origin, bool apply_env) {
    Entries entries = parse_text(text, origin);
    if (apply_env) {
        const Entries env = env_entries();
        entries.insert(entries.end(), env.begin(), env.end());
    }
    return materialize(entries);
}

SimConfig load_config(const std::filesystem::path& path, bool apply_env) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return config_from_text(buf.str(), path.string(), apply_env);
}

std::string print_defaults() {
    const SimConfig d;
    std::ostringstream out;
    auto triple = [](const std::array<double, 3>& a) {
        std::ostringstream s;
        s << a[0] << "," << a[1] << "," << a[2];
        return s.str();
    };
    auto list = [](const auto& v) {
        std::ostringstream s;
        for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
        return s.str();
    };
    out << "# ch3lab configuration (defaults)\n"
        << "# Environment overrides: CH3LAB_<KEY>, dots -> underscores.\n\n"
        << "grid.n = " << d.grid_n << "            # points, power of two >= 16\n"
        << "grid.L = " << d.grid_L << "            # domain half-width, nodes on [-L, L)\n\n"
        << "# zero | gaussian_triple | sech_triple | potential_sech | peakon |\n"
        << "# steep_front | random_smooth\n"
        << "initial.generator = " << d.generator << "\n"
        << "initial.amplitude = " << triple(d.amplitude) << "\n"
        << "initial.center = " << triple(d.center) << "       # gaussian_triple\n"
        << "initial.width = " << triple(d.width) << "      # gaussian_triple\n"
        << "initial.tail_rate = " << d.tail_rate << "        # sech_triple / potential_sech\n"
        << "initial.mollify_epsilon = " << d.mollify_epsilon << "  # bump radius, 0 = off\n"
        << "initial.peakon_positions = " << list(d.peakon_positions) << "\n"
        << "initial.peakon_p = " << list(d.peakon_p) << "\n"
        << "initial.peakon_r = " << list(d.peakon_r) << "\n"
        << "initial.peakon_s = " << list(d.peakon_s) << "\n"
        << "initial.front_amplitude = " << d.front_amplitude << "   # steep_front\n"
        << "initial.front_width = " << d.front_width << "\n"
        << "initial.front_envelope = " << d.front_envelope << "\n\n"
        << "control.dt = " << d.dt << "\n"
        << "control.cfl = " << d.cfl << "\n"
        << "control.dt_min = " << d.dt_min << "\n"
        << "control.slope_threshold = " << d.slope_threshold
        << "  # <= 0 selects 50*sqrt(E0)\n\n"
        << "run.t_end = " << d.t_end << "\n"
        << "run.cadence = " << d.cadence << "\n\n"
        << "diagnostics.riccati = " << (d.riccati ? "true" : "false") << "\n"
        << "diagnostics.decay_sides = " << d.decay_sides << "   # none|left|right|both\n"
        << "diagnostics.weighted = " << d.weighted << "      # e.g. JN:0.5:4;phiN:0.5:4\n"
        << "diagnostics.potential_lambda = " << d.potential_lambda << "  # >= 0 enables\n"
        << "diagnostics.potential_p = " << d.potential_p << "\n\n"
        << "output.dir = " << d.out_dir << "\n"
        << "output.snapshots = " << (d.snapshots ? "true" : "false") << "\n"
        << "seed = " << d.seed << "\n\n"
        << "blowup.deltas = " << list(d.blowup_deltas) << "\n"
        << "kernel.alphas = " << list(d.kernel_alphas) << "\n"
        << "kernel.Ns = " << list(d.kernel_Ns) << "\n";
    return out.str();
}

StateTriple build_initial_state(const SimConfig& cfg) {
    GridPtr grid = make_grid(cfg.grid_n, cfg.grid_L);
    StateTriple z;
    if (cfg.generator == "zero") {
        z = make_state(grid);
    } else if (cfg.generator == "gaussian_triple") {
        z = gaussian_triple(grid, cfg.amplitude, cfg.center, cfg.width);
    } else if (cfg.generator == "sech_triple") {
        z = sech_triple(grid, cfg.amplitude, cfg.tail_rate);
    } else if (cfg.generator == "potential_sech") {
        z = potential_sech_triple(grid, cfg.amplitude, cfg.tail_rate);
    } else if (cfg.generator == "peakon") {
        PeakonAnsatz a{cfg.peakon_positions, cfg.peakon_p, cfg.peakon_r, cfg.peakon_s};
        z = peakon_field(a, grid);
    } else if (cfg.generator == "steep_front") {
        z = steep_front_data(grid, cfg.front_amplitude, cfg.front_width, cfg.front_envelope)
                .state;
    } else if (cfg.generator == "random_smooth") {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> amp(-0.5, 0.5), phase(0.0, 6.283185307179586);
        z = make_state(grid);
        const double L = grid->half_width();
        for (Field* f : {&z.u, &z.v, &z.w}) {
            std::array<double, 6> a{}, ph{};
            for (int m = 0; m < 6; ++m) {
                a[static_cast<std::size_t>(m)] = amp(rng);
                ph[static_cast<std::size_t>(m)] = phase(rng);
            }
            for (std::size_t i = 0; i < grid->size(); ++i) {
                const double x = grid->node(i);
                double s = 0.0;
                for (int m = 0; m < 6; ++m)
                    s += a[static_cast<std::size_t>(m)] *
                         std::cos(0.35 * (m + 1) * x + ph[static_cast<std::size_t>(m)]);
                (*f)[i] = s * std::exp(-(x * x) / ((0.175 * L) * (0.175 * L)));
            }
        }
    } else {
        throw ConfigError("unknown generator: " + cfg.generator);
    }
    if (cfg.mollify_epsilon > 0.0) {
        z.u = mollify(z.u, cfg.mollify_epsilon);
        z.v = mollify(z.v, cfg.mollify_epsilon);
        z.w = mollify(z.w, cfg.mollify_epsilon);
    }
    return z;
}

}  // namespace ch3
