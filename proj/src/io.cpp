#include "choq/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "choq/errors.hpp"

namespace choq {

namespace {

static_assert(sizeof(double) == 8);

template <class T> void put_le(std::ostream& os, T v) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(buf, buf + sizeof(T));
    os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T> T get_le(std::istream& is) {
    unsigned char buf[sizeof(T)];
    is.read(reinterpret_cast<char*>(buf), sizeof(T));
    if (!is) throw FormatError("unexpected end of field file");
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(buf, buf + sizeof(T));
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

} // namespace

void write_field(const std::string& path, const Field& field) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    os.write("CHQF", 4);
    put_le<std::uint32_t>(os, 1);
    unsigned char dim = (unsigned char)field.grid.dim;
    os.write(reinterpret_cast<const char*>(&dim), 1);
    for (int d = 0; d < field.grid.dim; ++d)
        put_le<std::uint32_t>(os, std::uint32_t(field.grid.n));
    put_le<double>(os, field.grid.L);
    for (double x : field.v) put_le<double>(os, x);
    if (!os) throw IoError("write failed: " + path);
}

Field read_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open for reading: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "CHQF", 4) != 0) throw FormatError("bad magic");
    auto version = get_le<std::uint32_t>(is);
    if (version != 1) throw FormatError("unsupported version");
    unsigned char dim;
    is.read(reinterpret_cast<char*>(&dim), 1);
    if (!is || dim < 1) throw FormatError("bad dimension");
    std::uint32_t n0 = 0;
    for (int d = 0; d < int(dim); ++d) {
        auto nd = get_le<std::uint32_t>(is);
        if (d == 0) n0 = nd;
        else if (nd != n0) throw FormatError("non-cubic grids unsupported");
    }
    double L = get_le<double>(is);
    Grid g = make_grid(int(dim), int(n0), L);
    Field f(g);
    for (auto& x : f.v) x = get_le<double>(is);
    // must now be exactly at EOF
    char extra;
    is.read(&extra, 1);
    if (!is.eof()) throw FormatError("trailing bytes after payload");
    return f;
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

} // namespace

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto as_int = [&] { return std::stoi(value); };
    auto as_real = [&] { return std::stod(value); };
    if (key == "dim") cfg.params.dim = as_int();
    else if (key == "s") cfg.params.s = as_real();
    else if (key == "alpha") cfg.params.alpha = as_real();
    else if (key == "p") cfg.params.p = as_real();
    else if (key == "omega") cfg.params.omega = as_real();
    else if (key == "n") cfg.n = as_int();
    else if (key == "L") cfg.L = as_real();
    else if (key == "solver") cfg.solver = value;
    else if (key == "rho") cfg.rho = as_real();
    else if (key == "dt") cfg.opts.dt = as_real();
    else if (key == "max_iter") cfg.opts.max_iter = as_int();
    else if (key == "tol") cfg.opts.tol = as_real();
    else if (key == "seed") cfg.opts.seed = unsigned(std::stoul(value));
    else if (key == "noise") cfg.opts.noise = as_real();
    else if (key == "out") cfg.out_dir = value;
    else if (key == "mode") {
        if (value == "periodic") cfg.opts.mode = ConvolutionMode::PeriodicMultiplier;
        else if (value == "free") cfg.opts.mode = ConvolutionMode::FreeSpacePadded;
        else throw OutOfRange("mode (periodic|free)");
    } else if (key == "symmetry") {
        if (value == "none") cfg.opts.symmetry.reset();
        else if (value == "radial") cfg.opts.symmetry = SymmetrySpec{SymmetryTag::Radial, 0};
        else if (value.rfind("blockradial:", 0) == 0)
            cfg.opts.symmetry =
                SymmetrySpec{SymmetryTag::BlockRadial, std::stoi(value.substr(12))};
        else if (value.rfind("oddswap:", 0) == 0)
            cfg.opts.symmetry =
                SymmetrySpec{SymmetryTag::OddSwap, std::stoi(value.substr(8))};
        else throw OutOfRange("symmetry (none|radial|blockradial:m|oddswap:m)");
    } else {
        throw OutOfRange("config key: " + key);
    }
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw FormatError("config line without '=': " + line);
        apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

namespace {

nlohmann::json functionals_json(const FunctionalValues& fv) {
    nlohmann::json j{{"K", fv.K},
                     {"M", fv.M},
                     {"P", fv.P},
                     {"e_omega", fv.e_omega},
                     {"e_zero", fv.e_zero},
                     {"nehari_res", fv.nehari_res},
                     {"pohozaev_res", fv.pohozaev_res}};
    if (fv.s_quot) j["s_quot"] = *fv.s_quot;
    if (fv.w_quot) j["w_quot"] = *fv.w_quot;
    return j;
}

nlohmann::json certificate_json(const Certificate& cert) {
    nlohmann::json j{{"functionals", functionals_json(cert.functionals)},
                     {"lambda", cert.lambda},
                     {"rho", cert.rho},
                     {"symmetry_deviation", cert.symmetry_deviation},
                     {"converged", cert.converged}};
    nlohmann::json sc{{"prop41_i_gap", cert.scaling.prop41_i_gap},
                      {"prop41_ii_gap", cert.scaling.prop41_ii_gap},
                      {"prop41_iii_gap", cert.scaling.prop41_iii_gap},
                      {"prop41_iv_gap", cert.scaling.prop41_iv_gap},
                      {"w_invariance_gap", cert.scaling.w_invariance_gap},
                      {"rho_energy_gap", cert.scaling.rho_energy_gap},
                      {"has_i", cert.scaling.has_i},
                      {"has_ii", cert.scaling.has_ii},
                      {"has_iii", cert.scaling.has_iii},
                      {"has_iv", cert.scaling.has_iv}};
    j["scaling"] = sc;
    if (cert.morse) {
        j["morse"] = {{"eigenvalues", cert.morse->eigenvalues},
                      {"negative_count", cert.morse->negative_count},
                      {"zero_modes", cert.morse->zero_modes},
                      {"zero_tol", cert.morse->zero_tol},
                      {"translation_overlap", cert.morse->translation_overlap}};
    }
    if (cert.decay) {
        j["decay"] = {{"exponent", cert.decay->exponent},
                      {"amplitude", cert.decay->amplitude},
                      {"r_min", cert.decay->r_min},
                      {"r_max", cert.decay->r_max},
                      {"r2", cert.decay->r2}};
    }
    return j;
}

} // namespace

std::string functionals_to_json(const FunctionalValues& fv) {
    return functionals_json(fv).dump(2);
}

std::string certificate_to_json(const Certificate& cert) {
    return certificate_json(cert).dump(2);
}

std::string report_to_json(const SolveReport& rep) {
    const char* term = rep.termination == Termination::Converged ? "Converged"
                       : rep.termination == Termination::MaxIter ? "MaxIter"
                                                                 : "Diverged";
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& h : rep.history)
        hist.push_back({{"iteration", h.iteration},
                        {"energy", h.energy},
                        {"residual", h.residual}});
    nlohmann::json j{{"iterations", rep.iterations},
                     {"termination", term},
                     {"lambda", rep.lambda},
                     {"rho", rep.rho},
                     {"low_dim_demo", rep.low_dim_demo},
                     {"functionals", functionals_json(rep.functionals)},
                     {"history", hist}};
    return j.dump(2);
}

std::string manifest_json(const RunConfig& cfg, const std::string& invocation) {
    const char* sym = "none";
    std::string symval = "none";
    if (cfg.opts.symmetry) {
        switch (cfg.opts.symmetry->tag) {
        case SymmetryTag::Radial: symval = "radial"; break;
        case SymmetryTag::BlockRadial:
            symval = "blockradial:" + std::to_string(cfg.opts.symmetry->m);
            break;
        case SymmetryTag::OddSwap:
            symval = "oddswap:" + std::to_string(cfg.opts.symmetry->m);
            break;
        }
    }
    (void)sym;
    nlohmann::json j{
        {"version", "choquard-lab 1.0.0"},
        {"invocation", invocation},
        {"config",
         {{"dim", cfg.params.dim},
          {"s", cfg.params.s},
          {"alpha", cfg.params.alpha},
          {"p", cfg.params.p},
          {"omega", cfg.params.omega},
          {"n", cfg.n},
          {"L", cfg.L},
          {"solver", cfg.solver},
          {"rho", cfg.rho},
          {"dt", cfg.opts.dt},
          {"max_iter", cfg.opts.max_iter},
          {"tol", cfg.opts.tol},
          {"seed", cfg.opts.seed},
          {"noise", cfg.opts.noise},
          {"mode",
           cfg.opts.mode == ConvolutionMode::PeriodicMultiplier ? "periodic" : "free"},
          {"symmetry", symval},
          {"out", cfg.out_dir}}}};
    return j.dump(2);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << text << "\n";
    if (!os) throw IoError("write failed: " + path);
}

void write_decay_csv(const std::string& path, const DecayFit& fit) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << "r,u_mean,u_min,u_max\n";
    os.precision(17);
    for (const auto& sh : fit.shells)
        os << sh[0] << "," << sh[1] << "," << sh[2] << "," << sh[3] << "\n";
    if (!os) throw IoError("write failed: " + path);
}

} // namespace choq
