#include "runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "anosov/cones.hpp"
#include "anosov/conjugacy.hpp"
#include "anosov/errors.hpp"
#include "anosov/families.hpp"
#include "anosov/growth.hpp"
#include "anosov/leaf_entropy.hpp"
#include "anosov/lyapunov.hpp"
#include "anosov/measures.hpp"
#include "anosov/rigidity.hpp"
#include "anosov/util.hpp"

namespace lab {

using anosov::format_double;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kToolVersion = "anosov-lab 1.0.0";

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string w;
    while (is >> w) out.push_back(w);
    return out;
}

double parse_num(const std::string& w, const std::string& key) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(w, &pos);
    } catch (...) {
        throw anosov::ConfigError("config: bad number '" + w + "' for key " + key);
    }
    if (pos != w.size()) throw anosov::ConfigError("config: trailing junk in '" + w + "' for key " + key);
    return v;
}

long long parse_int(const std::string& w, const std::string& key) {
    double v = parse_num(w, key);
    long long n = (long long)std::llround(v);
    if (double(n) != v) throw anosov::ConfigError("config: key " + key + " needs an integer, got " + w);
    return n;
}

anosov::Tag parse_tag(const std::string& s) {
    if (s == "uu") return anosov::Tag::uu;
    if (s == "wu") return anosov::Tag::wu;
    if (s == "s") return anosov::Tag::s;
    throw anosov::ConfigError("config: tag must be uu, wu or s, got '" + s + "'");
}

void parse_matrix(const std::string& v, anosov::IntMat3& m) {
    std::vector<std::string> rows;
    std::string cur;
    for (char c : v) {
        if (c == ';') {
            rows.push_back(cur);
            cur.clear();
        } else
            cur += c;
    }
    rows.push_back(cur);
    if (rows.size() != 3) throw anosov::ConfigError("config: matrix needs 3 ';'-separated rows");
    for (int i = 0; i < 3; ++i) {
        std::vector<std::string> ws = split_ws(rows[std::size_t(i)]);
        if (ws.size() != 3) throw anosov::ConfigError("config: matrix row needs 3 entries");
        for (int j = 0; j < 3; ++j) m.m[i][j] = parse_int(ws[std::size_t(j)], "matrix");
    }
}

anosov::FourierMode parse_mode(const std::string& v) {
    std::vector<std::string> ws = split_ws(v);
    anosov::FourierMode mo;
    bool have_k = false;
    std::size_t i = 0;
    while (i < ws.size()) {
        const std::string& g = ws[i];
        if (g != "k" && g != "cos" && g != "sin")
            throw anosov::ConfigError("config: mode expects groups k/cos/sin, got '" + g + "'");
        if (i + 3 >= ws.size()) throw anosov::ConfigError("config: mode group '" + g + "' needs 3 numbers");
        if (g == "k") {
            for (int c = 0; c < 3; ++c) mo.k[c] = parse_int(ws[i + 1 + std::size_t(c)], "mode");
            have_k = true;
        } else {
            anosov::Vec3& amp = g == "cos" ? mo.cos_amp : mo.sin_amp;
            for (int c = 0; c < 3; ++c) amp[c] = parse_num(ws[i + 1 + std::size_t(c)], "mode");
        }
        i += 4;
    }
    if (!have_k) throw anosov::ConfigError("config: mode needs a 'k' group");
    return mo;
}

// ---------------------------------------------------------------------
// output plumbing

struct Emitter {
    std::filesystem::path dir;
    std::vector<std::string> outputs;

    explicit Emitter(const std::string& out_dir) : dir(out_dir) {
        std::filesystem::create_directories(dir);
    }

    void csv(const std::string& name, const std::string& header,
             const std::vector<std::vector<std::string>>& rows) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw anosov::Error("cannot write " + (dir / name).string());
        f << header << "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << row[i];
            f << "\n";
        }
        outputs.push_back(name);
    }

    void text(const std::string& name, const std::string& body) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw anosov::Error("cannot write " + (dir / name).string());
        f << body;
        outputs.push_back(name);
    }
};

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)v);
    return buf;
}

struct StageClock {
    using clock = std::chrono::steady_clock;
    clock::time_point start = clock::now();
    clock::time_point mark = clock::now();
    json stages = json::object();

    void stage(const std::string& label) {
        auto now = clock::now();
        stages[label] = std::chrono::duration<double>(now - mark).count();
        mark = now;
    }
    double total() const {
        return std::chrono::duration<double>(clock::now() - start).count();
    }
};

anosov::AnosovMap build_map(const ScenarioConfig& c) {
    if (c.family == "none")
        return anosov::AnosovMap(c.matrix, anosov::PerturbationField(c.epsilon, c.modes));
    if (!c.modes.empty() || c.epsilon != 0.0)
        throw anosov::ConfigError("config: family overrides epsilon/mode keys; remove them");
    if (c.family == "smooth") return anosov::families::smooth_conjugate(c.family_eta).map;
    if (c.family == "generic") return anosov::families::generic_member(c.seed, c.family_index);
    throw anosov::ConfigError("config: family must be none, smooth or generic");
}

std::vector<anosov::TorusPoint> base_points(const ScenarioConfig& c) {
    anosov::PointSampler sampler = anosov::uniform_volume_sampler();
    std::vector<anosov::TorusPoint> pts;
    pts.reserve(std::size_t(c.bases));
    for (int i = 0; i < c.bases; ++i) pts.push_back(sampler(c.seed, std::uint64_t(i)));
    return pts;
}

// ---------------------------------------------------------------------
// verbs

json cmd_spectrum(const ScenarioConfig& c, Emitter& em, StageClock& clock) {
    anosov::AnosovMap map = build_map(c);
    const anosov::Spectrum& sp = map.spectrum();
    clock.stage("build");

    std::vector<std::vector<std::string>> rows;
    for (anosov::Tag t : {anosov::Tag::uu, anosov::Tag::wu, anosov::Tag::s}) {
        anosov::Vec3 d = sp.dir(t);
        rows.push_back({anosov::tag_name(t), format_double(sp.alpha_of(t)),
                        format_double(sp.log_of(t)), format_double(d.x), format_double(d.y),
                        format_double(d.z)});
    }
    em.csv("spectrum.csv", "tag,alpha,log_modulus,dir_x,dir_y,dir_z", rows);

    anosov::ConeCertificate cert = anosov::verify_cone_condition(map);
    clock.stage("certificate");
    std::vector<std::vector<std::string>> crows{
        {"plane_expansion_min", format_double(cert.plane_expansion_min)},
        {"uu_expansion_min", format_double(cert.uu_expansion_min)},
        {"uu_expansion_max", format_double(cert.uu_expansion_max)},
        {"center_expansion_min", format_double(cert.center_expansion_min)},
        {"center_expansion_max", format_double(cert.center_expansion_max)},
        {"s_inv_expansion_min", format_double(cert.s_inv_expansion_min)},
        {"s_inv_expansion_max", format_double(cert.s_inv_expansion_max)},
    };
    em.csv("certificate.csv", "quantity,value", crows);

    json s;
    s["alpha"] = {sp.alpha[0], sp.alpha[1], sp.alpha[2]};
    s["log_modulus"] = {sp.log_modulus[0], sp.log_modulus[1], sp.log_modulus[2]};
    s["certified"] = true;
    s["center_expansion_min"] = cert.center_expansion_min;
    return s;
}

json cmd_growth(const ScenarioConfig& c, Emitter& em, StageClock& clock) {
    anosov::AnosovMap map = build_map(c);
    anosov::Tag tag = parse_tag(c.tag);
    anosov::GrowthOptions opt;
    opt.radius = c.radius;
    opt.stages = c.stages;
    opt.window = c.window;
    anosov::ChiEstimate chi = anosov::chi_sup(map, tag, base_points(c), opt);
    clock.stage("growth");

    std::vector<std::vector<std::string>> rows;
    for (std::size_t b = 0; b < chi.per_base.size(); ++b)
        for (std::size_t n = 0; n < chi.per_base[b].length.size(); ++n)
            rows.push_back({std::to_string(b), std::to_string(n),
                            format_double(chi.per_base[b].length[n]),
                            format_double(chi.per_base[b].log_length[n])});
    em.csv("growth.csv", "base,stage,length,log_length", rows);

    json s;
    s["tag"] = c.tag;
    s["chi_sup"] = chi.sup;
    s["chi_mean"] = chi.mean;
    json per = json::array();
    for (const auto& g : chi.per_base) per.push_back({{"chi", g.chi}, {"stderr", g.chi_stderr}});
    s["per_base"] = per;
    return s;
}

json cmd_entropy(const ScenarioConfig& c, Emitter& em, StageClock& clock) {
    anosov::AnosovMap map = build_map(c);
    anosov::Tag tag = parse_tag(c.tag);
    anosov::LeafEntropyOptions opt;
    opt.radius = c.radius;
    opt.eps = c.eps_schedule;
    opt.n_min = c.n_min;
    opt.n_max = c.n_max;
    opt.window = c.window;
    anosov::LeafEntropyEstimate ent = anosov::leaf_entropy(map, tag, anosov::TorusPoint(c.base), opt);
    clock.stage("entropy");

    std::vector<std::vector<std::string>> rows;
    for (std::size_t e = 0; e < ent.eps.size(); ++e)
        for (std::size_t i = 0; i < ent.count[e].size(); ++i)
            rows.push_back({format_double(ent.eps[e]), std::to_string(ent.n_min + int(i)),
                            std::to_string(ent.count[e][i])});
    em.csv("counts.csv", "eps,n,separated", rows);

    json s;
    s["tag"] = c.tag;
    s["value"] = ent.value;
    s["rate"] = ent.rate;
    s["rate_stderr"] = ent.rate_stderr;
    return s;
}

json cmd_exponents(const ScenarioConfig& c, Emitter& em, StageClock& clock) {
    anosov::AnosovMap map = build_map(c);
    anosov::PointSampler sampler = anosov::uniform_volume_sampler();
    std::vector<std::vector<std::string>> rows;
    json per = json::object();
    for (anosov::Tag t : {anosov::Tag::uu, anosov::Tag::wu, anosov::Tag::s}) {
        anosov::LyapunovEstimate est =
            anosov::lyapunov_exponent(map, t, sampler, c.depth, c.samples, c.seed, c.threads);
        rows.push_back({anosov::tag_name(t), format_double(est.value), format_double(est.std_error),
                        std::to_string(est.n), std::to_string(est.ensemble)});
        per[anosov::tag_name(t)] = {{"value", est.value}, {"stderr", est.std_error}};
    }
    clock.stage("birkhoff");
    em.csv("exponents.csv", "tag,value,std_error,n,ensemble", rows);

    anosov::OseledetsEstimate qr = anosov::oseledets_qr(map, anosov::TorusPoint(c.base), c.depth);
    clock.stage("qr");
    json s;
    s["birkhoff"] = per;
    s["qr"] = {qr.exponents[0], qr.exponents[1], qr.exponents[2]};
    s["qr_det_defect"] = qr.det_defect;
    return s;
}

json cmd_measure(const ScenarioConfig& c, Emitter& em, StageClock& clock) {
    anosov::AnosovMap map = build_map(c);
    anosov::Tag tag = parse_tag(c.tag);
    anosov::LeafSegment arc = anosov::grow_leaf(map, tag, anosov::TorusPoint(c.base), c.radius);
    anosov::EmpiricalMeasure mu =
        anosov::ac_invariant_measure(map, tag, arc, c.depth, c.samples, c.seed);
    clock.stage("measure");
    anosov::LyapunovEstimate leb = anosov::lebesgue_exponent(map, tag, mu);
    clock.stage("exponent");

    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < mu.sample.size(); ++i)
        rows.push_back({format_double(mu.sample[i].r.x), format_double(mu.sample[i].r.y),
                        format_double(mu.sample[i].r.z), format_double(mu.weight[i])});
    em.csv("samples.csv", "x,y,z,weight", rows);

    std::vector<std::vector<std::string>> mrows;
    for (std::size_t i = 0; i < mu.wave.size(); ++i)
        mrows.push_back({std::to_string(mu.wave[i][0]), std::to_string(mu.wave[i][1]),
                         std::to_string(mu.wave[i][2]), format_double(mu.moment_cos[i]),
                         format_double(mu.moment_sin[i])});
    em.csv("moments.csv", "kx,ky,kz,cos_moment,sin_moment", mrows);

    json s;
    s["tag"] = c.tag;
    s["depth"] = mu.depth;
    s["samples"] = mu.sample.size();
    s["invariance_defect"] = mu.invariance_defect;
    s["lebesgue_exponent"] = leb.value;
    s["lebesgue_stderr"] = leb.std_error;
    return s;
}

json series_json(const anosov::ConjugacySeries& sr) {
    json s;
    s["tol"] = sr.tol;
    s["terms"] = {sr.terms[0], sr.terms[1], sr.terms[2]};
    s["coeff_sup"] = {sr.coeff_sup[0], sr.coeff_sup[1], sr.coeff_sup[2]};
    s["tail_bound"] = {sr.tail_bound[0], sr.tail_bound[1], sr.tail_bound[2]};
    s["basis_cond"] = sr.basis_cond;
    return s;
}

json cmd_conjugacy(const ScenarioConfig& c, Emitter& em, StageClock& clock) {
    anosov::AnosovMap map = build_map(c);
    anosov::ConjugacyMap cm = anosov::solve_conjugacy(map, c.grid, c.tol);
    clock.stage("solve");
    anosov::SemiconjugacyCheck ck = anosov::verify_semiconjugacy(map, cm, c.verify_grid);
    clock.stage("verify");

    std::vector<std::vector<std::string>> frows;
    for (int i = 0; i < cm.u.n; ++i)
        for (int j = 0; j < cm.u.n; ++j)
            for (int k = 0; k < cm.u.n; ++k) {
                const anosov::Vec3& v = cm.u.at(i, j, k);
                frows.push_back({std::to_string(i), std::to_string(j), std::to_string(k),
                                 format_double(v.x), format_double(v.y), format_double(v.z)});
            }
    em.csv("field.csv", "i,j,k,ux,uy,uz", frows);

    std::vector<std::vector<std::string>> fo;
    json fol = json::object();
    for (anosov::Tag t : {anosov::Tag::uu, anosov::Tag::wu, anosov::Tag::s}) {
        anosov::FoliationImageCheck fc =
            anosov::foliation_image_check(map, cm, t, anosov::TorusPoint(c.base), c.radius);
        fo.push_back({anosov::tag_name(t), format_double(fc.line), format_double(fc.plane),
                      format_double(fc.radius)});
        fol[anosov::tag_name(t)] = {{"line", fc.line}, {"plane", fc.plane}};
    }
    clock.stage("foliation");
    em.csv("foliation.csv", "tag,line_deviation,plane_deviation,radius", fo);

    json s;
    s["series"] = series_json(cm.series);
    s["residual_solve"] = cm.residual;
    s["residual_grid"] = ck.grid_n;
    s["residual"] = ck.residual;
    s["collisions"] = ck.collisions;
    s["injective_proxy"] = ck.injective_proxy;
    s["sup_u"] = cm.u.sup_norm();
    s["foliation"] = fol;
    return s;
}

json regularity_json(const anosov::RegularityReport& r) {
    json s;
    s["exponent"] = r.exponent;
    s["exponent_stderr"] = r.exponent_stderr;
    s["stabilization"] = r.stabilization;
    s["verdict"] = anosov::verdict_name(r.verdict);
    return s;
}

json cmd_rigidity(const ScenarioConfig& c, Emitter& em, StageClock& clock) {
    anosov::AnosovMap map = build_map(c);
    anosov::RigidityOptions opt;
    opt.seed = c.seed;
    opt.bases = c.bases;
    opt.measure_depth = c.depth;
    opt.measure_samples = c.samples;
    opt.growth.stages = c.stages;
    opt.growth.window = c.window;
    opt.entropy.eps = c.eps_schedule;
    opt.entropy.n_min = c.n_min;
    opt.entropy.n_max = c.n_max;
    opt.conj_grid = c.grid;
    opt.conj_tol = c.tol;
    opt.verify_grid = c.verify_grid;
    anosov::RigidityOutcome out = anosov::rigidity_experiment(map, opt);
    clock.stage("experiment");

    std::vector<std::vector<std::string>> rows;
    for (const auto& rep : out.tag)
        rows.push_back({anosov::tag_name(rep.tag), format_double(rep.linear_log),
                        format_double(rep.sx.lambda.value), format_double(rep.sx.lambda.std_error),
                        format_double(rep.sx.chi.mean), format_double(rep.sx.slack),
                        format_double(rep.sx.sigma), format_double(rep.entropy.value),
                        format_double(rep.entropy_gap), format_double(rep.regularity.exponent),
                        anosov::verdict_name(rep.regularity.verdict)});
    em.csv("tags.csv",
           "tag,linear_log,lambda,lambda_stderr,chi,gap,gap_sigma,entropy,entropy_gap,"
           "regularity_exponent,regularity_verdict",
           rows);

    std::vector<std::vector<std::string>> qrows;
    for (const auto& rep : out.tag)
        for (std::size_t j = 0; j < rep.regularity.scale.size(); ++j)
            qrows.push_back({anosov::tag_name(rep.tag), format_double(rep.regularity.scale[j]),
                             format_double(rep.regularity.quotient[j])});
    em.csv("regularity.csv", "tag,scale,quotient", qrows);

    json s;
    s["verdict"] = out.verdict;
    s["hypothesis_satisfied"] = out.hypothesis_satisfied;
    s["any_strict_gap"] = out.any_strict_gap;
    s["conjugacy"] = series_json(out.conjugacy.series);
    s["residual"] = out.check.residual;
    s["injective_proxy"] = out.check.injective_proxy;
    json tags = json::object();
    for (const auto& rep : out.tag) {
        json t;
        t["linear_log"] = rep.linear_log;
        t["lambda"] = rep.sx.lambda.value;
        t["lambda_stderr"] = rep.sx.lambda.std_error;
        t["chi"] = rep.sx.chi.mean;
        t["chi_sup"] = rep.sx.chi.sup;
        t["gap"] = rep.sx.slack;
        t["gap_sigma"] = rep.sx.sigma;
        t["entropy"] = rep.entropy.value;
        t["entropy_gap"] = rep.entropy_gap;
        t["gap_within_tolerance"] = rep.gap_within_tolerance;
        t["strict_gap"] = rep.strict_gap;
        t["regularity"] = regularity_json(rep.regularity);
        tags[anosov::tag_name(rep.tag)] = t;
    }
    s["tags"] = tags;
    json fol = json::object();
    for (const auto& fc : out.foliation)
        fol[anosov::tag_name(fc.tag)] = {{"line", fc.line}, {"plane", fc.plane}};
    s["foliation"] = fol;
    return s;
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text) {
    ScenarioConfig c;
    c.matrix = anosov::families::reference_matrix();
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw anosov::ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key == "matrix")
            parse_matrix(val, c.matrix);
        else if (key == "epsilon")
            c.epsilon = parse_num(val, key);
        else if (key == "mode")
            c.modes.push_back(parse_mode(val));
        else if (key == "family")
            c.family = val;
        else if (key == "family_index")
            c.family_index = int(parse_int(val, key));
        else if (key == "family_eta")
            c.family_eta = parse_num(val, key);
        else if (key == "tag")
            c.tag = val;
        else if (key == "base") {
            std::vector<std::string> ws = split_ws(val);
            if (ws.size() != 3) throw anosov::ConfigError("config: base needs 3 numbers");
            for (int i = 0; i < 3; ++i) c.base[i] = parse_num(ws[std::size_t(i)], key);
        } else if (key == "radius")
            c.radius = parse_num(val, key);
        else if (key == "stages")
            c.stages = int(parse_int(val, key));
        else if (key == "window")
            c.window = int(parse_int(val, key));
        else if (key == "bases")
            c.bases = int(parse_int(val, key));
        else if (key == "n_min")
            c.n_min = int(parse_int(val, key));
        else if (key == "n_max")
            c.n_max = int(parse_int(val, key));
        else if (key == "eps_schedule") {
            c.eps_schedule.clear();
            for (const std::string& w : split_ws(val)) c.eps_schedule.push_back(parse_num(w, key));
            if (c.eps_schedule.empty()) throw anosov::ConfigError("config: eps_schedule is empty");
        } else if (key == "grid")
            c.grid = int(parse_int(val, key));
        else if (key == "verify_grid")
            c.verify_grid = int(parse_int(val, key));
        else if (key == "tol")
            c.tol = parse_num(val, key);
        else if (key == "depth")
            c.depth = int(parse_int(val, key));
        else if (key == "samples")
            c.samples = int(parse_int(val, key));
        else if (key == "seed") {
            c.seed = std::uint64_t(parse_int(val, key));
            c.seed_set = true;
        } else if (key == "threads")
            c.threads = int(parse_int(val, key));
        else
            throw anosov::ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw anosov::ConfigError("cannot read config file " + path);
    std::ostringstream body;
    body << f.rdbuf();
    return parse_config_text(body.str());
}

std::string canonical_config(const ScenarioConfig& c) {
    std::ostringstream os;
    os << "matrix =";
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) os << " " << c.matrix.m[i][j];
        if (i < 2) os << " ;";
    }
    os << "\n";
    os << "epsilon = " << format_double(c.epsilon) << "\n";
    for (const anosov::FourierMode& mo : c.modes) {
        os << "mode = k " << mo.k[0] << " " << mo.k[1] << " " << mo.k[2];
        os << " cos " << format_double(mo.cos_amp.x) << " " << format_double(mo.cos_amp.y) << " "
           << format_double(mo.cos_amp.z);
        os << " sin " << format_double(mo.sin_amp.x) << " " << format_double(mo.sin_amp.y) << " "
           << format_double(mo.sin_amp.z) << "\n";
    }
    os << "family = " << c.family << "\n";
    os << "family_index = " << c.family_index << "\n";
    os << "family_eta = " << format_double(c.family_eta) << "\n";
    os << "tag = " << c.tag << "\n";
    os << "base = " << format_double(c.base.x) << " " << format_double(c.base.y) << " "
       << format_double(c.base.z) << "\n";
    os << "radius = " << format_double(c.radius) << "\n";
    os << "stages = " << c.stages << "\n";
    os << "window = " << c.window << "\n";
    os << "bases = " << c.bases << "\n";
    os << "n_min = " << c.n_min << "\n";
    os << "n_max = " << c.n_max << "\n";
    os << "eps_schedule =";
    for (double e : c.eps_schedule) os << " " << format_double(e);
    os << "\n";
    os << "grid = " << c.grid << "\n";
    os << "verify_grid = " << c.verify_grid << "\n";
    os << "tol = " << format_double(c.tol) << "\n";
    os << "depth = " << c.depth << "\n";
    os << "samples = " << c.samples << "\n";
    os << "seed = " << c.seed << "\n";
    return os.str();
}

RunResult run_verb(const std::string& verb, const ScenarioConfig& config_in,
                   const std::string& out_dir) {
    ScenarioConfig config = config_in;
    if (!config.seed_set) throw anosov::ConfigError("config: seed is mandatory (config key or --seed)");
    anosov::default_thread_cap().store(config.threads);

    Emitter em(out_dir);
    StageClock clock;
    json summary;
    if (verb == "spectrum")
        summary = cmd_spectrum(config, em, clock);
    else if (verb == "growth")
        summary = cmd_growth(config, em, clock);
    else if (verb == "entropy")
        summary = cmd_entropy(config, em, clock);
    else if (verb == "exponents")
        summary = cmd_exponents(config, em, clock);
    else if (verb == "measure")
        summary = cmd_measure(config, em, clock);
    else if (verb == "conjugacy")
        summary = cmd_conjugacy(config, em, clock);
    else if (verb == "rigidity")
        summary = cmd_rigidity(config, em, clock);
    else
        throw anosov::ConfigError("unknown verb '" + verb + "'");

    std::string canon = canonical_config(config);
    json full;
    full["verb"] = verb;
    full["seed"] = config.seed;
    full["config_hash"] = hex64(fnv1a(canon));
    for (auto& [k, v] : summary.items()) full[k] = v;
    std::string summary_text = full.dump(2) + "\n";
    em.text("summary.json", summary_text);
    em.text("config.txt", canon);

    json manifest;
    manifest["tool_version"] = kToolVersion;
    manifest["verb"] = verb;
    manifest["config_hash"] = hex64(fnv1a(canon));
    manifest["outputs"] = em.outputs;
    manifest["wall_clock_sec"] = clock.total();
    manifest["stage_sec"] = clock.stages;
    {
        std::ofstream f(std::filesystem::path(out_dir) / "manifest.json", std::ios::binary);
        f << manifest.dump(2) << "\n";
    }

    RunResult res;
    res.summary = summary_text;
    res.outputs = em.outputs;
    return res;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const anosov::ConfigError*>(&e)) return 2;
    if (dynamic_cast<const anosov::NotPartiallyHyperbolic*>(&e)) return 3;
    if (dynamic_cast<const anosov::ConeViolation*>(&e)) return 4;
    if (dynamic_cast<const anosov::NonConvergence*>(&e)) return 5;
    if (dynamic_cast<const anosov::SeriesStall*>(&e)) return 6;
    if (dynamic_cast<const anosov::ScaleBelowResolution*>(&e)) return 7;
    if (dynamic_cast<const anosov::ResolutionTooCoarse*>(&e)) return 8;
    if (dynamic_cast<const anosov::Error*>(&e)) return 1;
    return 1;
}

}  // namespace lab
