#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "polyspec/cones.hpp"
#include "polyspec/errors.hpp"
#include "polyspec/polygon_volume.hpp"
#include "polyspec/smoothing.hpp"
#include "polyspec/torus_measure.hpp"

namespace polyspec::cli {

using Json = nlohmann::ordered_json;

namespace {

std::vector<std::string> split(const std::string& text, std::string_view what) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    if (out.empty()) throw ValidationError(std::string(what) + " must be a comma-separated list");
    return out;
}

double to_double(const std::string& token, std::string_view what) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value))
        throw ValidationError("cannot parse " + std::string(what) + " entry '" + token + "'");
    return value;
}

std::optional<std::int64_t> to_integer(const std::string& token) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
    return value;
}

std::vector<double> doubles(const std::string& text, std::string_view what) {
    std::vector<double> out;
    for (const auto& t : split(text, what)) out.push_back(to_double(t, what));
    return out;
}

std::vector<std::int64_t> integers(const std::string& text, std::string_view what) {
    std::vector<std::int64_t> out;
    for (const auto& t : split(text, what)) {
        const auto v = to_integer(t);
        if (!v) throw ValidationError(std::string(what) + " entries must be integers, got '" + t + "'");
        out.push_back(*v);
    }
    return out;
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ValidationError(message);
}

Format resolve_format(const Common& common, Format fallback) {
    if (common.format.empty()) return fallback;
    if (common.format == "json") return Format::Json;
    if (common.format == "text") return Format::Text;
    if (common.format == "csv") return Format::Csv;
    throw ValidationError("unknown format '" + common.format + "' (expected csv|json|text)");
}

// Thread count is deliberately not echoed: outputs must not depend on it.
Json envelope(std::string_view command, Json config) {
    Json j;
    j["tool"] = "polyspec";
    j["version"] = version_string();
    j["command"] = std::string(command);
    j["config"] = std::move(config);
    return j;
}

void write_header(std::ostream& out, const Json& env) {
    out << "# polyspec " << env["version"].get<std::string>() << ' ' << env["command"].get<std::string>() << '\n';
    for (const auto& [key, value] : env["config"].items()) out << "# " << key << '=' << value.dump() << '\n';
}

// Text rendering of the non-envelope fields as "key: value" lines.
void write_text(std::ostream& out, const Json& env) {
    write_header(out, env);
    for (const auto& [key, value] : env.items()) {
        if (key == "tool" || key == "version" || key == "command" || key == "config") continue;
        out << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
    }
}

void write_flat_csv(std::ostream& out, const Json& env) {
    write_header(out, env);
    std::string keys;
    std::string values;
    for (const auto& [key, value] : env.items()) {
        if (key == "tool" || key == "version" || key == "command" || key == "config") continue;
        if (!keys.empty()) {
            keys += ',';
            values += ',';
        }
        keys += key;
        std::string v = value.is_string() ? value.get<std::string>() : value.dump();
        if (v.find(',') != std::string::npos) v = '"' + v + '"';
        values += v;
    }
    out << keys << '\n' << values << '\n';
}

void emit(const Json& env, Format format, const Common& common) {
    std::ofstream file;
    if (!common.out.empty()) {
        file.open(common.out, std::ios::binary);
        if (!file) throw ValidationError("cannot open output file '" + common.out + "'");
    }
    std::ostream& out = common.out.empty() ? std::cout : file;
    switch (format) {
        case Format::Json: out << env.dump(2) << '\n'; break;
        case Format::Text: write_text(out, env); break;
        case Format::Csv: write_flat_csv(out, env); break;
    }
}

Json witness_json(const ConeClass& cls) {
    if (cls.sign_witness) return Json{{"signs", *cls.sign_witness}};
    if (cls.index_witness) return Json{{"index", *cls.index_witness + 1}};
    return nullptr;
}

Json number_or_null(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x;
}

}  // namespace

int run_classify(const ClassifyArgs& args, const Common& common) {
    require(std::isfinite(args.tol) && args.tol >= 0.0, "--tol must be >= 0");
    const auto tokens = split(args.tau, "--tau");
    Json config{{"tau", args.tau}, {"tol", args.tol}, {"squared", args.squared}};

    ConeClass cls;
    double gap = 0.0;
    std::string arithmetic;
    if (args.squared) {
        require(args.tol == 0.0, "--squared classification is exact; --tol must be 0");
        std::vector<std::uint64_t> squares;
        std::vector<double> roots;
        for (const auto v : integers(args.tau, "--tau")) {
            require(v > 0, "squared entries must be positive integers");
            squares.push_back(static_cast<std::uint64_t>(v));
            roots.push_back(std::sqrt(static_cast<double>(v)));
        }
        cls = classify_sqrt(squares);
        gap = min_sign_gap(ConeVector(roots));
        arithmetic = "exact-sqrt";
    } else {
        std::vector<std::int64_t> ints;
        bool all_integer = true;
        for (const auto& t : tokens) {
            const auto v = to_integer(t);
            if (!v) {
                all_integer = false;
                break;
            }
            ints.push_back(*v);
        }
        const ConeVector tau(doubles(args.tau, "--tau"));
        if (all_integer && args.tol == 0.0) {
            cls = classify_exact(ints);
            arithmetic = "exact-integer";
        } else {
            cls = classify(tau, args.tol);
            arithmetic = args.tol == 0.0 ? "exact-binary" : "tolerance";
        }
        gap = min_sign_gap(tau);
    }
    config["k"] = tokens.size() - 1;
    config["arithmetic"] = arithmetic;

    Json env = envelope("classify", std::move(config));
    env["class"] = std::string(to_string(cls.tag));
    env["witness"] = witness_json(cls);
    env["min_sign_gap"] = gap;
    emit(env, resolve_format(common, Format::Json), common);
    return 0;
}

int run_volume(const VolumeArgs& args, const Common& common) {
    require(args.n.has_value(), "volume requires -n");
    const ConeVector tau(doubles(args.tau, "--tau"));
    if (args.k) require(*args.k == tau.k(), "-k does not match the length of --tau (k+1 entries expected)");
    const AmbientSpec spec = AmbientSpec::make(*args.n, tau.k());
    VolumeOptions options;
    options.method = parse_volume_method(args.method);
    options.seed = args.seed;
    options.samples = args.samples;
    options.threads = common.threads;
    options.rel_tol = args.rel_tol;

    Json config{{"n", spec.n}, {"k", spec.k}, {"tau", Json(std::vector<double>(tau.entries().begin(), tau.entries().end()))},
                {"method", std::string(to_string(options.method))}};
    if (options.method == VolumeMethod::MonteCarlo) {
        config["seed"] = options.seed;
        config["samples"] = options.samples;
    }
    if (options.method == VolumeMethod::Quadrature) config["rel_tol"] = options.rel_tol;

    const VolumeEstimate est = leray_volume(spec, tau, options);
    Json env = envelope("volume", std::move(config));
    env["value"] = est.value;
    env["stderr"] = est.std_error;
    env["error_proxy"] = est.error_proxy;
    env["method"] = std::string(to_string(est.method));
    env["effort"] = est.effort;
    if (est.method == VolumeMethod::MonteCarlo) env["bandwidth"] = est.bandwidth;
    env["class"] = std::string(to_string(est.cone));
    env["degenerate"] = est.degenerate;
    env["dimension"] = spec.fiber_dimension();
    emit(env, resolve_format(common, Format::Json), common);
    if (est.degenerate)
        std::cerr << "warning: tau is Degenerate; the regular-value hypothesis fails and the value may be unreliable\n";
    return 0;
}

int run_torus(const TorusArgs& args, const Common& common) {
    require(!(args.verify_bad && args.boundary_family), "--verify-bad and --boundary-family are exclusive");
    EnumerationLimits limits;
    limits.max_tuples = args.max_tuples;
    limits.max_atoms = args.max_atoms;
    limits.threads = common.threads;

    if (args.boundary_family) {
        const auto v = integers(args.v, "--v");
        const auto r = integers(args.r, "--r");
        const BoundaryWitness w = boundary_family(LatticePoint{v}, r);
        Json config{{"mode", "boundary-family"}, {"v", v}, {"r", r}, {"n", v.size()}, {"k", r.size()}};
        Json env = envelope("torus", std::move(config));
        env["key"] = w.key.q;
        env["magnitude"] = w.magnitude;
        const int exponent = static_cast<int>((r.size() - 1) * v.size());
        env["magnitude_formula"] = exponent % 2 == 0 ? "(2pi)^-" + std::to_string(exponent / 2)
                                                 : "(2pi)^-" + std::to_string(exponent) + "/2";
        Json tuple = Json::array();
        for (const auto& m : w.tuple) tuple.push_back(m.coords);
        env["tuple"] = tuple;
        emit(env, resolve_format(common, Format::Json), common);
        return 0;
    }

    if (args.verify_bad) {
        const auto tau = doubles(args.tau, "--tau");
        require(args.eps > 0.0, "--verify-bad requires --eps > 0");
        double total = 0.0;
        for (double t : tau) total += t;
        const double cap = args.cap.value_or(2.0 * (1.0 + args.eps) * total);
        const BadTailResult res = bad_tail_sum(args.n, tau, args.eps, cap, limits);
        Json config{{"mode", "verify-bad"}, {"n", args.n}, {"k", tau.size()}, {"tau", tau}, {"eps", args.eps}, {"cap", cap}};
        Json env = envelope("torus", std::move(config));
        env["tail"] = res.mass;
        env["tuples"] = res.tuples;
        env["domain"] = res.domain;
        env["threshold"] = (1.0 + args.eps) * total;
        const Format format = resolve_format(common, Format::Text);
        if (format == Format::Text) {
            std::ofstream file;
            if (!common.out.empty()) file.open(common.out, std::ios::binary);
            std::ostream& out = common.out.empty() ? std::cout : file;
            write_header(out, env);
            out << "tail = " << env["tail"].dump() << ", tuples = " << res.tuples << '\n';
            out << "domain = " << res.domain << '\n';
        } else {
            emit(env, format, common);
        }
        return 0;
    }

    require(!args.window.empty(), "torus requires --window (or --verify-bad / --boundary-family)");
    const auto window = parse_window(args.window);
    require(window.size() >= 3, "--window needs k+1 >= 3 intervals");
    const int k = static_cast<int>(window.size()) - 1;
    if (args.k) require(*args.k == k, "-k does not match the number of --window intervals (k+1 expected)");
    const JointMeasure measure = joint_measure(args.n, k, window, limits);

    Json config{{"mode", "measure"}, {"n", args.n}, {"k", k}, {"window", format_window(window)}};
    const Format format = resolve_format(common, Format::Text);
    Json env = envelope("torus", config);
    env["atoms"] = measure.atoms().size();
    env["total_count"] = measure.total_count();
    env["weight_factor"] = measure.weight_factor();

    std::ofstream file;
    if (!common.out.empty()) {
        file.open(common.out, std::ios::binary);
        if (!file) throw ValidationError("cannot open output file '" + common.out + "'");
    }
    std::ostream& out = common.out.empty() ? std::cout : file;
    if (format == Format::Json) {
        Json atoms = Json::array();
        for (const auto& atom : measure.atoms()) {
            Json row = atom.key.q;
            row.push_back(atom.count);
            atoms.push_back(row);
        }
        env["columns"] = "q1..q(k+1),count";
        env["measure"] = atoms;
        out << env.dump(2) << '\n';
    } else {
        write_measure(out, measure, {"total_count=" + std::to_string(measure.total_count())});
    }
    if (!common.out.empty()) {
        std::cout << "wrote " << measure.atoms().size() << " atoms (total_count=" << measure.total_count()
                  << ") to " << common.out << '\n';
    }
    return 0;
}

namespace {

int run_scaling(const SweepArgs& args, const Common& common) {
    const ConeVector tau(doubles(args.tau0, "--tau"));
    if (args.k) require(*args.k == tau.k(), "-k does not match the length of --tau");
    const AmbientSpec spec = AmbientSpec::make(args.n.value_or(3), tau.k());
    const auto r_values = doubles(args.r, "--r");
    VolumeOptions options;
    options.method = parse_volume_method(args.method);
    options.seed = args.seed;
    options.samples = args.samples;
    options.threads = common.threads;

    Json config{{"mode", "scaling-only"}, {"n", spec.n}, {"k", spec.k},
                {"tau", Json(std::vector<double>(tau.entries().begin(), tau.entries().end()))},
                {"r", r_values}, {"method", std::string(to_string(options.method))}};
    if (options.method == VolumeMethod::MonteCarlo) {
        config["seed"] = options.seed;
        config["samples"] = options.samples;
    }
    Json env = envelope("sweep", std::move(config));
    env["d"] = spec.fiber_dimension();
    Json rows = Json::array();
    for (double r : r_values) {
        const ScalingReport rep = scaling_check(spec, tau, r, options);
        rows.push_back({{"r", r},
                        {"ratio", rep.ratio},
                        {"expected", rep.expected},
                        {"rel_discrepancy", rep.rel_discrepancy},
                        {"rel_uncertainty", rep.rel_uncertainty}});
    }
    const Format format = resolve_format(common, Format::Text);
    if (format == Format::Json) {
        env["rows"] = rows;
        emit(env, format, common);
        return 0;
    }
    std::ofstream file;
    if (!common.out.empty()) file.open(common.out, std::ios::binary);
    std::ostream& out = common.out.empty() ? std::cout : file;
    write_header(out, env);
    if (format == Format::Csv) {
        out << "r,ratio,expected,rel_discrepancy,rel_uncertainty\n";
        for (const auto& row : rows)
            out << row["r"].dump() << ',' << row["ratio"].dump() << ',' << row["expected"].dump() << ','
                << row["rel_discrepancy"].dump() << ',' << row["rel_uncertainty"].dump() << '\n';
    } else {
        out << "d: " << spec.fiber_dimension() << '\n';
        for (const auto& row : rows) {
            char line[256];
            std::snprintf(line, sizeof line, "r=%-8g ratio=%-22.15g expected r^d=%-22.15g rel_discrepancy=%.3e\n",
                          row["r"].get<double>(), row["ratio"].get<double>(), row["expected"].get<double>(),
                          row["rel_discrepancy"].get<double>());
            out << line;
        }
    }
    return 0;
}

}  // namespace

int run_sweep(const SweepArgs& args, const Common& common) {
    require(!args.tau0.empty(), "sweep requires --tau0");
    require(!args.r.empty(), "sweep requires --r");
    if (args.scaling_only) return run_scaling(args, common);

    const ConeVector tau0(doubles(args.tau0, "--tau0"));
    if (args.k) require(*args.k == tau0.k(), "-k does not match the length of --tau0");
    const int n = args.n.value_or(2);
    const auto r_values = doubles(args.r, "--r");
    KernelOptions kopts;
    kopts.cutoff_tol = args.cutoff_tol;
    const SmoothingKernel kernel = build_kernel(tau0.k(), args.a, kopts);

    SweepOptions options;
    options.route = parse_smoothing_route(args.route);
    options.threads = common.threads;
    options.volume.threads = common.threads;
    const AsymptoticReport report = asymptotic_sweep(n, tau0, r_values, kernel, options);

    Json config{{"mode", "asymptotic"}, {"n", n}, {"k", tau0.k()},
                {"tau0", report.tau0}, {"r", r_values}, {"a", args.a},
                {"cutoff_tol", args.cutoff_tol}, {"route", std::string(to_string(options.route))}};
    Json summary = envelope("sweep", config);
    const Json body = Json::parse(report_summary_json(report));
    for (const auto& [key, value] : body.items())
        if (key != "version") summary[key] = value;

    if (!args.summary.empty()) {
        std::ofstream file(args.summary, std::ios::binary);
        if (!file) throw ValidationError("cannot open summary file '" + args.summary + "'");
        file << summary.dump(2) << '\n';
    }

    const Format format = resolve_format(common, Format::Csv);
    std::ofstream file;
    if (!common.out.empty()) {
        file.open(common.out, std::ios::binary);
        if (!file) throw ValidationError("cannot open output file '" + common.out + "'");
    }
    std::ostream& out = common.out.empty() ? std::cout : file;
    if (format == Format::Json) {
        out << summary.dump(2) << '\n';
    } else if (format == Format::Csv) {
        std::vector<std::string> header{"polyspec " + std::string(version_string()) + " sweep"};
        for (const auto& [key, value] : config.items()) header.push_back(key + "=" + value.dump());
        header.push_back("d_expected=" + std::to_string(report.d_expected));
        header.push_back("slope=" + number_or_null(report.slope).dump());
        header.push_back("slope_stderr=" + number_or_null(report.slope_stderr).dump());
        header.push_back("cutoff_radius=" + Json(report.cutoff_radius).dump());
        header.push_back("tail_radius=" + Json(report.tail_radius).dump());
        write_report_csv(out, report, header);
    } else {
        write_header(out, summary);
        char line[256];
        std::snprintf(line, sizeof line, "%8s  %22s  %22s  %12s\n", "r", "smoothed", "main", "ratio");
        out << line;
        for (const auto& row : report.rows) {
            std::snprintf(line, sizeof line, "%8g  %22.15g  %22.15g  %12.8f\n", row.r, row.smoothed, row.main,
                          row.ratio);
            out << line;
        }
        std::snprintf(line, sizeof line, "slope %.6f +- %.6f (expected d = %d)\n", report.slope,
                      report.slope_stderr, report.d_expected);
        out << line;
    }
    return 0;
}

}  // namespace polyspec::cli
