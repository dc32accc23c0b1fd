#include "nitool/cli.hpp"

#include "nitool/version.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace nitool {

namespace {

using Json = nlohmann::ordered_json;

Json json_number(double v) {
    if (std::isfinite(v)) {
        return v;
    }
    if (std::isnan(v)) {
        return "nan";
    }
    return v > 0 ? "inf" : "-inf";
}

Json config_echo(const CliOptions& opts) {
    Json cfg;
    cfg["eq_tol"]         = opts.tol.eq_tol;
    cfg["psd_tol"]        = opts.tol.psd_tol;
    cfg["hurwitz_margin"] = opts.tol.hurwitz_margin;
    cfg["sweep"]          = Json{{"omega_min", opts.sweep.omega_min},
                                 {"omega_max", opts.sweep.omega_max},
                                 {"points", opts.sweep.points}};
    return cfg;
}

Json report_header(const char* command, const CliOptions& opts) {
    Json report;
    report["tool"]    = kToolName;
    report["version"] = kToolVersion;
    report["command"] = command;
    report["config"]  = config_echo(opts);
    return report;
}

Json certificate_json(const NiCertificate& cert) {
    Json j;
    j["lin_residual"] = json_number(cert.lin_residual);
    j["lyap_max_eig"] = json_number(cert.lyap_max_eig);
    j["y_min_eig"]    = json_number(cert.y_min_eig);
    j["iterations"]   = cert.iterations;
    return j;
}

Json verdict_json(const ClassificationVerdict& v) {
    Json j;
    j["class"]  = to_string(v.class_tag);
    j["reason"] = v.reason;
    j["checks"] = Json{{"d_symmetric", v.checks.d_symmetric},
                       {"a_hurwitz", v.checks.a_hurwitz},
                       {"minimal", v.checks.minimal}};
    j["certificate"] = v.certificate ? certificate_json(*v.certificate) : Json(nullptr);
    j["falsifier"]   = v.falsifier ? Json{{"omega", json_number(v.falsifier->omega)},
                                          {"min_eig", json_number(v.falsifier->min_eig)}}
                                   : Json(nullptr);
    j["strictness_evidence"] =
        v.strictness_evidence ? json_number(*v.strictness_evidence) : Json(nullptr);
    j["det_sweep_min"] = v.det_sweep_min ? json_number(*v.det_sweep_min) : Json(nullptr);
    return j;
}

std::string render_verdict_text(const ClassificationVerdict& v, const std::string& label) {
    std::ostringstream os;
    os << label << ": " << to_string(v.class_tag) << "\n";
    os << "  checks: D symmetric " << (v.checks.d_symmetric ? "yes" : "no") << " | A Hurwitz "
       << (v.checks.a_hurwitz ? "yes" : "no") << " | minimal "
       << (v.checks.minimal ? "yes" : "no") << "\n";
    if (v.certificate) {
        os << "  certificate: lin residual " << format_double(v.certificate->lin_residual)
           << ", max eig(AY+YA^T) " << format_double(v.certificate->lyap_max_eig)
           << ", min eig(Y) " << format_double(v.certificate->y_min_eig) << ", iterations "
           << v.certificate->iterations << "\n";
    }
    if (v.falsifier) {
        os << "  falsifier: omega " << format_double(v.falsifier->omega) << ", min eig "
           << format_double(v.falsifier->min_eig) << "\n";
    }
    if (v.strictness_evidence) {
        os << "  strictness evidence: min lambda over grid " << format_double(*v.strictness_evidence)
           << "\n";
    }
    if (v.det_sweep_min) {
        os << "  det sweep: min |det(R - R*)| " << format_double(*v.det_sweep_min) << "\n";
    }
    if (!v.reason.empty()) {
        os << "  note: " << v.reason << "\n";
    }
    return os.str();
}

int classify_exit_code(NiClass c) {
    switch (c) {
        case NiClass::StrictNi:
        case NiClass::Ni: return kExitOk;
        case NiClass::NotNi: return kExitNegative;
        case NiClass::Inconclusive: return kExitInconclusive;
    }
    return kExitUsage;
}

int theorem_exit_code(TheoremVerdict v) {
    switch (v) {
        case TheoremVerdict::Stable: return kExitOk;
        case TheoremVerdict::Unstable: return kExitNegative;
        case TheoremVerdict::NumericallyMarginal:
        case TheoremVerdict::PreconditionFailed: return kExitInconclusive;
    }
    return kExitUsage;
}

Json stability_json(const StabilityReport& report) {
    Json j;
    j["preconditions"] = Json{
        {"c_role", verdict_json(report.preconditions.m_class)},
        {"cs_role", verdict_json(report.preconditions.n_class)},
        {"m_inf_n_inf_zero", report.preconditions.m_inf_n_inf_zero},
        {"m_inf_n_inf_residual", json_number(report.preconditions.m_inf_n_inf_residual)},
        {"n_inf_psd", report.preconditions.n_inf_psd},
        {"n_inf_min_eig", json_number(report.preconditions.n_inf_min_eig)}};
    j["dc_loop_eig"] = report.dc_loop_eig ? json_number(*report.dc_loop_eig) : Json(nullptr);
    j["theorem_verdict"] = to_string(report.theorem_verdict);
    if (!report.failure_reason.empty()) {
        j["failure_reason"] = report.failure_reason;
    }
    if (report.oracle) {
        j["oracle"] = Json{{"verdict", to_string(report.oracle->verdict)},
                           {"max_real_part", json_number(report.oracle->max_real_part)}};
    } else {
        j["oracle"] = nullptr;
    }
    j["agreement"] = report.agreement ? Json(*report.agreement) : Json(nullptr);
    return j;
}

std::string stability_text(const StabilityReport& report) {
    std::ostringstream os;
    os << render_verdict_text(report.preconditions.m_class, "C-role operand");
    os << render_verdict_text(report.preconditions.n_class, "Cs-role operand");
    os << "M(inf)N(inf) = 0: " << (report.preconditions.m_inf_n_inf_zero ? "yes" : "no")
       << " (residual " << format_double(report.preconditions.m_inf_n_inf_residual) << ")\n";
    os << "N(inf) PSD: " << (report.preconditions.n_inf_psd ? "yes" : "no") << " (min eig "
       << format_double(report.preconditions.n_inf_min_eig) << ")\n";
    if (report.dc_loop_eig) {
        os << "DC loop gain lambda_max(M(0)N(0)) = " << format_double(*report.dc_loop_eig) << "\n";
    }
    os << "theorem verdict: " << to_string(report.theorem_verdict);
    if (!report.failure_reason.empty()) {
        os << " (" << report.failure_reason << ")";
    }
    os << "\n";
    if (report.oracle) {
        os << "oracle verdict: " << to_string(report.oracle->verdict) << " (max Re eig "
           << format_double(report.oracle->max_real_part) << ")\n";
    }
    if (report.agreement) {
        os << "theorem and oracle agree: " << (*report.agreement ? "yes" : "no") << "\n";
    }
    return os.str();
}

}  // namespace

CommandResult cmd_classify(const std::string& path, const CliOptions& opts) {
    const SystemDocument   doc = load_system_document(path);
    const StateSpaceSystem sys = document_to_system(doc);

    const ClassificationVerdict verdict = classify(sys, opts.sweep, opts.tol, opts.det_sweep);

    CommandResult result;
    result.report            = report_header("classify", opts);
    result.report["input"]   = Json{{"path", path}, {"name", sys.name}};
    result.report["verdict"] = verdict_json(verdict);
    result.exit_code         = classify_exit_code(verdict.class_tag);
    result.report["exit_code"] = result.exit_code;

    std::ostringstream text;
    text << kToolName << " classify: " << (sys.name.empty() ? path : sys.name) << "\n"
         << render_verdict_text(verdict, "verdict");
    result.text = text.str();
    return result;
}

CommandResult cmd_stability(const std::string& c_role_path, const std::string& cs_role_path,
                            const CliOptions& opts) {
    const StateSpaceSystem m = document_to_system(load_system_document(c_role_path));
    const StateSpaceSystem n = document_to_system(load_system_document(cs_role_path));

    StabilityConfig cfg;
    cfg.tol   = opts.tol;
    cfg.sweep = opts.sweep;
    const StabilityReport report = theorem_stability_test(m, n, cfg);

    CommandResult result;
    result.report          = report_header("stability", opts);
    result.report["input"] = Json{{"c_role", Json{{"path", c_role_path}, {"name", m.name}}},
                                  {"cs_role", Json{{"path", cs_role_path}, {"name", n.name}}}};
    result.report["stability"] = stability_json(report);
    result.exit_code           = theorem_exit_code(report.theorem_verdict);
    result.report["exit_code"] = result.exit_code;

    std::ostringstream text;
    text << kToolName << " stability: [" << m.name << ", " << n.name << "]\n"
         << stability_text(report);
    result.text = text.str();
    return result;
}

CommandResult cmd_margin(const std::string& path, MarginPart part, const CliOptions& opts) {
    const StateSpaceSystem sys = document_to_system(load_system_document(path));

    StabilityConfig cfg;
    cfg.tol   = opts.tol;
    cfg.sweep = opts.sweep;

    CommandResult result;
    result.report          = report_header("margin", opts);
    result.report["input"] = Json{{"path", path}, {"name", sys.name}};
    result.report["part"]  = part == MarginPart::I ? "I" : "II";

    try {
        const MarginReport margin = robustness_margin(sys, part, cfg);
        result.report["m_class"]  = verdict_json(margin.m_class);
        result.report["m0_max_eig"] = json_number(margin.m0_max_eig);
        result.report["gamma_star"] =
            margin.gamma_star ? json_number(*margin.gamma_star) : Json(nullptr);
        result.report["strict"] = margin.strict;
        result.exit_code        = kExitOk;
        result.report["exit_code"] = result.exit_code;

        std::ostringstream text;
        text << kToolName << " margin: " << (sys.name.empty() ? path : sys.name) << " (part "
             << result.report["part"].get<std::string>() << ")\n"
             << render_verdict_text(margin.m_class, "class")
             << "lambda_max(M(0)) = " << format_double(margin.m0_max_eig) << "\n";
        if (margin.gamma_star) {
            text << "gamma* = " << format_double(*margin.gamma_star)
                 << " (admissible uncertainties: lambda_max(Delta(0)) < gamma*)\n";
        } else {
            text << "gamma* unbounded (lambda_max(M(0)) <= 0)\n";
        }
        result.text = text.str();
    } catch (const std::invalid_argument& e) {
        result.exit_code           = kExitInconclusive;
        result.report["error"]     = e.what();
        result.report["exit_code"] = result.exit_code;
        result.text = std::string(kToolName) + " margin: precondition failed: " + e.what() + "\n";
    }
    return result;
}

CommandResult cmd_sweep(const std::string& path, const std::string& out_path,
                        const CliOptions& opts) {
    const StateSpaceSystem sys = document_to_system(load_system_document(path));
    if (!sys.is_square_io()) {
        throw std::invalid_argument("sweep: system must have square I/O");
    }
    const auto samples = sweep_frequency_response(sys, opts.sweep);

    CommandResult result;
    result.report          = report_header("sweep", opts);
    result.report["input"] = Json{{"path", path}, {"name", sys.name}};
    result.report["rows"]  = samples.size();

    if (out_path.empty()) {
        std::ostringstream csv;
        write_sweep_csv(csv, samples);
        result.text = csv.str();
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            throw std::invalid_argument("sweep: cannot write to '" + out_path + "'");
        }
        write_sweep_csv(out, samples);
        if (!out.good()) {
            throw std::invalid_argument("sweep: write to '" + out_path + "' failed");
        }
        result.report["out"] = out_path;
        result.text = std::string(kToolName) + " sweep: wrote " + std::to_string(samples.size()) +
                      " rows to " + out_path + "\n";
    }
    result.exit_code           = kExitOk;
    result.report["exit_code"] = result.exit_code;
    return result;
}

CommandResult cmd_example(double k, double alpha, const CliOptions& opts) {
    const TwoMassParams params{k, alpha};
    params.validate();

    const TwoMassPlant     plant      = two_mass_plant(params);
    const StateSpaceSystem controller = example_controller();
    const StateSpaceSystem m_raw      = closed_loop_m(plant.nominal, controller);
    const StateSpaceSystem m          = example_m();

    // deviation of the raw interconnection from the closed form
    double     max_dev = 0.0;
    SweepConfig probe;
    probe.points = 50;
    for (const double omega : sweep_grid(probe)) {
        const Complex s(0.0, omega);
        max_dev = std::max(max_dev, (evaluate(m_raw, s) - evaluate(m, s)).cwiseAbs().maxCoeff());
    }

    StabilityConfig cfg;
    cfg.tol   = opts.tol;
    cfg.sweep = opts.sweep;

    const StabilityReport stability = theorem_stability_test(plant.uncertainty, m, cfg);
    const MarginReport    margin    = robustness_margin(m, MarginPart::I, cfg);

    CommandResult result;
    result.report           = report_header("example", opts);
    result.report["model"]  = Json{{"k", k}, {"alpha", alpha}};
    result.report["closed_loop_identity_max_dev"] = json_number(max_dev);
    result.report["stability"]  = stability_json(stability);
    result.report["margin"]     = Json{{"m0_max_eig", json_number(margin.m0_max_eig)},
                                       {"gamma_star", margin.gamma_star
                                                          ? json_number(*margin.gamma_star)
                                                          : Json(nullptr)}};
    result.exit_code            = theorem_exit_code(stability.theorem_verdict);
    result.report["exit_code"]  = result.exit_code;

    std::ostringstream text;
    text << kToolName << " example two-mass: k = " << format_double(k)
         << ", alpha = " << format_double(alpha) << "\n"
         << "closed-loop M identity max deviation: " << format_double(max_dev) << "\n"
         << stability_text(stability) << "lambda_max(M(0)) = " << format_double(margin.m0_max_eig)
         << "\n";
    if (margin.gamma_star) {
        text << "gamma* = " << format_double(*margin.gamma_star) << "\n";
    }
    result.text = text.str();
    return result;
}

namespace {

void add_common_options(CLI::App* sub, CliOptions& opts, std::string& sweep_spec) {
    sub->add_option("--tol-eq", opts.tol.eq_tol, "equality/residual tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tol-psd", opts.tol.psd_tol, "eigenvalue nonnegativity tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_option_function<double>(
           "--tol",
           [&opts](const double& v) {
               opts.tol.eq_tol  = v;
               opts.tol.psd_tol = v;
           },
           "set both --tol-eq and --tol-psd")
        ->check(CLI::PositiveNumber);
    sub->add_option("--sweep", sweep_spec, "frequency grid as wmin:wmax:points");
    sub->add_flag("--json", opts.json, "machine-readable report");
}

void apply_sweep_spec(const std::string& spec, SweepConfig& cfg) {
    if (spec.empty()) {
        return;
    }
    double wmin = 0.0;
    double wmax = 0.0;
    int    points = 0;
    char   tail = '\0';
    if (std::sscanf(spec.c_str(), "%lf:%lf:%d%c", &wmin, &wmax, &points, &tail) != 3) {
        throw CLI::ValidationError("--sweep", "expected wmin:wmax:points");
    }
    cfg.omega_min = wmin;
    cfg.omega_max = wmax;
    cfg.points    = points;
    cfg.validate();
}

void emit(const CommandResult& result, bool json) {
    if (json) {
        std::cout << result.report.dump(2) << "\n";
    } else {
        std::cout << result.text;
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"analysis of systems with negative imaginary frequency response"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    app.require_subcommand(1);

    CliOptions  classify_opts, stability_opts, margin_opts, sweep_opts, example_opts;
    std::string classify_spec, stability_spec, margin_spec, sweep_spec, example_spec;

    std::string classify_file;
    auto* classify_cmd =
        app.add_subcommand("classify", "classify a system as StrictNi / Ni / NotNi");
    classify_cmd->add_option("file", classify_file, "system document")->required();
    classify_cmd->add_flag("--strict-grid", classify_opts.det_sweep,
                           "also sweep |det(R - R*)| as strictness evidence");
    add_common_options(classify_cmd, classify_opts, classify_spec);

    std::string c_role_file, cs_role_file;
    auto* stability_cmd =
        app.add_subcommand("stability", "DC-loop-gain internal stability test");
    stability_cmd->add_option("--c-role", c_role_file, "document for the class-C operand")
        ->required();
    stability_cmd->add_option("--cs-role", cs_role_file, "document for the class-Cs operand")
        ->required();
    add_common_options(stability_cmd, stability_opts, stability_spec);

    std::string margin_file, margin_part = "I";
    auto*       margin_cmd = app.add_subcommand("margin", "robustness margin gamma*");
    margin_cmd->add_option("file", margin_file, "system document")->required();
    margin_cmd->add_option("--part", margin_part, "margin variant, I or II")
        ->check(CLI::IsMember({"I", "II"}));
    add_common_options(margin_cmd, margin_opts, margin_spec);

    std::string sweep_file, sweep_out;
    auto*       sweep_cmd = app.add_subcommand("sweep", "frequency sweep CSV export");
    sweep_cmd->add_option("file", sweep_file, "system document")->required();
    sweep_cmd->add_option("--out", sweep_out, "output CSV path (stdout when absent)");
    add_common_options(sweep_cmd, sweep_opts, sweep_spec);

    std::string example_kind;
    double      example_k = 2.0, example_alpha = 1.0;
    auto* example_cmd = app.add_subcommand("example", "end-to-end worked example");
    example_cmd->add_option("kind", example_kind, "example name (two-mass)")
        ->required()
        ->check(CLI::IsMember({"two-mass"}));
    example_cmd->add_option("--k", example_k, "coupling stiffness in N/m")
        ->check(CLI::PositiveNumber);
    example_cmd->add_option("--alpha", example_alpha, "coupling damping in Ns/m")
        ->check(CLI::PositiveNumber);
    add_common_options(example_cmd, example_opts, example_spec);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (classify_cmd->parsed()) {
            apply_sweep_spec(classify_spec, classify_opts.sweep);
            const CommandResult result = cmd_classify(classify_file, classify_opts);
            emit(result, classify_opts.json);
            return result.exit_code;
        }
        if (stability_cmd->parsed()) {
            apply_sweep_spec(stability_spec, stability_opts.sweep);
            const CommandResult result = cmd_stability(c_role_file, cs_role_file, stability_opts);
            emit(result, stability_opts.json);
            return result.exit_code;
        }
        if (margin_cmd->parsed()) {
            apply_sweep_spec(margin_spec, margin_opts.sweep);
            const CommandResult result = cmd_margin(
                margin_file, margin_part == "I" ? MarginPart::I : MarginPart::II,
                margin_opts);
            emit(result, margin_opts.json);
            return result.exit_code;
        }
        if (sweep_cmd->parsed()) {
            apply_sweep_spec(sweep_spec, sweep_opts.sweep);
            const CommandResult result = cmd_sweep(sweep_file, sweep_out, sweep_opts);
            emit(result, sweep_opts.json);
            return result.exit_code;
        }
        if (example_cmd->parsed()) {
            apply_sweep_spec(example_spec, example_opts.sweep);
            const CommandResult result = cmd_example(example_k, example_alpha, example_opts);
            emit(result, example_opts.json);
            return result.exit_code;
        }
    } catch (const DocumentParseError& e) {
        std::cerr << kToolName << ": parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << kToolName << ": error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace nitool
