#include "pacdisp/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pacdisp/artifact.hpp"
#include "pacdisp/evaluation.hpp"
#include "pacdisp/flowsim.hpp"
#include "pacdisp/report.hpp"
#include "pacdisp/service.hpp"

namespace pacdisp {

using json = nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataOptions {
    std::string data;
    std::string schema;
    std::vector<std::string> keep{kDefaultPositive, kDefaultNegative};
    std::string positive = kDefaultPositive;
    std::uint64_t seed = kDefaultSeed;
    double train_fraction = kDefaultTrainFraction;
};

struct ScenarioOptions {
    double pac_days = 7.0;
    double auth_days = 2.0;
    std::string ownership = "non_profit";
    std::string config;
};

void add_data_options(CLI::App& cmd, DataOptions& o, bool with_split)
{
    cmd.add_option("--data", o.data, "Patient CSV export")->required();
    cmd.add_option("--schema", o.schema, "Schema JSON describing the CSV columns")->required();
    cmd.add_option("--keep", o.keep, "Response values kept in the cohort")->capture_default_str();
    if (with_split) {
        cmd.add_option("--positive", o.positive, "Positive (PAC-eligible) class")->capture_default_str();
        cmd.add_option("--seed", o.seed, "Seed for the split and randomized fits")->capture_default_str();
        cmd.add_option("--train-fraction", o.train_fraction, "Share of each class used for training")
            ->capture_default_str();
    }
}

Dataset load_cohort(const DataOptions& o, const Schema* schema_override = nullptr)
{
    const Schema schema = schema_override ? *schema_override : load_schema(o.schema);
    CohortSpec spec;
    spec.keep_response_values = {o.keep.begin(), o.keep.end()};
    return filter_cohort(load_dataset(o.data, schema), spec);
}

json parse_overrides(const std::vector<std::string>& params)
{
    json j = json::object();
    for (const auto& p : params) {
        const auto eq = p.find('=');
        if (eq == std::string::npos || eq == 0)
            throw UsageError("--param expects key=value, got '" + p + "'");
        const auto key = p.substr(0, eq);
        const auto value = p.substr(eq + 1);
        const auto parsed = json::parse(value, nullptr, false);
        j[key] = parsed.is_discarded() ? json(value) : parsed;
    }
    return j;
}

json parse_features(const std::vector<std::string>& features)
{
    json j = json::object();
    for (const auto& f : features) {
        const auto eq = f.find('=');
        if (eq == std::string::npos || eq == 0)
            throw UsageError("--features expects name=value, got '" + f + "'");
        const auto value = f.substr(eq + 1);
        j[f.substr(0, eq)] = value.empty() ? json(nullptr) : json(value);
    }
    return j;
}

void write_file(const std::string& dir, const std::string& name, const std::string& content)
{
    std::filesystem::create_directories(dir);
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f || !(f << content))
        throw DataError("WriteFailed", "cannot write " + path.string());
}

CostModel load_costs(ScenarioOptions& s, bool flags_given[3])
{
    if (s.config.empty())
        return CostModel();
    std::ifstream in(s.config);
    if (!in)
        throw DataError("FileNotFound", "cannot open config file " + s.config);
    json j;
    try {
        j = json::parse(in);
        if (!flags_given[0] && j.contains("pac_service_days"))
            s.pac_days = j.at("pac_service_days").get<double>();
        if (!flags_given[1] && j.contains("authorization_days"))
            s.auth_days = j.at("authorization_days").get<double>();
        if (!flags_given[2] && j.contains("ownership"))
            s.ownership = j.at("ownership").get<std::string>();
        return j.contains("costs") ? CostModel::from_json(j.at("costs")) : CostModel();
    } catch (const json::exception& e) {
        throw DataError("InvalidConfig", "config file " + s.config + ": " + e.what());
    }
}

void add_scenario_options(CLI::App& cmd, ScenarioOptions& s, bool required)
{
    auto* x = cmd.add_option("--pac-days", s.pac_days, "Average PAC service time X (days)");
    auto* a = cmd.add_option("--auth-days", s.auth_days, "Average prior-authorization time A (days)");
    auto* o = cmd.add_option("--ownership", s.ownership, "state_government | non_profit | for_profit");
    cmd.add_option("--config", s.config, "JSON file with scenario fields and a 'costs' table");
    if (required) {
        // A config file may supply the scenario instead of the flags.
        x->needs(a);
        a->needs(o);
    } else {
        x->capture_default_str();
        a->capture_default_str();
        o->capture_default_str();
    }
}

std::string model_report_text(const ModelReport& r)
{
    std::ostringstream os;
    TextTable t({"Model", "Accuracy (%)", "AUC", "Lift", "TP", "FP", "FN", "TN", "N test"});
    t.add_row({r.model, fixed(100.0 * r.overall_accuracy, 2), fixed(r.auc, 3), fixed(r.lift_at_depth, 3),
               std::to_string(r.confusion.true_positive), std::to_string(r.confusion.false_positive),
               std::to_string(r.confusion.false_negative), std::to_string(r.confusion.true_negative),
               std::to_string(r.n_test)});
    t.print(os);
    os << "Positive class: " << r.positive << "; lift at depth " << fixed(100.0 * r.depth, 0) << "%\n";
    return os.str();
}

std::string impact_text(const CohortImpactReport& r, const ScenarioOptions& s)
{
    std::ostringstream os;
    os << "Flow impact on the test cohort (X=" << s.pac_days << ", A=" << s.auth_days << ", " << s.ownership
       << "):\n";
    TextTable t({"Measure", "Value"});
    t.add_row({"Patients", std::to_string(r.n_rows)});
    t.add_row({"PAC patients", std::to_string(r.n_pac)});
    t.add_row({"Flagged for early authorization", std::to_string(r.n_flagged)});
    t.add_row({"PAC patients helped", std::to_string(r.patients_helped)});
    t.add_row({"Unneeded authorizations", std::to_string(r.false_positive_authorizations)});
    t.add_row({"Inpatient days saved", fixed(r.days_saved_total, 2)});
    t.add_row({"Expense saved ($)", format_dollars(r.dollars_saved_total)});
    t.add_row({"Days saved per PAC patient", fixed(r.days_saved_per_pac_patient, 2)});
    t.print(os);
    return os.str();
}

// ---------------------------------------------------------------- commands

int cmd_stats(const DataOptions& o, const std::vector<std::string>& columns_opt,
              const std::vector<std::string>& crosstab_opt, bool all_rows, const std::string& out_dir,
              std::ostream& out)
{
    const Schema schema = load_schema(o.schema);
    Dataset d = load_dataset(o.data, schema);
    if (!all_rows) {
        CohortSpec spec;
        spec.keep_response_values = {o.keep.begin(), o.keep.end()};
        d = filter_cohort(d, spec);
    }

    std::vector<std::string> columns = columns_opt;
    std::vector<std::string> crosstabs = crosstab_opt;
    for (auto c : schema.predictor_indices()) {
        if (columns_opt.empty() && schema[c].kind == ColumnKind::continuous)
            columns.push_back(schema[c].name);
        if (crosstab_opt.empty() && schema[c].kind != ColumnKind::continuous)
            crosstabs.push_back(schema[c].name);
    }

    std::vector<std::pair<std::string, StatsSummary>> stats;
    for (const auto& c : columns)
        stats.emplace_back(c, descriptive_stats(d, c));

    std::ostringstream text;
    text << "Rows: " << d.size() << " (" << (all_rows ? "all dispositions" : "cohort") << ")\n\n";
    text << "Descriptive statistics\n";
    print_stats(text, stats);
    json doc{{"n_rows", d.size()}, {"stats", json::object()}, {"crosstabs", json::object()}};
    for (const auto& [name, s] : stats)
        doc["stats"][name] = to_json(s);
    const auto& response = schema.response().name;
    for (const auto& c : crosstabs) {
        const auto table = crosstab(d, response, c);
        text << "\n" << response << " by " << c << "\n";
        print_crosstab(text, table, response, c);
        doc["crosstabs"][c] = to_json(table);
    }

    out << text.str();
    if (!out_dir.empty()) {
        write_file(out_dir, "stats.txt", text.str());
        write_file(out_dir, "stats.json", doc.dump(2) + "\n");
    }
    return 0;
}

json run_metadata(const DataOptions& o, const Dataset& train, const Dataset& test)
{
    return {{"data_source", o.data},
            {"cohort", {{"keep", o.keep}}},
            {"seed", o.seed},
            {"train_fraction", o.train_fraction},
            {"n_train", train.size()},
            {"n_test", test.size()}};
}

int cmd_train(const DataOptions& o, const std::string& algo, const std::vector<std::string>& params,
              std::string model_out, const std::string& out_dir, std::ostream& out)
{
    const auto algorithm = algorithm_from_string(algo);
    const auto overrides = parse_overrides(params);
    const Dataset cohort = load_cohort(o);
    const auto [train, test] = split(cohort, o.train_fraction, o.seed);

    ModelArtifact a;
    a.schema = cohort.schema;
    a.model = fit_model(algorithm, train, {o.positive, o.seed, overrides});
    a.metadata = run_metadata(o, train, test);

    if (model_out.empty())
        model_out = (std::filesystem::path(out_dir.empty() ? "." : out_dir) / ("model-" + algo + ".json")).string();
    const auto parent = std::filesystem::path(model_out).parent_path();
    if (!parent.empty())
        std::filesystem::create_directories(parent);
    save_model(a, model_out);
    out << "trained " << display_name(algorithm) << " on " << train.size() << " rows (" << test.size()
        << " held out), positive class '" << o.positive << "'\n";
    out << "model written to " << model_out << "\n";
    return 0;
}

int cmd_evaluate(const std::string& model_path, DataOptions o, const std::string& out_dir, std::ostream& out)
{
    const ModelArtifact a = load_model(model_path);
    const auto& meta = a.metadata;
    try {
        o.seed = meta.at("seed").get<std::uint64_t>();
        o.train_fraction = meta.at("train_fraction").get<double>();
        o.keep = meta.at("cohort").at("keep").get<std::vector<std::string>>();
    } catch (const json::exception&) {
        throw ModelError("MissingMetadata", "artifact lacks the split metadata needed to rebuild its test set");
    }
    const Dataset cohort = load_cohort(o, &a.schema);
    const auto [train, test] = split(cohort, o.train_fraction, o.seed);
    const auto report = evaluate_model(a.model, test, a.model.positive, display_name(a.model.algorithm));

    const auto text = model_report_text(report);
    out << text;
    if (!out_dir.empty()) {
        const auto stem = "evaluate-" + to_string(a.model.algorithm);
        write_file(out_dir, stem + ".txt", text);
        write_file(out_dir, stem + ".json", to_json(report).dump(2) + "\n");
    }
    return 0;
}

int cmd_compare(const DataOptions& o, const std::vector<std::string>& params, ScenarioOptions s,
                bool flags_given[3], const std::string& out_dir, std::ostream& out)
{
    const auto overrides = parse_overrides(params);
    const CostModel costs = load_costs(s, flags_given);
    const Dataset cohort = load_cohort(o);
    const auto [train, test] = split(cohort, o.train_fraction, o.seed);

    std::vector<ModelReport> reports;
    for (auto algorithm : kAllAlgorithms) {
        // Overrides apply to the algorithms that know the key.
        json own = json::object();
        const auto known = parameter_names(algorithm);
        for (const auto& [k, v] : overrides.items())
            if (std::find(known.begin(), known.end(), k) != known.end())
                own[k] = v;
        const auto model = fit_model(algorithm, train, {o.positive, o.seed, own});
        reports.push_back(evaluate_model(model, test, o.positive, display_name(algorithm)));
    }
    const auto cmp = compare_models(std::move(reports));
    const auto winner = std::find_if(cmp.reports.begin(), cmp.reports.end(),
                                     [&](const ModelReport& r) { return r.model == cmp.winner; });
    const auto impact = simulate_policy_cohort(*winner, s.pac_days, s.auth_days, s.ownership, costs);

    std::ostringstream text;
    text << "Cohort: " << cohort.size() << " rows; train " << train.size() << ", test " << test.size()
         << "; seed " << o.seed << "\n\n";
    print_comparison(text, cmp);
    text << "\n" << impact_text(impact, s);

    json doc = to_json(cmp);
    doc["seed"] = o.seed;
    doc["train_fraction"] = o.train_fraction;
    doc["n_train"] = train.size();
    doc["n_test"] = test.size();
    doc["flow_impact"] = to_json(impact);
    json refs = json::array();
    for (const auto& f : kReferenceFigures)
        refs.push_back({{"model", f.model}, {"accuracy_pct", f.accuracy_pct}, {"auc", f.auc}});
    doc["reference_figures"] = std::move(refs);

    out << text.str();
    if (!out_dir.empty()) {
        write_file(out_dir, "compare.txt", text.str());
        write_file(out_dir, "compare.json", doc.dump(2) + "\n");
        std::ostringstream roc;
        write_roc_csv(roc, cmp);
        write_file(out_dir, "roc.csv", roc.str());
    }
    return 0;
}

int cmd_predict(const std::string& model_path, const std::vector<std::string>& features, std::ostream& out)
{
    const auto doc = prediction_json(load_model(model_path), parse_features(features));
    out << doc.dump(2) << "\n";
    return 0;
}

int cmd_simulate(ScenarioOptions s, bool flags_given[3], bool as_json, std::ostream& out)
{
    const CostModel costs = load_costs(s, flags_given);
    if (s.config.empty() && !flags_given[0])
        throw UsageError("simulate needs --pac-days, --auth-days and --ownership (or --config)");
    const json req{{"pac_service_days", s.pac_days}, {"authorization_days", s.auth_days}, {"ownership", s.ownership}};
    json doc;
    try {
        doc = simulate_json(req, costs);
    } catch (const RequestError& e) {
        throw DataError(e.code(), e.what());
    }
    if (as_json) {
        out << doc.dump(2) << "\n";
        return 0;
    }
    out << format_simulation(doc["days_saved"], doc["percent"], doc["dollars"]) << "\n";
    TextTable t({"Method", "PAC service (days)", "Prior authorization (days)", "Total (days)"});
    t.add_row({"Traditional", fixed(s.pac_days, 2), fixed(s.auth_days, 2), fixed(doc["los_traditional"], 2)});
    t.add_row({"Predictive", fixed(s.pac_days, 2), fixed(s.auth_days, 2), fixed(doc["los_predictive"], 2)});
    t.print(out);
    out << "Expense per inpatient day (" << s.ownership << "): " << format_dollars(doc["per_day_expense"]) << "\n";
    return 0;
}

int cmd_trend(const std::string& path, const std::string& out_dir, std::ostream& out)
{
    const auto expenses = load_expenses(path);
    const auto rows = expense_trend(expenses);
    std::ostringstream text;
    print_trend(text, rows);
    out << text.str();
    if (!out_dir.empty()) {
        write_file(out_dir, "trend.txt", text.str());
        write_file(out_dir, "trend.json", to_json(std::span<const ExpenseTrendRow>(rows)).dump(2) + "\n");
        std::ostringstream csv;
        csv << "year,expense,pct_change,moving_avg\n";
        for (const auto& r : rows)
            csv << r.year << ',' << fixed(r.expense, 0) << ',' << (r.pct_change ? fixed(*r.pct_change, 2) : "")
                << ',' << (r.moving_avg ? fixed(*r.moving_avg, 2) : "") << '\n';
        write_file(out_dir, "trend.csv", csv.str());
    }
    return 0;
}

int cmd_serve(const std::string& model_path, const std::string& host, int port, const std::string& config,
              std::ostream& err)
{
    ScenarioOptions s;
    s.config = config;
    bool given[3] = {true, true, true};
    Service service(load_model(model_path), load_costs(s, given));
    const int bound = service.bind(host, port);
    if (bound < 0)
        throw ModelError("BindFailed", "cannot listen on " + host + ":" + std::to_string(port));
    err << "serving " << model_path << " on http://" << host << ":" << bound << std::endl;
    service.run();
    return 0;
}

} // namespace

std::string format_dollars(double amount)
{
    const bool whole = std::abs(amount - std::round(amount)) < 0.005;
    char buf[64];
    std::snprintf(buf, sizeof buf, whole ? "%.0f" : "%.2f", std::abs(amount));
    std::string digits(buf);
    const auto dot = digits.find('.');
    std::string integer = digits.substr(0, dot);
    const std::string frac = dot == std::string::npos ? "" : digits.substr(dot);
    for (int i = static_cast<int>(integer.size()) - 3; i > 0; i -= 3)
        integer.insert(static_cast<std::size_t>(i), ",");
    return (amount < 0 ? "-$" : "$") + integer + frac;
}

std::string format_simulation(double days_saved, double percent, double dollars)
{
    char buf[128];
    std::snprintf(buf, sizeof buf, "%g days (%.2f%%), ", days_saved, percent);
    return buf + format_dollars(dollars);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Post-acute care discharge disposition prediction and patient-flow analysis", "pacdisp"};
    app.require_subcommand(1, 1);

    DataOptions data;
    ScenarioOptions scenario;
    std::string out_dir, algo, model_path, model_out, expenses, host = "127.0.0.1";
    std::vector<std::string> params, features, columns, crosstabs;
    bool all_rows = false, as_json = false;
    int port = 8080;

    auto* stats = app.add_subcommand("stats", "Descriptive statistics and crosstabs of the cohort");
    add_data_options(*stats, data, false);
    stats->add_option("--columns", columns, "Continuous columns to summarize (default: all)");
    stats->add_option("--crosstab", crosstabs, "Categorical columns to cross with the response (default: all)");
    stats->add_flag("--all-dispositions", all_rows, "Skip the cohort filter");
    stats->add_option("--out", out_dir, "Directory for stats.txt and stats.json");

    auto* train = app.add_subcommand("train", "Fit one model on the training split and save it");
    add_data_options(*train, data, true);
    train->add_option("--algo", algo, "chaid | lda | cart | rtree | lsvm")
        ->required()
        ->check(CLI::IsMember({"chaid", "lda", "cart", "rtree", "lsvm"}));
    train->add_option("--param", params, "Hyperparameter override key=value (repeatable)");
    train->add_option("--model-out", model_out, "Artifact path (default: <out>/model-<algo>.json)");
    train->add_option("--out", out_dir, "Output directory");

    auto* evaluate = app.add_subcommand("evaluate", "Score a saved model on its held-out split");
    evaluate->add_option("--model", model_path, "Model artifact")->required();
    evaluate->add_option("--data", data.data, "Patient CSV export")->required();
    evaluate->add_option("--out", out_dir, "Directory for the evaluation report");

    auto* compare = app.add_subcommand("compare", "Fit and evaluate all five models on one split");
    add_data_options(*compare, data, true);
    compare->add_option("--param", params, "Hyperparameter override key=value (repeatable)");
    add_scenario_options(*compare, scenario, false);
    compare->add_option("--out", out_dir, "Directory for compare.txt, compare.json and roc.csv");

    auto* predict_cmd = app.add_subcommand("predict", "Predict the disposition of one patient");
    predict_cmd->add_option("--model", model_path, "Model artifact")->required();
    predict_cmd->add_option("--features", features, "Feature values name=value")->required();

    auto* simulate = app.add_subcommand("simulate", "Length-of-stay and expense effect of early authorization");
    add_scenario_options(*simulate, scenario, true);
    simulate->add_flag("--json", as_json, "Print the machine-readable document");

    auto* trend = app.add_subcommand("trend", "Year-over-year expense change and 3-year moving average");
    trend->add_option("--expenses", expenses, "CSV of year,expense")->required();
    trend->add_option("--out", out_dir, "Directory for trend.txt, trend.json and trend.csv");

    auto* serve_cmd = app.add_subcommand("serve", "Serve a model over HTTP");
    serve_cmd->add_option("--model", model_path, "Model artifact")->required();
    serve_cmd->add_option("--port", port, "TCP port (0 picks a free one)")->capture_default_str();
    serve_cmd->add_option("--host", host, "Listen address")->capture_default_str();
    serve_cmd->add_option("--config", scenario.config, "JSON file with a 'costs' table");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return 2;
    }

    bool given[3] = {false, false, false};
    for (auto* cmd : {compare, simulate}) {
        given[0] = given[0] || cmd->count("--pac-days") > 0;
        given[1] = given[1] || cmd->count("--auth-days") > 0;
        given[2] = given[2] || cmd->count("--ownership") > 0;
    }

    try {
        if (stats->parsed())
            return cmd_stats(data, columns, crosstabs, all_rows, out_dir, out);
        if (train->parsed())
            return cmd_train(data, algo, params, model_out, out_dir, out);
        if (evaluate->parsed())
            return cmd_evaluate(model_path, data, out_dir, out);
        if (compare->parsed())
            return cmd_compare(data, params, scenario, given, out_dir, out);
        if (predict_cmd->parsed())
            return cmd_predict(model_path, features, out);
        if (simulate->parsed())
            return cmd_simulate(scenario, given, as_json, out);
        if (trend->parsed())
            return cmd_trend(expenses, out_dir, out);
        if (serve_cmd->parsed())
            return cmd_serve(model_path, host, port, scenario.config, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n" << app.get_subcommands().front()->help();
        return 2;
    } catch (const Error& e) {
        err << "error [" << e.code() << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error [IOError]: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    return run_cli(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

} // namespace pacdisp
