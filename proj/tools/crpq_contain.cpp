// Command-line front end: containment checking, fragment classification,
// reduction-instance generation, and query-log analysis.
//
// Exit codes for `check`: 0 contained, 1 not contained, 2 unknown.
// Any usage, parse, or I/O error exits with a code >= 10.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "crpq/containment.hpp"
#include "crpq/corpus.hpp"
#include "crpq/fragment.hpp"
#include "crpq/parser.hpp"
#include "crpq/reductions.hpp"

namespace {

constexpr int kExitError = 10;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    std::string text = os.str();
    for (char& c : text)
        if (c == '\n' || c == '\r') c = ' ';
    return text;
}

crpq::Crpq load_query(const std::string& path) {
    return crpq::parse_query(read_file(path));
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
}

// Shared check/classify options.
struct CheckOptions {
    std::string method = "auto";
    int max_word_len = -1;
    unsigned long long budget = 500000;
    int workers = 0;  // 0: take CRPQ_CONTAIN_WORKERS, defaulting to 1
    bool json = false;
    std::string witness_out = "witness.json";
};

crpq::DecideConfig make_config(const CheckOptions& opt) {
    crpq::DecideConfig cfg;
    cfg.method = opt.method;
    cfg.max_word_len = opt.max_word_len;
    cfg.budget = opt.budget;
    cfg.workers = opt.workers;
    if (cfg.workers <= 0) {
        cfg.workers = 1;
        if (const char* env = std::getenv("CRPQ_CONTAIN_WORKERS")) {
            int v = std::atoi(env);
            if (v > 0) cfg.workers = v;
        }
    }
    return cfg;
}

int run_check(const std::string& q1_path, const std::string& q2_path,
              const CheckOptions& opt) {
    crpq::Crpq q1 = load_query(q1_path);
    crpq::Crpq q2 = load_query(q2_path);
    crpq::Decision d = crpq::decide(q1, q2, make_config(opt));
    if (opt.json) {
        std::cout << crpq::decision_to_json(d).dump(2) << '\n';
    } else {
        std::cout << "verdict: " << crpq::verdict_name(d.verdict)
                  << "  (method " << d.method << ", "
                  << d.elapsed_ms << " ms)\n";
        if (!d.note.empty()) std::cout << "note: " << d.note << '\n';
    }
    if (d.verdict == crpq::Verdict::NotContained && d.witness &&
        !opt.witness_out.empty()) {
        nlohmann::json w;
        w["kb"] = crpq::kb_to_json(d.witness->kb);
        w["assignment"] = d.witness->nu;
        write_file(opt.witness_out, w.dump(2) + "\n");
        if (!opt.json)
            std::cout << "witness written to " << opt.witness_out << '\n';
    }
    switch (d.verdict) {
        case crpq::Verdict::Contained: return 0;
        case crpq::Verdict::NotContained: return 1;
        default: return 2;
    }
}

int run_classify(const std::string& q_path, bool json) {
    crpq::Crpq q = load_query(q_path);
    crpq::FragmentClass fc = crpq::classify_query(q);
    std::string name = crpq::fragment_name(fc);
    if (json)
        std::cout << nlohmann::json{{"fragment", name}}.dump(2) << '\n';
    else
        std::cout << name << '\n';
    return 0;
}

crpq::Qbf2Instance qbf_from_json(const nlohmann::json& j) {
    crpq::Qbf2Instance inst;
    inst.num_forall = j.at("num_forall").get<int>();
    inst.num_exists = j.at("num_exists").get<int>();
    for (const auto& cl : j.at("clauses"))
        inst.clauses.push_back({cl.at(0).get<int>(), cl.at(1).get<int>(),
                                cl.at(2).get<int>()});
    return inst;
}

std::set<std::pair<int, int>> pairs_from_json(const nlohmann::json& j) {
    std::set<std::pair<int, int>> out;
    for (const auto& p : j) out.insert({p.at(0).get<int>(), p.at(1).get<int>()});
    return out;
}

crpq::CorridorInstance corridor_from_json(const nlohmann::json& j) {
    crpq::CorridorInstance inst;
    inst.num_tiles = j.at("num_tiles").get<int>();
    inst.group = j.at("group").get<std::vector<int>>();
    inst.horiz = pairs_from_json(j.at("horiz"));
    inst.vert = pairs_from_json(j.at("vert"));
    inst.first_row = j.at("first_row").get<std::vector<int>>();
    inst.last_row = j.at("last_row").get<std::vector<int>>();
    return inst;
}

crpq::ExpTilingInstance exp_tiling_from_json(const nlohmann::json& j) {
    crpq::ExpTilingInstance inst;
    inst.num_tiles = j.at("num_tiles").get<int>();
    inst.first_tile = j.at("first_tile").get<int>();
    inst.last_tile = j.at("last_tile").get<int>();
    inst.horiz = pairs_from_json(j.at("horiz"));
    inst.vert = pairs_from_json(j.at("vert"));
    inst.addr_bits = j.at("addr_bits").get<int>();
    return inst;
}

int run_gen(const std::string& kind, const std::string& instance_path,
            const std::string& out_dir) {
    nlohmann::json j;
    {
        std::ifstream in(instance_path);
        if (!in) throw std::runtime_error("cannot open file: " + instance_path);
        in >> j;
    }

    crpq::ReductionPair pair;
    nlohmann::json sidecar;
    sidecar["kind"] = kind;
    sidecar["instance"] = j;
    if (kind == "qbf" || kind == "qbf-astar") {
        crpq::Qbf2Instance inst = qbf_from_json(j);
        pair = crpq::qbf_to_containment(inst, kind == "qbf-astar");
        if (inst.num_forall + inst.num_exists < 30)
            sidecar["expected_verdict"] =
                crpq::qbf_brute(inst) ? "contained" : "not-contained";
    } else if (kind == "tiling" || kind == "tiling-astar") {
        crpq::CorridorInstance inst = corridor_from_json(j);
        pair = crpq::corridor_tiling_to_containment(inst, kind == "tiling-astar");
        sidecar["expected_verdict"] =
            crpq::tiling_brute(inst) ? "not-contained" : "contained";
    } else if (kind == "exp-tiling") {
        crpq::ExpTilingInstance inst = exp_tiling_from_json(j);
        pair = crpq::exp_tiling_to_containment(inst);
        if (inst.addr_bits <= 4)
            sidecar["expected_verdict"] =
                crpq::exp_tiling_brute(inst) ? "not-contained" : "contained";
    } else {
        throw std::runtime_error("unknown generator kind: " + kind);
    }

    std::filesystem::create_directories(out_dir);
    auto path = [&](const std::string& name) {
        return (std::filesystem::path(out_dir) / name).string();
    };
    write_file(path("q1.crpq"), crpq::render_query(pair.q1) + "\n");
    write_file(path("q2.crpq"), crpq::render_query(pair.q2) + "\n");
    write_file(path("instance.json"), sidecar.dump(2) + "\n");
    std::cout << "wrote " << path("q1.crpq") << ", " << path("q2.crpq")
              << ", " << path("instance.json") << '\n';
    return 0;
}

int run_analyze_log(const std::string& path, bool dedupe, bool json) {
    crpq::ClassReport rep = crpq::analyze_log(path, dedupe);
    if (json)
        std::cout << crpq::report_to_json(rep).dump(2) << '\n';
    else
        std::cout << crpq::report_to_text(rep);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CRPQ containment toolkit"};
    app.require_subcommand(1);

    CheckOptions opt;
    std::string q1_path, q2_path, q_path, kind, instance_path, out_dir;
    std::string log_path;
    bool dedupe = false;

    CLI::App* check = app.add_subcommand("check", "decide q1 ⊆ q2");
    check->add_option("q1", q1_path, "left query file")->required();
    check->add_option("q2", q2_path, "right query file")->required();
    check->add_option("--method", opt.method,
                      "auto|struct-hom|left-single|right-cq|right-A-astar|"
                      "left-w|bounded");
    check->add_option("--max-word-len", opt.max_word_len,
                      "bounded-search word length (-1: automatic)");
    check->add_option("--budget", opt.budget, "model/abstraction budget");
    check->add_option("--workers", opt.workers,
                      "worker threads (default: CRPQ_CONTAIN_WORKERS or 1)");
    check->add_flag("--json", opt.json, "JSON output");
    check->add_option("--witness-out", opt.witness_out,
                      "file for the rejecting model (empty: skip)");

    CLI::App* classify = app.add_subcommand("classify", "name a query's fragment");
    classify->add_option("query", q_path, "query file")->required();
    classify->add_flag("--json", opt.json, "JSON output");

    CLI::App* gen = app.add_subcommand("gen", "generate a reduction pair");
    gen->add_option("kind", kind, "qbf|qbf-astar|tiling|tiling-astar|exp-tiling")
        ->required()
        ->check(CLI::IsMember({"qbf", "qbf-astar", "tiling", "tiling-astar",
                               "exp-tiling"}));
    gen->add_option("instance", instance_path, "instance JSON file")->required();
    gen->add_option("out_dir", out_dir, "output directory")->required();

    CLI::App* alog = app.add_subcommand("analyze-log", "classify a query log");
    alog->add_option("log", log_path, "log file")->required();
    alog->add_flag("--dedupe", dedupe, "collapse identical expressions");
    alog->add_flag("--json", opt.json, "JSON output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    try {
        if (check->parsed()) return run_check(q1_path, q2_path, opt);
        if (classify->parsed()) return run_classify(q_path, opt.json);
        if (gen->parsed()) return run_gen(kind, instance_path, out_dir);
        if (alog->parsed()) return run_analyze_log(log_path, dedupe, opt.json);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
