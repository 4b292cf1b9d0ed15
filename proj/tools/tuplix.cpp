#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tuplix/engine.hpp"
#include "tuplix/eq.hpp"
#include "tuplix/ftn.hpp"
#include "tuplix/parse.hpp"
#include "tuplix/print.hpp"

using njson = nlohmann::ordered_json;
using namespace tuplix;

namespace {

struct Ctx {
    std::string file;
    Workspace ws;
    bool json_out = false;
    bool trace = false;
    std::uint64_t seed = 0;
    EngineOpts opts;  // net wired in when the workspace has exactly one
    Limits lim;
};

int load_workspace(const std::string& path, Ctx& c) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot read " << path << "\n";
        return 1;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        c.ws = parse_workspace(buf.str());
    } catch (const parse_error& e) {
        std::cerr << path << ":" << e.line << ":" << e.column << ": error: " << e.what() << "\n";
        return 1;
    }
    if (!c.ws.errors.empty()) {
        for (const auto& e : c.ws.errors)
            std::cerr << path << ":" << e.line << ":" << e.column << ": error: " << e.what()
                      << "\n";
        return 1;
    }
    c.file = path;
    c.seed = c.ws.options.seed;
    if (const char* env = std::getenv("TUPLIX_SEED")) {
        try {
            c.seed = std::stoull(env);
        } catch (...) {
            std::cerr << "error: TUPLIX_SEED must be an unsigned integer\n";
            return 1;
        }
    }
    c.trace = c.trace || c.ws.options.trace;
    if (c.ws.options.branch_budget) c.lim.branch_budget = c.ws.options.branch_budget;
    c.opts.limits = c.lim;
    if (c.ws.networks.size() == 1) c.opts.net = &c.ws.networks.begin()->second.units;
    return 0;
}

const Tuplix* find_term(const Ctx& c, const std::string& arg) {
    auto it = c.ws.terms.find(parsedetail::name_of(arg).str());
    if (it == c.ws.terms.end()) {
        std::cerr << "error: unknown term " << arg << "\n";
        return nullptr;
    }
    return &it->second;
}

const std::pair<const std::string, Ftn>* pick_net(const Ctx& c, const std::string& arg) {
    if (!arg.empty()) {
        auto it = c.ws.networks.find(parsedetail::name_of(arg).str());
        if (it == c.ws.networks.end()) {
            std::cerr << "error: unknown network " << arg << "\n";
            return nullptr;
        }
        return &*it;
    }
    if (c.ws.networks.size() == 1) return &*c.ws.networks.begin();
    std::cerr << (c.ws.networks.empty() ? "error: the file declares no network\n"
                                        : "error: several networks declared; name one\n");
    return nullptr;
}

Tuplix staged_normalize(const Tuplix& t, const Ctx& c, const char* label) {
    if (c.trace) std::cerr << "trace " << label << " input: " << tuplix_str(t) << "\n";
    Tuplix d = eliminate_defs(t);
    if (c.trace) std::cerr << "trace " << label << " defs-eliminated: " << tuplix_str(d) << "\n";
    Tuplix e = eliminate_ops(d, c.opts);
    if (c.trace) std::cerr << "trace " << label << " ops-eliminated: " << tuplix_str(e) << "\n";
    Tuplix n = normalize(e, c.opts);
    if (c.trace) std::cerr << "trace " << label << " normal-form: " << tuplix_str(n) << "\n";
    return n;
}

njson meta(const Ctx& c, const char* command) {
    njson j;
    j["command"] = command;
    j["file"] = c.file;
    j["seed"] = c.seed;
    return j;
}

/// Shared tail for the commands whose result is a single term: prints the
/// outcome and maps a nullified result to exit code 2.
int emit_term(const Ctx& c, njson j, const Tuplix& n, const char* null_word) {
    bool nullified = n->kind == TKind::Delta;
    std::string text = nullified ? null_word : tuplix_str(n);
    if (c.json_out) {
        j["nullified"] = nullified;
        j["result"] = text;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << text << "\n";
    }
    return nullified ? 2 : 0;
}

int run_normalize(const Ctx& c, const std::string& term) {
    const Tuplix* t = find_term(c, term);
    if (!t) return 1;
    njson j = meta(c, "normalize");
    j["term"] = term;
    return emit_term(c, std::move(j), staged_normalize(*t, c, term.c_str()), "null");
}

int run_eq(const Ctx& c, const std::string& lhs, const std::string& rhs) {
    const Tuplix* a = find_term(c, lhs);
    const Tuplix* b = find_term(c, rhs);
    if (!a || !b) return 1;
    if (c.trace) {
        staged_normalize(*a, c, lhs.c_str());
        staged_normalize(*b, c, rhs.c_str());
    }
    EqResult r = eq_tuplix(*a, *b, c.opts, c.seed);
    if (c.json_out) {
        njson j = meta(c, "eq");
        j["lhs"] = lhs;
        j["rhs"] = rhs;
        j["verdict"] = verdict_str(r.verdict);
        j["witness"] = r.witness;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << verdict_str(r.verdict) << "\n";
        if (!r.witness.empty())
            std::cout << (r.verdict == Verdict::NotEqual ? "witness: " : "note: ") << r.witness
                      << "\n";
    }
    return r.verdict == Verdict::Equal ? 0 : 2;
}

std::string braced(const std::set<Name>& names) {
    std::string s = "{";
    for (const auto& n : names) {
        if (s.size() > 1) s += ",";
        s += n.str();
    }
    return s + "}";
}

int run_check_net(const Ctx& c, const std::string& net_arg) {
    const auto* named = pick_net(c, net_arg);
    if (!named) return 1;
    const Ftn& net = named->second;
    FtnReport r = validate_ftn(net);
    for (const auto& s : c.ws.specs) {
        if (!net.units.count(s.unit)) {
            r.errors.push_back("specification for undeclared unit " + s.unit.str());
            continue;
        }
        FtnReport u = check_unit_spec(net, s);
        r.errors.insert(r.errors.end(), u.errors.begin(), u.errors.end());
        r.warnings.insert(r.warnings.end(), u.warnings.begin(), u.warnings.end());
    }
    std::set<Name> internal, external;
    for (const auto& a : net.attrs)
        (classify(net, a) == Channel::Internal ? internal : external).insert(a);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& e : r.errors) std::cerr << "error: " << e << "\n";
    if (c.json_out) {
        njson j = meta(c, "check-net");
        j["net"] = named->first;
        j["ok"] = r.ok();
        j["internal"] = njson::array();
        for (const auto& a : internal) j["internal"].push_back(a.str());
        j["external"] = njson::array();
        for (const auto& a : external) j["external"].push_back(a.str());
        j["errors"] = r.errors;
        j["warnings"] = r.warnings;
        std::cout << j.dump(2) << "\n";
    } else if (r.ok()) {
        std::cout << "ok; internal: " << braced(internal) << "; external: " << braced(external)
                  << "\n";
    } else {
        std::cout << "invalid; errors: " << r.errors.size() << "\n";
    }
    return r.ok() ? 0 : 1;
}

int run_encapsulate(const Ctx& c, const std::string& net_arg) {
    const auto* named = pick_net(c, net_arg);
    if (!named) return 1;
    njson j = meta(c, "encapsulate");
    j["net"] = named->first;
    return emit_term(c, std::move(j),
                     compose_encapsulate(named->second, c.ws.specs, std::nullopt, c.lim), "null");
}

int run_focus(const Ctx& c, const std::string& unit, const std::string& net_arg) {
    const auto* named = pick_net(c, net_arg);
    if (!named) return 1;
    njson j = meta(c, "focus");
    j["net"] = named->first;
    j["unit"] = unit;
    return emit_term(
        c, std::move(j),
        focus(named->second, c.ws.specs, parsedetail::name_of(unit), std::nullopt, c.lim),
        "null");
}

int run_flux(const Ctx& c, const std::string& term) {
    const Tuplix* t = find_term(c, term);
    if (!t) return 1;
    njson j = meta(c, "flux");
    j["term"] = term;
    return emit_term(c, std::move(j), staged_normalize(t_kirch(dt_int(0), *t), c, term.c_str()),
                     "nullified");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symbolic engine for transfer-network tuplix terms"};
    app.require_subcommand(1);

    Ctx c;
    app.add_flag("--json", c.json_out, "machine-readable output");
    app.add_flag("--trace", c.trace, "print rewrite stages to stderr");

    std::string file, term_a, term_b, unit, net_name;
    auto common = [&](const char* name, const char* desc) {
        CLI::App* s = app.add_subcommand(name, desc);
        s->fallthrough();
        s->add_option("file", file, "workspace file (.tpx)")->required();
        return s;
    };

    CLI::App* s_norm = common("normalize", "rewrite a named term to normal form");
    s_norm->add_option("term", term_a, "term name")->required();

    CLI::App* s_eq = common("eq", "decide equality of two named terms");
    s_eq->add_option("lhs", term_a, "term name")->required();
    s_eq->add_option("rhs", term_b, "term name")->required();

    CLI::App* s_check = common("check-net", "validate a network and its specifications");
    s_check->add_option("net", net_name, "network name (optional when unique)");

    CLI::App* s_encap = common("encapsulate",
                               "compose all unit specifications and wall off internal channels");
    s_encap->add_option("net", net_name, "network name (optional when unique)");

    CLI::App* s_focus = common("focus", "compose with one unit's transactions kept visible");
    s_focus->add_option("unit", unit, "unit name")->required();
    s_focus->add_option("net", net_name, "network name (optional when unique)");

    CLI::App* s_flux = common("flux", "apply the balance operator to a named term");
    s_flux->add_option("term", term_a, "term name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code ? 1 : 0;
    }

    if (int rc = load_workspace(file, c)) return rc;

    try {
        if (*s_norm) return run_normalize(c, term_a);
        if (*s_eq) return run_eq(c, term_a, term_b);
        if (*s_check) return run_check_net(c, net_name);
        if (*s_encap) return run_encapsulate(c, net_name);
        if (*s_focus) return run_focus(c, unit, net_name);
        if (*s_flux) return run_flux(c, term_a);
    } catch (const engine_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
