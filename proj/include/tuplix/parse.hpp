#pragma once

#include <cctype>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tuplix/errors.hpp"
#include "tuplix/ftn.hpp"
#include "tuplix/funcdef.hpp"
#include "tuplix/term.hpp"

namespace tuplix {

/// Everything a workspace file declares. Specs keep their file order, which
/// is also the composition order.
struct Workspace {
    std::map<std::string, Ftn> networks;
    std::vector<UnitSpec> specs;
    std::map<std::string, Tuplix> terms;
    struct {
        std::uint64_t seed = 0;
        std::uint64_t branch_budget = 0;  // 0 keeps the engine default
        bool trace = false;
    } options;
    std::vector<parse_error> errors;
};

namespace parsedetail {

enum class Tk {
    Ident,
    Number,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Amp,
    Plus,
    Minus,
    Star,
    Slash,
    Dot,
    Comma,
    Semi,
    Colon,
    Assign,
    EqEq,
    InvPost,
    End,
};

struct Token {
    Tk kind;
    std::string text;
    int line;
    int col;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
inline bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

inline std::vector<Token> lex(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto push = [&](Tk k, std::string t, int l, int c) { out.push_back({k, std::move(t), l, c}); };
    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++col;
            ++i;
            continue;
        }
        if (c == '#') {  // comment to end of line
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        int l = line, cl = col;
        if (ident_start(c)) {
            size_t j = i;
            while (j < src.size() && ident_char(src[j])) ++j;
            push(Tk::Ident, src.substr(i, j - i), l, cl);
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            push(Tk::Number, src.substr(i, j - i), l, cl);
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        auto single = [&](Tk k) {
            push(k, std::string(1, c), l, cl);
            ++i;
            ++col;
        };
        switch (c) {
            case '(': single(Tk::LParen); break;
            case ')': single(Tk::RParen); break;
            case '{': single(Tk::LBrace); break;
            case '}': single(Tk::RBrace); break;
            case '[': single(Tk::LBracket); break;
            case ']': single(Tk::RBracket); break;
            case '&': single(Tk::Amp); break;
            case '+': single(Tk::Plus); break;
            case '-': single(Tk::Minus); break;
            case '*': single(Tk::Star); break;
            case '/': single(Tk::Slash); break;
            case '.': single(Tk::Dot); break;
            case ',': single(Tk::Comma); break;
            case ';': single(Tk::Semi); break;
            case ':': single(Tk::Colon); break;
            case '=':
                if (i + 1 < src.size() && src[i + 1] == '=') {
                    push(Tk::EqEq, "==", l, cl);
                    i += 2;
                    col += 2;
                } else {
                    single(Tk::Assign);
                }
                break;
            case '^':
                if (i + 2 < src.size() && src[i + 1] == '-' && src[i + 2] == '1') {
                    push(Tk::InvPost, "^-1", l, cl);
                    i += 3;
                    col += 3;
                } else {
                    throw parse_error("only the exponent -1 is supported after ^", l, cl);
                }
                break;
            default:
                throw parse_error(std::string("unexpected character '") + c + "'", l, cl);
        }
    }
    push(Tk::End, "", line, col);
    return out;
}

inline const std::set<std::string>& reserved_words() {
    static const std::set<std::string> words = {
        "eps", "null", "sum", "sumf", "def",  "lam",    "in",
        "clear", "select", "encap", "zeta", "K", "net", "unit", "spec", "let", "option",
    };
    return words;
}

/// "a_3" names the third member of family a; the split is at the last
/// underscore with an all-digit tail.
inline Name name_of(const std::string& s) {
    auto us = s.rfind('_');
    if (us != std::string::npos && us > 0 && us + 1 < s.size()) {
        bool digits = true;
        for (size_t i = us + 1; i < s.size(); ++i)
            digits = digits && std::isdigit(static_cast<unsigned char>(s[i]));
        if (digits) {
            try {
                return Name(s.substr(0, us), std::stoll(s.substr(us + 1)));
            } catch (const std::out_of_range&) {
            }
        }
    }
    return Name(s);
}

struct Parser {
    std::vector<Token> toks;
    size_t pos = 0;

    const Token& cur() const { return toks[pos]; }
    const Token& ahead(size_t n = 1) const {
        return toks[pos + n < toks.size() ? pos + n : toks.size() - 1];
    }
    bool at(Tk k) const { return cur().kind == k; }
    bool at_kw(const char* w) const { return at(Tk::Ident) && cur().text == w; }
    Token take() { return toks[pos++]; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw parse_error(msg + " (got '" + (at(Tk::End) ? "end of input" : cur().text) + "')",
                          cur().line, cur().col);
    }
    Token expect(Tk k, const char* what) {
        if (!at(k)) fail(std::string("expected ") + what);
        return take();
    }
    Name expect_name(const char* what) {
        if (!at(Tk::Ident) || reserved_words().count(cur().text))
            fail(std::string("expected ") + what);
        return name_of(take().text);
    }

    // ---- data terms ----------------------------------------------------

    DataTerm parse_data() {  // sums
        DataTerm t = parse_dprod();
        for (;;) {
            if (at(Tk::Plus)) {
                take();
                t = dt_add(std::move(t), parse_dprod());
            } else if (at(Tk::Minus)) {
                take();
                t = dt_sub(std::move(t), parse_dprod());
            } else {
                return t;
            }
        }
    }

    DataTerm parse_dprod() {
        DataTerm t = parse_dunary();
        for (;;) {
            if (at(Tk::Star)) {
                take();
                t = dt_mul(std::move(t), parse_dunary());
            } else if (at(Tk::Slash)) {
                take();
                DataTerm rhs = parse_dunary();
                // Two constants divide exactly (the printer writes rational
                // constants as fractions); anything else is inverse sugar.
                if (t->kind == DtKind::Const && rhs->kind == DtKind::Const &&
                    !rhs->value.is_zero()) {
                    t = dt_const(t->value / rhs->value);
                } else {
                    t = dt_div(std::move(t), std::move(rhs));
                }
            } else {
                return t;
            }
        }
    }

    DataTerm parse_dunary() {
        if (at(Tk::Minus)) {
            take();
            return dt_neg(parse_dunary());
        }
        return parse_dpost();
    }

    DataTerm parse_dpost() {
        DataTerm t = parse_datom();
        while (at(Tk::InvPost)) {
            take();
            t = dt_inv(std::move(t));
        }
        return t;
    }

    LambdaPtr parse_lambda() {
        expect(Tk::Ident, "'lam'");  // caller checked the keyword
        std::vector<Name> params;
        params.push_back(expect_name("parameter name"));
        while (at(Tk::Comma)) {
            take();
            params.push_back(expect_name("parameter name"));
        }
        expect(Tk::Dot, "'.' after parameters");
        return make_fn(std::move(params), parse_data());
    }

    DataTerm parse_datom() {
        if (at(Tk::Number)) return dt_const(Rational(take().text));
        if (at(Tk::Ident) && !reserved_words().count(cur().text)) {
            Name n = name_of(take().text);
            if (at(Tk::LParen)) {
                take();
                std::vector<DataTerm> args;
                args.push_back(parse_data());
                while (at(Tk::Comma)) {
                    take();
                    args.push_back(parse_data());
                }
                expect(Tk::RParen, "')' after arguments");
                return dt_app(std::move(n), std::move(args));
            }
            return dt_var(std::move(n));
        }
        if (at(Tk::LParen)) {
            take();
            if (at_kw("lam")) {
                LambdaPtr fn = parse_lambda();
                expect(Tk::RParen, "')' after lambda");
                expect(Tk::LParen, "'(' before arguments");
                std::vector<DataTerm> args;
                args.push_back(parse_data());
                while (at(Tk::Comma)) {
                    take();
                    args.push_back(parse_data());
                }
                expect(Tk::RParen, "')' after arguments");
                return dt_lam_app(std::move(fn), std::move(args));
            }
            DataTerm t = parse_data();
            expect(Tk::RParen, "')'");
            return t;
        }
        fail("expected a data term");
    }

    // ---- tuplix terms ----------------------------------------------------

    std::set<Attribute> parse_attr_set() {
        std::set<Attribute> out;
        if (at(Tk::RBrace)) return out;
        for (;;) {
            Sign s = Sign::Flat;
            if (at(Tk::Plus)) {
                take();
                s = Sign::Plus;
            } else if (at(Tk::Minus)) {
                take();
                s = Sign::Minus;
            }
            out.insert(Attribute{expect_name("attribute name"), s});
            if (!at(Tk::Comma)) return out;
            take();
        }
    }

    Tuplix parse_term() { return parse_talt(); }

    Tuplix parse_talt() {
        Tuplix t = parse_tconj();
        while (at(Tk::Plus)) {
            take();
            t = t_alt(std::move(t), parse_tconj());
        }
        return t;
    }

    Tuplix parse_tconj() {
        Tuplix t = parse_tscaled();
        while (at(Tk::Amp)) {
            take();
            t = t_conj(std::move(t), parse_tscaled());
        }
        return t;
    }

    Tuplix parse_tscaled() {
        std::vector<DataTerm> factors;
        for (;;) {
            if (at(Tk::Number) && ahead().kind == Tk::Star) {
                factors.push_back(dt_const(Rational(take().text)));
                take();
                continue;
            }
            if (at(Tk::Ident) && !reserved_words().count(cur().text) &&
                ahead().kind == Tk::Star) {
                factors.push_back(dt_var(name_of(take().text)));
                take();
                continue;
            }
            if (at(Tk::LParen)) {
                // Either a parenthesized scale factor or a parenthesized
                // term; only "(data) *" is the former, so probe and back off.
                size_t save = pos;
                bool scaled = false;
                try {
                    take();
                    DataTerm d = parse_data();
                    if (at(Tk::RParen) && ahead().kind == Tk::Star) {
                        take();
                        take();
                        factors.push_back(std::move(d));
                        scaled = true;
                    }
                } catch (const parse_error&) {
                }
                if (scaled) continue;
                pos = save;
            }
            break;
        }
        Tuplix t = parse_tatom();
        for (auto it = factors.rbegin(); it != factors.rend(); ++it)
            t = t_scalar(*it, std::move(t));
        return t;
    }

    Tuplix parse_op_body(std::set<Attribute> attrs,
                         Tuplix (*build)(std::set<Attribute>, Tuplix)) {
        expect(Tk::LParen, "'('");
        Tuplix body = parse_term();
        expect(Tk::RParen, "')'");
        return build(std::move(attrs), std::move(body));
    }

    Tuplix parse_tatom() {
        if (at_kw("eps")) {
            take();
            return t_eps();
        }
        if (at_kw("null")) {
            take();
            return t_delta();
        }
        if (at(Tk::LBracket)) {
            take();
            DataTerm t = parse_data();
            if (at(Tk::EqEq)) {
                take();
                t = dt_sub(std::move(t), parse_data());
            }
            expect(Tk::RBracket, "']'");
            return t_test(std::move(t));
        }
        if (at_kw("sum") || at_kw("sumf")) {
            bool fn = take().text == "sumf";
            Name x = expect_name("binder name");
            expect(Tk::Dot, "'.' after binder");
            Tuplix body = parse_talt();
            return fn ? t_sumfn(std::move(x), std::move(body))
                      : t_sum(std::move(x), std::move(body));
        }
        if (at_kw("def")) {
            take();
            Name f = expect_name("function name");
            expect(Tk::Assign, "'=' after function name");
            if (!at_kw("lam")) fail("expected 'lam'");
            LambdaPtr fn = parse_lambda();
            if (at_kw("in")) {
                take();
                Tuplix body = parse_talt();
                return t_sumfn(f, t_conj(t_gamma(f, fn), std::move(body)));
            }
            return t_gamma(std::move(f), std::move(fn));
        }
        if (at_kw("clear") || at_kw("select") || at_kw("encap")) {
            std::string kw = take().text;
            expect(Tk::LBrace, "'{'");
            std::set<Attribute> attrs = parse_attr_set();
            expect(Tk::RBrace, "'}'");
            if (kw == "clear") return parse_op_body(std::move(attrs), &t_clear);
            if (kw == "select") return parse_op_body(std::move(attrs), &t_select);
            return parse_op_body(std::move(attrs), &t_encap);
        }
        if (at_kw("zeta")) {
            take();
            expect(Tk::LBrace, "'{'");
            Name unit = expect_name("unit name");
            expect(Tk::Semi, "';' after unit name");
            std::set<Attribute> attrs = parse_attr_set();
            expect(Tk::RBrace, "'}'");
            expect(Tk::LParen, "'('");
            Tuplix body = parse_term();
            expect(Tk::RParen, "')'");
            return t_zeta(std::move(unit), std::move(attrs), std::move(body));
        }
        if (at_kw("K")) {
            take();
            DataTerm offset = dt_int(0);
            if (at(Tk::LBracket)) {
                take();
                offset = parse_data();
                expect(Tk::RBracket, "']'");
            }
            expect(Tk::LParen, "'('");
            Tuplix body = parse_term();
            expect(Tk::RParen, "')'");
            return t_kirch(std::move(offset), std::move(body));
        }
        Sign s = Sign::Flat;
        if ((at(Tk::Plus) || at(Tk::Minus)) && ahead().kind == Tk::Ident &&
            ahead(2).kind == Tk::LParen) {
            s = take().kind == Tk::Plus ? Sign::Plus : Sign::Minus;
        }
        if (at(Tk::Ident) && !reserved_words().count(cur().text)) {
            Name n = name_of(take().text);
            expect(Tk::LParen, "'(' after attribute name");
            DataTerm payload = parse_data();
            expect(Tk::RParen, "')' after payload");
            return t_entry(Attribute{std::move(n), s}, std::move(payload));
        }
        if (at(Tk::LParen)) {
            take();
            Tuplix t = parse_term();
            expect(Tk::RParen, "')'");
            return t;
        }
        fail("expected a term");
    }

    // ---- statements ------------------------------------------------------

    UnitIo parse_unit_io() {
        expect(Tk::LBrace, "'{'");
        UnitIo io;
        while (!at(Tk::RBrace)) {
            bool in;
            if (at_kw("in")) {
                in = true;
            } else if (at_kw("out")) {
                in = false;
            } else {
                fail("expected 'in' or 'out'");
            }
            take();
            expect(Tk::Colon, "':'");
            for (;;) {
                Name a = expect_name("channel name");
                (in ? io.in : io.out).insert(std::move(a));
                if (!at(Tk::Comma)) break;
                take();
            }
            expect(Tk::Semi, "';' after channel list");
        }
        take();
        return io;
    }

    Ftn parse_net_body() {
        expect(Tk::LBrace, "'{'");
        Ftn net;
        while (!at(Tk::RBrace)) {
            if (!at_kw("unit")) fail("expected 'unit'");
            take();
            Name u = expect_name("unit name");
            if (net.units.count(u)) fail("duplicate unit " + u.str());
            UnitIo io = parse_unit_io();
            net.attrs.insert(io.in.begin(), io.in.end());
            net.attrs.insert(io.out.begin(), io.out.end());
            net.units.emplace(std::move(u), std::move(io));
        }
        take();
        return net;
    }

    void parse_option(Workspace& ws) {
        std::string key = expect(Tk::Ident, "option name").text;
        while (at(Tk::Minus) && ahead().kind == Tk::Ident) {
            take();
            key += "-" + take().text;
        }
        expect(Tk::Assign, "'='");
        if (key == "seed" || key == "branch-budget") {
            Token v = expect(Tk::Number, "a number");
            std::uint64_t n = std::stoull(v.text);
            (key == "seed" ? ws.options.seed : ws.options.branch_budget) = n;
        } else if (key == "trace") {
            Token v = expect(Tk::Ident, "'on' or 'off'");
            if (v.text != "on" && v.text != "off")
                throw parse_error("expected 'on' or 'off'", v.line, v.col);
            ws.options.trace = v.text == "on";
        } else {
            throw parse_error("unknown option " + key, cur().line, cur().col);
        }
    }

    bool at_statement_start() const {
        return at_kw("net") || at_kw("spec") || at_kw("let") || at_kw("option");
    }

    /// Skip to the next plausible statement start, balancing brackets so a
    /// keyword inside a malformed body does not cut recovery short.
    void recover() {
        int depth = 0;
        while (!at(Tk::End)) {
            if (depth == 0 && at_statement_start()) return;
            switch (cur().kind) {
                case Tk::LParen:
                case Tk::LBrace:
                case Tk::LBracket: ++depth; break;
                case Tk::RParen:
                case Tk::RBrace:
                case Tk::RBracket:
                    if (depth > 0) --depth;
                    break;
                default: break;
            }
            take();
        }
    }

    Workspace parse_workspace() {
        Workspace ws;
        while (!at(Tk::End)) {
            try {
                if (at_kw("net")) {
                    take();
                    Token at_name = cur();
                    Name n = expect_name("network name");
                    std::string key = n.str();
                    Ftn net = parse_net_body();
                    if (ws.networks.count(key))
                        ws.errors.emplace_back("duplicate network " + key + "; latest wins",
                                               at_name.line, at_name.col);
                    ws.networks.insert_or_assign(key, std::move(net));
                } else if (at_kw("spec")) {
                    take();
                    Name unit = expect_name("unit name");
                    expect(Tk::Assign, "'='");
                    ws.specs.push_back({std::move(unit), parse_term()});
                } else if (at_kw("let")) {
                    take();
                    Token at_name = cur();
                    Name n = expect_name("binding name");
                    expect(Tk::Assign, "'='");
                    Tuplix body = parse_term();
                    std::string key = n.str();
                    if (ws.terms.count(key))
                        ws.errors.emplace_back("duplicate binding " + key + "; latest wins",
                                               at_name.line, at_name.col);
                    ws.terms.insert_or_assign(std::move(key), std::move(body));
                } else if (at_kw("option")) {
                    take();
                    parse_option(ws);
                } else {
                    fail("expected 'net', 'spec', 'let' or 'option'");
                }
            } catch (const parse_error& e) {
                ws.errors.push_back(e);
                recover();
            } catch (const engine_error& e) {
                ws.errors.emplace_back(e.what(), cur().line, cur().col);
                recover();
            }
        }
        return ws;
    }
};

}  // namespace parsedetail

/// Read one term; malformed input throws with the offending position.
inline Tuplix parse_term(const std::string& text) {
    parsedetail::Parser p{parsedetail::lex(text)};
    Tuplix t = p.parse_term();
    if (!p.at(parsedetail::Tk::End)) p.fail("trailing input after term");
    return t;
}

/// Read one data term; malformed input throws with the offending position.
inline DataTerm parse_data(const std::string& text) {
    parsedetail::Parser p{parsedetail::lex(text)};
    DataTerm t = p.parse_data();
    if (!p.at(parsedetail::Tk::End)) p.fail("trailing input after data term");
    return t;
}

/// Read a workspace file. Statement-level errors are collected in
/// Workspace::errors and parsing continues at the next statement; only
/// lexical failures throw.
inline Workspace parse_workspace(const std::string& text) {
    parsedetail::Parser p{parsedetail::lex(text)};
    return p.parse_workspace();
}

}  // namespace tuplix
