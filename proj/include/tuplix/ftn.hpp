#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tuplix/engine.hpp"

namespace tuplix {

/// A transfer network: attribute-labeled channels between units. Each
/// channel name may be in-going for at most one unit and outgoing for at
/// most one; a channel with both ends inside the network is internal.
struct Ftn {
    std::set<Name> attrs;
    NetIo units;
};

struct UnitSpec {
    Name unit;
    Tuplix body;
};

struct FtnReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    bool ok() const { return errors.empty(); }
};

enum class Channel { Internal, External };

inline FtnReport validate_ftn(const Ftn& net) {
    FtnReport r;
    std::map<Name, Name> in_owner, out_owner;
    for (const auto& [g, io] : net.units) {
        for (const auto& a : io.in) {
            if (!net.attrs.count(a))
                r.errors.push_back("unit " + g.str() + " uses undeclared attribute " + a.str());
            auto [it, fresh] = in_owner.emplace(a, g);
            if (!fresh)
                r.errors.push_back("attribute " + a.str() + " is in-going for both " +
                                   it->second.str() + " and " + g.str());
        }
        for (const auto& a : io.out) {
            if (!net.attrs.count(a))
                r.errors.push_back("unit " + g.str() + " uses undeclared attribute " + a.str());
            auto [it, fresh] = out_owner.emplace(a, g);
            if (!fresh)
                r.errors.push_back("attribute " + a.str() + " is outgoing for both " +
                                   it->second.str() + " and " + g.str());
        }
        for (const auto& a : io.in)
            if (io.out.count(a))
                r.warnings.push_back("attribute " + a.str() + " loops back into unit " + g.str());
    }
    return r;
}

inline Channel classify(const Ftn& net, const Name& a) {
    if (!net.attrs.count(a)) throw unknown_attribute("unknown attribute " + a.str());
    bool goes_in = false, goes_out = false;
    for (const auto& [g, io] : net.units) {
        goes_in = goes_in || io.in.count(a) > 0;
        goes_out = goes_out || io.out.count(a) > 0;
    }
    return goes_in && goes_out ? Channel::Internal : Channel::External;
}

inline const UnitIo& unit_io(const Ftn& net, const Name& g) {
    auto it = net.units.find(g);
    if (it == net.units.end()) throw unknown_unit("unknown unit " + g.str());
    return it->second;
}

inline FtnReport check_unit_spec(const Ftn& net, const UnitSpec& s) {
    const UnitIo& io = unit_io(net, s.unit);
    FtnReport r;
    for (const Attribute& a : attrs_of(s.body)) {
        if (a.sign != Sign::Flat) {
            r.errors.push_back("specification of " + s.unit.str() +
                               " uses signed attribute " + a.str());
            continue;
        }
        if (!io.in.count(a.name) && !io.out.count(a.name))
            r.errors.push_back("specification of " + s.unit.str() + " uses attribute " +
                               a.str() + " outside its channels");
    }
    return r;
}

/// Channels that run between spec'd units: some listed unit sends on the
/// attribute and some listed unit receives on it.
inline std::set<Name> internal_among(const Ftn& net, const std::vector<UnitSpec>& specs) {
    std::set<Name> ins, outs, internal;
    for (const auto& s : specs) {
        const UnitIo& io = unit_io(net, s.unit);
        ins.insert(io.in.begin(), io.in.end());
        outs.insert(io.out.begin(), io.out.end());
    }
    for (const auto& a : ins)
        if (outs.count(a)) internal.insert(a);
    return internal;
}

namespace ftndetail {

inline void require_checked(const Ftn& net, const std::vector<UnitSpec>& specs) {
    for (const auto& s : specs) {
        FtnReport r = check_unit_spec(net, s);
        if (!r.ok()) throw malformed_input(r.errors.front());
    }
}

inline std::set<Attribute> to_attrs(const std::set<Name>& names) {
    std::set<Attribute> out;
    for (const auto& n : names) out.insert(Attribute(n));
    return out;
}

}  // namespace ftndetail

/// Compose the given specifications and wall off H, which defaults to the
/// channels internal to the listed units. Returns the normal form.
inline Tuplix compose_encapsulate(const Ftn& net, const std::vector<UnitSpec>& specs,
                                  std::optional<std::set<Name>> H = std::nullopt,
                                  const Limits& lim = {}) {
    ftndetail::require_checked(net, specs);
    std::vector<Tuplix> bodies;
    bodies.reserve(specs.size());
    for (const auto& s : specs) bodies.push_back(s.body);
    std::set<Name> wall = H ? *H : internal_among(net, specs);
    EngineOpts opts;
    opts.net = &net.units;
    opts.limits = lim;
    return normalize(t_encap(ftndetail::to_attrs(wall), conj_of(bodies)), opts);
}

/// Encapsulate as above, but keep the chosen unit's internal transactions
/// visible as signed copies and select its channels afterwards.
inline Tuplix focus(const Ftn& net, const std::vector<UnitSpec>& specs, const Name& g,
                    std::optional<std::set<Name>> H = std::nullopt, const Limits& lim = {}) {
    ftndetail::require_checked(net, specs);
    const UnitIo& io = unit_io(net, g);
    std::set<Name> wall = H ? *H : internal_among(net, specs);
    std::set<Attribute> wall_attrs = ftndetail::to_attrs(wall);

    std::vector<Tuplix> bodies;
    bool found = false;
    for (const auto& s : specs) {
        if (s.unit == g && !found) {
            found = true;
            bodies.push_back(t_zeta(g, wall_attrs, s.body));
        } else {
            bodies.push_back(s.body);
        }
    }
    if (!found) throw unknown_unit("no specification given for unit " + g.str());

    std::set<Attribute> J;
    for (const Name& a : io.in) {
        J.insert(Attribute(a));
        J.insert(Attribute(a, Sign::Plus));
        J.insert(Attribute(a, Sign::Minus));
    }
    for (const Name& a : io.out) {
        J.insert(Attribute(a));
        J.insert(Attribute(a, Sign::Plus));
        J.insert(Attribute(a, Sign::Minus));
    }

    EngineOpts opts;
    opts.net = &net.units;
    opts.ambient = ftndetail::to_attrs(net.attrs);
    opts.limits = lim;
    return normalize(t_select(J, t_encap(wall_attrs, conj_of(bodies))), opts);
}

// ---- periodic reserve chain ------------------------------------------------
//
// A worked two-unit-per-period model: a spending unit withdraws a fixed
// amount pw from a reserve buffer, banks the fraction k of its income
// inc_i into the next period's buffer, and spends the rest; buffers
// forward whatever is left. Channel families, all indexed by period:
//   a: buffer-to-buffer carryover   b: reservation into the next buffer
//   c: withdrawal                   d: income   e: expenditures

inline Tuplix reserve_unit(int i) {
    Name u("u"), v("v"), w("w"), x("x");
    Tuplix body = t_conj(
        t_entry(Attribute(Name("a", i)), dt_neg(dt_var(u))),
        t_conj(t_entry(Attribute(Name("b", i)), dt_neg(dt_var(v))),
               t_conj(t_entry(Attribute(Name("c", i)), dt_var(w)),
                      t_entry(Attribute(Name("a", i + 1)), dt_var(x)))));
    return t_kirch(dt_int(0), t_sum(u, t_sum(v, t_sum(w, t_sum(x, body)))));
}

inline Tuplix spending_unit(int i) {
    Name u("u");
    Tuplix body = t_conj(
        t_entry(Attribute(Name("c", i)), dt_neg(dt_var(Name("pw")))),
        t_conj(t_entry(Attribute(Name("d", i)), dt_neg(dt_var(Name("inc", i)))),
               t_conj(t_entry(Attribute(Name("b", i + 1)),
                              dt_mul(dt_var(Name("k")), dt_var(Name("inc", i)))),
                      t_entry(Attribute(Name("e", i)), dt_var(u)))));
    return t_kirch(dt_int(0), t_sum(u, body));
}

/// The network carrying periods 0..n: spending units per period, buffers
/// through period n+1, external income/expenditure channels per period.
inline Ftn reserve_net(int n) {
    Ftn net;
    for (int i = 0; i <= n + 1; ++i) {
        UnitIo r;
        r.in = {Name("a", i), Name("b", i)};
        r.out = {Name("c", i), Name("a", i + 1)};
        net.units[Name("R", i)] = r;
        net.attrs.insert({Name("a", i), Name("b", i), Name("c", i), Name("a", i + 1)});
    }
    for (int i = 0; i <= n; ++i) {
        UnitIo q;
        q.in = {Name("c", i), Name("d", i)};
        q.out = {Name("b", i + 1), Name("e", i)};
        net.units[Name("Q", i)] = q;
        net.attrs.insert({Name("d", i), Name("e", i)});
    }
    return net;
}

/// Normal form of the whole chain with its internal channels walled off:
/// spending units 0..n composed with buffers 0..n+1 under
/// { a_{i+1}, b_{i+1}, c_i | 0 <= i <= n }.
inline Tuplix reserve_chain(int n, const Limits& lim = {}) {
    std::vector<Tuplix> bodies;
    for (int i = 0; i <= n; ++i) bodies.push_back(spending_unit(i));
    for (int i = 0; i <= n + 1; ++i) bodies.push_back(reserve_unit(i));
    std::set<Attribute> wall;
    for (int i = 0; i <= n; ++i) {
        wall.insert(Attribute(Name("a", i + 1)));
        wall.insert(Attribute(Name("b", i + 1)));
        wall.insert(Attribute(Name("c", i)));
    }
    EngineOpts opts;
    opts.limits = lim;
    return normalize(t_encap(wall, conj_of(bodies)), opts);
}

}  // namespace tuplix
