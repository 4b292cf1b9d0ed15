#pragma once

#include <ostream>
#include <sstream>
#include <string>

#include "tuplix/term.hpp"

namespace tuplix {

// Printing levels: choice 1, conjunction 2, scaling 3, atoms 4. Binders
// scope to the end of the expression and parenthesize as operands.

inline int print_tlevel(const Tuplix& p) {
    switch (p->kind) {
        case TKind::Alt: return 1;
        case TKind::Conj: return 2;
        case TKind::Scalar: return 3;
        case TKind::Sum:
        case TKind::SumFn:
        case TKind::Gamma: return 0;
        default: return 4;
    }
}

inline void print_tuplix(std::ostream& os, const Tuplix& p);

inline void print_tparen(std::ostream& os, const Tuplix& p, int min_level) {
    if (print_tlevel(p) < min_level) {
        os << "(";
        print_tuplix(os, p);
        os << ")";
    } else {
        print_tuplix(os, p);
    }
}

inline void print_attr_set(std::ostream& os, const std::set<Attribute>& attrs) {
    bool first = true;
    for (const auto& a : attrs) {
        if (!first) os << ", ";
        first = false;
        os << a.str();
    }
}

inline void print_lambda(std::ostream& os, const LambdaPtr& fn) {
    os << "lam ";
    for (size_t i = 0; i < fn->params.size(); ++i) {
        if (i) os << ", ";
        os << fn->params[i].str();
    }
    os << " . ";
    print_data(os, fn->body);
}

inline void print_tuplix(std::ostream& os, const Tuplix& p) {
    switch (p->kind) {
        case TKind::Eps: os << "eps"; return;
        case TKind::Delta: os << "null"; return;
        case TKind::Test:
            os << "[";
            print_data(os, p->data);
            os << "]";
            return;
        case TKind::Entry:
            os << p->attr.str() << "(";
            print_data(os, p->data);
            os << ")";
            return;
        case TKind::Conj:
            print_tparen(os, p->a, 2);
            os << " & ";
            print_tparen(os, p->b, 3);
            return;
        case TKind::Alt:
            print_tparen(os, p->a, 1);
            os << " + ";
            print_tparen(os, p->b, 2);
            return;
        case TKind::Sum:
            os << "sum " << p->var.str() << " . ";
            print_tparen(os, p->a, 1);
            return;
        case TKind::Scalar: {
            // Scale factors stay visually atomic so the data expression
            // cannot swallow the tuplix operand.
            bool bare = p->data->kind == DtKind::Var ||
                        (p->data->kind == DtKind::Const && p->data->value >= 0 &&
                         boost::multiprecision::denominator(p->data->value) == 1);
            if (bare) {
                print_data(os, p->data);
            } else {
                os << "(";
                print_data(os, p->data);
                os << ")";
            }
            os << " * ";
            print_tparen(os, p->a, 4);
            return;
        }
        case TKind::Clear:
            os << "clear{";
            print_attr_set(os, p->attrs);
            os << "}(";
            print_tuplix(os, p->a);
            os << ")";
            return;
        case TKind::Select:
            os << "select{";
            print_attr_set(os, p->attrs);
            os << "}(";
            print_tuplix(os, p->a);
            os << ")";
            return;
        case TKind::Encap:
            os << "encap{";
            print_attr_set(os, p->attrs);
            os << "}(";
            print_tuplix(os, p->a);
            os << ")";
            return;
        case TKind::Kirch:
            if (p->data->kind == DtKind::Const && p->data->value.is_zero()) {
                os << "K(";
            } else {
                os << "K[";
                print_data(os, p->data);
                os << "](";
            }
            print_tuplix(os, p->a);
            os << ")";
            return;
        case TKind::Zeta:
            os << "zeta{" << p->var.str() << "; ";
            print_attr_set(os, p->attrs);
            os << "}(";
            print_tuplix(os, p->a);
            os << ")";
            return;
        case TKind::Gamma:
            os << "def " << p->var.str() << " = ";
            print_lambda(os, p->fn);
            return;
        case TKind::SumFn:
            // The let form: a binder whose body opens with the matching
            // definition prints as definition-in-scope sugar.
            if (p->a->kind == TKind::Conj && p->a->a->kind == TKind::Gamma &&
                p->a->a->var == p->var) {
                os << "def " << p->var.str() << " = ";
                print_lambda(os, p->a->a->fn);
                os << " in ";
                print_tparen(os, p->a->b, 1);
                return;
            }
            os << "sumf " << p->var.str() << " . ";
            print_tparen(os, p->a, 1);
            return;
    }
}

inline std::string tuplix_str(const Tuplix& p) {
    std::ostringstream os;
    print_tuplix(os, p);
    return os.str();
}

}  // namespace tuplix
