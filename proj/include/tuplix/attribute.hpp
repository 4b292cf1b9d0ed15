#pragma once

#include <compare>
#include <string>

#include "tuplix/name.hpp"

namespace tuplix {

/// Channel attributes. The signed variants +a / -a are attributes in their
/// own right, distinct from the flat a; ordering is name-major so signed
/// copies sort next to their flat original.
enum class Sign { Flat, Plus, Minus };

struct Attribute {
    Name name;
    Sign sign = Sign::Flat;

    Attribute() = default;
    Attribute(Name n, Sign s = Sign::Flat) : name(std::move(n)), sign(s) {}
    Attribute(const char* n) : name(n) {}

    auto operator<=>(const Attribute&) const = default;

    std::string str() const {
        switch (sign) {
            case Sign::Plus: return "+" + name.str();
            case Sign::Minus: return "-" + name.str();
            default: return name.str();
        }
    }
};

}  // namespace tuplix
