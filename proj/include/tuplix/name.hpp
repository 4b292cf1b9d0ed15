#pragma once

#include <compare>
#include <optional>
#include <string>

namespace tuplix {

/// Identifier with an optional integer index, so the family member "a_3"
/// compares and prints as family "a", index 3. Used for data variables,
/// attribute names, unit names and function variables alike.
struct Name {
    std::string family;
    std::optional<long long> index;

    Name() = default;
    Name(std::string f) : family(std::move(f)) {}
    Name(std::string f, long long i) : family(std::move(f)), index(i) {}
    Name(const char* f) : family(f) {}

    auto operator<=>(const Name&) const = default;

    std::string str() const {
        if (index) return family + "_" + std::to_string(*index);
        return family;
    }
};

}  // namespace tuplix
