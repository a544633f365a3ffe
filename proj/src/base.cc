#include "casp/base.hh"

#include <algorithm>

namespace Casp {

auto Nogood::make(std::vector<Literal> lits) -> std::optional<Nogood> {
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (std::size_t i = 1; i < lits.size(); ++i) {
        if (lits[i - 1].atom() == lits[i].atom()) {
            return std::nullopt;
        }
    }
    Nogood ng;
    ng.lits_ = std::move(lits);
    return ng;
}

auto Nogood::contains(Literal lit) const -> bool { return std::binary_search(lits_.begin(), lits_.end(), lit); }

ParseError::ParseError(std::string const &msg, int line, int column)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg), line_{line}, column_{column} {}

} // namespace Casp
