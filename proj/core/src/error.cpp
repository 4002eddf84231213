#include "wnn/error.hpp"

#include <sstream>

namespace wnn {

namespace {

std::string budget_message(std::size_t layer, double norm, double budget) {
    std::ostringstream os;
    os.precision(12);
    os << "layer " << layer + 1 << " norm " << norm << " exceeds budget " << budget;
    return os.str();
}

}  // namespace

BudgetExceeded::BudgetExceeded(std::size_t layer, double norm, double budget)
    : PreconditionError(budget_message(layer, norm, budget)), layer_(layer), norm_(norm), budget_(budget) {}

DegenerateUnit::DegenerateUnit(std::size_t unit)
    : PreconditionError("unit " + std::to_string(unit) + " has zero weights and bias but a nonzero coefficient"),
      unit_(unit) {}

}  // namespace wnn
