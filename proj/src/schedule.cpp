#include "cfm/schedule.hpp"

#include <stdexcept>

#include "cfm/error.hpp"

namespace cfm {

const char* to_string(ScheduleKind kind) noexcept {
    switch (kind) {
        case ScheduleKind::Stationary: return "stationary";
        case ScheduleKind::Periodic: return "periodic";
        case ScheduleKind::RegimeSwitching: return "regime-switching";
        case ScheduleKind::Trace: return "trace";
        case ScheduleKind::IdentityPadded: return "identity-padded";
        case ScheduleKind::Identity: return "identity";
    }
    return "?";
}

Schedule::Schedule(ScheduleKind kind, std::size_t n) : kind_(kind), n_(n) {
    if (n == 0) throw std::invalid_argument("schedule needs n >= 1");
}

Schedule::Schedule(ScheduleKind kind, std::vector<MatrixPtr> steps) : kind_(kind), n_(0) {
    if (steps.empty()) throw std::invalid_argument("cannot infer n from an empty schedule");
    n_ = steps.front()->n();
    steps_.reserve(steps.size());
    for (auto& m : steps) push_back(std::move(m));
}

Schedule Schedule::identity(std::size_t n, std::size_t steps) {
    Schedule s(ScheduleKind::Identity, n);
    auto id = std::make_shared<const CirculationMatrix>(CirculationMatrix::identity(n));
    s.steps_.assign(steps, id);
    return s;
}

Schedule Schedule::stationary(MatrixPtr matrix, std::size_t steps) {
    Schedule s(ScheduleKind::Stationary, matrix->n());
    s.push_back(matrix);
    s.steps_.resize(steps, matrix);
    return s;
}

void Schedule::push_back(MatrixPtr matrix) {
    if (!matrix) throw std::invalid_argument("null matrix in schedule");
    if (matrix->n() != n_)
        throw DimensionError("schedule step is " + std::to_string(matrix->n()) + "x" + std::to_string(matrix->n()) +
                             ", schedule dimension is " + std::to_string(n_));
    if (!matrix->is_valid()) throw ValidationError("schedule step is invalid: " + matrix->invalid_reason());
    steps_.push_back(std::move(matrix));
}

const CirculationMatrix& Schedule::at(std::size_t tau) const {
    if (tau >= steps_.size())
        throw ScheduleExhausted("schedule has " + std::to_string(steps_.size()) + " steps, step " +
                                std::to_string(tau) + " requested");
    return *steps_[tau];
}

std::vector<const CirculationMatrix*> Schedule::factors() const {
    std::vector<const CirculationMatrix*> out;
    out.reserve(steps_.size());
    for (const auto& m : steps_) out.push_back(m.get());
    return out;
}

}  // namespace cfm
