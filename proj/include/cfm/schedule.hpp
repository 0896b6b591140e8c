#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cfm/circulation_matrix.hpp"

namespace cfm {

enum class ScheduleKind { Stationary, Periodic, RegimeSwitching, Trace, IdentityPadded, Identity };

const char* to_string(ScheduleKind kind) noexcept;

/// The ordered factors F_0, F_1, ... of an in-homogeneous product.
///
/// Matrices are shared, so a stationary schedule of 10^4 steps holds a single
/// matrix. Every factor is checked for dimension and validity on insertion.
class Schedule {
public:
    using MatrixPtr = std::shared_ptr<const CirculationMatrix>;

    Schedule(ScheduleKind kind, std::size_t n);
    Schedule(ScheduleKind kind, std::vector<MatrixPtr> steps);

    /// T identity steps sharing one identity matrix.
    static Schedule identity(std::size_t n, std::size_t steps);
    static Schedule stationary(MatrixPtr matrix, std::size_t steps);

    void push_back(MatrixPtr matrix);

    ScheduleKind kind() const noexcept { return kind_; }
    std::size_t n() const noexcept { return n_; }
    std::size_t size() const noexcept { return steps_.size(); }
    bool empty() const noexcept { return steps_.empty(); }
    const CirculationMatrix& at(std::size_t tau) const;
    const MatrixPtr& ptr(std::size_t tau) const { return steps_.at(tau); }

    /// Raw pointers to the factors in chronological order, for matrix_product.
    std::vector<const CirculationMatrix*> factors() const;

private:
    ScheduleKind kind_;
    std::size_t n_;
    std::vector<MatrixPtr> steps_;
};

}  // namespace cfm
