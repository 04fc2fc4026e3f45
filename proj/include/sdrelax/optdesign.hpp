#pragma once

#include "sdrelax/cell.hpp"
#include "sdrelax/densities.hpp"
#include "sdrelax/fields.hpp"

#include <functional>
#include <vector>

namespace sdrelax {

/// Interface between two face-adjacent cells of different phase. The normal
/// points from `lower_cell` into `upper_cell` along the grid axis.
struct PhaseInterface {
    int lower_cell = 0;
    int upper_cell = 0;
    int axis = 0;
    Vec normal;
    double area = 0.0;
    Vec centroid;  // physical
};

/// Piecewise-constant phase indicator chi in {0, 1}, one value per cell.
class PhaseField {
public:
    PhaseField(GridMesh mesh, std::vector<int> values);

    static PhaseField constant(const GridMesh &mesh, int value);
    /// 1 on the cells whose centre has coordinate >= `at` along `axis`.
    static PhaseField half_space(const GridMesh &mesh, int axis, double at = 0.0);

    const GridMesh &mesh() const { return mesh_; }
    const std::vector<int> &values() const { return values_; }
    int value(int cell) const { return values_[cell]; }
    int value_at(const Vec &x) const { return values_[mesh_.locate(x)]; }
    const std::vector<PhaseInterface> &interfaces() const { return interfaces_; }

private:
    GridMesh mesh_;
    std::vector<int> values_;
    std::vector<PhaseInterface> interfaces_;
};

/// Interior interface area |D chi|(Omega).
double perimeter(const PhaseField &chi);

/// Bulk energy with phase-selected W^i, Psi^i_1 on jumps inside phase i,
/// Psi_2 where a jump lies on a phase interface, plus the perimeter.
double design_energy(const PhaseField &chi, const PiecewiseField &u, const DesignDensitySet &ds);

/// Bulk cell problem of phase i.
CellSolution estimate_H_design(int phase, const Mat &A, const Mat &B, const DesignDensitySet &ds,
                               const OptimizerBudget &budget = {});

/// chi = a, u = c on {x.nu > 0}; chi = b, u = d on {x.nu <= 0}.
struct DesignBoundaryData {
    int a = 0, b = 0;
    Vec c, d;
    Vec nu;

    void validate() const;
};

/// Upper bound on the interface cell problem over layered competitors: chi
/// and u piecewise constant between planes normal to nu, at most three
/// layers each, with every interleaving and coincidence of the planes.
CellSolution estimate_h_design(const DesignBoundaryData &data, const DesignDensitySet &ds,
                               const OptimizerBudget &budget = {});

struct DesignRelaxedTables {
    std::function<double(int, const Mat &, const Mat &)> H;
    std::function<double(int, int, const Vec &, const Vec &, const Vec &)> h;
};

/// sum over cells of H(chi, grad g, G) * volume + integral over the union of
/// the phase interfaces and the jump set of g of h(chi+, chi-, g+, g-, nu).
double relaxed_design_energy(const PhaseField &chi, const StructuredDeformation &sd, const DesignRelaxedTables &tables);

/// Tables backed by the cell solvers.
DesignRelaxedTables estimated_design_tables(const DesignDensitySet &ds, const OptimizerBudget &budget = {});

}  // namespace sdrelax
