//! Symmetric closed-form models and the lattices they describe.

mod cylinder;
mod lattice;
mod pcell;

pub use cylinder::{CylinderModel, CylinderRates, PRISMS_PER_A_EDGE, PRISMS_PER_S_EDGE};
pub use lattice::{
    generate_cylinder_lattice, generate_flat_torus, generate_jittered_flat_torus, generate_pcell_lattice, icosahedron,
    CylinderLattice, PrismComplex, PrismEdgeKind,
};
pub use pcell::{pcell_deviation_table, DeviationRow, DeviationTable, PCellModel};
