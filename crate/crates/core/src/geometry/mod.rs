//! Intrinsic geometry kernel: everything derived from squared edge lengths.

mod dual;
mod simplex;

pub(crate) use dual::tetrahedron_of;
pub use dual::{dual_edge_length, dual_geometry, DualGeometry};
pub use simplex::{
    circumradius, cm_volume, dihedral_angle, face_segment, hybrid_volume_general, Tetrahedron, Triangle,
};
