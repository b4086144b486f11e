//! Representation theory of the symmetric group acting on pair variables.

pub mod character;
pub mod partition;
pub mod sab;
pub mod tableau;
pub mod young;

pub use character::{character, character_table, class_size, multiplicity};
pub use partition::{dominance_geq, partitions, partitions_lex_geq, Partition};
pub use tableau::{kostka, standard_tableaux, Tableau};
pub use young::{yor_matrices, YoungBasis};
pub use sab::{isotypic_projection, symmetry_adapted_basis, y_matrix, SabBasis, SabBlock, YMatrix};
