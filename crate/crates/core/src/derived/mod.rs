//! Structures computed from a scheme: gaps, almost disjoint families, the
//! Countryman order, tree nodes, oscillations and colorings. Infinite
//! objects are returned as finite fragments together with the window in
//! which they are complete.

pub mod coloring;
pub mod countryman;
pub mod gap;
pub mod luzin;
pub mod osc;
pub mod sspace;
pub mod tree;

pub use coloring::{
    bounded_color_c, coherent_tree_eval, color_o, color_o_star, entangled_eval, entangled_vector, o_star_with_index,
    partition_intervals, partition_lookup, BoundedColor, FiniteMap, OStarValue, PartitionInterval, O_STAR_DEFAULT,
};
pub use countryman::{chain_class, countryman_cmp, CountrymanCase, CountrymanOrder, CountrymanResult};
pub use gap::{gap_pair_data, hausdorff_gap, GapFragment, GapPairData};
pub use luzin::{
    coherent_family_eval, jones_separator, luzin_family, luzin_representation, FinitePoset, LuzinBlock, LuzinFragment,
    RepSet, SeparatorFragment,
};
pub use osc::{osc, osc_sets, OscRecord};
pub use sspace::{s_space_sets, SSpace, SSpaceSets};
pub use tree::{aronszajn_classify, aronszajn_node, TreeNode};
