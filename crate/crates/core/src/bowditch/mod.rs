//! Annulus systems, chain-counted crossratios and the graphs built from
//! them, for finite trees and for the action of `Out(F_n)` on translates of
//! stable trees.

mod axioms;
mod experiments;
mod graph;
mod out;
mod system;
mod tree;

pub use axioms::{
    axiom_scan, binomial, crossratio_axioms, partitions, rho, subsets, triangle_check, AxiomScan,
    CrossratioAxioms, InequalityReport,
};
pub use experiments::{
    act_triple, locate_triple, orbit_diameter, translation_length, wpd_census, Metric, OrbitReport,
    OutTriple, TranslationReport, WpdRow,
};
pub use graph::{
    build_graph, distance_correlation, estimate_delta, slope, spearman, BowditchGraph,
    DeltaEstimate, RhoTable,
};
pub use out::{Membership, OutInstance, OutParams, OutPoint, SampleEntry, Source};
pub use system::{Annulus, AnnulusLabel, AnnulusSystem, Crossratio, Profile, CYCLE_MESSAGE};
pub use tree::TreeModel;

#[cfg(test)]
mod tests;
