//! Length comparisons between two trees and scaling along group elements.

use alloc::vec::Vec;

use super::{length_function, LengthOracle, TestSet, TreePoint};
use crate::aut::FreeGroupAut;
use crate::class::{classes_of_length, ConjClass};
use crate::error::{Error, Result};
use crate::whitehead::is_primitive;
use crate::word::Basis;

#[derive(Clone, Debug, PartialEq)]
pub struct T2Row {
    pub class: ConjClass,
    pub first: f64,
    pub second: f64,
}

impl T2Row {
    pub fn ratio(&self) -> f64 {
        self.first.max(self.second) / self.class.len() as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct T2Report {
    pub rows: Vec<T2Row>,
    /// `min_α max(⟨T1,α⟩, ⟨T2,α⟩) / |α|`.
    pub delta: f64,
    pub delta_class: ConjClass,
    /// `max_α (⟨T1,α⟩ + ⟨T2,α⟩) / |α|`.
    pub ceiling: f64,
    /// Sup-norm distance between the two normalized test-set vectors.
    pub separation: f64,
    pub max_len: usize,
    pub primitive_only: bool,
}

/// Scans classes of length at most `max_len` (primitive ones unless
/// `all_classes`) and records both projectively normalized lengths.
pub fn t2_experiment(
    first: TreePoint<'_>,
    second: TreePoint<'_>,
    testset: &TestSet,
    max_len: usize,
    eps_eq: f64,
    all_classes: bool,
) -> Result<T2Report> {
    let l1 = length_function(first, testset)?;
    let l2 = length_function(second, testset)?;
    let separation = l1.distance(&l2);
    if separation <= eps_eq {
        return Err(Error::precondition(alloc::format!(
            "trees are projectively equal on the test set (distance {separation:.3e} <= {eps_eq:.1e})"
        )));
    }
    let basis = Basis::new(first.tree.rank())?;
    let mut rows = Vec::new();
    for len in 1..=max_len {
        for c in classes_of_length(&basis, len) {
            if !all_classes && !is_primitive(&c, &basis)? {
                continue;
            }
            let a = first.length(&c)?.value / l1.scale;
            let b = second.length(&c)?.value / l2.scale;
            rows.push(T2Row { class: c, first: a, second: b });
        }
    }
    let mut delta = f64::INFINITY;
    let mut delta_class = ConjClass::default();
    let mut ceiling = 0.0f64;
    for r in &rows {
        if r.ratio() < delta {
            delta = r.ratio();
            delta_class = r.class.clone();
        }
        ceiling = ceiling.max((r.first + r.second) / r.class.len() as f64);
    }
    Ok(T2Report { rows, delta, delta_class, ceiling, separation, max_len, primitive_only: !all_classes })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    pub word_len: usize,
    pub scale_p: f64,
    pub scale_q: f64,
}

impl ScalingRow {
    pub fn max_scale(&self) -> f64 {
        self.scale_p.max(self.scale_q)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
}

impl ScalingReport {
    /// Max-scale is nondecreasing along the rows, up to relative `slack`.
    pub fn nondecreasing(&self, slack: f64) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].max_scale() >= w[0].max_scale() * (1.0 - slack))
    }

    /// Indices where the max-scale falls below its running maximum at a
    /// strictly smaller word length.
    pub fn violations(&self, slack: f64) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, r) in self.rows.iter().enumerate() {
            let below = self.rows[..i]
                .iter()
                .any(|s| s.word_len < r.word_len && r.max_scale() < s.max_scale() * (1.0 - slack));
            if below {
                out.push(i);
            }
        }
        out
    }
}

/// Unnormalized test-set scales of `p·g` and `q·g` for each `(g, word length)`.
pub fn scaling_diagnostic(
    p: &dyn LengthOracle,
    q: &dyn LengthOracle,
    gs: &[(FreeGroupAut, usize)],
    testset: &TestSet,
) -> Result<ScalingReport> {
    let mut rows = Vec::with_capacity(gs.len());
    for (g, word_len) in gs {
        let sp = length_function(TreePoint::new(p, g), testset)?.scale;
        let sq = length_function(TreePoint::new(q, g), testset)?.scale;
        rows.push(ScalingRow { word_len: *word_len, scale_p: sp, scale_q: sq });
    }
    Ok(ScalingReport { rows })
}
