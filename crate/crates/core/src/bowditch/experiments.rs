//! Orbit experiments in the Out instance: translation, bounded orbits, WPD.

use alloc::vec::Vec;

use super::axioms::rho;
use super::graph::{build_graph, slope, RhoTable};
use super::out::{OutInstance, OutPoint, Source};
use crate::aut::{enumerate_ball_with_depth, FreeGroupAut};
use crate::class::ConjClass;
use crate::error::{Error, Result};
use crate::whitehead::is_primitive;
use crate::word::Basis;

/// A triple of points of the action.
pub type OutTriple = [OutPoint; 3];

pub fn act_triple(x: &OutTriple, h: &FreeGroupAut) -> OutTriple {
    [x[0].act(h), x[1].act(h), x[2].act(h)]
}

pub fn locate_triple(inst: &mut OutInstance, x: &OutTriple) -> Result<[usize; 3]> {
    let ids = [inst.locate(&x[0])?, inst.locate(&x[1])?, inst.locate(&x[2])?];
    if ids[0] == ids[1] || ids[0] == ids[2] || ids[1] == ids[2] {
        return Err(Error::precondition(alloc::format!(
            "triple collapses to points {ids:?} of the sample"
        )));
    }
    Ok(ids)
}

/// Which distance a translation estimate used.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Graph,
    /// Some orbit triple fell outside the component of `x`.
    Rho,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TranslationReport {
    /// `(N, ρ(x, x·f^N), graph distance if connected)`.
    pub rows: Vec<(usize, u32, Option<u32>)>,
    pub r: u32,
    pub metric: Metric,
    pub slope: f64,
    /// Orbit points that are not sample points.
    pub off_sample: usize,
}

/// Slope of `N ↦ d(x, x·f^N)`, `N = 1..=nmax`, in the graph on the core
/// triples plus the orbit.
pub fn translation_length(
    inst: &mut OutInstance,
    x: &OutTriple,
    f: &FreeGroupAut,
    nmax: usize,
    core_depth: usize,
    r: Option<u32>,
) -> Result<TranslationReport> {
    let x0 = locate_triple(inst, x)?;
    let mut orbit = Vec::with_capacity(nmax);
    let mut fpow = FreeGroupAut::identity(f.rank());
    for _ in 0..nmax {
        fpow = fpow.compose(f);
        orbit.push(locate_triple(inst, &act_triple(x, &fpow))?);
    }
    let off_sample = orbit.iter().flatten().filter(|&&id| !inst.in_sample(id)).count();
    let core = inst.core_triples(core_depth);
    let r = match r {
        Some(r) => r,
        None => RhoTable::new(inst.engine(), core.clone())?.connectivity_threshold() + 1,
    };
    let mut vertices = core;
    let mut extra = Vec::with_capacity(nmax + 1);
    for t in core::iter::once(&x0).chain(&orbit) {
        let mut s = *t;
        s.sort_unstable();
        match vertices.iter().position(|v| *v == s) {
            Some(i) => extra.push(i),
            None => {
                vertices.push(s);
                extra.push(vertices.len() - 1);
            }
        }
    }
    let table = RhoTable::new(inst.engine(), vertices)?;
    let g = build_graph(&table, r);
    let dist = g.distances_from(extra[0]);
    let mut rows = Vec::with_capacity(nmax);
    let mut metric = Metric::Graph;
    for (n, &v) in extra.iter().enumerate().skip(1) {
        let d = dist[v];
        let gd = (d != u32::MAX).then_some(d);
        if gd.is_none() {
            metric = Metric::Rho;
        }
        rows.push((n, table.get(extra[0], v), gd));
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.0 as f64).collect();
    let ys: Vec<f64> = rows
        .iter()
        .map(|row| match metric {
            Metric::Graph => f64::from(row.2.unwrap_or(0)),
            Metric::Rho => f64::from(row.1),
        })
        .collect();
    Ok(TranslationReport { slope: slope(&xs, &ys), rows, r, metric, off_sample })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitReport {
    pub orbit_size: usize,
    pub diameter: u32,
    /// Largest `(p_i p_j | S)` over the pairs of `x`.
    pub n: u32,
    pub holds: bool,
    /// `(p_i p_j | S)` for the three pairs of `x`.
    pub marker_values: [u32; 3],
    /// Some pair has `(p_i p_j | S)` at most the diameter.
    pub lower_bound_ok: bool,
}

impl OrbitReport {
    pub fn bound(&self) -> u32 {
        2 * self.n + 2
    }
}

/// ρ-diameter of `{x·g}` over the ball of `stab_gens`, against `2N + 2`
/// with `N` measured from the marker tree `marker`.
pub fn orbit_diameter(
    inst: &mut OutInstance,
    stab_gens: &[FreeGroupAut],
    x: &OutTriple,
    radius: usize,
    gamma: &ConjClass,
    marker: Source,
) -> Result<OrbitReport> {
    let rank = x[0].g.rank();
    let basis = Basis::new(rank)?;
    if gamma.is_trivial() || !is_primitive(gamma, &basis)? {
        return Err(Error::input("the marker class must be primitive"));
    }
    for (i, g) in stab_gens.iter().enumerate() {
        if g.apply_class(gamma) != *gamma {
            return Err(Error::input(alloc::format!("generator {i} moves the marker class")));
        }
    }
    let ball = if stab_gens.is_empty() {
        alloc::vec![(FreeGroupAut::identity(rank), 0)]
    } else {
        enumerate_ball_with_depth(stab_gens, radius)?
    };
    let x0 = locate_triple(inst, x)?;
    let mut orbit: Vec<[usize; 3]> = Vec::with_capacity(ball.len());
    for (g, _) in &ball {
        let t = locate_triple(inst, &act_triple(x, g))?;
        let mut s = t;
        s.sort_unstable();
        if !orbit.iter().any(|o| {
            let mut so = *o;
            so.sort_unstable();
            so == s
        }) {
            orbit.push(t);
        }
    }
    let mut diameter = 0;
    for i in 0..orbit.len() {
        for j in i + 1..orbit.len() {
            diameter = diameter.max(rho(inst.engine(), orbit[i], orbit[j]));
        }
    }
    let s = inst.locate(&OutPoint { source: marker, g: FreeGroupAut::identity(rank) })?;
    let cr = inst.engine();
    let marker_values = [
        cr.value(&[x0[0], x0[1]], &[s]),
        cr.value(&[x0[0], x0[2]], &[s]),
        cr.value(&[x0[1], x0[2]], &[s]),
    ];
    let n = marker_values.iter().copied().max().unwrap_or(0);
    let low = marker_values.iter().copied().min().unwrap_or(0);
    Ok(OrbitReport {
        orbit_size: orbit.len(),
        diameter,
        n,
        holds: diameter <= 2 * n + 2,
        marker_values,
        lower_bound_ok: diameter >= low,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WpdRow {
    pub n: usize,
    pub count: usize,
    /// Indices into the ball of the elements counted.
    pub members: Vec<usize>,
}

/// For each `N`, the `g` in `ball` with `ρ(x, x·g) <= c` and
/// `ρ(x·f^N, x·f^N·g) <= c`.
pub fn wpd_census(
    inst: &mut OutInstance,
    f: &FreeGroupAut,
    x: &OutTriple,
    c: u32,
    ns: &[usize],
    ball: &[(FreeGroupAut, usize)],
) -> Result<Vec<WpdRow>> {
    let x0 = locate_triple(inst, x)?;
    let mut near = Vec::with_capacity(ball.len());
    for (g, _) in ball {
        let xg = locate_triple(inst, &act_triple(x, g))?;
        near.push(rho(inst.engine(), x0, xg) <= c);
    }
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let fpow = f.pow(n as i64)?;
        let xn = act_triple(x, &fpow);
        let xn_ids = locate_triple(inst, &xn)?;
        let mut members = Vec::new();
        for (i, (g, _)) in ball.iter().enumerate() {
            if !near[i] {
                continue;
            }
            let xng = locate_triple(inst, &act_triple(&xn, g))?;
            if rho(inst.engine(), xn_ids, xng) <= c {
                members.push(i);
            }
        }
        rows.push(WpdRow { n, count: members.len(), members });
    }
    Ok(rows)
}
