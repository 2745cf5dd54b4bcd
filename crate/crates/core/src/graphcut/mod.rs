//! Pairwise Markov random field energies on a 4-connected pixel grid and
//! their minimization by graph cuts.
//!
//! Binary models with submodular pairwise terms are solved exactly by one
//! minimum cut ([`min_cut_binary`]); multi-label models are approximated by
//! alpha-expansion ([`alpha_expansion`]), one minimum cut per move.

mod expansion;
mod maxflow;

pub use expansion::{alpha_expansion, alpha_expansion_over, ExpansionResult};

use crate::error::{Error, Result};
use crate::raster::Raster;
use maxflow::FlowGraph;

pub type Label = u8;

/// A labeling of every pixel; dimensions must match the model it is scored by.
pub type Labeling = Raster<Label>;

/// Pairwise cost family. Edges are enumerated row-major with each pixel's
/// right neighbor before its down neighbor (see [`EnergyModel::edges`]).
#[derive(Debug, Clone, PartialEq)]
pub enum Pairwise {
    Zero,
    /// Constant cost whenever the two labels differ.
    Potts(f64),
    /// Per-edge cost whenever the two labels differ.
    EdgePotts(Vec<f64>),
    /// `differ` whenever the labels differ, otherwise `same[edge * L + label]`.
    SameLabel { differ: f64, same: Vec<f64> },
    /// Dense per-edge `L x L` table indexed `[edge][l_p][l_q]`.
    Table(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyModel {
    width: usize,
    height: usize,
    num_labels: usize,
    unary: Vec<f64>,
    pairwise: Pairwise,
}

impl EnergyModel {
    /// `unary` is pixel-major: `unary[p * num_labels + l]`.
    pub fn new(
        width: usize,
        height: usize,
        num_labels: usize,
        unary: Vec<f64>,
        pairwise: Pairwise,
    ) -> Result<Self> {
        if num_labels == 0 || num_labels > Label::MAX as usize + 1 {
            return Err(Error::InvalidValue(format!(
                "label count {num_labels} out of range"
            )));
        }
        let pixels = width * height;
        if unary.len() != pixels * num_labels {
            return Err(Error::LengthMismatch {
                expected: pixels * num_labels,
                found: unary.len(),
            });
        }
        let edges = edge_count(width, height);
        let expected = match &pairwise {
            Pairwise::Zero | Pairwise::Potts(_) => None,
            Pairwise::EdgePotts(c) => Some((c.len(), edges)),
            Pairwise::SameLabel { same, .. } => Some((same.len(), edges * num_labels)),
            Pairwise::Table(t) => Some((t.len(), edges * num_labels * num_labels)),
        };
        if let Some((found, expected)) = expected {
            if found != expected {
                return Err(Error::LengthMismatch { expected, found });
            }
        }
        let costs: Box<dyn Iterator<Item = &f64>> = match &pairwise {
            Pairwise::Zero => Box::new(std::iter::empty()),
            Pairwise::Potts(c) => Box::new(std::iter::once(c)),
            Pairwise::EdgePotts(c) | Pairwise::Table(c) => Box::new(c.iter()),
            Pairwise::SameLabel { differ, same } => {
                Box::new(std::iter::once(differ).chain(same.iter()))
            }
        };
        if let Some(c) = unary.iter().chain(costs).find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::InvalidValue(format!(
                "energy costs must be finite and nonnegative, found {c}"
            )));
        }
        Ok(EnergyModel {
            width,
            height,
            num_labels,
            unary,
            pairwise,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn num_labels(&self) -> usize {
        self.num_labels
    }

    pub fn num_pixels(&self) -> usize {
        self.width * self.height
    }

    #[inline]
    pub fn unary(&self, p: usize, l: Label) -> f64 {
        self.unary[p * self.num_labels + l as usize]
    }

    #[inline]
    pub fn pairwise(&self, edge: usize, lp: Label, lq: Label) -> f64 {
        match &self.pairwise {
            Pairwise::Zero => 0.0,
            Pairwise::Potts(c) => {
                if lp != lq {
                    *c
                } else {
                    0.0
                }
            }
            Pairwise::EdgePotts(c) => {
                if lp != lq {
                    c[edge]
                } else {
                    0.0
                }
            }
            Pairwise::SameLabel { differ, same } => {
                if lp != lq {
                    *differ
                } else {
                    same[edge * self.num_labels + lp as usize]
                }
            }
            Pairwise::Table(t) => {
                let l = self.num_labels;
                t[(edge * l + lp as usize) * l + lq as usize]
            }
        }
    }

    pub fn has_pairwise(&self) -> bool {
        !matches!(self.pairwise, Pairwise::Zero)
    }

    /// 4-neighbor pairs `(p, q)` in canonical edge order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        grid_edges(self.width, self.height)
    }
}

pub(crate) fn edge_count(width: usize, height: usize) -> usize {
    (width.saturating_sub(1)) * height + width * height.saturating_sub(1)
}

/// Row-major 4-neighbor pairs, right neighbor first.
pub fn grid_edges(width: usize, height: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::with_capacity(edge_count(width, height));
    for y in 0..height {
        for x in 0..width {
            let p = y * width + x;
            if x + 1 < width {
                edges.push((p, p + 1));
            }
            if y + 1 < height {
                edges.push((p, p + width));
            }
        }
    }
    edges
}

fn check_dims(model: &EnergyModel, f: &Labeling) -> Result<()> {
    f.ensure_dims(model.dims())
}

/// Sum of unary costs plus pairwise costs over all 4-neighbor pairs.
pub fn total_energy(model: &EnergyModel, f: &Labeling) -> Result<f64> {
    check_dims(model, f)?;
    Ok(energy_unchecked(model, f.data(), &model.edges()))
}

pub(crate) fn energy_unchecked(model: &EnergyModel, f: &[Label], edges: &[(usize, usize)]) -> f64 {
    let unary: f64 = f.iter().enumerate().map(|(p, &l)| model.unary(p, l)).sum();
    let pairwise: f64 = if model.has_pairwise() {
        edges
            .iter()
            .enumerate()
            .map(|(e, &(p, q))| model.pairwise(e, f[p], f[q]))
            .sum()
    } else {
        0.0
    };
    unary + pairwise
}

/// Two-variable term with costs `a = E(0,0)`, `b = E(0,1)`, `c = E(1,0)`, `d = E(1,1)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PairTerm {
    pub p: usize,
    pub q: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Exact minimizer of a binary energy whose pair terms are all submodular.
/// Returns `true` for variables set to 1; ties resolve towards 0.
pub(crate) fn solve_binary(cost0: &[f64], cost1: &[f64], pairs: &[PairTerm]) -> Vec<bool> {
    let n = cost0.len();
    let mut c0 = cost0.to_vec();
    let mut c1 = cost1.to_vec();
    let add_linear = |p: usize, coef: f64, c0: &mut [f64], c1: &mut [f64]| {
        if coef > 0.0 {
            c1[p] += coef;
        } else {
            c0[p] -= coef;
        }
    };
    // E = a + (c - a) x_p + (d - c) x_q + (b + c - a - d)(1 - x_p) x_q
    for t in pairs {
        add_linear(t.p, t.c - t.a, &mut c0, &mut c1);
        add_linear(t.q, t.d - t.c, &mut c0, &mut c1);
    }

    let (s, sink) = (n, n + 1);
    let mut graph = FlowGraph::new(n + 2);
    for p in 0..n {
        let m = c0[p].min(c1[p]);
        graph.add_edge(s, p, c1[p] - m, 0.0);
        graph.add_edge(p, sink, c0[p] - m, 0.0);
    }
    for t in pairs {
        let k = (t.b + t.c - t.a - t.d).max(0.0);
        graph.add_edge(t.p, t.q, k, 0.0);
    }
    graph.max_flow(s, sink);
    let mut side = graph.reaches_sink(sink);
    side.truncate(n);
    side
}

/// Exact global minimizer of a two-label model.
///
/// Every 4-neighbor pair is checked for submodularity,
/// `E(0,0) + E(1,1) <= E(0,1) + E(1,0)`, before solving.
pub fn min_cut_binary(model: &EnergyModel) -> Result<Labeling> {
    if model.num_labels() != 2 {
        return Err(Error::InvalidValue(format!(
            "binary min-cut needs 2 labels, model has {}",
            model.num_labels()
        )));
    }
    let edges = model.edges();
    let mut pairs = Vec::new();
    if model.has_pairwise() {
        pairs.reserve(edges.len());
        for (e, &(p, q)) in edges.iter().enumerate() {
            let t = PairTerm {
                p,
                q,
                a: model.pairwise(e, 0, 0),
                b: model.pairwise(e, 0, 1),
                c: model.pairwise(e, 1, 0),
                d: model.pairwise(e, 1, 1),
            };
            let tol = 1e-12 * (t.a + t.b + t.c + t.d).max(1.0);
            if t.a + t.d > t.b + t.c + tol {
                return Err(Error::NonSubmodular { p, q });
            }
            pairs.push(t);
        }
    }
    let n = model.num_pixels();
    let cost0: Vec<f64> = (0..n).map(|p| model.unary(p, 0)).collect();
    let cost1: Vec<f64> = (0..n).map(|p| model.unary(p, 1)).collect();
    let ones = solve_binary(&cost0, &cost1, &pairs);
    Raster::new(
        model.width(),
        model.height(),
        ones.into_iter().map(Label::from).collect(),
    )
}
