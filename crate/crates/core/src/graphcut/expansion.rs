use super::{
    check_dims, energy_unchecked, solve_binary, EnergyModel, Label, Labeling, PairTerm,
};
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct ExpansionResult {
    pub labeling: Labeling,
    /// Energy of the initial labeling followed by the energy after each sweep.
    pub sweep_energies: Vec<f64>,
    pub accepted_moves: usize,
}

impl ExpansionResult {
    pub fn energy(&self) -> f64 {
        *self.sweep_energies.last().expect("initial energy is always recorded")
    }
}

/// Alpha-expansion over every label of the model.
pub fn alpha_expansion(
    model: &EnergyModel,
    init: &Labeling,
    max_sweeps: usize,
) -> Result<ExpansionResult> {
    let labels: Vec<Label> = (0..model.num_labels()).map(|l| l as Label).collect();
    alpha_expansion_over(model, init, &labels, max_sweeps)
}

/// Alpha-expansion that only expands the labels in `labels`, in the given order.
///
/// Each move is one binary min-cut where `0` keeps a pixel's label and `1`
/// switches it to alpha. Pair terms violating submodularity for a move have
/// their quadratic part clipped to zero, which only raises the cost of the
/// (keep, switch) assignment; the resulting move never increases the true
/// energy, and it is accepted only when the true energy strictly drops.
pub fn alpha_expansion_over(
    model: &EnergyModel,
    init: &Labeling,
    labels: &[Label],
    max_sweeps: usize,
) -> Result<ExpansionResult> {
    check_dims(model, init)?;
    let edges = model.edges();
    let n = model.num_pixels();
    let mut current: Vec<Label> = init.data().to_vec();
    let mut energy = energy_unchecked(model, &current, &edges);
    let mut sweep_energies = vec![energy];
    let mut accepted_moves = 0;

    let mut cost0 = vec![0.0; n];
    let mut cost1 = vec![0.0; n];
    let mut pairs = Vec::with_capacity(if model.has_pairwise() { edges.len() } else { 0 });

    for _ in 0..max_sweeps {
        let mut improved = false;
        for &alpha in labels {
            for p in 0..n {
                cost0[p] = model.unary(p, current[p]);
                cost1[p] = model.unary(p, alpha);
            }
            pairs.clear();
            if model.has_pairwise() {
                for (e, &(p, q)) in edges.iter().enumerate() {
                    let (lp, lq) = (current[p], current[q]);
                    let a = model.pairwise(e, lp, lq);
                    let mut b = model.pairwise(e, lp, alpha);
                    let c = model.pairwise(e, alpha, lq);
                    let d = model.pairwise(e, alpha, alpha);
                    if a + d > b + c {
                        b = a + d - c;
                    }
                    pairs.push(PairTerm { p, q, a, b, c, d });
                }
            }
            let switch = solve_binary(&cost0, &cost1, &pairs);
            if !switch.iter().any(|s| *s) {
                continue;
            }
            let candidate: Vec<Label> = current
                .iter()
                .zip(&switch)
                .map(|(&l, &s)| if s { alpha } else { l })
                .collect();
            let candidate_energy = energy_unchecked(model, &candidate, &edges);
            let tol = 1e-12 * energy.abs().max(1.0);
            if candidate_energy < energy - tol {
                current = candidate;
                energy = candidate_energy;
                accepted_moves += 1;
                improved = true;
            }
        }
        sweep_energies.push(energy);
        if !improved {
            break;
        }
    }

    Ok(ExpansionResult {
        labeling: Labeling::new(model.width(), model.height(), current)?,
        sweep_energies,
        accepted_moves,
    })
}
