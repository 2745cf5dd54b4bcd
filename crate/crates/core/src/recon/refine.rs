//! MRF clean-up of classification maps.
//!
//! The data term charges `data_cost` for moving a pixel away from its observed
//! label. The default smoothness term is Potts: `smooth_cost` for every
//! 4-neighbor pair with different new labels. With `literal_smoothness` the
//! pair is only charged when the observed labels of the pair agree, a form
//! under which the observed map is always a zero-energy optimum; it is kept
//! for auditing.

use crate::error::Result;
use crate::graphcut::{
    alpha_expansion, grid_edges, min_cut_binary, EnergyModel, Label, Pairwise,
};
use crate::raster::{BinaryMask, LabelMap, Raster};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineParams {
    pub data_cost: f64,
    pub smooth_cost: f64,
    pub literal_smoothness: bool,
    pub max_sweeps: usize,
}

impl Default for RefineParams {
    fn default() -> Self {
        RefineParams {
            data_cost: 10.0,
            smooth_cost: 20.0,
            literal_smoothness: false,
            max_sweeps: 20,
        }
    }
}

/// Energy model of the refinement for an observed labeling.
pub fn refinement_model(
    observed: &Raster<Label>,
    num_labels: usize,
    params: &RefineParams,
) -> Result<EnergyModel> {
    let (w, h) = observed.dims();
    let mut unary = vec![params.data_cost; w * h * num_labels];
    for (p, &l) in observed.data().iter().enumerate() {
        unary[p * num_labels + l as usize] = 0.0;
    }
    let pairwise = if params.literal_smoothness {
        let obs = observed.data();
        Pairwise::EdgePotts(
            grid_edges(w, h)
                .into_iter()
                .map(|(p, q)| {
                    if obs[p] == obs[q] {
                        params.smooth_cost
                    } else {
                        0.0
                    }
                })
                .collect(),
        )
    } else {
        Pairwise::Potts(params.smooth_cost)
    };
    EnergyModel::new(w, h, num_labels, unary, pairwise)
}

pub fn refine_binary(mask: &BinaryMask, params: &RefineParams) -> Result<BinaryMask> {
    let observed = mask.raster().map(Label::from);
    let model = refinement_model(&observed, 2, params)?;
    let refined = min_cut_binary(&model)?;
    Ok(BinaryMask::from_raster(refined.map(|l| l == 1)))
}

/// Multi-label refinement by alpha-expansion started from the input map.
/// Two-label maps go through the exact binary solver.
pub fn refine_multilabel(map: &LabelMap, params: &RefineParams) -> Result<LabelMap> {
    let num_labels = map.num_labels() as usize;
    let model = refinement_model(map.raster(), num_labels, params)?;
    let refined = if num_labels == 2 {
        min_cut_binary(&model)?
    } else {
        alpha_expansion(&model, map.raster(), params.max_sweeps)?.labeling
    };
    LabelMap::from_raster(refined, map.num_labels())
}
