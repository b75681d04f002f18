//! Random-feature least-squares fitter.
//!
//! Hidden units are drawn from the key; only the output weights are solved
//! for. Unit 0 is a saturated offset unit (`w = 0`, `b = slope_max`) so that
//! constant targets are representable. The remaining units are sigmoid steps
//! with slope magnitude in `[slope_min, slope_max]` and random sign, centred
//! at points spread over the cube (stratified along the axis when `n = 1`).

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{sup_error, Activation, Grid, ReferenceNetwork, TargetFunction};
use crate::error::{Error, Result};
use crate::rng::{Role, StreamKey};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub slope_min: f64,
    pub slope_max: f64,
    /// Ridge term added to the diagonal of `HᵀH` (except the offset unit).
    pub ridge: f64,
    pub activation: Activation,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            slope_min: 8.0,
            slope_max: 16.0,
            ridge: 1e-4,
            activation: Activation::Sigmoid,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FitOutcome {
    pub network: ReferenceNetwork,
    /// Max |G − f| over the fitting grid.
    pub sup_error: f64,
    /// Ridge actually used; larger than requested if the system was singular.
    pub ridge: f64,
    pub options: FitOptions,
}

pub fn fit_reference(
    f: &TargetFunction,
    width: usize,
    grid: &Grid,
    key: &StreamKey,
) -> Result<FitOutcome> {
    fit_reference_with(f, width, grid, key, &FitOptions::default())
}

pub fn fit_reference_with(
    f: &TargetFunction,
    width: usize,
    grid: &Grid,
    key: &StreamKey,
    options: &FitOptions,
) -> Result<FitOutcome> {
    if width == 0 {
        return Err(Error::InvalidParameter(
            "hidden width N must be at least 1".into(),
        ));
    }
    if grid.is_empty() {
        return Err(Error::InvalidParameter("fitting grid is empty".into()));
    }
    if grid.dim() != f.arity() {
        return Err(Error::DimensionMismatch {
            expected: f.arity(),
            found: grid.dim(),
        });
    }
    if !(options.slope_min > 0.0 && options.slope_min <= options.slope_max && options.ridge >= 0.0)
    {
        return Err(Error::InvalidParameter(format!(
            "bad fit options {options:?}"
        )));
    }

    let dim = grid.dim();
    let (weights, biases) = draw_features(dim, width, key, options);

    let points: Vec<Vec<f64>> = grid.iter().collect();
    let act = options.activation;
    let h = DMatrix::from_fn(points.len(), width, |r, c| {
        let z: f64 = weights[c]
            .iter()
            .zip(&points[r])
            .map(|(w, x)| w * x)
            .sum::<f64>()
            + biases[c];
        act.apply(z)
    });
    let y = DVector::from_iterator(points.len(), points.iter().map(|x| f.eval(x)));
    let gram = h.transpose() * &h;
    let rhs = h.transpose() * &y;

    let mut ridge = options.ridge;
    let alpha = loop {
        let mut a = gram.clone();
        // The offset unit is left unpenalised.
        for d in 1..width {
            a[(d, d)] += ridge;
        }
        if let Some(chol) = a.cholesky() {
            let sol = chol.solve(&rhs);
            if sol.iter().all(|v| v.is_finite()) {
                break sol;
            }
        }
        ridge = if ridge == 0.0 { 1e-12 } else { ridge * 100.0 };
        if ridge > 1e6 {
            return Err(Error::InvalidParameter(
                "least-squares system is singular".into(),
            ));
        }
    };

    let network = ReferenceNetwork::new(
        f.name(),
        weights,
        biases,
        alpha.iter().copied().collect(),
        act,
    )?;
    let sup = sup_error(&network, f, grid)?;
    Ok(FitOutcome {
        network,
        sup_error: sup,
        ridge,
        options: *options,
    })
}

fn draw_features(
    dim: usize,
    width: usize,
    key: &StreamKey,
    opt: &FitOptions,
) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut weights = Vec::with_capacity(width);
    let mut biases = Vec::with_capacity(width);
    weights.push(vec![0.0; dim]);
    biases.push(opt.slope_max);

    let steps = width - 1;
    for k in 0..steps {
        let mut rng = key.with(Role::Fit, k as u64 + 1, 0).rng();
        let magnitude = if opt.slope_max > opt.slope_min {
            rng.gen_range(opt.slope_min..=opt.slope_max)
        } else {
            opt.slope_min
        };
        let (w, centre): (Vec<f64>, Vec<f64>) = if dim == 1 {
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            let c = (k as f64 + rng.gen::<f64>()) / steps as f64;
            (vec![sign * magnitude], vec![c])
        } else {
            let dir = loop {
                let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                if norm > 0.1 {
                    break v.into_iter().map(|a| a / norm).collect::<Vec<_>>();
                }
            };
            let c = (0..dim).map(|_| rng.gen::<f64>()).collect();
            (dir.into_iter().map(|a| a * magnitude).collect(), c)
        };
        let b = -w.iter().zip(&centre).map(|(a, c)| a * c).sum::<f64>();
        weights.push(w);
        biases.push(b);
    }
    (weights, biases)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_target_is_exact() {
        let f = TargetFunction::constant(0.3, 1);
        let out =
            fit_reference(&f, 4, &Grid::default_for(1).unwrap(), &StreamKey::root(1)).unwrap();
        assert!(out.sup_error < 1e-6, "sup error {}", out.sup_error);
    }

    #[test]
    fn identity_target() {
        let f = TargetFunction::identity();
        let out =
            fit_reference(&f, 16, &Grid::uniform(1, 256).unwrap(), &StreamKey::root(2)).unwrap();
        assert!(out.sup_error < 0.02, "sup error {}", out.sup_error);
    }

    #[test]
    fn sine_target() {
        let f = TargetFunction::sine(1.0);
        let out =
            fit_reference(&f, 32, &Grid::uniform(1, 256).unwrap(), &StreamKey::root(3)).unwrap();
        assert!(out.sup_error < 0.05, "sup error {}", out.sup_error);
    }

    #[test]
    fn product_target_in_two_dims() {
        let f = TargetFunction::product();
        let out =
            fit_reference(&f, 48, &Grid::uniform(2, 24).unwrap(), &StreamKey::root(4)).unwrap();
        assert!(out.sup_error < 0.05, "sup error {}", out.sup_error);
    }

    #[test]
    fn fit_is_deterministic() {
        let f = TargetFunction::sine(1.0);
        let g = Grid::uniform(1, 64).unwrap();
        let a = fit_reference(&f, 12, &g, &StreamKey::root(9)).unwrap();
        let b = fit_reference(&f, 12, &g, &StreamKey::root(9)).unwrap();
        assert_eq!(a.network, b.network);
        let c = fit_reference(&f, 12, &g, &StreamKey::root(10)).unwrap();
        assert_ne!(a.network, c.network);
    }

    #[test]
    fn singular_system_raises_ridge() {
        // Six features on a single grid point: rank one without a ridge.
        let f = TargetFunction::constant(0.2, 1);
        let g = Grid::points(1, vec![vec![0.5]]).unwrap();
        let opts = FitOptions {
            ridge: 0.0,
            ..FitOptions::default()
        };
        let out = fit_reference_with(&f, 6, &g, &StreamKey::root(0), &opts).unwrap();
        assert!(out.ridge > 0.0);
        assert!(out.sup_error < 1e-3);
    }

    #[test]
    fn rejects_bad_arguments() {
        let f = TargetFunction::sine(1.0);
        let g = Grid::uniform(1, 8).unwrap();
        assert!(fit_reference(&f, 0, &g, &StreamKey::root(0)).is_err());
        assert!(fit_reference(&f, 4, &Grid::uniform(2, 4).unwrap(), &StreamKey::root(0)).is_err());
    }
}
