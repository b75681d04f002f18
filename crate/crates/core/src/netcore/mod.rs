//! Real-valued one-hidden-layer reference networks `G(x) = Σ αᵢ σ(wᵢᵀx + bᵢ)`,
//! activations, target functions and evaluation grids.

mod fit;
mod io;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use fit::{fit_reference, fit_reference_with, FitOptions, FitOutcome};
pub use io::{load_network, save_network, NetworkFile};

use crate::bitstream::PreScaleSet;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    #[default]
    Sigmoid,
    Tanh,
    Relu,
}

impl Activation {
    #[inline]
    pub fn apply(self, t: f64) -> f64 {
        match self {
            Activation::Sigmoid => 1.0 / (1.0 + (-t).exp()),
            Activation::Tanh => t.tanh(),
            Activation::Relu => t.max(0.0),
        }
    }

    /// Closed-form derivative (0 at the ReLU kink).
    #[inline]
    pub fn derivative(self, t: f64) -> f64 {
        match self {
            Activation::Sigmoid => {
                let s = self.apply(t);
                s * (1.0 - s)
            }
            Activation::Tanh => 1.0 - t.tanh().powi(2),
            Activation::Relu => {
                if t > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `sup_t |σ'(t)|`, the Lipschitz constant.
    pub fn derivative_bound(self) -> f64 {
        match self {
            Activation::Sigmoid => 0.25,
            Activation::Tanh | Activation::Relu => 1.0,
        }
    }

    /// Whether `σ(t) → 1` as `t → ∞` and `σ(t)` tends to a finite lower limit.
    pub fn is_sigmoidal(self) -> bool {
        !matches!(self, Activation::Relu)
    }
}

pub fn activate(a: Activation, t: f64) -> f64 {
    a.apply(t)
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Activation::Sigmoid => "sigmoid",
            Activation::Tanh => "tanh",
            Activation::Relu => "relu",
        })
    }
}

impl std::str::FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigmoid" => Ok(Activation::Sigmoid),
            "tanh" => Ok(Activation::Tanh),
            "relu" => Ok(Activation::Relu),
            other => Err(Error::Parse(format!("unknown activation {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceNetwork {
    name: String,
    dim: usize,
    hidden_weights: Vec<Vec<f64>>,
    hidden_biases: Vec<f64>,
    output_weights: Vec<f64>,
    activation: Activation,
    prescale: PreScaleSet,
}

impl ReferenceNetwork {
    /// Builds a network with the default pre-scaling policy for inputs in `[0, 1]`.
    pub fn new(
        name: impl Into<String>,
        hidden_weights: Vec<Vec<f64>>,
        hidden_biases: Vec<f64>,
        output_weights: Vec<f64>,
        activation: Activation,
    ) -> Result<Self> {
        let prescale = PreScaleSet::for_parameters(&hidden_weights, &hidden_biases, 1.0);
        Self::with_prescale(
            name,
            hidden_weights,
            hidden_biases,
            output_weights,
            activation,
            prescale,
        )
    }

    pub fn with_prescale(
        name: impl Into<String>,
        hidden_weights: Vec<Vec<f64>>,
        hidden_biases: Vec<f64>,
        output_weights: Vec<f64>,
        activation: Activation,
        prescale: PreScaleSet,
    ) -> Result<Self> {
        let width = hidden_weights.len();
        if width == 0 {
            return Err(Error::schema("N", "hidden width must be at least 1"));
        }
        let dim = hidden_weights[0].len();
        if dim == 0 {
            return Err(Error::schema("n", "input dimension must be at least 1"));
        }
        for (i, row) in hidden_weights.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::schema(
                    format!("hidden_weights[{i}]"),
                    format!("row has length {}, expected n = {dim}", row.len()),
                ));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::schema(
                    format!("hidden_weights[{i}][{j}]"),
                    "value is not finite",
                ));
            }
        }
        for (field, v) in [
            ("hidden_biases", &hidden_biases),
            ("output_weights", &output_weights),
        ] {
            if v.len() != width {
                return Err(Error::schema(
                    field,
                    format!("has {} entries, expected N = {width}", v.len()),
                ));
            }
            if let Some(i) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::schema(
                    format!("{field}[{i}]"),
                    "value is not finite",
                ));
            }
        }
        check_prescale(&prescale, &hidden_weights, &hidden_biases)?;
        Ok(ReferenceNetwork {
            name: name.into(),
            dim,
            hidden_weights,
            hidden_biases,
            output_weights,
            activation,
            prescale,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Input dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Hidden width `N`.
    pub fn width(&self) -> usize {
        self.hidden_weights.len()
    }

    pub fn hidden_weights(&self) -> &[Vec<f64>] {
        &self.hidden_weights
    }

    pub fn hidden_biases(&self) -> &[f64] {
        &self.hidden_biases
    }

    pub fn output_weights(&self) -> &[f64] {
        &self.output_weights
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn prescale(&self) -> &PreScaleSet {
        &self.prescale
    }

    /// `Σ |αᵢ|`
    pub fn alpha_abs_sum(&self) -> f64 {
        self.output_weights.iter().map(|a| a.abs()).sum()
    }

    pub fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `wᵢᵀx + bᵢ`
    pub fn preactivation(&self, unit: usize, x: &[f64]) -> f64 {
        self.hidden_weights[unit]
            .iter()
            .zip(x)
            .map(|(w, x)| w * x)
            .sum::<f64>()
            + self.hidden_biases[unit]
    }

    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        Ok((0..self.width())
            .map(|i| self.output_weights[i] * self.activation.apply(self.preactivation(i, x)))
            .sum())
    }
}

fn check_prescale(p: &PreScaleSet, w: &[Vec<f64>], b: &[f64]) -> Result<()> {
    let width = w.len();
    if p.weights.len() != width || p.bias.len() != width {
        return Err(Error::schema(
            "prescale",
            format!("weights/bias scale lists must have N = {width} entries"),
        ));
    }
    let positive = |v: f64| v.is_finite() && v > 0.0;
    if !positive(p.inputs) {
        return Err(Error::schema("prescale.inputs", "scale must be positive"));
    }
    for i in 0..width {
        if !positive(p.weights[i]) || !positive(p.bias[i]) {
            return Err(Error::schema(
                format!("prescale[{i}]"),
                "scale must be positive",
            ));
        }
        if let Some(j) = w[i].iter().position(|v| v.abs() > p.weights[i]) {
            return Err(Error::schema(
                format!("prescale.weights[{i}]"),
                format!(
                    "scale {} does not cover hidden_weights[{i}][{j}] = {}",
                    p.weights[i], w[i][j]
                ),
            ));
        }
        if b[i].abs() > p.bias[i] {
            return Err(Error::schema(
                format!("prescale.bias[{i}]"),
                format!(
                    "scale {} does not cover hidden_biases[{i}] = {}",
                    p.bias[i], b[i]
                ),
            ));
        }
        // The SC sum is only coherent when every term shares one factor.
        let joint = p.weights[i] * p.inputs;
        if (p.bias[i] - joint).abs() > 1e-12 * joint {
            return Err(Error::schema(
                format!("prescale.bias[{i}]"),
                format!("bias scale must equal weights[{i}] * inputs = {joint}"),
            ));
        }
    }
    Ok(())
}

pub fn forward_reference(net: &ReferenceNetwork, x: &[f64]) -> Result<f64> {
    net.forward(x)
}

type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A function on the unit cube `[0, 1]ⁿ`.
#[derive(Clone)]
pub struct TargetFunction {
    name: String,
    arity: usize,
    eval: Evaluator,
}

impl fmt::Debug for TargetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetFunction")
            .field("name", &self.name)
            .field("arity", &self.arity)
            .finish()
    }
}

impl TargetFunction {
    pub fn new(
        name: impl Into<String>,
        arity: usize,
        eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        TargetFunction {
            name: name.into(),
            arity,
            eval: Arc::new(eval),
        }
    }

    pub fn constant(c: f64, arity: usize) -> Self {
        TargetFunction::new(format!("constant:{c}"), arity, move |_| c)
    }

    pub fn identity() -> Self {
        TargetFunction::new("identity", 1, |x| x[0])
    }

    /// `sin(2π·freq·x)`
    pub fn sine(freq: f64) -> Self {
        let name = if freq == 1.0 {
            "sin".to_string()
        } else {
            format!("sin:{freq}")
        };
        TargetFunction::new(name, 1, move |x| {
            (2.0 * std::f64::consts::PI * freq * x[0]).sin()
        })
    }

    /// `x₁·x₂` on the unit square.
    pub fn product() -> Self {
        TargetFunction::new("product", 2, |x| x[0] * x[1])
    }

    /// The function computed by a reference network.
    pub fn from_network(net: &ReferenceNetwork) -> Self {
        let net = net.clone();
        TargetFunction::new(format!("network:{}", net.name()), net.dim(), move |x| {
            net.forward(x).expect("dimension checked by caller")
        })
    }

    /// Parses `name[:param[:param]]`: `constant:<c>[:<n>]`, `identity`,
    /// `sin[:<freq>]`, `product`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut parts = spec.split(':');
        let name = parts.next().unwrap_or_default();
        let params: Vec<f64> = parts
            .map(|p| {
                p.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad parameter {p:?} in target {spec:?}")))
            })
            .collect::<Result<_>>()?;
        let arity_param = |idx: usize| -> Result<usize> {
            match params.get(idx) {
                None => Ok(1),
                Some(&v) if v >= 1.0 && v.fract() == 0.0 => Ok(v as usize),
                Some(v) => Err(Error::Parse(format!("bad arity {v} in target {spec:?}"))),
            }
        };
        let f = match (name, params.len()) {
            ("constant", 1 | 2) => TargetFunction::constant(params[0], arity_param(1)?),
            ("identity", 0) => TargetFunction::identity(),
            ("sin", 0) => TargetFunction::sine(1.0),
            ("sin", 1) => TargetFunction::sine(params[0]),
            ("product", 0) => TargetFunction::product(),
            _ => return Err(Error::Parse(format!("unknown target function {spec:?}"))),
        };
        Ok(f)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }
}

/// Finite point set standing in for the unit cube.
#[derive(Clone, Debug, PartialEq)]
pub enum Grid {
    /// `per_axis` evenly spaced points on each axis, endpoints included
    /// (the single point 0.5 when `per_axis == 1`).
    Uniform {
        dim: usize,
        per_axis: usize,
    },
    Points {
        dim: usize,
        points: Vec<Vec<f64>>,
    },
}

impl Grid {
    pub fn uniform(dim: usize, per_axis: usize) -> Result<Self> {
        if dim == 0 || per_axis == 0 {
            return Err(Error::InvalidParameter("grid must be nonempty".into()));
        }
        if per_axis.checked_pow(dim as u32).is_none() {
            return Err(Error::InvalidParameter("grid is too large".into()));
        }
        Ok(Grid::Uniform { dim, per_axis })
    }

    /// 256 points for n = 1, 64² for n = 2, 16ⁿ beyond.
    pub fn default_for(dim: usize) -> Result<Self> {
        let per_axis = match dim {
            1 => 256,
            2 => 64,
            _ => 16,
        };
        Grid::uniform(dim, per_axis)
    }

    pub fn points(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("grid must be nonempty".into()));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.len(),
            });
        }
        Ok(Grid::Points { dim, points })
    }

    pub fn dim(&self) -> usize {
        match self {
            Grid::Uniform { dim, .. } | Grid::Points { dim, .. } => *dim,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Grid::Uniform { dim, per_axis } => per_axis.pow(*dim as u32),
            Grid::Points { points, .. } => points.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        match self {
            Grid::Uniform { dim, per_axis } => {
                let mut rem = idx;
                (0..*dim)
                    .map(|_| {
                        let k = rem % per_axis;
                        rem /= per_axis;
                        if *per_axis == 1 {
                            0.5
                        } else {
                            k as f64 / (*per_axis - 1) as f64
                        }
                    })
                    .collect()
            }
            Grid::Points { points, .. } => points[idx].clone(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Short description for report metadata.
    pub fn describe(&self) -> String {
        match self {
            Grid::Uniform { dim, per_axis } => format!("uniform:{per_axis}^{dim}"),
            Grid::Points { points, .. } => format!("points:{}", points.len()),
        }
    }
}

/// `max over grid of |G(x) − f(x)|`.
pub fn sup_error(net: &ReferenceNetwork, f: &TargetFunction, grid: &Grid) -> Result<f64> {
    let mut worst = 0.0f64;
    for x in grid.iter() {
        worst = worst.max((net.forward(&x)? - f.eval(&x)).abs());
    }
    Ok(worst)
}
