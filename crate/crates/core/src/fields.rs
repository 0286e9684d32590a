//! Tensor fields on chart domains with two backends.
//!
//! Components are either exact multivariate [`Polynomial`]s (identities hold
//! coefficient-wise) or sampled closures differentiated by central
//! differences with an attached step. The two backends share one interface;
//! mixing them in an operation demotes the result to the closure backend.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};
use crate::linear_dirac::{LagrangianSubspace, PAIR_TOL, RANK_TOL};
use crate::poly::Polynomial;

/// Default step for first-order central differences.
pub const FD_STEP: f64 = 1e-5;

type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// One component function of a tensor field.
#[derive(Clone)]
pub enum Component {
    Poly(Polynomial),
    Fn { f: ScalarFn, step: f64 },
}

impl fmt::Debug for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Poly(p) => write!(f, "Poly({} terms)", p.terms().count()),
            Component::Fn { step, .. } => write!(f, "Fn(step={step})"),
        }
    }
}

impl Component {
    pub fn zero(num_vars: usize) -> Self {
        Component::Poly(Polynomial::zero(num_vars))
    }

    pub fn constant(num_vars: usize, c: f64) -> Self {
        Component::Poly(Polynomial::constant(num_vars, c))
    }

    pub fn closure<F>(f: F, step: f64) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Component::Fn { f: Arc::new(f), step }
    }

    pub fn is_poly(&self) -> bool {
        matches!(self, Component::Poly(_))
    }

    pub fn as_poly(&self) -> Option<&Polynomial> {
        match self {
            Component::Poly(p) => Some(p),
            Component::Fn { .. } => None,
        }
    }

    /// `true` when this is the exactly-zero polynomial.
    pub fn is_zero_poly(&self) -> bool {
        matches!(self, Component::Poly(p) if p.is_zero())
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Component::Poly(p) => p.eval(x),
            Component::Fn { f, .. } => f(x),
        }
    }

    /// Partial derivative: symbolic for polynomials, central difference for
    /// closures.
    pub fn partial(&self, i: usize) -> Component {
        match self {
            Component::Poly(p) => Component::Poly(p.derivative(i)),
            Component::Fn { f, step } => {
                let f = f.clone();
                let h = *step;
                Component::closure(
                    move |x: &[f64]| {
                        let mut xp = x.to_vec();
                        let mut xm = x.to_vec();
                        xp[i] += h;
                        xm[i] -= h;
                        (f(&xp) - f(&xm)) / (2.0 * h)
                    },
                    h,
                )
            }
        }
    }

    pub fn add(&self, other: &Component) -> Component {
        match (self, other) {
            (Component::Poly(a), Component::Poly(b)) => Component::Poly(a.add(b)),
            _ => {
                let a = self.clone();
                let b = other.clone();
                Component::closure(move |x| a.eval(x) + b.eval(x), self.step().min(other.step()))
            }
        }
    }

    pub fn sub(&self, other: &Component) -> Component {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Component) -> Component {
        match (self, other) {
            (Component::Poly(a), Component::Poly(b)) => Component::Poly(a.mul(b)),
            _ => {
                let a = self.clone();
                let b = other.clone();
                Component::closure(move |x| a.eval(x) * b.eval(x), self.step().min(other.step()))
            }
        }
    }

    pub fn scale(&self, s: f64) -> Component {
        match self {
            Component::Poly(p) => Component::Poly(p.scale(s)),
            Component::Fn { f, step } => {
                let f = f.clone();
                Component::closure(move |x| s * f(x), *step)
            }
        }
    }

    fn step(&self) -> f64 {
        match self {
            Component::Poly(_) => FD_STEP,
            Component::Fn { step, .. } => *step,
        }
    }
}

/// Valence tag of a [`TensorField`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valence {
    Scalar,
    Vector,
    OneForm,
    Bivector,
    TwoForm,
}

impl Valence {
    fn component_count(self, dim: usize) -> usize {
        match self {
            Valence::Scalar => 1,
            Valence::Vector | Valence::OneForm => dim,
            Valence::Bivector | Valence::TwoForm => dim * dim,
        }
    }
}

/// A tensor field on a chart domain of dimension `dim`.
///
/// Two-index valences are stored row-major; antisymmetry is structural for
/// fields built through [`TensorField::bivector_from_upper`] /
/// [`TensorField::two_form_from_upper`] and validated otherwise.
#[derive(Debug, Clone)]
pub struct TensorField {
    dim: usize,
    valence: Valence,
    comps: Vec<Component>,
}

impl TensorField {
    pub fn new(dim: usize, valence: Valence, comps: Vec<Component>) -> Result<Self> {
        if comps.len() != valence.component_count(dim) {
            return Err(GeomError::DimensionMismatch {
                expected: valence.component_count(dim),
                got: comps.len(),
                context: "tensor field components".into(),
            });
        }
        let field = TensorField { dim, valence, comps };
        if matches!(valence, Valence::Bivector | Valence::TwoForm) {
            field.check_poly_antisymmetry()?;
        }
        Ok(field)
    }

    pub fn scalar(dim: usize, c: Component) -> Self {
        TensorField {
            dim,
            valence: Valence::Scalar,
            comps: vec![c],
        }
    }

    pub fn vector(dim: usize, comps: Vec<Component>) -> Result<Self> {
        Self::new(dim, Valence::Vector, comps)
    }

    pub fn one_form(dim: usize, comps: Vec<Component>) -> Result<Self> {
        Self::new(dim, Valence::OneForm, comps)
    }

    /// Bivector from the strict upper triangle (row-major `i < j`); the
    /// lower triangle is mirrored, so antisymmetry is exact by construction.
    pub fn bivector_from_upper(dim: usize, upper: Vec<Component>) -> Result<Self> {
        Self::from_upper(dim, upper, Valence::Bivector)
    }

    pub fn two_form_from_upper(dim: usize, upper: Vec<Component>) -> Result<Self> {
        Self::from_upper(dim, upper, Valence::TwoForm)
    }

    fn from_upper(dim: usize, upper: Vec<Component>, valence: Valence) -> Result<Self> {
        let expected = dim * (dim - 1) / 2;
        if upper.len() != expected {
            return Err(GeomError::DimensionMismatch {
                expected,
                got: upper.len(),
                context: "upper triangle components".into(),
            });
        }
        let mut comps = vec![Component::zero(dim); dim * dim];
        let mut it = upper.into_iter();
        for i in 0..dim {
            for j in (i + 1)..dim {
                let c = it.next().unwrap();
                comps[j * dim + i] = c.scale(-1.0);
                comps[i * dim + j] = c;
            }
        }
        Ok(TensorField { dim, valence, comps })
    }

    fn check_poly_antisymmetry(&self) -> Result<()> {
        if !self.comps.iter().all(Component::is_poly) {
            return Ok(()); // closure backends are validated at sample points
        }
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self.comps[i * self.dim + j].as_poly().unwrap();
                let b = self.comps[j * self.dim + i].as_poly().unwrap();
                let s = a.add(b);
                if !s.is_zero() {
                    return Err(GeomError::NotAntisymmetric {
                        residual: s.max_abs_coeff(),
                        tol: 0.0,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn valence(&self) -> Valence {
        self.valence
    }

    pub fn component(&self, idx: usize) -> &Component {
        &self.comps[idx]
    }

    pub fn eval_scalar(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(self.valence, Valence::Scalar);
        self.comps[0].eval(x)
    }

    pub fn eval_vector(&self, x: &[f64]) -> DVector<f64> {
        debug_assert!(matches!(self.valence, Valence::Vector | Valence::OneForm));
        DVector::from_iterator(self.dim, self.comps.iter().map(|c| c.eval(x)))
    }

    pub fn eval_matrix(&self, x: &[f64]) -> DMatrix<f64> {
        debug_assert!(matches!(self.valence, Valence::Bivector | Valence::TwoForm));
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.comps[i * self.dim + j].eval(x))
    }

    /// Max antisymmetry residual of a two-index field at the given points.
    pub fn antisymmetry_residual(&self, points: &[Vec<f64>]) -> f64 {
        let mut res: f64 = 0.0;
        for p in points {
            let m = self.eval_matrix(p);
            res = res.max((&m + m.transpose()).amax());
        }
        res
    }

    /// Exterior derivative for `k ∈ {0, 1}`.
    pub fn exterior_derivative(&self) -> Result<TensorField> {
        match self.valence {
            Valence::Scalar => {
                let comps = (0..self.dim).map(|i| self.comps[0].partial(i)).collect();
                TensorField::one_form(self.dim, comps)
            }
            Valence::OneForm => {
                let mut upper = Vec::with_capacity(self.dim * (self.dim - 1) / 2);
                for i in 0..self.dim {
                    for j in (i + 1)..self.dim {
                        upper.push(self.comps[j].partial(i).sub(&self.comps[i].partial(j)));
                    }
                }
                TensorField::two_form_from_upper(self.dim, upper)
            }
            v => Err(GeomError::UnsupportedValence(format!(
                "exterior derivative of {v:?}"
            ))),
        }
    }

    /// Self Schouten bracket of a bivector, as raw trivector components
    /// `(i, j, k, [π,π]^{ijk})` over `i < j < k`. Zero iff Poisson.
    pub fn schouten_self(&self) -> Result<Vec<(usize, usize, usize, Component)>> {
        if self.valence != Valence::Bivector {
            return Err(GeomError::UnsupportedValence(
                "schouten_self needs a bivector".into(),
            ));
        }
        let n = self.dim;
        let pi = |i: usize, j: usize| -> &Component { &self.comps[i * n + j] };
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let mut acc = Component::zero(n);
                    for l in 0..n {
                        let t1 = pi(i, l).mul(&pi(j, k).partial(l));
                        let t2 = pi(j, l).mul(&pi(k, i).partial(l));
                        let t3 = pi(k, l).mul(&pi(i, j).partial(l));
                        acc = acc.add(&t1).add(&t2).add(&t3);
                    }
                    out.push((i, j, k, acc.scale(2.0)));
                }
            }
        }
        Ok(out)
    }

    /// Evaluate `Π♯α` at a point (`α` a covector value).
    pub fn sharp_at(&self, x: &[f64], alpha: &DVector<f64>) -> Result<DVector<f64>> {
        if self.valence != Valence::Bivector {
            return Err(GeomError::UnsupportedValence("sharp needs a bivector".into()));
        }
        Ok(self.eval_matrix(x).transpose() * alpha)
    }

    /// Evaluate `ι_vΩ` at a point (`v` a vector value).
    pub fn flat_at(&self, x: &[f64], v: &DVector<f64>) -> Result<DVector<f64>> {
        if self.valence != Valence::TwoForm {
            return Err(GeomError::UnsupportedValence("flat needs a two-form".into()));
        }
        Ok(self.eval_matrix(x).transpose() * v)
    }

    /// Interior product of a vector field with this field (valence drops by
    /// one): one-form → scalar, two-form → one-form.
    pub fn interior(&self, x_field: &TensorField) -> Result<TensorField> {
        if x_field.valence != Valence::Vector || x_field.dim != self.dim {
            return Err(GeomError::UnsupportedValence(
                "interior product needs a matching vector field".into(),
            ));
        }
        match self.valence {
            Valence::OneForm => {
                let mut acc = Component::zero(self.dim);
                for i in 0..self.dim {
                    acc = acc.add(&x_field.comps[i].mul(&self.comps[i]));
                }
                Ok(TensorField::scalar(self.dim, acc))
            }
            Valence::TwoForm => {
                let n = self.dim;
                let comps = (0..n)
                    .map(|j| {
                        let mut acc = Component::zero(n);
                        for i in 0..n {
                            acc = acc.add(&x_field.comps[i].mul(&self.comps[i * n + j]));
                        }
                        acc
                    })
                    .collect();
                TensorField::one_form(n, comps)
            }
            v => Err(GeomError::UnsupportedValence(format!("interior with {v:?}"))),
        }
    }

    /// Lie bracket of vector fields: `[X,Y]^i = X^j ∂_j Y^i − Y^j ∂_j X^i`.
    pub fn lie_bracket(&self, other: &TensorField) -> Result<TensorField> {
        if self.valence != Valence::Vector || other.valence != Valence::Vector || self.dim != other.dim {
            return Err(GeomError::UnsupportedValence("lie_bracket needs vector fields".into()));
        }
        let n = self.dim;
        let comps = (0..n)
            .map(|i| {
                let mut acc = Component::zero(n);
                for j in 0..n {
                    acc = acc.add(&self.comps[j].mul(&other.comps[i].partial(j)));
                    acc = acc.sub(&other.comps[j].mul(&self.comps[i].partial(j)));
                }
                acc
            })
            .collect();
        TensorField::vector(n, comps)
    }

    /// Lie derivative of a one-form along a vector field, via Cartan:
    /// `𝓛_X α = d(ι_X α) + ι_X dα`.
    pub fn lie_derivative_one_form(x_field: &TensorField, alpha: &TensorField) -> Result<TensorField> {
        let a = alpha.interior(x_field)?.exterior_derivative()?;
        let b = alpha.exterior_derivative()?.interior(x_field)?;
        let comps = (0..alpha.dim).map(|i| a.comps[i].add(&b.comps[i])).collect();
        TensorField::one_form(alpha.dim, comps)
    }

    /// `Π♯α` as a vector field (component-level contraction).
    pub fn sharp_field(&self, alpha: &TensorField) -> Result<TensorField> {
        if self.valence != Valence::Bivector || alpha.valence != Valence::OneForm {
            return Err(GeomError::UnsupportedValence("sharp_field".into()));
        }
        let n = self.dim;
        let comps = (0..n)
            .map(|j| {
                let mut acc = Component::zero(n);
                for i in 0..n {
                    acc = acc.add(&alpha.comps[i].mul(&self.comps[i * n + j]));
                }
                acc
            })
            .collect();
        TensorField::vector(n, comps)
    }

    /// Bracket induced by a Poisson bivector on one-forms:
    /// `[α,β]_π = 𝓛_{π♯α} β − ι_{π♯β} dα`.
    pub fn one_form_bracket(pi: &TensorField, alpha: &TensorField, beta: &TensorField) -> Result<TensorField> {
        let xa = pi.sharp_field(alpha)?;
        let xb = pi.sharp_field(beta)?;
        let lie = TensorField::lie_derivative_one_form(&xa, beta)?;
        let corr = alpha.exterior_derivative()?.interior(&xb)?;
        let comps = (0..pi.dim).map(|i| lie.comps[i].sub(&corr.comps[i])).collect();
        TensorField::one_form(pi.dim, comps)
    }

    /// Evaluate a bivector or two-form field into a Lagrangian subspace at a
    /// point, via the graph constructors.
    pub fn evaluate_dirac(&self, x: &[f64], rank_tol: f64, pair_tol: f64) -> Result<LagrangianSubspace> {
        match self.valence {
            Valence::Bivector => LagrangianSubspace::graph_of_bivector(&self.eval_matrix(x), rank_tol, pair_tol),
            Valence::TwoForm => LagrangianSubspace::graph_of_two_form(&self.eval_matrix(x), rank_tol, pair_tol),
            v => Err(GeomError::UnsupportedValence(format!("evaluate_dirac of {v:?}"))),
        }
    }

    /// Scale every component.
    pub fn scale(&self, s: f64) -> TensorField {
        TensorField {
            dim: self.dim,
            valence: self.valence,
            comps: self.comps.iter().map(|c| c.scale(s)).collect(),
        }
    }

    /// Componentwise sum (same valence and dimension).
    pub fn add(&self, other: &TensorField) -> Result<TensorField> {
        if self.valence != other.valence || self.dim != other.dim {
            return Err(GeomError::UnsupportedValence("add of mismatched fields".into()));
        }
        Ok(TensorField {
            dim: self.dim,
            valence: self.valence,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }
}

/// A smooth map between chart domains, with pointwise Jacobian.
#[derive(Debug, Clone)]
pub struct ChartMap {
    source_dim: usize,
    target_dim: usize,
    comps: Vec<Component>,
}

impl ChartMap {
    pub fn new(source_dim: usize, target_dim: usize, comps: Vec<Component>) -> Result<Self> {
        if comps.len() != target_dim {
            return Err(GeomError::DimensionMismatch {
                expected: target_dim,
                got: comps.len(),
                context: "chart map components".into(),
            });
        }
        Ok(ChartMap {
            source_dim,
            target_dim,
            comps,
        })
    }

    pub fn identity(dim: usize) -> Self {
        let comps = (0..dim)
            .map(|i| Component::Poly(Polynomial::var(dim, i)))
            .collect();
        ChartMap {
            source_dim: dim,
            target_dim: dim,
            comps,
        }
    }

    /// Coordinate projection onto `range` (e.g. `pr₂`).
    pub fn projection(source_dim: usize, range: std::ops::Range<usize>) -> Self {
        let comps = range
            .clone()
            .map(|i| Component::Poly(Polynomial::var(source_dim, i)))
            .collect();
        ChartMap {
            source_dim,
            target_dim: range.len(),
            comps,
        }
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn component(&self, i: usize) -> &Component {
        &self.comps[i]
    }

    pub fn eval(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.target_dim, self.comps.iter().map(|c| c.eval(x)))
    }

    /// Jacobian: symbolic rows for polynomial components, central
    /// differences otherwise.
    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.target_dim, self.source_dim, |i, j| {
            self.comps[i].partial(j).eval(x)
        })
    }
}

/// A matrix-valued field (metrics, Lie-algebra-valued one-forms, frames).
#[derive(Debug, Clone)]
pub struct MatrixField {
    domain_dim: usize,
    rows: usize,
    cols: usize,
    comps: Vec<Component>, // row-major
}

impl MatrixField {
    pub fn new(domain_dim: usize, rows: usize, cols: usize, comps: Vec<Component>) -> Result<Self> {
        if comps.len() != rows * cols {
            return Err(GeomError::DimensionMismatch {
                expected: rows * cols,
                got: comps.len(),
                context: "matrix field components".into(),
            });
        }
        Ok(MatrixField {
            domain_dim,
            rows,
            cols,
            comps,
        })
    }

    /// Build from a closure producing the whole matrix.
    pub fn from_matrix_fn<F>(domain_dim: usize, rows: usize, cols: usize, f: F, step: f64) -> Self
    where
        F: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        let f = Arc::new(f);
        let comps = (0..rows * cols)
            .map(|idx| {
                let f = f.clone();
                let (i, j) = (idx / cols, idx % cols);
                Component::closure(move |x: &[f64]| f(x)[(i, j)], step)
            })
            .collect();
        MatrixField {
            domain_dim,
            rows,
            cols,
            comps,
        }
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn eval(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.comps[i * self.cols + j].eval(x))
    }

    pub fn component(&self, i: usize, j: usize) -> &Component {
        &self.comps[i * self.cols + j]
    }

    /// Row `i` as a one-form field (requires `cols == domain_dim`).
    pub fn row_one_form(&self, i: usize) -> Result<TensorField> {
        if self.cols != self.domain_dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.domain_dim,
                got: self.cols,
                context: "row_one_form needs cols == domain_dim".into(),
            });
        }
        TensorField::one_form(
            self.domain_dim,
            (0..self.cols).map(|j| self.comps[i * self.cols + j].clone()).collect(),
        )
    }

    /// Contract the row index with a constant covector:
    /// `⟨ξ, θ⟩_j = Σ_a ξ_a θ^a_j`, a one-form field.
    pub fn contract_rows(&self, xi: &DVector<f64>) -> Result<TensorField> {
        if xi.len() != self.rows {
            return Err(GeomError::DimensionMismatch {
                expected: self.rows,
                got: xi.len(),
                context: "contract_rows covector".into(),
            });
        }
        if self.cols != self.domain_dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.domain_dim,
                got: self.cols,
                context: "contract_rows needs cols == domain_dim".into(),
            });
        }
        let comps = (0..self.cols)
            .map(|j| {
                let mut acc = Component::zero(self.domain_dim);
                for a in 0..self.rows {
                    acc = acc.add(&self.comps[a * self.cols + j].scale(xi[a]));
                }
                acc
            })
            .collect();
        TensorField::one_form(self.domain_dim, comps)
    }
}

/// Dirac structure described by a field (bivector or two-form graph).
pub fn evaluate_dirac(field: &TensorField, x: &[f64]) -> Result<LagrangianSubspace> {
    field.evaluate_dirac(x, RANK_TOL, PAIR_TOL)
}
