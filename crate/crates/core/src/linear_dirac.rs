//! Linear algebra of subspaces and Lagrangian subspaces of `V ⊕ V*`.
//!
//! This is the pointwise layer everything else evaluates into. A Dirac
//! structure on a chart is, at each point, a [`LagrangianSubspace`]: a
//! maximal isotropic subspace for the pairing
//! `⟨u + α, v + β⟩ = α(v) + β(u)` (no 1/2 factor; isotropy is
//! scale-invariant).
//!
//! Sign conventions used throughout the crate:
//! * `sharp(Π, α) = Πᵀ α`, i.e. `(Π♯α)^j = Σ_i α_i Π^{ij}`;
//! * `flat(Ω, v) = Ωᵀ v`, i.e. `(ι_v Ω)_j = Σ_i v^i Ω_{ij}`.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};

/// Default relative tolerance for rank decisions.
pub const RANK_TOL: f64 = 1e-10;
/// Default tolerance for isotropy / antisymmetry checks.
pub const PAIR_TOL: f64 = 1e-10;

/// Width of the ambiguity band above `rank_tol` in which pivots are
/// rejected as ill-conditioned instead of being classified.
const AMBIGUITY_FACTOR: f64 = 10.0;

/// A linear subspace of `R^n`, stored as an orthonormal basis (column-wise).
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient_dim: usize,
    basis: DMatrix<f64>,
}

/// Deterministic pivoted elimination. Returns the accepted columns.
///
/// A pivot whose magnitude falls in `(rank_tol, 10 * rank_tol)` relative to
/// the reference scale signals ill-conditioned input and is surfaced as
/// `RankAmbiguous` rather than silently dropped.
fn eliminate(vectors: &[DVector<f64>], ambient_dim: usize, rank_tol: f64) -> Result<Vec<DVector<f64>>> {
    let scale = vectors
        .iter()
        .flat_map(|v| v.iter().map(|x| x.abs()))
        .fold(0.0_f64, f64::max);
    if scale == 0.0 {
        return Ok(Vec::new());
    }
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for v in vectors {
        if v.len() != ambient_dim {
            return Err(GeomError::DimensionMismatch {
                expected: ambient_dim,
                got: v.len(),
                context: "span input vector".into(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(GeomError::NonFiniteValue("span input".into()));
        }
        let mut w = v.clone();
        for (b, &p) in basis.iter().zip(&pivots) {
            let factor = w[p] / b[p];
            w -= b * factor;
        }
        let (piv, mag) = w
            .iter()
            .enumerate()
            .map(|(i, x)| (i, x.abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonzero ambient dimension");
        let ratio = mag / scale;
        if ratio <= rank_tol {
            continue; // dependent on the accepted basis
        }
        if ratio < AMBIGUITY_FACTOR * rank_tol {
            return Err(GeomError::RankAmbiguous {
                ratio,
                lo: rank_tol,
                hi: AMBIGUITY_FACTOR * rank_tol,
            });
        }
        basis.push(w);
        pivots.push(piv);
    }
    Ok(basis)
}

/// Orthonormalize a set of independent columns (thin QR, deterministic).
fn orthonormalize(cols: &[DVector<f64>], ambient_dim: usize) -> DMatrix<f64> {
    let mut q: Vec<DVector<f64>> = Vec::with_capacity(cols.len());
    for v in cols {
        let mut w = v.clone();
        // two passes of Gram-Schmidt for stability
        for _ in 0..2 {
            for b in &q {
                let c = b.dot(&w);
                w -= b * c;
            }
        }
        let n = w.norm();
        q.push(w / n);
    }
    DMatrix::from_columns(&q.iter().map(|v| v.column(0).into_owned()).collect::<Vec<_>>())
        .reshape_generic(nalgebra::Dyn(ambient_dim), nalgebra::Dyn(q.len()))
}

impl Subspace {
    /// Span of the given vectors, by deterministic pivoted elimination.
    pub fn span(ambient_dim: usize, vectors: &[DVector<f64>], rank_tol: f64) -> Result<Self> {
        let raw = eliminate(vectors, ambient_dim, rank_tol)?;
        let basis = if raw.is_empty() {
            DMatrix::zeros(ambient_dim, 0)
        } else {
            orthonormalize(&raw, ambient_dim)
        };
        Ok(Subspace { ambient_dim, basis })
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: DMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: DMatrix::identity(ambient_dim, ambient_dim),
        }
    }

    /// Wrap an already-independent set of columns.
    pub fn from_columns(cols: &DMatrix<f64>, rank_tol: f64) -> Result<Self> {
        let vectors: Vec<DVector<f64>> = (0..cols.ncols()).map(|j| cols.column(j).into_owned()).collect();
        Self::span(cols.nrows(), &vectors, rank_tol)
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Orthonormal basis, column-wise.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Residual of `x` against this subspace: `‖x − proj x‖ / max(1, ‖x‖)`.
    pub fn distance_to(&self, x: &DVector<f64>) -> f64 {
        let coeff = self.basis.transpose() * x;
        let proj = &self.basis * coeff;
        (x - proj).norm() / x.norm().max(1.0)
    }

    /// Mutual projection residual; `equal` iff dimensions match and the
    /// residual stays below `tol`.
    pub fn compare(&self, other: &Subspace, tol: f64) -> SubspaceComparison {
        let mut distance: f64 = 0.0;
        for j in 0..self.dim() {
            let v = self.basis.column(j).into_owned();
            distance = distance.max(other.distance_to(&v));
        }
        for j in 0..other.dim() {
            let v = other.basis.column(j).into_owned();
            distance = distance.max(self.distance_to(&v));
        }
        SubspaceComparison {
            equal: self.dim() == other.dim() && self.ambient_dim == other.ambient_dim && distance < tol,
            distance,
        }
    }
}

/// Result of a subspace comparison: verdict plus a gap proxy.
#[derive(Debug, Clone, Copy)]
pub struct SubspaceComparison {
    pub equal: bool,
    pub distance: f64,
}

/// Convenience wrapper: `true` iff dims match and mutual residuals < tol.
pub fn subspace_equal(a: &Subspace, b: &Subspace, tol: f64) -> SubspaceComparison {
    a.compare(b, tol)
}

/// The differential of a chart map at a point, as a plain matrix `V → W`.
#[derive(Debug, Clone)]
pub struct LinearMapData {
    pub matrix: DMatrix<f64>,
}

impl LinearMapData {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(GeomError::NonFiniteValue("linear map".into()));
        }
        Ok(LinearMapData { matrix })
    }
}

/// A Lagrangian subspace of `R^n ⊕ (R^n)*`, dimension exactly `n`.
///
/// Generators are stored column-wise as stacked `(tangent; cotangent)`
/// vectors of length `2n`, orthonormalized at construction.
#[derive(Debug, Clone)]
pub struct LagrangianSubspace {
    base_dim: usize,
    generators: DMatrix<f64>,
}

fn check_antisymmetric(m: &DMatrix<f64>, tol: f64) -> Result<()> {
    let residual = (m + m.transpose()).amax();
    if residual > tol {
        return Err(GeomError::NotAntisymmetric { residual, tol });
    }
    Ok(())
}

impl LagrangianSubspace {
    /// Build from generator columns, checking dimension and isotropy.
    pub fn new(base_dim: usize, generators: &[DVector<f64>], rank_tol: f64, pair_tol: f64) -> Result<Self> {
        let raw = eliminate(generators, 2 * base_dim, rank_tol)?;
        if raw.len() != base_dim {
            return Err(GeomError::NotLagrangian(format!(
                "dimension {} differs from base dimension {}",
                raw.len(),
                base_dim
            )));
        }
        let basis = orthonormalize(&raw, 2 * base_dim);
        let l = LagrangianSubspace {
            base_dim,
            generators: basis,
        };
        let residual = l.isotropy_residual();
        if residual > pair_tol {
            return Err(GeomError::NotLagrangian(format!(
                "pairing residual {residual:.3e} exceeds {pair_tol:.1e}"
            )));
        }
        Ok(l)
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    /// Orthonormal generators, column-wise `(tangent; cotangent)`.
    pub fn generators(&self) -> &DMatrix<f64> {
        &self.generators
    }

    /// Tangent block of the generators (`n × n`).
    pub fn tangent_block(&self) -> DMatrix<f64> {
        self.generators.rows(0, self.base_dim).into_owned()
    }

    /// Cotangent block of the generators (`n × n`).
    pub fn cotangent_block(&self) -> DMatrix<f64> {
        self.generators.rows(self.base_dim, self.base_dim).into_owned()
    }

    /// Max pairing `⟨g_i, g_j⟩ = α_i(v_j) + α_j(v_i)` over generator pairs.
    pub fn isotropy_residual(&self) -> f64 {
        let t = self.tangent_block();
        let c = self.cotangent_block();
        let p = t.transpose() * &c + c.transpose() * &t;
        p.amax()
    }

    /// Residual of the Courant element `(v; α)` against this subspace.
    pub fn element_distance(&self, v: &DVector<f64>, alpha: &DVector<f64>) -> f64 {
        let mut z = DVector::zeros(2 * self.base_dim);
        z.rows_mut(0, self.base_dim).copy_from(v);
        z.rows_mut(self.base_dim, self.base_dim).copy_from(alpha);
        let coeff = self.generators.transpose() * &z;
        let proj = &self.generators * coeff;
        (&z - proj).norm() / z.norm().max(1.0)
    }

    /// Subspace comparison on the doubled space.
    pub fn compare(&self, other: &LagrangianSubspace, tol: f64) -> SubspaceComparison {
        let a = Subspace {
            ambient_dim: 2 * self.base_dim,
            basis: self.generators.clone(),
        };
        let b = Subspace {
            ambient_dim: 2 * other.base_dim,
            basis: other.generators.clone(),
        };
        a.compare(&b, tol)
    }

    /// Graph of an antisymmetric bivector matrix: `{(Π♯α, α)}`.
    pub fn graph_of_bivector(pi: &DMatrix<f64>, rank_tol: f64, pair_tol: f64) -> Result<Self> {
        let n = pi.nrows();
        if pi.ncols() != n {
            return Err(GeomError::DimensionMismatch {
                expected: n,
                got: pi.ncols(),
                context: "bivector matrix".into(),
            });
        }
        check_antisymmetric(pi, pair_tol.max(PAIR_TOL))?;
        let pit = pi.transpose();
        let gens: Vec<DVector<f64>> = (0..n)
            .map(|i| {
                let mut g = DVector::zeros(2 * n);
                g.rows_mut(0, n).copy_from(&pit.column(i));
                g[n + i] = 1.0;
                g
            })
            .collect();
        Self::new(n, &gens, rank_tol, pair_tol)
    }

    /// Graph of an antisymmetric two-form matrix: `{(v, ι_v Ω)}`.
    pub fn graph_of_two_form(omega: &DMatrix<f64>, rank_tol: f64, pair_tol: f64) -> Result<Self> {
        let n = omega.nrows();
        if omega.ncols() != n {
            return Err(GeomError::DimensionMismatch {
                expected: n,
                got: omega.ncols(),
                context: "two-form matrix".into(),
            });
        }
        check_antisymmetric(omega, pair_tol.max(PAIR_TOL))?;
        let ot = omega.transpose();
        let gens: Vec<DVector<f64>> = (0..n)
            .map(|i| {
                let mut g = DVector::zeros(2 * n);
                g[i] = 1.0;
                g.rows_mut(n, n).copy_from(&ot.column(i));
                g
            })
            .collect();
        Self::new(n, &gens, rank_tol, pair_tol)
    }

    /// Full tangent space `T ⊕ 0`.
    pub fn tangent_space(n: usize) -> Self {
        Self::graph_of_two_form(&DMatrix::zeros(n, n), RANK_TOL, PAIR_TOL).expect("zero form")
    }

    /// Full cotangent space `0 ⊕ V*`.
    pub fn cotangent_space(n: usize) -> Self {
        Self::graph_of_bivector(&DMatrix::zeros(n, n), RANK_TOL, PAIR_TOL).expect("zero bivector")
    }

    /// Gauge by a two-form: `(v, α) ↦ (v, α + ι_v Ω)`.
    pub fn gauge_two_form(&self, omega: &DMatrix<f64>, pair_tol: f64) -> Result<Self> {
        let n = self.base_dim;
        if omega.nrows() != n || omega.ncols() != n {
            return Err(GeomError::DimensionMismatch {
                expected: n,
                got: omega.nrows(),
                context: "gauge two-form".into(),
            });
        }
        check_antisymmetric(omega, pair_tol.max(PAIR_TOL))?;
        let t = self.tangent_block();
        let c = self.cotangent_block() + omega.transpose() * &t;
        let gens: Vec<DVector<f64>> = (0..n)
            .map(|j| {
                let mut g = DVector::zeros(2 * n);
                g.rows_mut(0, n).copy_from(&t.column(j));
                g.rows_mut(n, n).copy_from(&c.column(j));
                g
            })
            .collect();
        Self::new(n, &gens, RANK_TOL, pair_tol)
    }

    /// Gauge by a bivector: `(v, α) ↦ (v + Π♯α, α)`.
    pub fn gauge_bivector(&self, pi: &DMatrix<f64>, pair_tol: f64) -> Result<Self> {
        let n = self.base_dim;
        if pi.nrows() != n || pi.ncols() != n {
            return Err(GeomError::DimensionMismatch {
                expected: n,
                got: pi.nrows(),
                context: "gauge bivector".into(),
            });
        }
        check_antisymmetric(pi, pair_tol.max(PAIR_TOL))?;
        let c = self.cotangent_block();
        let t = self.tangent_block() + pi.transpose() * &c;
        let gens: Vec<DVector<f64>> = (0..n)
            .map(|j| {
                let mut g = DVector::zeros(2 * n);
                g.rows_mut(0, n).copy_from(&t.column(j));
                g.rows_mut(n, n).copy_from(&c.column(j));
                g
            })
            .collect();
        Self::new(n, &gens, RANK_TOL, pair_tol)
    }

    /// Pullback along `A: V → W` of a Lagrangian subspace over `W`:
    /// `{(v, Aᵀη) : (Av, η) ∈ L}`. Computed from the kernel of the block
    /// system `[A | -G_T]`.
    pub fn pullback(&self, map: &LinearMapData, rank_tol: f64, pair_tol: f64) -> Result<Self> {
        let a = &map.matrix;
        let m = self.base_dim; // dim W
        let n = a.ncols(); // dim V
        if a.nrows() != m {
            return Err(GeomError::DimensionMismatch {
                expected: m,
                got: a.nrows(),
                context: "pullback map target".into(),
            });
        }
        let gt = self.tangent_block();
        let gc = self.cotangent_block();
        // unknowns (v, c): A v = G_T c
        let mut block = DMatrix::zeros(m, n + m);
        block.view_mut((0, 0), (m, n)).copy_from(a);
        block.view_mut((0, n), (m, m)).copy_from(&(-&gt));
        let kernel = nullspace(&block, rank_tol)?;
        let at = a.transpose();
        let gens: Vec<DVector<f64>> = (0..kernel.ncols())
            .map(|j| {
                let k = kernel.column(j);
                let v = k.rows(0, n).into_owned();
                let c = k.rows(n, m).into_owned();
                let eta = &gc * c;
                let mut g = DVector::zeros(2 * n);
                g.rows_mut(0, n).copy_from(&v);
                g.rows_mut(n, n).copy_from(&(&at * eta));
                g
            })
            .collect();
        Self::new(n, &gens, rank_tol, pair_tol)
    }

    /// Pushforward along `A: V → W` of a Lagrangian subspace over `V`:
    /// `{(Av, η) : (v, Aᵀη) ∈ L}`.
    pub fn pushforward(&self, map: &LinearMapData, rank_tol: f64, pair_tol: f64) -> Result<Self> {
        let a = &map.matrix;
        let n = self.base_dim; // dim V
        let m = a.nrows(); // dim W
        if a.ncols() != n {
            return Err(GeomError::DimensionMismatch {
                expected: n,
                got: a.ncols(),
                context: "pushforward map source".into(),
            });
        }
        let gt = self.tangent_block();
        let gc = self.cotangent_block();
        // unknowns (eta, c): G_C c = Aᵀ eta
        let mut block = DMatrix::zeros(n, m + n);
        block.view_mut((0, 0), (n, m)).copy_from(&(-a.transpose()));
        block.view_mut((0, m), (n, n)).copy_from(&gc);
        let kernel = nullspace(&block, rank_tol)?;
        let gens: Vec<DVector<f64>> = (0..kernel.ncols())
            .map(|j| {
                let k = kernel.column(j);
                let eta = k.rows(0, m).into_owned();
                let c = k.rows(m, n).into_owned();
                let v = &gt * c;
                let mut g = DVector::zeros(2 * m);
                g.rows_mut(0, m).copy_from(&(a * v));
                g.rows_mut(m, m).copy_from(&eta);
                g
            })
            .collect();
        Self::new(m, &gens, rank_tol, pair_tol)
    }

    /// Tangential product: `{v + α₁ + α₂ : v + α_i ∈ D_i}`.
    pub fn tangential_product(&self, other: &LagrangianSubspace, rank_tol: f64, pair_tol: f64) -> Result<Self> {
        let n = self.base_dim;
        if other.base_dim != n {
            return Err(GeomError::DimensionMismatch {
                expected: n,
                got: other.base_dim,
                context: "tangential product".into(),
            });
        }
        let t1 = self.tangent_block();
        let c1 = self.cotangent_block();
        let t2 = other.tangent_block();
        let c2 = other.cotangent_block();
        // unknowns (c1, c2): T1 c1 = T2 c2
        let mut block = DMatrix::zeros(n, 2 * n);
        block.view_mut((0, 0), (n, n)).copy_from(&t1);
        block.view_mut((0, n), (n, n)).copy_from(&(-&t2));
        let kernel = nullspace(&block, rank_tol)?;
        let gens: Vec<DVector<f64>> = (0..kernel.ncols())
            .map(|j| {
                let k = kernel.column(j);
                let a = k.rows(0, n).into_owned();
                let b = k.rows(n, n).into_owned();
                let v = &t1 * &a;
                let alpha = &c1 * a + &c2 * b;
                let mut g = DVector::zeros(2 * n);
                g.rows_mut(0, n).copy_from(&v);
                g.rows_mut(n, n).copy_from(&alpha);
                g
            })
            .collect();
        Self::new(n, &gens, rank_tol, pair_tol)
    }

    /// `L ∩ (V ⊕ 0)` as a subspace of `V`.
    pub fn kernel_part(&self, rank_tol: f64) -> Result<Subspace> {
        let gc = self.cotangent_block();
        let null = nullspace(&gc, rank_tol)?;
        let gt = self.tangent_block();
        let vectors: Vec<DVector<f64>> = (0..null.ncols())
            .map(|j| &gt * null.column(j).into_owned())
            .collect();
        Subspace::span(self.base_dim, &vectors, rank_tol)
    }

    /// Dimension of `L ∩ (V ⊕ 0)` with the ambiguity band surfaced.
    pub fn kernel_dim(&self, rank_tol: f64) -> Result<usize> {
        Ok(self.kernel_part(rank_tol)?.dim())
    }

    /// Projection of `L` to the tangent factor (the anchor image).
    pub fn range_part(&self, rank_tol: f64) -> Result<Subspace> {
        let gt = self.tangent_block();
        let vectors: Vec<DVector<f64>> = (0..gt.ncols()).map(|j| gt.column(j).into_owned()).collect();
        Subspace::span(self.base_dim, &vectors, rank_tol)
    }

    /// Recover `Π` with `L = Gr(Π)`; fails with `NotAGraph` when
    /// `L ∩ (V ⊕ 0) ≠ 0`.
    pub fn as_bivector(&self, rank_tol: f64) -> Result<DMatrix<f64>> {
        let n = self.base_dim;
        let gc = self.cotangent_block();
        let svd = gc.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if smax == 0.0 || smin <= rank_tol * smax {
            let kernel_dim = self.kernel_dim(rank_tol).unwrap_or(n);
            return Err(GeomError::NotAGraph { kernel_dim });
        }
        // solve G_C X = I, then Π = (G_T X)ᵀ
        let x = svd
            .solve(&DMatrix::identity(n, n), 0.0)
            .map_err(|_| GeomError::NotAGraph { kernel_dim: 1 })?;
        let m = self.tangent_block() * x;
        Ok(m.transpose())
    }

    /// Recover `Ω` with `L = Gr(Ω)`; fails when `L ∩ (0 ⊕ V*) ≠ 0`.
    pub fn as_two_form(&self, rank_tol: f64) -> Result<DMatrix<f64>> {
        let n = self.base_dim;
        let gt = self.tangent_block();
        let svd = gt.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if smax == 0.0 || smin <= rank_tol * smax {
            return Err(GeomError::NotAGraph { kernel_dim: 1 });
        }
        let x = svd
            .solve(&DMatrix::identity(n, n), 0.0)
            .map_err(|_| GeomError::NotAGraph { kernel_dim: 1 })?;
        let m = self.cotangent_block() * x;
        Ok(m.transpose())
    }

    /// Dimension of `{(v, 0) ∈ L : v ∈ W}` for a subspace `W` of the
    /// tangent factor. Used for strongness checks of forward Dirac maps.
    pub fn kernel_intersection_dim(&self, w: &Subspace, rank_tol: f64) -> Result<usize> {
        let n = self.base_dim;
        let gt = self.tangent_block();
        let gc = self.cotangent_block();
        // v = G_T c must lie in W, and G_C c = 0.
        let wb = w.basis();
        let proj_out = DMatrix::identity(n, n) - wb * wb.transpose();
        let mut block = DMatrix::zeros(2 * n, n);
        block.view_mut((0, 0), (n, n)).copy_from(&(&proj_out * &gt));
        block.view_mut((n, 0), (n, n)).copy_from(&gc);
        let null = nullspace(&block, rank_tol)?;
        // count independent v = G_T c among solutions
        let vectors: Vec<DVector<f64>> = (0..null.ncols())
            .map(|j| &gt * null.column(j).into_owned())
            .collect();
        Ok(Subspace::span(n, &vectors, rank_tol)?.dim())
    }
}

/// Nullspace basis via SVD, with the rank-ambiguity band surfaced.
pub fn nullspace(m: &DMatrix<f64>, rank_tol: f64) -> Result<DMatrix<f64>> {
    let rows = m.nrows();
    let cols = m.ncols();
    if cols == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    if rows == 0 {
        return Ok(DMatrix::identity(cols, cols));
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let smax = svd.singular_values.max();
    let mut null_cols: Vec<DVector<f64>> = Vec::new();
    for i in 0..cols {
        let s = if i < svd.singular_values.len() {
            svd.singular_values[i]
        } else {
            0.0
        };
        let ratio = if smax > 0.0 { s / smax } else { 0.0 };
        if ratio <= rank_tol {
            null_cols.push(v_t.row(i).transpose());
        } else if ratio < AMBIGUITY_FACTOR * rank_tol {
            return Err(GeomError::RankAmbiguous {
                ratio,
                lo: rank_tol,
                hi: AMBIGUITY_FACTOR * rank_tol,
            });
        }
    }
    if null_cols.is_empty() {
        return Ok(DMatrix::zeros(cols, 0));
    }
    Ok(DMatrix::from_columns(
        &null_cols.iter().map(|v| v.column(0).into_owned()).collect::<Vec<_>>(),
    ))
}

/// `Π♯α = Πᵀα`.
pub fn sharp_apply(pi: &DMatrix<f64>, alpha: &DVector<f64>) -> DVector<f64> {
    pi.transpose() * alpha
}

/// `ι_vΩ = Ωᵀv`.
pub fn flat_apply(omega: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
    omega.transpose() * v
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn dv(vals: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(vals)
    }

    fn random_antisym(n: usize, rng: &mut StdRng) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let x = rng.gen_range(-1.0..1.0);
                m[(i, j)] = x;
                m[(j, i)] = -x;
            }
        }
        m
    }

    #[test]
    fn span_dependent_vectors() {
        let s = Subspace::span(2, &[dv(&[1.0, 0.0]), dv(&[2.0, 0.0])], RANK_TOL).unwrap();
        assert_eq!(s.dim(), 1);
        assert!(s.distance_to(&dv(&[3.0, 0.0])) < 1e-12);
    }

    #[test]
    fn span_empty_is_zero() {
        let s = Subspace::span(3, &[], RANK_TOL).unwrap();
        assert_eq!(s.dim(), 0);
    }

    #[test]
    fn span_rank_two_from_three() {
        // third = first - second, exact elimination
        let s = Subspace::span(
            3,
            &[dv(&[1.0, 1.0, 0.0]), dv(&[0.0, 1.0, 1.0]), dv(&[1.0, 0.0, -1.0])],
            RANK_TOL,
        )
        .unwrap();
        assert_eq!(s.dim(), 2);
    }

    #[test]
    fn span_ambiguous_pivot_is_an_error() {
        let eps = 5e-10; // inside (1e-10, 1e-9) relative band
        let r = Subspace::span(2, &[dv(&[1.0, 0.0]), dv(&[1.0, eps])], RANK_TOL);
        assert!(matches!(r, Err(GeomError::RankAmbiguous { .. })));
    }

    #[test]
    fn graph_of_zero_bivector_is_cotangent_space() {
        let l = LagrangianSubspace::graph_of_bivector(&DMatrix::zeros(2, 2), RANK_TOL, PAIR_TOL).unwrap();
        assert_eq!(l.base_dim(), 2);
        assert!(l.element_distance(&dv(&[0.0, 0.0]), &dv(&[1.0, 0.0])) < 1e-12);
        assert!(l.element_distance(&dv(&[0.0, 0.0]), &dv(&[0.0, 1.0])) < 1e-12);
        assert!(l.element_distance(&dv(&[1.0, 0.0]), &dv(&[0.0, 0.0])) > 0.5);
    }

    #[test]
    fn graph_of_symplectic_bivector_n2() {
        // Π₁₂ = 1: generators (e₂; e¹), (−e₁; e²)
        let mut pi = DMatrix::zeros(2, 2);
        pi[(0, 1)] = 1.0;
        pi[(1, 0)] = -1.0;
        let l = LagrangianSubspace::graph_of_bivector(&pi, RANK_TOL, PAIR_TOL).unwrap();
        assert!(l.element_distance(&dv(&[0.0, 1.0]), &dv(&[1.0, 0.0])) < 1e-12);
        assert!(l.element_distance(&dv(&[-1.0, 0.0]), &dv(&[0.0, 1.0])) < 1e-12);
    }

    #[test]
    fn graph_of_two_form_n2() {
        let mut om = DMatrix::zeros(2, 2);
        om[(0, 1)] = 1.0;
        om[(1, 0)] = -1.0;
        let l = LagrangianSubspace::graph_of_two_form(&om, RANK_TOL, PAIR_TOL).unwrap();
        assert!(l.element_distance(&dv(&[1.0, 0.0]), &dv(&[0.0, 1.0])) < 1e-12);
        assert!(l.element_distance(&dv(&[0.0, 1.0]), &dv(&[-1.0, 0.0])) < 1e-12);
    }

    #[test]
    fn not_antisymmetric_rejected() {
        let mut pi = DMatrix::zeros(2, 2);
        pi[(0, 1)] = 1.0;
        pi[(1, 0)] = -0.9;
        assert!(matches!(
            LagrangianSubspace::graph_of_bivector(&pi, RANK_TOL, PAIR_TOL),
            Err(GeomError::NotAntisymmetric { .. })
        ));
    }

    #[test]
    fn gauge_two_form_additivity() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..25 {
            let n = rng.gen_range(2..=6);
            let l = LagrangianSubspace::graph_of_bivector(&random_antisym(n, &mut rng), RANK_TOL, PAIR_TOL).unwrap();
            let o1 = random_antisym(n, &mut rng);
            let o2 = random_antisym(n, &mut rng);
            let a = l
                .gauge_two_form(&o1, PAIR_TOL)
                .unwrap()
                .gauge_two_form(&o2, PAIR_TOL)
                .unwrap();
            let b = l.gauge_two_form(&(&o1 + &o2), PAIR_TOL).unwrap();
            let cmp = a.compare(&b, 1e-10);
            assert!(cmp.equal, "distance {}", cmp.distance);
        }
    }

    #[test]
    fn gauge_identities() {
        let mut rng = StdRng::seed_from_u64(8);
        let n = 3;
        let pi = random_antisym(n, &mut rng);
        let l = LagrangianSubspace::graph_of_bivector(&pi, RANK_TOL, PAIR_TOL).unwrap();
        // gauge by zero = identity
        let z = DMatrix::zeros(n, n);
        assert!(l.gauge_two_form(&z, PAIR_TOL).unwrap().compare(&l, 1e-12).equal);
        assert!(l.gauge_bivector(&z, PAIR_TOL).unwrap().compare(&l, 1e-12).equal);
        // gauge_bivector(0 ⊕ V*, Π) = Gr(Π)
        let cot = LagrangianSubspace::cotangent_space(n);
        assert!(cot
            .gauge_bivector(&pi, PAIR_TOL)
            .unwrap()
            .compare(&l, 1e-12)
            .equal);
        // gauge_bivector(T ⊕ 0, Π) = T ⊕ 0
        let tan = LagrangianSubspace::tangent_space(n);
        assert!(tan.gauge_bivector(&pi, PAIR_TOL).unwrap().compare(&tan, 1e-12).equal);
        // gauge_two_form(0 ⊕ V*, Ω) = 0 ⊕ V*
        let om = random_antisym(n, &mut rng);
        assert!(cot.gauge_two_form(&om, PAIR_TOL).unwrap().compare(&cot, 1e-12).equal);
    }

    #[test]
    fn pullback_identity_and_zero() {
        let mut rng = StdRng::seed_from_u64(9);
        let n = 4;
        let pi = random_antisym(n, &mut rng);
        let l = LagrangianSubspace::graph_of_bivector(&pi, RANK_TOL, PAIR_TOL).unwrap();
        let id = LinearMapData::new(DMatrix::identity(n, n)).unwrap();
        assert!(l.pullback(&id, RANK_TOL, PAIR_TOL).unwrap().compare(&l, 1e-10).equal);
        // zero map: pullback is TV ⊕ 0
        let z = LinearMapData::new(DMatrix::zeros(n, 3)).unwrap();
        let pb = l.pullback(&z, RANK_TOL, PAIR_TOL).unwrap();
        let tan = LagrangianSubspace::tangent_space(3);
        assert!(pb.compare(&tan, 1e-10).equal);
    }

    #[test]
    fn pullback_of_two_form_graph_is_pulled_back_form() {
        let mut rng = StdRng::seed_from_u64(10);
        for _ in 0..20 {
            let m = rng.gen_range(2..=5);
            let n = rng.gen_range(2..=5);
            let om = random_antisym(m, &mut rng);
            let a = DMatrix::from_fn(m, n, |_, _| rng.gen_range(-1.0..1.0));
            let l = LagrangianSubspace::graph_of_two_form(&om, RANK_TOL, PAIR_TOL).unwrap();
            let pb = l
                .pullback(&LinearMapData::new(a.clone()).unwrap(), RANK_TOL, PAIR_TOL)
                .unwrap();
            let target = LagrangianSubspace::graph_of_two_form(&(a.transpose() * &om * &a), RANK_TOL, 1e-8).unwrap();
            let cmp = pb.compare(&target, 1e-9);
            assert!(cmp.equal, "distance {}", cmp.distance);
        }
    }

    #[test]
    fn pushforward_of_bivector_graph_is_pushed_bivector() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.gen_range(2..=5);
            let m = rng.gen_range(2..=5);
            let pi = random_antisym(n, &mut rng);
            let a = DMatrix::from_fn(m, n, |_, _| rng.gen_range(-1.0..1.0));
            let l = LagrangianSubspace::graph_of_bivector(&pi, RANK_TOL, PAIR_TOL).unwrap();
            let pf = l
                .pushforward(&LinearMapData::new(a.clone()).unwrap(), RANK_TOL, PAIR_TOL)
                .unwrap();
            let target = LagrangianSubspace::graph_of_bivector(&(&a * &pi * a.transpose()), RANK_TOL, 1e-8).unwrap();
            let cmp = pf.compare(&target, 1e-9);
            assert!(cmp.equal, "distance {}", cmp.distance);
        }
    }

    #[test]
    fn star_identities() {
        let mut rng = StdRng::seed_from_u64(12);
        for _ in 0..20 {
            let n = rng.gen_range(2..=6);
            let pi = random_antisym(n, &mut rng);
            let om = random_antisym(n, &mut rng);
            let d = LagrangianSubspace::graph_of_bivector(&pi, RANK_TOL, PAIR_TOL)
                .unwrap()
                .gauge_two_form(&random_antisym(n, &mut rng), PAIR_TOL)
                .unwrap();
            let tan = LagrangianSubspace::tangent_space(n);
            let cot = LagrangianSubspace::cotangent_space(n);
            // D ⋆ (T ⊕ 0) = D
            assert!(d
                .tangential_product(&tan, RANK_TOL, PAIR_TOL)
                .unwrap()
                .compare(&d, 1e-10)
                .equal);
            // D ⋆ Gr(ω) = gauge of D
            let gr = LagrangianSubspace::graph_of_two_form(&om, RANK_TOL, PAIR_TOL).unwrap();
            let star = d.tangential_product(&gr, RANK_TOL, PAIR_TOL).unwrap();
            let gauged = d.gauge_two_form(&om, PAIR_TOL).unwrap();
            let cmp = star.compare(&gauged, 1e-9);
            assert!(cmp.equal, "distance {}", cmp.distance);
            // Gr(Π) ⋆ (0 ⊕ V*) = 0 ⊕ V*
            let g = LagrangianSubspace::graph_of_bivector(&pi, RANK_TOL, PAIR_TOL).unwrap();
            assert!(g
                .tangential_product(&cot, RANK_TOL, PAIR_TOL)
                .unwrap()
                .compare(&cot, 1e-10)
                .equal);
        }
    }

    #[test]
    fn graph_two_form_is_gauge_of_tangent_space() {
        let mut rng = StdRng::seed_from_u64(13);
        let n = 4;
        let om = random_antisym(n, &mut rng);
        let a = LagrangianSubspace::graph_of_two_form(&om, RANK_TOL, PAIR_TOL).unwrap();
        let b = LagrangianSubspace::tangent_space(n).gauge_two_form(&om, PAIR_TOL).unwrap();
        assert!(a.compare(&b, 1e-12).equal);
    }

    #[test]
    fn kernel_and_graph_recovery() {
        let mut rng = StdRng::seed_from_u64(14);
        let n = 4;
        // kernel_part(T ⊕ 0) = V
        let tan = LagrangianSubspace::tangent_space(n);
        assert_eq!(tan.kernel_part(RANK_TOL).unwrap().dim(), n);
        // round trip
        for _ in 0..20 {
            let pi = random_antisym(n, &mut rng);
            let l = LagrangianSubspace::graph_of_bivector(&pi, RANK_TOL, PAIR_TOL).unwrap();
            let rec = l.as_bivector(RANK_TOL).unwrap();
            assert!((rec - &pi).amax() < 1e-10);
        }
        // as_bivector fails on T ⊕ 0
        assert!(matches!(tan.as_bivector(RANK_TOL), Err(GeomError::NotAGraph { .. })));
        // as_two_form round trip
        let om = random_antisym(n, &mut rng);
        let l = LagrangianSubspace::graph_of_two_form(&om, RANK_TOL, PAIR_TOL).unwrap();
        assert!((l.as_two_form(RANK_TOL).unwrap() - om).amax() < 1e-10);
    }

    #[test]
    fn subspace_equality_cases() {
        let s = Subspace::span(2, &[dv(&[1.0, 0.0])], RANK_TOL).unwrap();
        let cmp = s.compare(&s, 1e-12);
        assert!(cmp.equal && cmp.distance == 0.0);
        let t = Subspace::span(2, &[dv(&[0.0, 1.0])], RANK_TOL).unwrap();
        let cmp = s.compare(&t, 1e-8);
        assert!(!cmp.equal);
        assert!((cmp.distance - 1.0).abs() < 1e-12);
        // near-equal spans within tolerance
        let eps = 1e-12;
        let u = Subspace::span(2, &[dv(&[1.0, eps])], RANK_TOL).unwrap();
        let cmp = s.compare(&u, 1e-8);
        assert!(cmp.equal);
        let expected = eps / (1.0 + eps * eps).sqrt();
        assert!((cmp.distance - expected).abs() < 1e-13);
    }

    #[test]
    fn pullback_functoriality() {
        let mut rng = StdRng::seed_from_u64(15);
        for _ in 0..20 {
            let n = rng.gen_range(2..=5);
            let m = rng.gen_range(2..=5);
            let k = rng.gen_range(2..=5);
            let pi = random_antisym(k, &mut rng);
            let l = LagrangianSubspace::graph_of_bivector(&pi, RANK_TOL, PAIR_TOL).unwrap();
            let a = DMatrix::from_fn(m, n, |_, _| rng.gen_range(-1.0..1.0)); // V → W
            let b = DMatrix::from_fn(k, m, |_, _| rng.gen_range(-1.0..1.0)); // W → U
            let ba = LinearMapData::new(&b * &a).unwrap();
            let one = l.pullback(&ba, RANK_TOL, PAIR_TOL).unwrap();
            let two = l
                .pullback(&LinearMapData::new(b).unwrap(), RANK_TOL, PAIR_TOL)
                .unwrap()
                .pullback(&LinearMapData::new(a).unwrap(), RANK_TOL, PAIR_TOL)
                .unwrap();
            let cmp = one.compare(&two, 1e-9);
            assert!(cmp.equal, "distance {}", cmp.distance);
        }
    }

    #[test]
    fn pushforward_pullback_roundtrip_for_surjections() {
        let mut rng = StdRng::seed_from_u64(16);
        for _ in 0..10 {
            let m = rng.gen_range(2..=4);
            let n = m + rng.gen_range(1..=2);
            let pi = random_antisym(m, &mut rng);
            let l = LagrangianSubspace::graph_of_bivector(&pi, RANK_TOL, PAIR_TOL).unwrap();
            // surjective A with independent rows
            let a = loop {
                let c = DMatrix::from_fn(m, n, |_, _| rng.gen_range(-1.0..1.0));
                if c.clone().svd(false, false).singular_values.min() > 0.1 {
                    break c;
                }
            };
            let map = LinearMapData::new(a).unwrap();
            let pb = l.pullback(&map, RANK_TOL, PAIR_TOL).unwrap();
            let pf = pb.pushforward(&map, RANK_TOL, PAIR_TOL).unwrap();
            let cmp = pf.compare(&l, 1e-9);
            assert!(cmp.equal, "distance {}", cmp.distance);
        }
    }
}
