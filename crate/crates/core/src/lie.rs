//! Lie algebras via structure constants, matrix-group elements for the
//! scenario groups, coadjoint actions and Lie–Poisson structures.
//!
//! Conventions (used consistently across the crate):
//! * infinitesimal actions are generated along `exp(-t v)`, so that
//!   `v ↦ a(v)` is a Lie algebra homomorphism;
//! * `Ad*_g = (Ad_{g⁻¹})ᵀ` in coordinates; its generator along `exp(-t v)`
//!   is the coadjoint formula `a(v)_ξ = ⟨ξ, [v, ·]⟩ = π♯_{𝔤,ξ}(v)`;
//! * the Lie–Poisson matrix is `Π^{ij}(ξ) = ⟨ξ, [e_i, e_j]⟩`.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::error::{GeomError, Result};
use crate::fields::{Component, TensorField};
use crate::linear_dirac::nullspace;
use crate::poly::Polynomial;

/// A Lie algebra given by structure constants `c^k_{ij}`.
#[derive(Debug, Clone)]
pub struct LieAlgebraData {
    dim: usize,
    /// `c[(k * dim + i) * dim + j] = c^k_{ij}`.
    constants: Vec<f64>,
}

const JACOBI_TOL: f64 = 1e-12;

impl LieAlgebraData {
    pub fn new(dim: usize, constants: Vec<f64>) -> Result<Self> {
        if constants.len() != dim * dim * dim {
            return Err(GeomError::DimensionMismatch {
                expected: dim * dim * dim,
                got: constants.len(),
                context: "structure constants".into(),
            });
        }
        let g = LieAlgebraData { dim, constants };
        // antisymmetry in the lower indices
        for k in 0..dim {
            for i in 0..dim {
                for j in 0..dim {
                    let s = g.c(k, i, j) + g.c(k, j, i);
                    if s.abs() > JACOBI_TOL {
                        return Err(GeomError::NotAntisymmetric {
                            residual: s.abs(),
                            tol: JACOBI_TOL,
                        });
                    }
                }
            }
        }
        // Jacobi identity
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        let mut s = 0.0;
                        for m in 0..dim {
                            s += g.c(m, i, j) * g.c(l, m, k)
                                + g.c(m, j, k) * g.c(l, m, i)
                                + g.c(m, k, i) * g.c(l, m, j);
                        }
                        if s.abs() > JACOBI_TOL {
                            return Err(GeomError::ConfigInvalid {
                                field: "structure constants".into(),
                                message: format!("Jacobi residual {s:.3e} at ({i},{j},{k},{l})"),
                            });
                        }
                    }
                }
            }
        }
        Ok(g)
    }

    /// `so(3)` with `[e_i, e_j] = ε_{ijk} e_k`.
    pub fn so3() -> Self {
        let mut c = vec![0.0; 27];
        let eps = |i: usize, j: usize, k: usize| -> f64 {
            match (i, j, k) {
                (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
                (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
                _ => 0.0,
            }
        };
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    c[(k * 3 + i) * 3 + j] = eps(i, j, k);
                }
            }
        }
        LieAlgebraData { dim: 3, constants: c }
    }

    /// The Pauli-basis normalization: `[e_i, e_j] = 2 ε_{ijk} e_k`.
    pub fn su2_pauli() -> Self {
        let so3 = Self::so3();
        LieAlgebraData {
            dim: 3,
            constants: so3.constants.iter().map(|c| 2.0 * c).collect(),
        }
    }

    /// Heisenberg algebra: `[e_1, e_2] = e_3`.
    pub fn heisenberg() -> Self {
        let mut c = vec![0.0; 27];
        c[(2 * 3 + 0) * 3 + 1] = 1.0;
        c[(2 * 3 + 1) * 3 + 0] = -1.0;
        LieAlgebraData { dim: 3, constants: c }
    }

    pub fn abelian(dim: usize) -> Self {
        LieAlgebraData {
            dim,
            constants: vec![0.0; dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn c(&self, k: usize, i: usize, j: usize) -> f64 {
        self.constants[(k * self.dim + i) * self.dim + j]
    }

    /// `[v, w]^k = Σ_{ij} c^k_{ij} v^i w^j`.
    pub fn bracket(&self, v: &DVector<f64>, w: &DVector<f64>) -> Result<DVector<f64>> {
        if v.len() != self.dim || w.len() != self.dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim,
                got: v.len().max(w.len()),
                context: "bracket arguments".into(),
            });
        }
        let mut out = DVector::zeros(self.dim);
        for k in 0..self.dim {
            let mut s = 0.0;
            for i in 0..self.dim {
                for j in 0..self.dim {
                    s += self.c(k, i, j) * v[i] * w[j];
                }
            }
            out[k] = s;
        }
        Ok(out)
    }

    /// Lie–Poisson matrix at `ξ`: `Π^{ij} = ⟨ξ, [e_i, e_j]⟩`.
    pub fn lie_poisson(&self, xi: &DVector<f64>) -> Result<DMatrix<f64>> {
        if xi.len() != self.dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim,
                got: xi.len(),
                context: "lie_poisson point".into(),
            });
        }
        Ok(DMatrix::from_fn(self.dim, self.dim, |i, j| {
            (0..self.dim).map(|k| self.c(k, i, j) * xi[k]).sum()
        }))
    }

    /// The Lie–Poisson bivector field on `𝔤*` (linear polynomial backend).
    pub fn lie_poisson_field(&self) -> Result<TensorField> {
        let n = self.dim;
        let mut upper = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                let mut p = Polynomial::zero(n);
                for k in 0..n {
                    let c = self.c(k, i, j);
                    if c != 0.0 {
                        p = p.add(&Polynomial::var(n, k).scale(c));
                    }
                }
                upper.push(Component::Poly(p));
            }
        }
        TensorField::bivector_from_upper(n, upper)
    }

    /// Infinitesimal coadjoint action `a(v)_ξ = ⟨ξ, [v, ·]⟩ = Π♯_ξ v`.
    pub fn coadjoint_inf(&self, v: &DVector<f64>, xi: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(self.lie_poisson(xi)?.transpose() * v)
    }

    /// Stabilizer algebra at `ξ`, computed as `ker Π_ξ`.
    pub fn stabilizer(&self, xi: &DVector<f64>, rank_tol: f64) -> Result<DMatrix<f64>> {
        nullspace(&self.lie_poisson(xi)?, rank_tol)
    }
}

// --- so(3) closed forms -------------------------------------------------

pub fn hat(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v[2], v[1], v[2], 0.0, -v[0], -v[1], v[0], 0.0)
}

pub fn unhat(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)])
}

/// Rodrigues formula for `exp(x^)`.
pub fn so3_exp(x: &Vector3<f64>) -> Matrix3<f64> {
    let th2 = x.norm_squared();
    let th = th2.sqrt();
    let (a, b) = if th < 1e-4 {
        (1.0 - th2 / 6.0 + th2 * th2 / 120.0, 0.5 - th2 / 24.0 + th2 * th2 / 720.0)
    } else {
        (th.sin() / th, (1.0 - th.cos()) / th2)
    };
    let xh = hat(x);
    Matrix3::identity() + xh * a + xh * xh * b
}

/// Inverse of `so3_exp` for rotation angle `< π`.
pub fn so3_log(r: &Matrix3<f64>) -> Vector3<f64> {
    let cos = ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    let th = cos.acos();
    let anti = unhat(&((r - r.transpose()) * 0.5));
    if th < 1e-6 {
        anti * (1.0 + th * th / 6.0)
    } else {
        anti * (th / th.sin())
    }
}

fn jac_coeffs(th2: f64) -> (f64, f64) {
    let th = th2.sqrt();
    if th < 1e-4 {
        (0.5 - th2 / 24.0 + th2 * th2 / 720.0, 1.0 / 6.0 - th2 / 120.0 + th2 * th2 / 5040.0)
    } else {
        ((1.0 - th.cos()) / th2, (th - th.sin()) / (th2 * th))
    }
}

/// Spatial (left) Jacobian: `Ṙ R⁻¹ = (J_spatial(x) ẋ)^` for `R = exp(x^)`.
pub fn so3_jac_spatial(x: &Vector3<f64>) -> Matrix3<f64> {
    let (a, b) = jac_coeffs(x.norm_squared());
    let xh = hat(x);
    Matrix3::identity() + xh * a + xh * xh * b
}

/// Body (right) Jacobian: `R⁻¹ Ṙ = (J_body(x) ẋ)^`.
pub fn so3_jac_body(x: &Vector3<f64>) -> Matrix3<f64> {
    so3_jac_spatial(&(-x))
}

fn jac_inv_coeff(th2: f64) -> f64 {
    let th = th2.sqrt();
    if th < 1e-4 {
        1.0 / 12.0 + th2 / 720.0 + th2 * th2 / 30240.0
    } else {
        1.0 / th2 - (1.0 + th.cos()) / (2.0 * th * th.sin())
    }
}

pub fn so3_jac_spatial_inv(x: &Vector3<f64>) -> Matrix3<f64> {
    let xh = hat(x);
    Matrix3::identity() - xh * 0.5 + xh * xh * jac_inv_coeff(x.norm_squared())
}

pub fn so3_jac_body_inv(x: &Vector3<f64>) -> Matrix3<f64> {
    so3_jac_spatial_inv(&(-x))
}

// --- group elements ------------------------------------------------------

/// Matrix-group elements for the scenario groups.
#[derive(Debug, Clone)]
pub enum GroupElement {
    SO3(Matrix3<f64>),
    U1(f64),
    Torus(Vec<f64>),
    /// A general matrix-group element; supported for multiplication,
    /// inversion and the exponential only.
    Generic(DMatrix<f64>),
}

const ORTHOGONALITY_TOL: f64 = 1e-10;

impl GroupElement {
    pub fn so3_from_exp(v: &Vector3<f64>, t: f64) -> Self {
        GroupElement::SO3(so3_exp(&(v * t)))
    }

    pub fn so3(m: Matrix3<f64>) -> Result<Self> {
        let residual = (m.transpose() * m - Matrix3::identity()).amax();
        if residual > ORTHOGONALITY_TOL {
            return Err(GeomError::RepresentationMismatch(format!(
                "orthogonality residual {residual:.3e}"
            )));
        }
        Ok(GroupElement::SO3(m))
    }

    pub fn identity_like(&self) -> Self {
        match self {
            GroupElement::SO3(_) => GroupElement::SO3(Matrix3::identity()),
            GroupElement::U1(_) => GroupElement::U1(0.0),
            GroupElement::Torus(a) => GroupElement::Torus(vec![0.0; a.len()]),
            GroupElement::Generic(m) => GroupElement::Generic(DMatrix::identity(m.nrows(), m.ncols())),
        }
    }

    pub fn multiply(&self, other: &GroupElement) -> Result<GroupElement> {
        match (self, other) {
            (GroupElement::SO3(a), GroupElement::SO3(b)) => Ok(GroupElement::SO3(a * b)),
            (GroupElement::U1(a), GroupElement::U1(b)) => Ok(GroupElement::U1(a + b)),
            (GroupElement::Torus(a), GroupElement::Torus(b)) if a.len() == b.len() => Ok(GroupElement::Torus(
                a.iter().zip(b).map(|(x, y)| x + y).collect(),
            )),
            (GroupElement::Generic(a), GroupElement::Generic(b)) => Ok(GroupElement::Generic(a * b)),
            _ => Err(GeomError::RepresentationMismatch("multiply".into())),
        }
    }

    pub fn inverse(&self) -> Result<GroupElement> {
        match self {
            GroupElement::SO3(a) => Ok(GroupElement::SO3(a.transpose())),
            GroupElement::U1(a) => Ok(GroupElement::U1(-a)),
            GroupElement::Torus(a) => Ok(GroupElement::Torus(a.iter().map(|x| -x).collect())),
            GroupElement::Generic(a) => a
                .clone()
                .try_inverse()
                .map(GroupElement::Generic)
                .ok_or(GeomError::NotInvertible {
                    cond: f64::INFINITY,
                    limit: 0.0,
                }),
        }
    }

    /// `Ad_g v` in algebra coordinates (matrix `g` for SO(3), identity for
    /// abelian groups).
    pub fn adjoint(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        match self {
            GroupElement::SO3(g) => {
                let w = g * Vector3::new(v[0], v[1], v[2]);
                Ok(DVector::from_row_slice(&[w[0], w[1], w[2]]))
            }
            GroupElement::U1(_) | GroupElement::Torus(_) => Ok(v.clone()),
            GroupElement::Generic(_) => Err(GeomError::RepresentationMismatch(
                "adjoint on generic matrix group".into(),
            )),
        }
    }

    /// `Ad*_g ξ = (Ad_{g⁻¹})ᵀ ξ`.
    pub fn coadjoint(&self, xi: &DVector<f64>) -> Result<DVector<f64>> {
        match self {
            // (Ad_{g⁻¹})ᵀ = (gᵀ)ᵀ = g for SO(3)
            GroupElement::SO3(g) => {
                let w = g * Vector3::new(xi[0], xi[1], xi[2]);
                Ok(DVector::from_row_slice(&[w[0], w[1], w[2]]))
            }
            GroupElement::U1(_) | GroupElement::Torus(_) => Ok(xi.clone()),
            GroupElement::Generic(_) => Err(GeomError::RepresentationMismatch(
                "coadjoint on generic matrix group".into(),
            )),
        }
    }

    /// Left Maurer–Cartan form: reads a tangent matrix `V` at `g` back into
    /// the algebra via `g⁻¹ V`.
    pub fn maurer_cartan_left(&self, v_tangent: &DMatrix<f64>) -> Result<DVector<f64>> {
        match self {
            GroupElement::SO3(g) => {
                let m = g.transpose()
                    * Matrix3::from_fn(|i, j| v_tangent[(i, j)]);
                let w = unhat(&m);
                Ok(DVector::from_row_slice(&[w[0], w[1], w[2]]))
            }
            _ => Err(GeomError::RepresentationMismatch(
                "maurer_cartan_left needs a matrix representation".into(),
            )),
        }
    }
}

/// Matrix exponential by scaling and squaring of the series, to 1e-12.
pub fn generic_exp(m: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    let a = m * t;
    let norm = a.amax();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = &a / 2f64.powi(squarings as i32);
    let n = m.nrows();
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for k in 1..=20 {
        term = &term * &scaled / k as f64;
        sum += &term;
        if term.amax() < 1e-16 {
            break;
        }
    }
    let mut out = sum;
    for _ in 0..squarings {
        out = &out * &out;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(vals: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(vals)
    }

    #[test]
    fn so3_bracket_table() {
        let g = LieAlgebraData::so3();
        let b = g.bracket(&dv(&[1.0, 0.0, 0.0]), &dv(&[0.0, 1.0, 0.0])).unwrap();
        assert_eq!(b, dv(&[0.0, 0.0, 1.0]));
        // [v, v] = 0
        let v = dv(&[0.3, -1.2, 0.5]);
        assert_eq!(g.bracket(&v, &v).unwrap().amax(), 0.0);
        // abelian is zero
        let a = LieAlgebraData::abelian(3);
        assert_eq!(a.bracket(&v, &v.clone().scale(2.0)).unwrap().amax(), 0.0);
    }

    #[test]
    fn constructors_satisfy_jacobi() {
        LieAlgebraData::new(3, LieAlgebraData::so3().constants.clone()).unwrap();
        LieAlgebraData::new(3, LieAlgebraData::su2_pauli().constants.clone()).unwrap();
        LieAlgebraData::new(3, LieAlgebraData::heisenberg().constants.clone()).unwrap();
    }

    #[test]
    fn bad_constants_rejected() {
        // break antisymmetry
        let mut c = LieAlgebraData::so3().constants.clone();
        c[(2 * 3 + 0) * 3 + 1] = 2.0;
        assert!(LieAlgebraData::new(3, c).is_err());
    }

    #[test]
    fn lie_poisson_so3_at_e3() {
        let g = LieAlgebraData::so3();
        let pi = g.lie_poisson(&dv(&[0.0, 0.0, 1.0])).unwrap();
        assert_eq!(pi[(0, 1)], 1.0);
        assert_eq!(pi[(1, 0)], -1.0);
        assert_eq!(pi[(0, 2)], 0.0);
        assert_eq!(pi[(1, 2)], 0.0);
        // sharp(e¹) = coadjoint generator = (0, 1, 0)
        let v = g.coadjoint_inf(&dv(&[1.0, 0.0, 0.0]), &dv(&[0.0, 0.0, 1.0])).unwrap();
        assert_eq!(v, dv(&[0.0, 1.0, 0.0]));
        // stabilizer at e3 is span{e3}
        let st = g.stabilizer(&dv(&[0.0, 0.0, 1.0]), 1e-10).unwrap();
        assert_eq!(st.ncols(), 1);
        assert!(st[(2, 0)].abs() > 0.99);
    }

    #[test]
    fn lie_poisson_field_is_exactly_poisson() {
        for g in [
            LieAlgebraData::so3(),
            LieAlgebraData::su2_pauli(),
            LieAlgebraData::heisenberg(),
        ] {
            let field = g.lie_poisson_field().unwrap();
            for (_, _, _, c) in field.schouten_self().unwrap() {
                assert!(c.is_zero_poly());
            }
        }
    }

    #[test]
    fn rodrigues_full_turn() {
        let r = so3_exp(&(Vector3::new(0.0, 0.0, 1.0) * (2.0 * std::f64::consts::PI)));
        assert!((r - Matrix3::identity()).amax() < 1e-10);
    }

    #[test]
    fn log_inverts_exp() {
        let x = Vector3::new(0.3, -0.8, 0.5);
        let v = so3_log(&so3_exp(&x));
        assert!((v - x).amax() < 1e-12);
    }

    #[test]
    fn coadjoint_preserves_norm_for_so3() {
        let g = GroupElement::so3_from_exp(&Vector3::new(0.2, 0.5, -0.4), 1.0);
        let xi = dv(&[0.1, -2.0, 0.7]);
        let out = g.coadjoint(&xi).unwrap();
        assert!((out.norm() - xi.norm()).abs() < 1e-12);
    }

    #[test]
    fn maurer_cartan_at_identity_is_unhat() {
        let g = GroupElement::SO3(Matrix3::identity());
        let v = Vector3::new(0.3, 0.1, -0.2);
        let mat = hat(&v);
        let tangent = DMatrix::from_fn(3, 3, |i, j| mat[(i, j)]);
        let out = g.maurer_cartan_left(&tangent).unwrap();
        assert!((out - dv(&[0.3, 0.1, -0.2])).amax() < 1e-14);
    }

    #[test]
    fn spatial_jacobian_velocity_convention() {
        // Ṙ R⁻¹ = (J_spatial ẋ)^ checked by finite differences
        let x = Vector3::new(0.4, -0.2, 0.7);
        let dx = Vector3::new(0.31, 0.11, -0.23);
        let h = 1e-6;
        let rp = so3_exp(&(x + dx * h));
        let rm = so3_exp(&(x - dx * h));
        let rdot = (rp - rm) / (2.0 * h);
        let spatial = unhat(&(rdot * so3_exp(&x).transpose()));
        let expected = so3_jac_spatial(&x) * dx;
        assert!((spatial - expected).amax() < 1e-8);
    }

    #[test]
    fn jacobian_inverses() {
        let x = Vector3::new(0.4, -0.2, 0.7);
        assert!((so3_jac_spatial(&x) * so3_jac_spatial_inv(&x) - Matrix3::identity()).amax() < 1e-12);
        assert!((so3_jac_body(&x) * so3_jac_body_inv(&x) - Matrix3::identity()).amax() < 1e-12);
        // small-angle branch
        let y = Vector3::new(1e-6, -2e-6, 3e-7);
        assert!((so3_jac_spatial(&y) * so3_jac_spatial_inv(&y) - Matrix3::identity()).amax() < 1e-14);
    }

    #[test]
    fn group_vs_algebra_coadjoint_consistency() {
        // d/dt|₀ Ad*_{exp(-t v)} ξ = Π♯_ξ v for so(3)
        let g = LieAlgebraData::so3();
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        use rand::{Rng, SeedableRng};
        for _ in 0..100 {
            let v = Vector3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let xi = dv(&[
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ]);
            let h = 1e-6;
            let gp = GroupElement::so3_from_exp(&v, -h);
            let gm = GroupElement::so3_from_exp(&v, h);
            let fd = (gp.coadjoint(&xi).unwrap() - gm.coadjoint(&xi).unwrap()) / (2.0 * h);
            let alg = g
                .coadjoint_inf(&dv(&[v[0], v[1], v[2]]), &xi)
                .unwrap();
            assert!((fd - alg).amax() < 1e-8);
        }
    }

    #[test]
    fn adjoint_is_bracket_compatible() {
        let g = LieAlgebraData::so3();
        let e = GroupElement::so3_from_exp(&Vector3::new(0.3, 1.1, -0.2), 1.0);
        let v = dv(&[0.5, -0.3, 0.9]);
        let w = dv(&[-1.0, 0.2, 0.4]);
        let lhs = e.adjoint(&g.bracket(&v, &w).unwrap()).unwrap();
        let rhs = g
            .bracket(&e.adjoint(&v).unwrap(), &e.adjoint(&w).unwrap())
            .unwrap();
        assert!((lhs - rhs).amax() < 1e-10);
    }

    #[test]
    fn generic_exp_matches_rodrigues() {
        let x = Vector3::new(0.4, -0.9, 0.3);
        let m = hat(&x);
        let gm = generic_exp(&DMatrix::from_fn(3, 3, |i, j| m[(i, j)]), 1.0);
        let r = so3_exp(&x);
        let diff = DMatrix::from_fn(3, 3, |i, j| gm[(i, j)] - r[(i, j)]).amax();
        assert!(diff < 1e-12);
    }
}
