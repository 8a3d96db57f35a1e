//! σ_p norms over biorthogonal systems, ℓ_p operator-norm brackets,
//! approximation numbers, the Weyl inequality and basis/adjoint identities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{b_condition_constant, BiorthogonalSystem, ExponentContext};
use crate::linalg::{
    self, lp_norm_ascent, max_column_sum, max_row_sum, vector_p_norm, C64, CMatrix, CVector,
};
use crate::random::{gaussian_vector, seeded};

/// A dense square matrix acting on `ℓ_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: CMatrix,
    context: ExponentContext,
}

impl OperatorMatrix {
    pub fn new(entries: CMatrix, context: ExponentContext) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
        }
        Ok(Self { entries, context })
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn context(&self) -> ExponentContext {
        self.context
    }

    pub fn dimension(&self) -> usize {
        self.entries.nrows()
    }

    pub fn p(&self) -> f64 {
        self.context.p()
    }

    /// Bilinear adjoint (plain transpose), same exponent.
    pub fn transpose(&self) -> Self {
        Self {
            entries: self.entries.transpose(),
            context: self.context,
        }
    }

    pub fn with_entries(&self, entries: CMatrix) -> Result<Self> {
        Self::new(entries, self.context)
    }
}

/// `[<A e_j, f_i>]_{ij} = F A E`.
pub fn coefficient_matrix(a: &CMatrix, system: &BiorthogonalSystem) -> Result<CMatrix> {
    let n = system.dimension();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.nrows(),
        });
    }
    Ok(system.dual_matrix() * a * system.primal_matrix())
}

/// `(Σ_{i,j} |<A e_i, f_j>|^p)^{1/p}` for an explicit exponent.
pub fn sigma_norm(a: &CMatrix, system: &BiorthogonalSystem, p: f64) -> Result<f64> {
    let c = coefficient_matrix(a, system)?;
    Ok(vector_p_norm(c.as_slice(), p))
}

/// σ_p norm with `p` taken from the operator's context.
pub fn sigma_p_norm(a: &OperatorMatrix, system: &BiorthogonalSystem) -> Result<f64> {
    sigma_norm(a.entries(), system, a.p())
}

/// Two-sided bracket `lower ≤ value ≤ upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormBounds {
    pub lower: f64,
    pub upper: f64,
}

impl NormBounds {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower >= 0.0 && lower <= upper) {
            return Err(Error::InvariantViolated(format!(
                "norm bracket [{lower}, {upper}] is not ordered"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn exact(value: f64) -> Self {
        Self {
            lower: value,
            upper: value,
        }
    }

    pub fn contains(&self, value: f64, slack: f64) -> bool {
        value >= self.lower - slack && value <= self.upper + slack
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            lower: self.lower * factor,
            upper: self.upper * factor,
        }
    }
}

const NORM_SEARCH_SEED: u64 = 0x6c70_6e6f_726d;
const NORM_SEARCH_SAMPLES: usize = 24;

/// Riesz–Thorin upper bound `‖A‖_1^{1/p} ‖A‖_∞^{1/q}` for `ℓ_p → ℓ_p`.
pub fn interpolation_upper_bound(a: &CMatrix, p: f64) -> f64 {
    let q = p / (p - 1.0);
    max_column_sum(a).powf(1.0 / p) * max_row_sum(a).powf(1.0 / q)
}

/// Bracket for `‖A‖_{p→p}`; exact (spectral norm) at `p = 2`.
pub fn norm_bounds(a: &CMatrix, p: f64) -> NormBounds {
    let n = a.ncols();
    if n == 0 {
        return NormBounds::exact(0.0);
    }
    if p == 2.0 {
        return NormBounds::exact(linalg::spectral_norm(a));
    }
    let upper = interpolation_upper_bound(a, p);
    let mut rng = seeded(NORM_SEARCH_SEED);
    let mut starts: Vec<(f64, CVector)> = Vec::new();
    for k in 0..n {
        let mut u = CVector::zeros(n);
        u[k] = C64::new(1.0, 0.0);
        starts.push((vector_p_norm(a.column(k).as_slice(), p), u));
    }
    for _ in 0..NORM_SEARCH_SAMPLES {
        let u = gaussian_vector(n, &mut rng);
        let value = vector_p_norm((a * &u).as_slice(), p) / vector_p_norm(u.as_slice(), p);
        starts.push((value, u));
    }
    // Right singular vector: the p = 2 maximizer is a good start for nearby p.
    let s = linalg::svd(a);
    let v1: CVector = s.v_adjoint.row(0).adjoint();
    let value = vector_p_norm((a * &v1).as_slice(), p) / vector_p_norm(v1.as_slice(), p);
    starts.push((value, v1));
    starts.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut lower = starts[0].0;
    for (_, u) in starts.iter().take(6) {
        let (value, _) = lp_norm_ascent(a, p, u, 200);
        lower = lower.max(value);
    }
    NormBounds {
        lower: lower.min(upper),
        upper,
    }
}

pub fn lp_operator_norm_bounds(a: &OperatorMatrix) -> NormBounds {
    norm_bounds(a.entries(), a.p())
}

/// Brackets for `s_1 .. s_{k_max}`. Exact singular values at `p = 2`; otherwise
/// the upper bound is the norm bracket of the SVD tail `Σ_{i≥j} σ_i u_i v_i^*`
/// (kept nonincreasing), and the lower bound is `n^{-|1/p-1/2|} σ_j`, which
/// follows from comparing `ℓ_p` and `ℓ_2` norms on `ℂ^n`.
pub fn approximation_numbers(a: &OperatorMatrix, k_max: usize) -> Result<Vec<NormBounds>> {
    let n = a.dimension();
    if k_max == 0 || k_max > n {
        return Err(Error::InvalidArgument(format!(
            "k_max must lie in 1..={n}, got {k_max}"
        )));
    }
    let p = a.p();
    let s = linalg::svd(a.entries());
    if p == 2.0 {
        return Ok(s.singular_values[..k_max]
            .iter()
            .map(|&v| NormBounds::exact(v))
            .collect());
    }
    let comparison = (n as f64).powf(-(1.0 / p - 0.5).abs());
    let mut out = Vec::with_capacity(k_max);
    let mut running_upper = f64::INFINITY;
    for j in 0..k_max {
        let mut tail = CMatrix::zeros(n, n);
        for i in j..n {
            let ui = s.u.column(i);
            let vi = s.v_adjoint.row(i);
            tail += (ui * vi) * C64::from(s.singular_values[i]);
        }
        let b = norm_bounds(&tail, p);
        running_upper = running_upper.min(b.upper);
        let mut lower = comparison * s.singular_values[j];
        if j == 0 {
            lower = lower.max(b.lower);
        }
        out.push(NormBounds {
            lower: lower.min(running_upper),
            upper: running_upper,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `Σ |λ_j|^p ≤ Σ s_j^p`, with `s_j` upper bounds when `p ≠ 2`.
pub fn weyl_check(a: &OperatorMatrix) -> Result<WeylReport> {
    let p = a.p();
    let eig = linalg::schur::eigenvalues(a.entries())?;
    let lhs: f64 = eig.iter().map(|z| z.norm().powf(p)).sum();
    let s = approximation_numbers(a, a.dimension())?;
    let rhs: f64 = s.iter().map(|b| b.upper.powf(p)).sum();
    Ok(WeylReport {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-9,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisEquivalence {
    pub norm_first: f64,
    pub norm_second: f64,
    pub ratio: f64,
    /// Rigorous bound on `ratio` from the change-of-basis matrices.
    pub ratio_bound: f64,
    /// Rigorous bound on `1 / ratio`.
    pub inverse_ratio_bound: f64,
    pub within_transfer_bounds: bool,
    /// Product of the two estimated B-condition constants.
    pub b_constant_product: f64,
    pub within_b_bracket: bool,
}

/// Compares σ_p norms of `A` in two systems. With `T = F_1 E_2` and
/// `S = F_2 E_1` the coefficient matrices satisfy `C_1 = T C_2 S`, so the
/// entrywise `ℓ_p` norm obeys `‖C_1‖ ≤ ‖T‖_{p→p} ‖S^T‖_{p→p} ‖C_2‖`.
pub fn basis_equivalence_check(
    a: &OperatorMatrix,
    first: &BiorthogonalSystem,
    second: &BiorthogonalSystem,
    seed: u64,
) -> Result<BasisEquivalence> {
    let p = a.p();
    let n1 = sigma_p_norm(a, first)?;
    let n2 = sigma_p_norm(a, second)?;
    let scale = n1.max(n2);
    let zero = |v: f64| v <= 1e-14 * scale.max(f64::MIN_POSITIVE);
    if zero(n1) != zero(n2) {
        return Err(Error::InvariantViolated(format!(
            "σ_p norm vanishes in one system only ({n1} vs {n2})"
        )));
    }
    let t = first.dual_matrix() * second.primal_matrix();
    let s = second.dual_matrix() * first.primal_matrix();
    let ratio_bound = interpolation_upper_bound(&t, p) * interpolation_upper_bound(&s.transpose(), p);
    let inverse_ratio_bound =
        interpolation_upper_bound(&s, p) * interpolation_upper_bound(&t.transpose(), p);
    let ratio = if zero(n1) && zero(n2) { 1.0 } else { n1 / n2 };
    let slack = 1e-9;
    let within_transfer_bounds =
        ratio <= ratio_bound * (1.0 + slack) && 1.0 / ratio <= inverse_ratio_bound * (1.0 + slack);
    let c1 = b_condition_constant(first, 400, seed)?;
    let c2 = b_condition_constant(second, 400, seed.wrapping_add(1))?;
    let product = c1 * c2;
    Ok(BasisEquivalence {
        norm_first: n1,
        norm_second: n2,
        ratio,
        ratio_bound,
        inverse_ratio_bound,
        within_transfer_bounds,
        b_constant_product: product,
        within_b_bracket: ratio <= product * (1.0 + slack) && 1.0 / ratio <= product * (1.0 + slack),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdjointNorms {
    pub primal: f64,
    pub dual: f64,
}

/// σ_p norm of `A` against σ_p norm of `A^T` in the dual system.
pub fn adjoint_norm_identity(
    a: &OperatorMatrix,
    system: &BiorthogonalSystem,
) -> Result<AdjointNorms> {
    let primal = sigma_p_norm(a, system)?;
    let dual = sigma_p_norm(&a.transpose(), &system.dual_system())?;
    Ok(AdjointNorms { primal, dual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_matrix;

    fn op(data: &[f64], n: usize, p: f64) -> OperatorMatrix {
        OperatorMatrix::new(real_matrix(n, n, data), ExponentContext::new(p).unwrap()).unwrap()
    }

    #[test]
    fn diagonal_norm_bracket_is_tight() {
        for p in [1.3, 2.0, 4.0] {
            let a = op(&[3.0, 0.0, 0.0, 1.0], 2, p);
            let b = lp_operator_norm_bounds(&a);
            assert!((b.lower - 3.0).abs() < 1e-12 && (b.upper - 3.0).abs() < 1e-12);
        }
        let i = op(&[1.0, 0.0, 0.0, 1.0], 2, 3.0);
        let b = lp_operator_norm_bounds(&i);
        assert_eq!((b.lower, b.upper), (1.0, 1.0));
    }

    #[test]
    fn sigma_norm_of_diagonal() {
        let a = op(&[2.0, 0.0, 0.0, -3.0], 2, 3.0);
        let s = BiorthogonalSystem::canonical(2, a.context());
        let expect = (8.0f64 + 27.0).powf(1.0 / 3.0);
        assert!((sigma_p_norm(&a, &s).unwrap() - expect).abs() < 1e-13);
    }

    #[test]
    fn elementary_matrix_adjoint_identity() {
        let a = op(&[0.0, 1.0, 0.0, 0.0], 2, 1.7);
        let s = BiorthogonalSystem::canonical(2, a.context());
        let r = adjoint_norm_identity(&a, &s).unwrap();
        assert_eq!((r.primal, r.dual), (1.0, 1.0));
    }

    #[test]
    fn rank_one_second_approximation_number_vanishes() {
        let a = op(&[1.0, 2.0, 3.0, 2.0, 4.0, 6.0, -1.0, -2.0, -3.0], 3, 3.0);
        let s = approximation_numbers(&a, 2).unwrap();
        assert!(s[1].upper < 1e-12);
        assert!(s[0].lower > 0.0);
    }
}
