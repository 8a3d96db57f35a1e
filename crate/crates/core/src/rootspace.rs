//! Root vectors and Jordan chains, spectral projections, distances to the
//! span of root vectors in `ℓ_p`, and completeness verdicts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ExponentContext;
use crate::linalg::{
    self, matrix_power, orthonormal_columns, smallest_right_singular_vectors, vector_p_norm,
    weighted_p_norm, Schur, C64, CMatrix, CVector,
};
use crate::random::{gaussian_vector, seeded};
use crate::resolvent::{
    ray_scans, sector_condition_check, ArcConfiguration, DecayRegime, RayScan, SectorReport,
};
use crate::schatten::OperatorMatrix;

/// One eigenvalue cluster: its center, algebraic multiplicity and Jordan
/// chains `(v_1, …, v_r)` with `(A − λ) v_1 = 0`, `(A − λ) v_{j+1} = v_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub eigenvalue: C64,
    pub multiplicity: usize,
    pub chains: Vec<Vec<CVector>>,
    /// Orthonormal basis of the root subspace (columns).
    pub root_basis: CMatrix,
}

impl Cluster {
    pub fn chain_lengths(&self) -> Vec<usize> {
        self.chains.iter().map(|c| c.len()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    dimension: usize,
    clusters: Vec<Cluster>,
    /// False once chains or clusters have been removed.
    complete: bool,
}

fn union_find_root(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut k = i;
    while parent[k] != r {
        let next = parent[k];
        parent[k] = r;
        k = next;
    }
    r
}

/// Groups eigenvalues by single linkage at distance `radius`; returns index
/// groups ordered by first occurrence.
pub fn cluster_eigenvalues(values: &[C64], radius: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= radius {
                let a = union_find_root(&mut parent, i);
                let b = union_find_root(&mut parent, j);
                if a != b {
                    parent[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = union_find_root(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

fn null_space(m: &CMatrix, threshold: f64) -> CMatrix {
    let n = m.ncols();
    let s = linalg::svd(m);
    let rank = s.singular_values.iter().filter(|&&v| v > threshold).count();
    let v = s.v_adjoint.adjoint();
    v.columns(rank, n - rank).into_owned()
}

/// Jordan chains of a (numerically) nilpotent `N` from its kernel ladder
/// `ker N ⊂ ker N² ⊂ …`. Singular values of `N^j` at or below
/// `radius · s^{j-1}` (with `s = max(‖N‖, radius)`) count as zero.
fn nilpotent_chains(nil: &CMatrix, radius: f64) -> Vec<Vec<CVector>> {
    let m = nil.nrows();
    let scale = linalg::spectral_norm(nil).max(radius);
    let mut kernels: Vec<CMatrix> = vec![CMatrix::zeros(m, 0)];
    let mut power = CMatrix::identity(m, m);
    for j in 1..=m {
        power = &power * nil;
        let threshold = radius * scale.powi(j as i32 - 1);
        let mut k = null_space(&power, threshold);
        if j == m || k.ncols() == m {
            k = CMatrix::identity(m, m);
        }
        let prev = kernels.last().map(|x| x.ncols()).unwrap_or(0);
        if k.ncols() < prev {
            // Rank noise: keep the ladder monotone.
            k = kernels.last().cloned().unwrap_or_else(|| CMatrix::zeros(m, 0));
        }
        let full = k.ncols() == m;
        kernels.push(k);
        if full {
            break;
        }
    }
    let depth = kernels.len() - 1;
    let dims: Vec<usize> = kernels.iter().map(|k| k.ncols()).collect();
    // chains_at_least[j] = number of chains of length ≥ j.
    let at_least = |j: usize| -> usize {
        if j > depth {
            0
        } else {
            dims[j] - dims[j - 1]
        }
    };
    let mut tops: Vec<(usize, CVector)> = Vec::new();
    for j in (1..=depth).rev() {
        let need = at_least(j).saturating_sub(at_least(j + 1));
        if need == 0 {
            continue;
        }
        let mut occupied = kernels[j - 1].clone();
        for (len, top) in &tops {
            let level = matrix_power(nil, (*len - j) as u32) * top;
            let c = occupied.ncols();
            occupied = occupied.insert_column(c, C64::new(0.0, 0.0));
            occupied.set_column(c, &level);
        }
        let q = orthonormal_columns(&occupied, 1e-10);
        let kj = &kernels[j];
        let projected = kj - &q * (q.adjoint() * kj);
        let basis = orthonormal_columns(&projected, 1e-12);
        for c in 0..need.min(basis.ncols()) {
            tops.push((j, basis.column(c).into_owned()));
        }
    }
    tops.into_iter()
        .map(|(len, x)| {
            let mut chain: Vec<CVector> = Vec::with_capacity(len);
            let mut v = x;
            for _ in 0..len {
                chain.push(v.clone());
                v = nil * v;
            }
            chain.reverse();
            chain
        })
        .collect()
}

impl SpectralDecomposition {
    /// Assembles a decomposition from explicit clusters, e.g. a deliberately
    /// truncated root system.
    pub fn from_clusters(dimension: usize, clusters: Vec<Cluster>, complete: bool) -> Self {
        Self {
            dimension,
            clusters,
            complete,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn total_multiplicity(&self) -> usize {
        self.clusters.iter().map(|c| c.multiplicity).sum()
    }

    /// All root vectors as columns, cluster by cluster, chain by chain.
    pub fn root_vectors(&self) -> CMatrix {
        let vecs: Vec<&CVector> = self
            .clusters
            .iter()
            .flat_map(|c| c.chains.iter().flatten())
            .collect();
        let mut m = CMatrix::zeros(self.dimension, vecs.len());
        for (j, v) in vecs.iter().enumerate() {
            m.set_column(j, v);
        }
        m
    }

    /// Keeps only the first `max_len` vectors of every chain.
    pub fn truncate_chains(&self, max_len: usize) -> Self {
        let mut out = self.clone();
        for c in &mut out.clusters {
            for chain in &mut c.chains {
                if chain.len() > max_len {
                    chain.truncate(max_len);
                    out.complete = false;
                }
            }
            c.chains.retain(|ch| !ch.is_empty());
        }
        out
    }

    /// Drops cluster `k` entirely.
    pub fn without_cluster(&self, k: usize) -> Self {
        let mut out = self.clone();
        if k < out.clusters.len() {
            out.clusters.remove(k);
            out.complete = false;
        }
        out
    }

    /// Spectral projections `P_k` built from the root subspaces:
    /// with `V = [R_1 … R_K]`, `P_k = R_k (V^{-1})_{rows k}`.
    pub fn projections(&self) -> Result<Vec<CMatrix>> {
        if !self.complete || self.total_multiplicity() != self.dimension {
            return Err(Error::Unsupported(
                "projections need a complete root system".into(),
            ));
        }
        let n = self.dimension;
        let mut v = CMatrix::zeros(n, n);
        let mut col = 0;
        for c in &self.clusters {
            for j in 0..c.root_basis.ncols() {
                v.set_column(col, &c.root_basis.column(j));
                col += 1;
            }
        }
        let w = linalg::inverse(&v, "root-subspace basis")?;
        let mut out = Vec::with_capacity(self.clusters.len());
        let mut row = 0;
        for c in &self.clusters {
            let k = c.root_basis.ncols();
            out.push(&c.root_basis * w.rows(row, k));
            row += k;
        }
        Ok(out)
    }

    /// Largest chain residual `‖(A − λ)v_1‖`, `‖(A − λ)v_{j+1} − v_j‖`,
    /// relative to `1 + ‖A‖` and the chain vector sizes.
    pub fn chain_residual(&self, a: &CMatrix) -> f64 {
        let n = a.nrows();
        let scale = 1.0 + linalg::spectral_norm(a);
        let mut worst: f64 = 0.0;
        for c in &self.clusters {
            let shifted = a - CMatrix::identity(n, n) * c.eigenvalue;
            for chain in &c.chains {
                for (j, v) in chain.iter().enumerate() {
                    let mut r = &shifted * v;
                    if j > 0 {
                        r -= &chain[j - 1];
                    }
                    let size = v.norm() + if j > 0 { chain[j - 1].norm() } else { 0.0 };
                    worst = worst.max(r.norm() / (scale * size.max(f64::MIN_POSITIVE)));
                }
            }
        }
        worst
    }
}

/// Clusters the spectrum at radius `tol (1 + max|λ|)`, takes cluster centers
/// as member means, and extracts Jordan chains from each root subspace.
pub fn spectral_decomposition(a: &OperatorMatrix, tol: f64) -> Result<SpectralDecomposition> {
    decompose(a.entries(), tol)
}

pub fn decompose(a: &CMatrix, tol: f64) -> Result<SpectralDecomposition> {
    if !(tol >= 1e-10) {
        return Err(Error::InvalidArgument(format!(
            "decomposition tolerance must be at least 1e-10, got {tol}"
        )));
    }
    let n = a.nrows();
    let schur = Schur::new(a)?;
    let values = schur.eigenvalues();
    let max_abs = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let radius = tol * (1.0 + max_abs);
    let groups = cluster_eigenvalues(&values, radius);
    let mut clusters = Vec::with_capacity(groups.len());
    for g in groups {
        let m = g.len();
        let center: C64 = g.iter().map(|&i| values[i]).sum::<C64>() / m as f64;
        if m == 1 {
            let v = schur.eigenvector(g[0]);
            clusters.push(Cluster {
                eigenvalue: center,
                multiplicity: 1,
                chains: vec![vec![v.clone()]],
                root_basis: CMatrix::from_column_slice(n, 1, v.as_slice()),
            });
            continue;
        }
        let shifted = a - CMatrix::identity(n, n) * center;
        let power = matrix_power(&shifted, m as u32);
        let basis = smallest_right_singular_vectors(&power, m);
        let nil = basis.adjoint() * &shifted * &basis;
        let chains = nilpotent_chains(&nil, radius)
            .into_iter()
            .map(|chain| chain.into_iter().map(|y| &basis * y).collect())
            .collect();
        clusters.push(Cluster {
            eigenvalue: center,
            multiplicity: m,
            chains,
            root_basis: basis,
        });
    }
    Ok(SpectralDecomposition {
        dimension: n,
        clusters,
        complete: true,
    })
}

/// Riesz projection `(2πi)^{-1} ∮ (ζ − A)^{-1} dζ` over the circle of the
/// given radius around `center`, by the trapezoidal rule.
pub fn riesz_projection(
    a: &OperatorMatrix,
    center: C64,
    radius: f64,
    quad_points: usize,
) -> Result<CMatrix> {
    if !(radius > 0.0) || quad_points < 8 {
        return Err(Error::InvalidArgument(
            "contour needs positive radius and at least 8 nodes".into(),
        ));
    }
    let n = a.dimension();
    let spectrum = linalg::schur::eigenvalues(a.entries())?;
    let spacing = 2.0 * std::f64::consts::PI * radius / quad_points as f64;
    let minimum = 10.0 * spacing;
    let closest = spectrum
        .iter()
        .map(|mu| ((mu - center).norm() - radius).abs())
        .fold(f64::INFINITY, f64::min);
    if closest < minimum {
        return Err(Error::ContourTooClose {
            distance: closest,
            minimum,
        });
    }
    let id = CMatrix::identity(n, n);
    let mut p = CMatrix::zeros(n, n);
    for j in 0..quad_points {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / quad_points as f64;
        let w = C64::from_polar(radius, theta);
        let zeta = center + w;
        let r = linalg::inverse(&(&id * zeta - a.entries()), "ζ − A on contour")?;
        p += r * w;
    }
    Ok(p / C64::from(quad_points as f64))
}

fn min_residual(basis: &CMatrix, u: &CVector, p: f64, weights: Option<&[f64]>) -> f64 {
    let n = u.len();
    let scale: Vec<f64> = match weights {
        Some(w) => w.iter().map(|x| x.powf(1.0 / p)).collect(),
        None => vec![1.0; n],
    };
    let target = CVector::from_fn(n, |i, _| u[i] * scale[i]);
    let mut scaled = basis.clone();
    for (i, s) in scale.iter().enumerate() {
        scaled.row_mut(i).scale_mut(*s);
    }
    let q = orthonormal_columns(&scaled, 1e-12);
    if q.ncols() == 0 {
        return vector_p_norm(target.as_slice(), p);
    }
    let mut coeff = q.adjoint() * &target;
    let mut residual = &target - &q * &coeff;
    let mut best = vector_p_norm(residual.as_slice(), p);
    if p == 2.0 || best == 0.0 {
        return best;
    }
    // Iteratively reweighted least squares, warm-started from the ℓ_2 fit.
    for _ in 0..60 {
        let rmax = residual.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if rmax == 0.0 {
            break;
        }
        let floor = 1e-9 * rmax;
        let w: Vec<f64> = residual
            .iter()
            .map(|z| z.norm().max(floor).powf(p - 2.0))
            .collect();
        let mut qw = q.adjoint();
        for (j, wj) in w.iter().enumerate() {
            qw.column_mut(j).scale_mut(*wj);
        }
        let gram = &qw * &q;
        let rhs = &qw * &target;
        let Ok(next) = linalg::solve(&gram, &CMatrix::from_column_slice(rhs.len(), 1, rhs.as_slice()), "weighted normal equations") else {
            break;
        };
        coeff = next.column(0).into_owned();
        residual = &target - &q * &coeff;
        let value = vector_p_norm(residual.as_slice(), p);
        let improved = value < best * (1.0 - 1e-12);
        best = best.min(value);
        if !improved {
            break;
        }
    }
    best
}

/// `min_c ‖u − Σ c_j w_j‖_p` over the root vectors `w_j`; exact at `p = 2`,
/// an upper bound from reweighted least squares otherwise.
pub fn root_span_distance(
    decomp: &SpectralDecomposition,
    u: &CVector,
    context: ExponentContext,
) -> Result<f64> {
    span_distance(&decomp.root_vectors(), u, context.p(), None)
}

/// Same as [`root_span_distance`] in the weighted norm `(Σ w_i |v_i|^p)^{1/p}`.
pub fn root_span_distance_weighted(
    decomp: &SpectralDecomposition,
    u: &CVector,
    context: ExponentContext,
    weights: &[f64],
) -> Result<f64> {
    if weights.len() != u.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: weights.len(),
        });
    }
    span_distance(&decomp.root_vectors(), u, context.p(), Some(weights))
}

fn span_distance(vectors: &CMatrix, u: &CVector, p: f64, weights: Option<&[f64]>) -> Result<f64> {
    if vectors.nrows() != u.len() {
        return Err(Error::DimensionMismatch {
            expected: vectors.nrows(),
            found: u.len(),
        });
    }
    if vectors.ncols() == 0 {
        return Ok(match weights {
            Some(w) => weighted_p_norm(u.as_slice(), w, p),
            None => vector_p_norm(u.as_slice(), p),
        });
    }
    Ok(min_residual(vectors, u, p, weights))
}

/// Settings for the ray-scan part of a completeness verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictOptions {
    pub regime: DecayRegime,
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    /// Eigenvalue clustering tolerance for the decomposition.
    pub tol: f64,
    /// Optional node weights for the distance norm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        Self {
            regime: DecayRegime::NearZero,
            r_min: 1e-5,
            r_max: 1e1,
            points: 36,
            tol: 1e-4,
            weights: None,
        }
    }
}

impl VerdictOptions {
    /// Decay checked as `λ → ∞` with order 1, target the whole space.
    pub fn at_infinity() -> Self {
        Self {
            regime: DecayRegime::AtInfinity,
            r_min: 1e-1,
            r_max: 1e5,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcDecay {
    pub angle: f64,
    pub order: f64,
    pub r_squared: f64,
    pub confident: bool,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletenessReport {
    pub m: u32,
    pub regime: DecayRegime,
    pub sector: SectorReport,
    pub decay: Vec<ArcDecay>,
    pub decay_holds: bool,
    pub hypotheses_hold: bool,
    pub max_distance: f64,
    pub max_relative_distance: f64,
    pub verdict: bool,
    #[serde(skip)]
    pub scans: Vec<RayScan>,
}

const COMPLETENESS_TOL: f64 = 1e-6;

/// Hypothesis checks plus the distance from `A^m u` to the root span for
/// random `u`, using a freshly computed decomposition.
pub fn completeness_verdict(
    a: &OperatorMatrix,
    m: u32,
    arcs: &ArcConfiguration,
    sample_count: usize,
    seed: u64,
    options: &VerdictOptions,
) -> Result<CompletenessReport> {
    let decomp = spectral_decomposition(a, options.tol)?;
    completeness_verdict_with(a, &decomp, m, arcs, sample_count, seed, options)
}

/// As [`completeness_verdict`] with a supplied (possibly truncated)
/// decomposition.
pub fn completeness_verdict_with(
    a: &OperatorMatrix,
    decomp: &SpectralDecomposition,
    m: u32,
    arcs: &ArcConfiguration,
    sample_count: usize,
    seed: u64,
    options: &VerdictOptions,
) -> Result<CompletenessReport> {
    if sample_count == 0 {
        return Err(Error::InvalidArgument("sample_count must be positive".into()));
    }
    let p = a.p();
    let n = a.dimension();
    let sector = sector_condition_check(arcs);
    let scans = ray_scans(a.entries(), p, arcs, options.r_min, options.r_max, options.points)?;
    let decay: Vec<ArcDecay> = scans
        .iter()
        .map(|s| {
            let fit = match options.regime {
                DecayRegime::NearZero => s.near_zero,
                DecayRegime::AtInfinity => s.at_infinity,
            };
            let within = match options.regime {
                DecayRegime::NearZero => fit.order <= m as f64 + 0.1,
                DecayRegime::AtInfinity => fit.order >= 0.9,
            };
            ArcDecay {
                angle: s.angle,
                order: fit.order,
                r_squared: fit.r_squared,
                confident: fit.confident,
                holds: within && fit.confident,
            }
        })
        .collect();
    let decay_holds = decay.iter().all(|d| d.holds);
    let power = matrix_power(a.entries(), m);
    let vectors = decomp.root_vectors();
    let mut rng = seeded(seed);
    let mut max_distance: f64 = 0.0;
    let mut max_relative: f64 = 0.0;
    for _ in 0..sample_count {
        let u = gaussian_vector(n, &mut rng);
        let target = &power * u;
        let norm = match &options.weights {
            Some(w) => weighted_p_norm(target.as_slice(), w, p),
            None => vector_p_norm(target.as_slice(), p),
        };
        let d = span_distance(&vectors, &target, p, options.weights.as_deref())?;
        max_distance = max_distance.max(d);
        if norm > 0.0 {
            max_relative = max_relative.max(d / norm);
        }
    }
    let hypotheses_hold = sector.holds && decay_holds;
    Ok(CompletenessReport {
        m,
        regime: options.regime,
        sector,
        decay,
        decay_holds,
        hypotheses_hold,
        max_distance,
        max_relative_distance: max_relative,
        verdict: hypotheses_hold && max_relative <= COMPLETENESS_TOL,
        scans,
    })
}
