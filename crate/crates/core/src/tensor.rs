//! Dense state vectors and operators on the n-qutrit Hilbert space.
//!
//! Basis ordering is fixed throughout the crate: site 1 is the most
//! significant trit, and within a site the levels are ordered by spin
//! projection m = 1, 0, -1 (level indices 0, 1, 2).

use std::collections::HashMap;
use std::sync::Arc;

pub use faer::c64;
use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};

/// Levels per site.
pub const LEVELS: usize = 3;

/// A single-qutrit operator in the (m = 1, 0, -1) basis.
pub type Op3 = [[c64; 3]; 3];

const ZERO: c64 = c64 { re: 0.0, im: 0.0 };
const ONE: c64 = c64 { re: 1.0, im: 0.0 };

pub fn op3_identity() -> Op3 {
    let mut m = [[ZERO; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = ONE;
    }
    m
}

/// Matrix product `a * b`.
pub fn op3_mul(a: &Op3, b: &Op3) -> Op3 {
    let mut out = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn op3_adjoint(a: &Op3) -> Op3 {
    let mut out = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i].conj();
        }
    }
    out
}

pub fn op3_scale(a: &Op3, s: c64) -> Op3 {
    a.map(|row| row.map(|x| x * s))
}

pub fn op3_add(a: &Op3, b: &Op3) -> Op3 {
    let mut out = *a;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] += b[i][j];
        }
    }
    out
}

/// Largest entrywise modulus of `a - b`.
pub fn op3_distance(a: &Op3, b: &Op3) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max((a[i][j] - b[i][j]).norm());
        }
    }
    worst
}

/// Distance between two 3x3 operators after removing the best global phase.
pub fn op3_distance_up_to_phase(a: &Op3, b: &Op3) -> f64 {
    let overlap: c64 = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .map(|(i, j)| a[i][j].conj() * b[i][j])
        .sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    op3_distance(&op3_scale(a, phase), b)
}

/// Hilbert-space dimension of an n-qutrit register.
pub fn dimension(sites: usize) -> usize {
    LEVELS.pow(sites as u32)
}

/// Level index (0, 1, 2) of a spin projection (1, 0, -1).
pub fn level_of(projection: i8) -> usize {
    match projection {
        1 => 0,
        0 => 1,
        -1 => 2,
        other => panic!("spin-1 projection out of range: {other}"),
    }
}

/// Spin projection (1, 0, -1) of a level index (0, 1, 2).
pub fn projection_of(level: usize) -> i8 {
    1 - level as i8
}

/// Projection of 1-based `site` in basis state `index`.
pub fn site_projection(index: usize, site: usize, sites: usize) -> i8 {
    let stride = dimension(sites - site);
    projection_of((index / stride) % LEVELS)
}

/// All site projections of basis state `index`, site 1 first.
pub fn projections(index: usize, sites: usize) -> Vec<i8> {
    (1..=sites).map(|s| site_projection(index, s, sites)).collect()
}

/// Basis index of a product of projections, site 1 first.
pub fn basis_index(projections: &[i8]) -> usize {
    projections
        .iter()
        .fold(0, |acc, &m| acc * LEVELS + level_of(m))
}

fn check_site(site: usize, sites: usize) -> Result<()> {
    if site == 0 || site > sites {
        return Err(Error::SiteOutOfRange { site, sites });
    }
    Ok(())
}

/// Complex amplitudes over the 3^n computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QutritState {
    sites: usize,
    amplitudes: Vec<c64>,
}

impl QutritState {
    pub fn from_amplitudes(sites: usize, amplitudes: Vec<c64>) -> Result<Self> {
        let expected = dimension(sites);
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: amplitudes.len(),
            });
        }
        Ok(Self { sites, amplitudes })
    }

    /// The computational basis state with the given index.
    pub fn basis(sites: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; dimension(sites)];
        amplitudes[index] = ONE;
        Self { sites, amplitudes }
    }

    /// Tensor product of single-site states, site 1 first.
    pub fn product(factors: &[[c64; 3]]) -> Self {
        let mut amplitudes = vec![ONE];
        for factor in factors {
            amplitudes = amplitudes
                .iter()
                .flat_map(|&a| factor.iter().map(move |&f| a * f))
                .collect();
        }
        Self {
            sites: factors.len(),
            amplitudes,
        }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[c64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> c64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scale(&mut self, factor: c64) {
        for a in &mut self.amplitudes {
            *a *= factor;
        }
    }

    /// In-place `U * state`.
    pub fn apply_unitary(&mut self, u: &Unitary) -> Result<()> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: u.dim(),
            });
        }
        self.amplitudes = matvec(u.matrix(), &self.amplitudes);
        Ok(())
    }

    /// In-place application of a single-site operator.
    pub fn apply_site_op(&mut self, op: &Op3, site: usize) -> Result<()> {
        check_site(site, self.sites)?;
        apply_site_op_to_slice(&mut self.amplitudes, op, site, self.sites);
        Ok(())
    }

    /// Multiplies amplitude k by `exp(-i * phases[k])`.
    pub fn apply_phases(&mut self, phases: &[f64]) -> Result<()> {
        if phases.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: phases.len(),
            });
        }
        for (a, &p) in self.amplitudes.iter_mut().zip(phases) {
            *a *= c64::cis(-p);
        }
        Ok(())
    }
}

fn matvec(m: MatRef<'_, c64>, x: &[c64]) -> Vec<c64> {
    let mut y = vec![ZERO; m.nrows()];
    for (j, &xj) in x.iter().enumerate() {
        if xj == ZERO {
            continue;
        }
        let col = m.col(j);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += col[i] * xj;
        }
    }
    y
}

/// Applies `op` on `site` to a vector laid out in the fixed basis ordering.
pub fn apply_site_op_to_slice(v: &mut [c64], op: &Op3, site: usize, sites: usize) {
    let stride = dimension(sites - site);
    let block = stride * LEVELS;
    for base in (0..v.len()).step_by(block) {
        for offset in 0..stride {
            let i0 = base + offset;
            let (a0, a1, a2) = (v[i0], v[i0 + stride], v[i0 + 2 * stride]);
            v[i0] = op[0][0] * a0 + op[0][1] * a1 + op[0][2] * a2;
            v[i0 + stride] = op[1][0] * a0 + op[1][1] * a1 + op[1][2] * a2;
            v[i0 + 2 * stride] = op[2][0] * a0 + op[2][1] * a1 + op[2][2] * a2;
        }
    }
}

/// Hermitian operator in angular-frequency units.
#[derive(Debug, Clone)]
pub struct DenseHermitian {
    mat: Mat<c64>,
}

impl DenseHermitian {
    /// Relative tolerance of the Hermiticity check.
    pub const TOLERANCE: f64 = 1e-12;

    pub fn new(mat: Mat<c64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch {
                expected: mat.nrows(),
                actual: mat.ncols(),
            });
        }
        let scale = max_abs(mat.as_ref()).max(f64::MIN_POSITIVE);
        let deviation = max_abs_diff(mat.as_ref(), mat.adjoint().to_owned().as_ref());
        if deviation > Self::TOLERANCE * scale {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { mat })
    }

    /// Wraps a matrix that is Hermitian by construction.
    pub(crate) fn from_matrix_unchecked(mat: Mat<c64>) -> Self {
        Self { mat }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mat = Mat::from_fn(n, n, |i, j| if i == j { c64::new(diag[i], 0.0) } else { ZERO });
        Self { mat }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: Mat::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> MatRef<'_, c64> {
        self.mat.as_ref()
    }

    /// `self + scale * other`, both Hermitian.
    pub fn add_scaled(&mut self, other: MatRef<'_, c64>, scale: f64) {
        let s = c64::new(scale, 0.0);
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                self.mat[(i, j)] += s * other[(i, j)];
            }
        }
    }

    pub fn add_to_diagonal(&mut self, diag: &[f64]) {
        for (i, &d) in diag.iter().enumerate() {
            self.mat[(i, i)] += c64::new(d, 0.0);
        }
    }

    /// `H |psi>`.
    pub fn apply(&self, state: &QutritState) -> Result<QutritState> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: state.dim(),
            });
        }
        QutritState::from_amplitudes(state.sites(), matvec(self.matrix(), state.amplitudes()))
    }

    /// Largest off-diagonal modulus.
    pub fn off_diagonal_max(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                if i != j {
                    worst = worst.max(self.mat[(i, j)].norm());
                }
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let values = self
            .mat
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|_| Error::EigenFailure {
                key: format!("{}x{} eigenvalues", self.dim(), self.dim()),
            })?;
        Ok(values)
    }
}

/// Dimensionless unitary operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    mat: Mat<c64>,
}

impl Unitary {
    /// Tolerance on `max|U^dagger U - I|`.
    pub const TOLERANCE: f64 = 1e-9;

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: Mat::identity(dim, dim),
        }
    }

    /// Wraps a matrix, checking unitarity.
    pub fn new(mat: Mat<c64>) -> Result<Self> {
        let u = Self { mat };
        let defect = u.unitarity_defect();
        if defect.is_nan() || defect >= Self::TOLERANCE {
            return Err(Error::InvalidRotation(format!(
                "matrix is not unitary (defect {defect:e})"
            )));
        }
        Ok(u)
    }

    /// `diag(exp(-i phases))`.
    pub fn from_phases(phases: &[f64]) -> Self {
        let n = phases.len();
        let mat = Mat::from_fn(n, n, |i, j| if i == j { c64::cis(-phases[i]) } else { ZERO });
        Self { mat }
    }

    /// Single-site operator lifted to the full register.
    pub fn embed(op: &Op3, site: usize, sites: usize) -> Result<Self> {
        Ok(Self {
            mat: embed_single_site(op, site, sites)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> MatRef<'_, c64> {
        self.mat.as_ref()
    }

    /// `self * other`.
    pub fn then_after(&self, other: &Unitary) -> Unitary {
        Unitary {
            mat: &self.mat * &other.mat,
        }
    }

    pub fn adjoint(&self) -> Unitary {
        Unitary {
            mat: self.mat.adjoint().to_owned(),
        }
    }

    pub fn scale(&mut self, factor: c64) {
        for j in 0..self.dim() {
            for x in self.mat.col_as_slice_mut(j) {
                *x *= factor;
            }
        }
    }

    /// Left-multiplies by a single-site operator: `self <- embed(op) * self`.
    pub fn apply_site_op(&mut self, op: &Op3, site: usize, sites: usize) -> Result<()> {
        check_site(site, sites)?;
        if dimension(sites) != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: dimension(sites),
            });
        }
        for j in 0..self.dim() {
            apply_site_op_to_slice(self.mat.col_as_slice_mut(j), op, site, sites);
        }
        Ok(())
    }

    /// Left-multiplies by `diag(exp(-i phases))`.
    pub fn apply_phases(&mut self, phases: &[f64]) {
        let factors: Vec<c64> = phases.iter().map(|&p| c64::cis(-p)).collect();
        for j in 0..self.dim() {
            for (x, f) in self.mat.col_as_slice_mut(j).iter_mut().zip(&factors) {
                *x *= f;
            }
        }
    }

    /// `max|U^dagger U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let product = self.mat.adjoint() * &self.mat;
        let identity = Mat::<c64>::identity(self.dim(), self.dim());
        max_abs_diff(product.as_ref(), identity.as_ref())
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim()).all(|j| (0..self.dim()).all(|i| i == j || self.mat[(i, j)] == ZERO))
    }

    /// Max-norm distance to `other`.
    pub fn distance(&self, other: &Unitary) -> f64 {
        max_abs_diff(self.matrix(), other.matrix())
    }

    /// Max-norm distance to `other` after removing the best global phase.
    pub fn distance_up_to_phase(&self, other: &Unitary) -> f64 {
        phase_aligned_distance(self.matrix(), other.matrix())
    }
}

/// Largest entry modulus.
pub fn max_abs(a: MatRef<'_, c64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max(a[(i, j)].norm());
        }
    }
    worst
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> f64 {
    assert_eq!(a.nrows(), b.nrows());
    assert_eq!(a.ncols(), b.ncols());
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

/// `max|e^{i phi} a - b|` with phi chosen from the Frobenius overlap.
pub fn phase_aligned_distance(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> f64 {
    let mut overlap = ZERO;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            overlap += a[(i, j)].conj() * b[(i, j)];
        }
    }
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] * phase - b[(i, j)]).norm());
        }
    }
    worst
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` at 1-based `site`.
pub fn embed_single_site(op: &Op3, site: usize, sites: usize) -> Result<Mat<c64>> {
    check_site(site, sites)?;
    let dim = dimension(sites);
    let mut mat = Mat::<c64>::identity(dim, dim);
    for j in 0..dim {
        apply_site_op_to_slice(mat.col_as_slice_mut(j), op, site, sites);
    }
    Ok(mat)
}

/// `exp(-i t H)` by Hermitian eigendecomposition.
pub fn expm_hermitian(h: &DenseHermitian, t: f64) -> Result<Unitary> {
    let n = h.dim();
    // Shifting by the mean diagonal keeps the eigenvalues small; the shift
    // returns as an exact scalar phase.
    let shift = (0..n).map(|i| h.mat[(i, i)].re).sum::<f64>() / n.max(1) as f64;
    let mut shifted = h.mat.clone();
    for i in 0..n {
        shifted[(i, i)] -= c64::new(shift, 0.0);
    }
    let evd = shifted
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigenFailure {
            key: format!("{n}x{n} Hermitian, t = {t:e}"),
        })?;
    let v = evd.U();
    let s = evd.S().column_vector();
    let global = c64::cis(-shift * t);
    let mut scaled = v.to_owned();
    for j in 0..n {
        let f = c64::cis(-s[j].re * t) * global;
        for x in scaled.col_as_slice_mut(j) {
            *x *= f;
        }
    }
    Ok(Unitary {
        mat: &scaled * v.adjoint(),
    })
}

/// `U |state>`; the result is not renormalized.
pub fn apply(state: &QutritState, u: &Unitary) -> Result<QutritState> {
    let mut out = state.clone();
    out.apply_unitary(u)?;
    Ok(out)
}

/// Rounds to 12 significant digits for cache keys.
pub fn quantize(x: f64) -> String {
    if x == 0.0 {
        // folds -0.0 onto 0.0
        return "0".to_owned();
    }
    format!("{x:.11e}")
}

/// Cache key built from a kind tag and quantized parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CacheKey(String);

impl CacheKey {
    pub fn new(kind: &str, params: &[f64]) -> Self {
        let mut key = kind.to_owned();
        for &p in params {
            key.push('|');
            key.push_str(&quantize(p));
        }
        Self(key)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
}

impl CacheStats {
    pub fn hit_ratio(&self) -> f64 {
        let total = self.hits + self.misses;
        if total == 0 {
            0.0
        } else {
            self.hits as f64 / total as f64
        }
    }
}

/// Unitaries keyed by quantized physical parameters.
///
/// With verification enabled every hit is rebuilt and compared bitwise
/// against the stored matrix; a mismatch is reported as corruption.
#[derive(Debug, Default)]
pub struct UnitaryCache {
    /// Matrix, last generation used, and whether it was prefetched unseen.
    entries: HashMap<CacheKey, (Arc<Unitary>, u64, bool)>,
    stats: CacheStats,
    verify: bool,
    generation: u64,
}

impl UnitaryCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_verification(verify: bool) -> Self {
        Self {
            verify,
            ..Self::default()
        }
    }

    pub fn get_or_build<F>(&mut self, key: CacheKey, build: F) -> Result<Arc<Unitary>>
    where
        F: FnOnce() -> Result<Unitary>,
    {
        if let Some((found, used, fresh)) = self.entries.get_mut(&key) {
            *used = self.generation;
            if *fresh {
                // First use of a prefetched entry counts as the build.
                *fresh = false;
                self.stats.misses += 1;
                return Ok(Arc::clone(found));
            }
            self.stats.hits += 1;
            if self.verify {
                let rebuilt = build()?;
                if rebuilt != **found {
                    return Err(Error::CacheCorruption {
                        key: key.as_str().to_owned(),
                    });
                }
            }
            return Ok(Arc::clone(found));
        }
        self.stats.misses += 1;
        let built = Arc::new(build()?);
        self.entries.insert(key, (Arc::clone(&built), self.generation, false));
        Ok(built)
    }

    pub fn contains(&self, key: &CacheKey) -> bool {
        self.entries.contains_key(key)
    }

    /// Stores a matrix built elsewhere; its first lookup counts as a miss.
    pub fn prefetch(&mut self, key: CacheKey, unitary: Unitary) {
        self.entries
            .entry(key)
            .or_insert_with(|| (Arc::new(unitary), self.generation, true));
    }

    pub fn get(&self, key: &CacheKey) -> Option<Arc<Unitary>> {
        self.entries.get(key).map(|(u, _, _)| Arc::clone(u))
    }

    /// Starts a new generation and drops entries unused in the last `keep`
    /// generations (including the one just finished).
    pub fn advance_generation(&mut self, keep: u64) {
        let oldest = self.generation.saturating_sub(keep.saturating_sub(1));
        self.entries.retain(|_, (_, used, _)| *used >= oldest);
        self.generation += 1;
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn stats(&self) -> CacheStats {
        self.stats
    }
}
