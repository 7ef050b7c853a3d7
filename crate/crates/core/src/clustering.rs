//! Clustering instance, weight function and its qutrit Hamiltonian encoding.
//!
//! Each non-excluded data point becomes an active spin; its projection
//! m ∈ {1, 0, -1} names the cluster. The excluded point is pinned to m = 1 and
//! enters the target Hamiltonian only through single-spin field terms.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::spin1_matrices;
use crate::tensor::{self, c64, dimension, embed_single_site, DenseHermitian, QutritState};

/// Only three-way partitions are encoded (one qutrit per point).
pub const CLUSTERS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Euclidean distance in the plane.
pub fn distance(a: Point, b: Point) -> f64 {
    ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringInstance {
    points: Vec<Point>,
    excluded: usize,
    clusters: usize,
}

impl ClusteringInstance {
    pub fn new(points: Vec<Point>, excluded: usize, clusters: usize) -> Result<Self> {
        if clusters != CLUSTERS {
            return Err(Error::InvalidInstance(format!(
                "only {CLUSTERS} clusters are supported, got {clusters}"
            )));
        }
        if points.len() < 2 {
            return Err(Error::InvalidInstance("need at least two points".into()));
        }
        if excluded >= points.len() {
            return Err(Error::InvalidInstance(format!(
                "excluded index {excluded} out of range for {} points",
                points.len()
            )));
        }
        if points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidInstance("non-finite coordinate".into()));
        }
        Ok(Self {
            points,
            excluded,
            clusters,
        })
    }

    /// The six-point example, with (4, -2) pinned.
    pub fn example() -> Self {
        let points = [(4., -2.), (-7., 7.), (6., -9.), (-6., 8.), (-2., -6.), (-9., 5.)]
            .into_iter()
            .map(|(x, y)| Point::new(x, y))
            .collect();
        Self::new(points, 0, CLUSTERS).expect("built-in instance is valid")
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn excluded(&self) -> usize {
        self.excluded
    }

    pub fn clusters(&self) -> usize {
        self.clusters
    }

    /// Number of active spins (points minus the pinned one).
    pub fn sites(&self) -> usize {
        self.points.len() - 1
    }

    /// Point index of 1-based active `site`.
    pub fn point_of_site(&self, site: usize) -> usize {
        debug_assert!(site >= 1 && site <= self.sites());
        if site - 1 < self.excluded {
            site - 1
        } else {
            site
        }
    }

    pub fn distances(&self) -> DistanceMatrix {
        DistanceMatrix::from_points(&self.points)
    }

    /// Distance between two active sites.
    pub fn site_distance(&self, i: usize, j: usize) -> f64 {
        distance(
            self.points[self.point_of_site(i)],
            self.points[self.point_of_site(j)],
        )
    }

    /// Distance from an active site to the pinned point.
    pub fn field_distance(&self, site: usize) -> f64 {
        distance(self.points[self.excluded], self.points[self.point_of_site(site)])
    }

    /// Parses the instance text format: `key = value` lines for `excluded`
    /// and `clusters`, and one `x y` row per point. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        let mut excluded = 0usize;
        let mut clusters = CLUSTERS;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: n + 1,
                message,
            };
            if let Some((key, value)) = line.split_once('=') {
                let value = value.trim();
                match key.trim() {
                    "excluded" => {
                        excluded = value
                            .parse()
                            .map_err(|_| err(format!("bad excluded index `{value}`")))?
                    }
                    "clusters" => {
                        clusters = value
                            .parse()
                            .map_err(|_| err(format!("bad cluster count `{value}`")))?
                    }
                    other => return Err(err(format!("unknown key `{other}`"))),
                }
                continue;
            }
            let coords: Vec<&str> = line.split_whitespace().collect();
            let [x, y] = coords[..] else {
                return Err(err(format!("expected `x y`, got `{line}`")));
            };
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| err(format!("bad coordinate `{s}`")))
            };
            points.push(Point::new(parse(x)?, parse(y)?));
        }
        Self::new(points, excluded, clusters)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "clusters = {}", self.clusters);
        let _ = writeln!(out, "excluded = {}", self.excluded);
        for p in &self.points {
            let _ = writeln!(out, "{} {}", p.x, p.y);
        }
        out
    }
}

/// Pairwise Euclidean distances between all points (pinned one included).
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_points(points: &[Point]) -> Self {
        let n = points.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                values[i * n + j] = distance(points[i], points[j]);
            }
        }
        Self { n, values }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

/// Cluster labels of the active spins; the pinned point is implicitly m = 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClusterAssignment {
    active: Vec<i8>,
}

impl ClusterAssignment {
    pub fn new(active: Vec<i8>) -> Result<Self> {
        if let Some(bad) = active.iter().find(|m| !(-1..=1).contains(*m)) {
            return Err(Error::InvalidInstance(format!("projection {bad} is not in {{1, 0, -1}}")));
        }
        Ok(Self { active })
    }

    pub fn from_basis_index(index: usize, sites: usize) -> Self {
        Self {
            active: tensor::projections(index, sites),
        }
    }

    pub fn active(&self) -> &[i8] {
        &self.active
    }

    pub fn basis_index(&self) -> usize {
        tensor::basis_index(&self.active)
    }

    /// Labels for every point, with the pinned point inserted as +1.
    pub fn full(&self, excluded: usize) -> Vec<i8> {
        let mut all = self.active.clone();
        all.insert(excluded, 1);
        all
    }

    /// The same partition with labels 0 and -1 exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            active: self.active.iter().map(|&m| if m == 1 { 1 } else { -1 - m }).collect(),
        }
    }
}

/// Sum over clusters of intra-cluster pair distances.
pub fn weight(assignment: &ClusterAssignment, instance: &ClusteringInstance) -> f64 {
    let labels = assignment.full(instance.excluded());
    let r = instance.distances();
    let mut w = 0.0;
    for i in 0..labels.len() {
        for j in i + 1..labels.len() {
            if labels[i] == labels[j] {
                w += r.get(i, j);
            }
        }
    }
    w
}

/// Largest register handled by exhaustive search.
pub const BRUTE_FORCE_MAX_SITES: usize = 10;

/// Every assignment attaining the minimum weight, in basis-index order.
pub fn brute_force_min(instance: &ClusteringInstance) -> Result<Vec<ClusterAssignment>> {
    let sites = instance.sites();
    if sites > BRUTE_FORCE_MAX_SITES {
        return Err(Error::InvalidInstance(format!(
            "exhaustive search limited to {BRUTE_FORCE_MAX_SITES} active spins, got {sites}"
        )));
    }
    let weights: Vec<f64> = (0..dimension(sites))
        .map(|k| weight(&ClusterAssignment::from_basis_index(k, sites), instance))
        .collect();
    let best = weights.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = 1e-9 * best.abs().max(1.0);
    Ok(weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w - best <= tol)
        .map(|(k, _)| ClusterAssignment::from_basis_index(k, sites))
        .collect())
}

/// Real diagonal operator in the S^z product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalHamiltonian {
    diag: Vec<f64>,
}

impl DiagonalHamiltonian {
    pub fn new(diag: Vec<f64>) -> Self {
        Self { diag }
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> DenseHermitian {
        DenseHermitian::from_diagonal(&self.diag)
    }

    /// Phases `t * E_k` of `exp(-i t H)`.
    pub fn phases(&self, t: f64) -> Vec<f64> {
        self.diag.iter().map(|e| e * t).collect()
    }
}

/// Pair bracket `m_i m_j + 3 m_i² m_j² - 2 m_i² - 2 m_j² + 1`.
fn pair_bracket(mi: f64, mj: f64) -> f64 {
    mi * mj + 3.0 * mi * mi * mj * mj - 2.0 * mi * mi - 2.0 * mj * mj + 1.0
}

/// Field bracket from the pinned spin, `m + m² - 1`.
fn field_bracket(m: f64) -> f64 {
    m + m * m - 1.0
}

/// Target Hamiltonian evaluated on every basis state, constants kept.
pub fn build_target_hamiltonian(instance: &ClusteringInstance) -> DiagonalHamiltonian {
    let sites = instance.sites();
    let diag = (0..dimension(sites))
        .map(|k| {
            let m: Vec<f64> = tensor::projections(k, sites).iter().map(|&x| x as f64).collect();
            let mut e = 0.0;
            for i in 1..=sites {
                for j in i + 1..=sites {
                    e += instance.site_distance(i, j) * pair_bracket(m[i - 1], m[j - 1]);
                }
                e += instance.field_distance(i) * field_bracket(m[i - 1]);
            }
            e
        })
        .collect();
    DiagonalHamiltonian::new(diag)
}

/// The target Hamiltonian regrouped by operator type.
///
/// `H_f = constant + Σ_j linear_j S_j + Σ_j quadratic_j S_j²
///        + Σ_{i<j} R_ij (S_i S_j + 3 S_i² S_j²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetTerms {
    pub constant: f64,
    /// Indexed by site - 1.
    pub linear: Vec<f64>,
    /// Indexed by site - 1.
    pub quadratic: Vec<f64>,
    /// `(i, j, R_ij)` with i < j, lexicographic.
    pub pairs: Vec<(usize, usize, f64)>,
}

impl TargetTerms {
    pub fn new(instance: &ClusteringInstance) -> Self {
        let n = instance.sites();
        let mut constant = 0.0;
        let mut linear = vec![0.0; n];
        let mut quadratic = vec![0.0; n];
        let mut pairs = Vec::new();
        for j in 1..=n {
            let r0 = instance.field_distance(j);
            linear[j - 1] += r0;
            quadratic[j - 1] += r0;
            constant -= r0;
        }
        for i in 1..=n {
            for j in i + 1..=n {
                let r = instance.site_distance(i, j);
                pairs.push((i, j, r));
                quadratic[i - 1] -= 2.0 * r;
                quadratic[j - 1] -= 2.0 * r;
                constant += r;
            }
        }
        Self {
            constant,
            linear,
            quadratic,
            pairs,
        }
    }

    /// Evaluates the regrouped sum on a basis state.
    pub fn energy(&self, projections: &[i8]) -> f64 {
        let m: Vec<f64> = projections.iter().map(|&x| x as f64).collect();
        let mut e = self.constant;
        for (k, &mk) in m.iter().enumerate() {
            e += self.linear[k] * mk + self.quadratic[k] * mk * mk;
        }
        for &(i, j, r) in &self.pairs {
            let (a, b) = (m[i - 1], m[j - 1]);
            e += r * (a * b + 3.0 * a * a * b * b);
        }
        e
    }
}

/// `-h Σ_j S_j^x` on `sites` qutrits.
pub fn build_initial_hamiltonian(h: f64, sites: usize) -> Result<DenseHermitian> {
    if !h.is_finite() || h < 0.0 {
        return Err(Error::InvalidSchedule(format!("transverse field must be >= 0, got {h}")));
    }
    let (sx, _, _) = spin1_matrices();
    let mut total = DenseHermitian::zeros(dimension(sites));
    for site in 1..=sites {
        total.add_scaled(embed_single_site(&sx, site, sites)?.as_ref(), -h);
    }
    Ok(total)
}

/// Single-site ground state of `-S^x`: `(1, √2, 1) / 2`.
pub fn initial_site_state() -> [c64; 3] {
    [
        c64::new(0.5, 0.0),
        c64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        c64::new(0.5, 0.0),
    ]
}

/// Product ground state of the transverse-field Hamiltonian.
pub fn initial_state(sites: usize) -> QutritState {
    QutritState::product(&vec![initial_site_state(); sites])
}

/// Dipolar couplings `J_ij = ε R_ij / 24` between active spins.
#[derive(Debug, Clone, PartialEq)]
pub struct DdiConstants {
    sites: usize,
    epsilon: f64,
    couplings: Vec<f64>,
}

impl DdiConstants {
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// `J_ij` for 1-based sites.
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings[(i - 1) * self.sites + (j - 1)]
    }

    /// `(i, j, J_ij)` for i < j, lexicographic.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (1..=self.sites)
            .flat_map(move |i| (i + 1..=self.sites).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, self.coupling(i, j)))
    }

    /// Diagonal of `Σ_{i<j} J_ij S_i^z S_j^z`.
    pub fn hamiltonian_diagonal(&self) -> Vec<f64> {
        let n = self.sites;
        let pairs: Vec<_> = self.pairs().collect();
        (0..dimension(n))
            .map(|k| {
                let m = tensor::projections(k, n);
                pairs
                    .iter()
                    .map(|&(i, j, jij)| jij * (m[i - 1] * m[j - 1]) as f64)
                    .sum()
            })
            .collect()
    }
}

/// DDI constants proportional to the inter-point distances.
pub fn ddi_constants(instance: &ClusteringInstance, epsilon: f64) -> Result<DdiConstants> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::InvalidSpinConfig(format!(
            "DDI scale must be finite and >= 0, got {epsilon}"
        )));
    }
    let n = instance.sites();
    let mut couplings = vec![0.0; n * n];
    for i in 1..=n {
        for j in 1..=n {
            if i != j {
                couplings[(i - 1) * n + (j - 1)] = epsilon * instance.site_distance(i, j) / 24.0;
            }
        }
    }
    Ok(DdiConstants {
        sites: n,
        epsilon,
        couplings,
    })
}

/// Picks the minimizer the anneal is expected to reach.
///
/// Degenerate minimizers are ranked by their second-order energy shift under
/// a weak transverse field, `-Σ_k |<k|ΣS^x|m>|² / (E_k - E_m)`; the most
/// negative shift lies lowest just before the end of the sweep. Ties fall
/// back to basis order.
pub fn preferred_minimizer(
    instance: &ClusteringInstance,
    minimizers: &[ClusterAssignment],
) -> Option<ClusterAssignment> {
    let target = build_target_hamiltonian(instance);
    let sites = instance.sites();
    let shift = |a: &ClusterAssignment| -> f64 {
        let em = target.diag()[a.basis_index()];
        let mut total = 0.0;
        for k in 0..sites {
            for step in [-1i8, 1] {
                let m = a.active()[k] + step;
                if !(-1..=1).contains(&m) {
                    continue;
                }
                let mut neighbour = a.active().to_vec();
                neighbour[k] = m;
                let gap = target.diag()[tensor::basis_index(&neighbour)] - em;
                if gap.abs() > 1e-12 {
                    // |<m±1|S^x|m>|² = 1/2 for spin 1
                    total -= 0.5 / gap;
                }
            }
        }
        total
    };
    minimizers
        .iter()
        .map(|a| (shift(a), a))
        .min_by(|x, y| x.0.total_cmp(&y.0))
        .map(|(_, a)| a.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> ClusteringInstance {
        ClusteringInstance::example()
    }

    #[test]
    fn distances_match_known_coefficients() {
        let p = example().points().to_vec();
        assert_eq!(distance(p[0], p[2]), 53f64.sqrt());
        assert_eq!(distance(p[1], p[2]), 425f64.sqrt());
        assert_eq!(distance(p[3], p[3]), 0.0);
    }

    #[test]
    fn site_numbering_skips_pinned_point() {
        let inst = example();
        assert_eq!(inst.sites(), 5);
        assert_eq!(inst.site_distance(1, 2), 425f64.sqrt());
        assert_eq!(inst.site_distance(4, 5), 170f64.sqrt());
        let field: Vec<f64> = (1..=5).map(|s| inst.field_distance(s)).collect();
        let expected: Vec<f64> = [202., 53., 200., 52., 218.].iter().map(|x: &f64| x.sqrt()).collect();
        assert_eq!(field, expected);

        let shifted = ClusteringInstance::new(inst.points().to_vec(), 2, 3).unwrap();
        assert_eq!(shifted.point_of_site(2), 1);
        assert_eq!(shifted.point_of_site(3), 3);
    }

    #[test]
    fn single_cluster_weight_is_total_distance() {
        let inst = example();
        let all_up = ClusterAssignment::new(vec![1; 5]).unwrap();
        let r = inst.distances();
        let total: f64 = (0..6).flat_map(|i| (i + 1..6).map(move |j| (i, j))).map(|(i, j)| r.get(i, j)).sum();
        assert!((weight(&all_up, &inst) - total).abs() < 1e-12);
    }

    #[test]
    fn optimal_weight() {
        let a = ClusterAssignment::new(vec![-1, 0, -1, 1, -1]).unwrap();
        let expected = 52f64.sqrt() + 2f64.sqrt() + 8f64.sqrt() + 18f64.sqrt();
        assert!((weight(&a, &example()) - expected).abs() < 1e-12);
        assert!((expected - 15.696).abs() < 1e-3);
    }

    #[test]
    fn singletons_contribute_nothing() {
        let inst = ClusteringInstance::new(
            vec![Point::new(0., 0.), Point::new(5., 0.), Point::new(0., 7.)],
            0,
            3,
        )
        .unwrap();
        let a = ClusterAssignment::new(vec![0, -1]).unwrap();
        assert_eq!(weight(&a, &inst), 0.0);
    }

    #[test]
    fn identical_points_share_a_cluster() {
        let inst = ClusteringInstance::new(
            vec![
                Point::new(0., 0.),
                Point::new(50., 50.),
                Point::new(50., 50.),
                Point::new(-40., 60.),
            ],
            0,
            3,
        )
        .unwrap();
        for a in brute_force_min(&inst).unwrap() {
            assert_eq!(a.active()[0], a.active()[1]);
        }
    }

    #[test]
    fn equidistant_ties_are_all_returned() {
        // Three collinear, equally spaced points plus the pinned origin: the
        // two assignments that isolate either end are tied.
        let inst = ClusteringInstance::new(
            vec![Point::new(0., 0.), Point::new(1., 0.), Point::new(2., 0.), Point::new(3., 0.)],
            0,
            3,
        )
        .unwrap();
        let mins = brute_force_min(&inst).unwrap();
        assert!(mins.len() > 1);
        let w0 = weight(&mins[0], &inst);
        assert!(mins.iter().all(|a| (weight(a, &inst) - w0).abs() < 1e-12));
    }

    #[test]
    fn pair_bracket_signs() {
        assert_eq!(pair_bracket(1., 1.), 1.0);
        assert_eq!(pair_bracket(0., 0.), 1.0);
        assert_eq!(pair_bracket(-1., -1.), 1.0);
        assert_eq!(pair_bracket(1., 0.), -1.0);
        assert_eq!(pair_bracket(1., -1.), -1.0);
        assert_eq!(pair_bracket(0., -1.), -1.0);
    }

    #[test]
    fn regrouped_terms_reproduce_diagonal() {
        let inst = example();
        let hf = build_target_hamiltonian(&inst);
        let terms = TargetTerms::new(&inst);
        for k in 0..hf.dim() {
            let e = terms.energy(&tensor::projections(k, 5));
            assert!((e - hf.diag()[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn target_is_invariant_under_zero_minus_one_swap() {
        let inst = example();
        let hf = build_target_hamiltonian(&inst);
        for k in 0..hf.dim() {
            let a = ClusterAssignment::from_basis_index(k, 5);
            let b = a.swapped();
            assert!((hf.diag()[k] - hf.diag()[b.basis_index()]).abs() < 1e-10);
        }
    }

    #[test]
    fn initial_hamiltonian_ground_state() {
        let h = 6.5;
        let h0 = build_initial_hamiltonian(h, 3).unwrap();
        let psi = initial_state(3);
        let out = h0.apply(&psi).unwrap();
        for (a, b) in out.amplitudes().iter().zip(psi.amplitudes()) {
            assert!((a - b * (-3.0 * h)).norm() < 1e-12);
        }
        let evals = h0.eigenvalues().unwrap();
        assert!((evals[0] + 3.0 * h).abs() < 1e-10);

        let zero = build_initial_hamiltonian(0.0, 2).unwrap();
        assert_eq!(tensor::max_abs(zero.matrix()), 0.0);
        assert!(build_initial_hamiltonian(-1.0, 2).is_err());
    }

    #[test]
    fn initial_state_amplitudes() {
        let psi = initial_state(5);
        assert!((psi.norm() - 1.0).abs() < 1e-15);
        let all_zero = tensor::basis_index(&[0; 5]);
        assert!((psi.amplitudes()[all_zero].re - 0.5f64.sqrt().powi(5)).abs() < 1e-15);
        assert!((psi.inner(&psi).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ddi_constants_follow_distances() {
        let inst = example();
        let j = ddi_constants(&inst, 1e-6).unwrap();
        assert!((j.coupling(1, 2) - 1e-6 * 425f64.sqrt() / 24.0).abs() < 1e-20);
        assert!((j.coupling(4, 5) - 1e-6 * 170f64.sqrt() / 24.0).abs() < 1e-20);
        assert_eq!(j.pairs().count(), 10);
        let zero = ddi_constants(&inst, 0.0).unwrap();
        assert!(zero.pairs().all(|(_, _, c)| c == 0.0));
        assert!(ddi_constants(&inst, -1.0).is_err());
    }

    #[test]
    fn instance_text_round_trip() {
        let inst = example();
        let parsed = ClusteringInstance::parse(&inst.to_text()).unwrap();
        assert_eq!(parsed, inst);
        let err = ClusteringInstance::parse("excluded = 0\n1 2 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(ClusteringInstance::parse("clusters = 4\n0 0\n1 1\n").is_err());
        assert!(ClusteringInstance::parse("excluded = 9\n0 0\n1 1\n").is_err());
    }

    #[test]
    fn preferred_minimizer_breaks_the_swap_tie() {
        let inst = example();
        let mins = brute_force_min(&inst).unwrap();
        let pick = preferred_minimizer(&inst, &mins).unwrap();
        assert_eq!(pick.active(), &[-1, 0, -1, 1, -1]);
    }
}
