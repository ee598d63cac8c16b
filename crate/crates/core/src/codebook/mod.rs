//! Per-user codebooks and the superimposed constellation.
//!
//! User `j`'s codebook is `ezc(diag(S_j)) · C_MC`: its first active resource
//! carries `z_a` times the first mother-constellation row, its second active
//! resource carries `z_b` times the second row.

mod io;
mod reference;

pub use io::{load_codebooks, save_codebooks, CodebookFile, SCHEMA};
pub use reference::{reference_codebooks, reference_template, REFERENCE_IDS};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mother_constellation::{self, MotherConstellation};
use crate::optimizer::DesignPoint;
use crate::signature::{ezc, ResourceWeights, SignatureMatrix, SignatureTemplate, USER_DIMENSIONS};

/// Default cap on the number of superimposed codewords that may be
/// enumerated. Sets need strictly fewer than this many points.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 24;

/// Relative tolerance on total energy `M·J` for freshly built sets.
pub const BUILT_ENERGY_TOLERANCE: f64 = 1e-6;
/// Relative tolerance on total energy for tables printed with 4 decimals
/// (reference sets, files).
pub const ROUNDED_ENERGY_TOLERANCE: f64 = 2e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    /// M, codewords per user.
    pub order: usize,
    /// J
    pub users: usize,
    /// K
    pub resources: usize,
    /// N, nonzero dimensions per codeword.
    pub user_dims: usize,
    /// Users superimposed per resource (maximum over resources).
    pub df: usize,
}

impl Dims {
    /// `M^J` as an exact integer.
    pub fn constellation_size(&self) -> u128 {
        (self.order as u128).saturating_pow(self.users as u32)
    }

    pub fn bits_per_user(&self) -> usize {
        self.order.trailing_zeros() as usize
    }
}

/// One user's K×M complex codebook, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    user: usize,
    resources: usize,
    order: usize,
    entries: Vec<Complex64>,
    active: [usize; 2],
}

impl Codebook {
    /// `rows` is K rows of M entries. Exactly two rows must be nonzero.
    pub fn from_rows(user: usize, rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let resources = rows.len();
        let order = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != order) {
            return Err(Error::DimensionMismatch {
                what: "codewords per row",
                expected: order,
                found: rows.iter().map(|r| r.len()).find(|&l| l != order).unwrap_or(0),
            });
        }
        let nonzero: Vec<usize> = (0..resources)
            .filter(|&k| rows[k].iter().any(|z| z.norm_sqr() > 0.0))
            .collect();
        if nonzero.len() != USER_DIMENSIONS {
            return Err(Error::Invariant {
                invariant: "N=2 nonzero rows",
                detail: format!(
                    "user {} has {} nonzero rows ({:?})",
                    user + 1,
                    nonzero.len(),
                    nonzero.iter().map(|k| k + 1).collect::<Vec<_>>()
                ),
            });
        }
        Ok(Self {
            user,
            resources,
            order,
            entries: rows.into_iter().flatten().collect(),
            active: [nonzero[0], nonzero[1]],
        })
    }

    /// 0-based user index.
    pub fn user(&self) -> usize {
        self.user
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn resources(&self) -> usize {
        self.resources
    }

    pub fn active_resources(&self) -> [usize; 2] {
        self.active
    }

    pub fn entry(&self, resource: usize, codeword: usize) -> Complex64 {
        self.entries[resource * self.order + codeword]
    }

    pub fn row(&self, resource: usize) -> &[Complex64] {
        &self.entries[resource * self.order..(resource + 1) * self.order]
    }

    pub fn codeword(&self, m: usize) -> Vec<Complex64> {
        (0..self.resources).map(|k| self.entry(k, m)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.resources).map(|k| self.row(k).to_vec()).collect()
    }

    pub fn energy(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest deviation from `x(m) = -x(M-1-m)`.
    pub fn antipodal_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..self.resources {
            let row = self.row(k);
            for m in 0..self.order {
                worst = worst.max((row[m] + row[self.order - 1 - m]).norm());
            }
        }
        worst
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            entries: self.entries.iter().map(|z| z * s).collect(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Generated,
    Reference { id: String },
    Loaded { path: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodebookSet {
    dims: Dims,
    codebooks: Vec<Codebook>,
    template: Option<String>,
    design_point: Option<DesignPoint>,
    provenance: Provenance,
}

impl CodebookSet {
    /// Assemble and validate a set. Checks uniform shapes, the two-row
    /// sparsity of every user, antipodal symmetry, agreement with the named
    /// template (if any) and total energy `M·J` within `energy_tolerance`.
    pub fn new(
        codebooks: Vec<Codebook>,
        template: Option<String>,
        design_point: Option<DesignPoint>,
        provenance: Provenance,
        energy_tolerance: f64,
    ) -> Result<Self> {
        let first = codebooks.first().ok_or_else(|| Error::Invariant {
            invariant: "at least one user",
            detail: "empty codebook set".into(),
        })?;
        let (order, resources) = (first.order, first.resources);
        if order < 2 || !order.is_power_of_two() {
            return Err(Error::Invariant {
                invariant: "M is a power of two",
                detail: format!("M = {order}"),
            });
        }
        for cb in &codebooks {
            if cb.order != order || cb.resources != resources {
                return Err(Error::Invariant {
                    invariant: "uniform codebook shape",
                    detail: format!(
                        "user {} is {}x{}, expected {resources}x{order}",
                        cb.user + 1,
                        cb.resources,
                        cb.order
                    ),
                });
            }
            let err = cb.antipodal_error();
            if err > 1e-6 {
                return Err(Error::Invariant {
                    invariant: "antipodal codewords",
                    detail: format!("user {} deviates by {err:.3e}", cb.user + 1),
                });
            }
        }
        let users = codebooks.len();
        if let Some(name) = &template {
            let t = SignatureTemplate::builtin(name)?;
            if t.users() != users || t.resources() != resources {
                return Err(Error::Invariant {
                    invariant: "template dimensions",
                    detail: format!(
                        "template {name} is {}x{}, set is {resources}x{users}",
                        t.resources(),
                        t.users()
                    ),
                });
            }
            for cb in &codebooks {
                if t.active_resources(cb.user) != cb.active {
                    return Err(Error::Invariant {
                        invariant: "active rows match template",
                        detail: format!("user {} occupies rows {:?}", cb.user + 1, cb.active),
                    });
                }
            }
        }
        let df = (0..resources)
            .map(|k| codebooks.iter().filter(|cb| cb.active.contains(&k)).count())
            .max()
            .unwrap_or(0);
        let set = Self {
            dims: Dims {
                order,
                users,
                resources,
                user_dims: USER_DIMENSIONS,
                df,
            },
            codebooks,
            template,
            design_point,
            provenance,
        };
        let expected = (order * users) as f64;
        let total = set.total_energy();
        if (total - expected).abs() > energy_tolerance * expected {
            return Err(Error::Invariant {
                invariant: "total energy M*J",
                detail: format!("total energy {total:.6} != {expected}"),
            });
        }
        Ok(set)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn codebooks(&self) -> &[Codebook] {
        &self.codebooks
    }

    pub fn codebook(&self, user: usize) -> &Codebook {
        &self.codebooks[user]
    }

    pub fn template(&self) -> Option<&str> {
        self.template.as_deref()
    }

    pub fn design_point(&self) -> Option<&DesignPoint> {
        self.design_point.as_ref()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn total_energy(&self) -> f64 {
        self.codebooks.iter().map(Codebook::energy).sum()
    }

    /// Users active on each resource, in ascending user order.
    pub fn resource_users(&self) -> Vec<Vec<usize>> {
        (0..self.dims.resources)
            .map(|k| {
                self.codebooks
                    .iter()
                    .filter(|cb| cb.active.contains(&k))
                    .map(|cb| cb.user)
                    .collect()
            })
            .collect()
    }

    /// Every entry multiplied by `s`. The result is not renormalized.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            codebooks: self.codebooks.iter().map(|cb| cb.scaled(s)).collect(),
            ..self.clone()
        }
    }

    /// `x(n) = Σ_j x_j(m_j)` for 0-based codeword indices.
    pub fn superimpose(&self, indices: &[usize]) -> Result<SuperimposedCodeword> {
        if indices.len() != self.dims.users {
            return Err(Error::DimensionMismatch {
                what: "index tuple length",
                expected: self.dims.users,
                found: indices.len(),
            });
        }
        if let Some(&bad) = indices.iter().find(|&&m| m >= self.dims.order) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                order: self.dims.order,
            });
        }
        let mut vector = vec![Complex64::new(0.0, 0.0); self.dims.resources];
        for (cb, &m) in self.codebooks.iter().zip(indices) {
            for k in cb.active {
                vector[k] += cb.entry(k, m);
            }
        }
        Ok(SuperimposedCodeword {
            indices: indices.to_vec(),
            vector,
        })
    }

    pub fn check_budget(&self, cap: u64) -> Result<usize> {
        let required = self.dims.constellation_size();
        if required >= cap as u128 {
            return Err(Error::BudgetExceeded { required, cap });
        }
        Ok(required as usize)
    }

    /// All `M^J` superimposed codewords in lexicographic index order (the
    /// last user varies fastest).
    pub fn enumerate_superimposed(&self, cap: u64) -> Result<SuperimposedIter<'_>> {
        let total = self.check_budget(cap)?;
        Ok(SuperimposedIter {
            set: self,
            next: 0,
            end: total,
        })
    }

    /// Enumerate a contiguous range of flat indices; workers take disjoint
    /// ranges.
    pub fn enumerate_range(&self, range: std::ops::Range<usize>, cap: u64) -> Result<SuperimposedIter<'_>> {
        let total = self.check_budget(cap)?;
        Ok(SuperimposedIter {
            set: self,
            next: range.start.min(total),
            end: range.end.min(total),
        })
    }

    /// Flat index → 0-based index tuple.
    pub fn decode_index(&self, mut n: u128) -> Vec<usize> {
        let m = self.dims.order as u128;
        let mut out = vec![0; self.dims.users];
        for slot in out.iter_mut().rev() {
            *slot = (n % m) as usize;
            n /= m;
        }
        out
    }

    /// The whole superimposed constellation as a packed point cloud.
    pub fn point_cloud(&self, cap: u64) -> Result<PointCloud> {
        let total = self.check_budget(cap)?;
        let k = self.dims.resources;
        let stride = 2 * k;
        let mut coords = Vec::with_capacity(total * stride);
        coords.resize(stride, 0.0);
        for cb in &self.codebooks {
            let previous = std::mem::take(&mut coords);
            coords.reserve(previous.len() * self.dims.order);
            for point in previous.chunks_exact(stride) {
                for m in 0..self.dims.order {
                    let start = coords.len();
                    coords.extend_from_slice(point);
                    for r in cb.active {
                        let z = cb.entry(r, m);
                        coords[start + 2 * r] += z.re;
                        coords[start + 2 * r + 1] += z.im;
                    }
                }
            }
        }
        Ok(PointCloud {
            resources: k,
            coords,
        })
    }
}

/// Superimposed constellation stored as `[re_0, im_0, re_1, im_1, …]` per
/// point, points in lexicographic index order.
#[derive(Debug, Clone)]
pub struct PointCloud {
    resources: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn len(&self) -> usize {
        self.coords.len() / self.stride()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn stride(&self) -> usize {
        2 * self.resources
    }

    pub fn resources(&self) -> usize {
        self.resources
    }

    pub fn point(&self, n: usize) -> &[f64] {
        &self.coords[n * self.stride()..(n + 1) * self.stride()]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuperimposedCodeword {
    /// 0-based codeword index per user.
    pub indices: Vec<usize>,
    pub vector: Vec<Complex64>,
}

pub struct SuperimposedIter<'a> {
    set: &'a CodebookSet,
    next: usize,
    end: usize,
}

impl Iterator for SuperimposedIter<'_> {
    type Item = SuperimposedCodeword;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.end {
            return None;
        }
        let indices = self.set.decode_index(self.next as u128);
        self.next += 1;
        Some(self.set.superimpose(&indices).expect("indices in range"))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.end - self.next;
        (n, Some(n))
    }
}

impl ExactSizeIterator for SuperimposedIter<'_> {}

/// Build all `J` codebooks from a signature matrix and a mother constellation.
pub fn build_codebooks(sig: &SignatureMatrix, mc: &MotherConstellation) -> Result<CodebookSet> {
    let t = sig.template();
    let target = crate::signature::energy_target(mc.order(), t.users(), t.resources());
    if !sig.weights().is_normalized(target) {
        return Err(Error::NotNormalized {
            sum: sig.weights().energy_sum(),
            target,
        });
    }
    let expected_energy = mc.dimension_energy();
    if (sig.mc_energy() - expected_energy).abs() > 1e-9 * expected_energy {
        return Err(Error::InvalidParameter(format!(
            "signature was scaled for E = {}, constellation has E = {expected_energy}",
            sig.mc_energy()
        )));
    }
    let order = mc.order();
    let codebooks = (0..t.users())
        .map(|j| {
            let spread = ezc(&sig.column(j))?;
            let rows = spread
                .iter()
                .map(|s| {
                    (0..order)
                        .map(|m| s[0] * mc.row(0)[m] + s[1] * mc.row(1)[m])
                        .collect()
                })
                .collect();
            Codebook::from_rows(j, rows)
        })
        .collect::<Result<Vec<_>>>()?;
    let dp = DesignPoint {
        energies: sig.weights().energies.clone(),
        phases: sig.weights().phases.clone(),
        omega: mc.omega(),
    };
    let template = crate::signature::BUILTIN_TEMPLATES
        .contains(&t.name())
        .then(|| t.name().to_string());
    CodebookSet::new(codebooks, template, Some(dp), Provenance::Generated, BUILT_ENERGY_TOLERANCE)
}

/// Convenience: template + design point → codebook set.
pub fn build_from_design(
    template: &SignatureTemplate,
    order: usize,
    point: &DesignPoint,
) -> Result<CodebookSet> {
    let mc = MotherConstellation::new(order, point.omega)?;
    let weights = ResourceWeights::new(point.energies.clone(), point.phases.clone())?;
    let sig = SignatureMatrix::build(template, &weights, order, mc.dimension_energy())?;
    build_codebooks(&sig, &mc)
}

/// Design parameters recovered from a codebook table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedDesign {
    /// `E_i` as the mean squared norm of the rows carrying `z_i`.
    pub energies: Vec<f64>,
    pub phases: Vec<f64>,
    pub omega: f64,
    pub mc_energy: f64,
}

impl FittedDesign {
    /// Design point with energies rescaled onto the exact `M·J/K` budget.
    pub fn design_point(&self, target_sum: f64) -> Result<DesignPoint> {
        Ok(DesignPoint {
            energies: crate::optimizer::project_energies(&self.energies, target_sum)?,
            phases: self.phases.clone(),
            omega: self.omega,
        })
    }
}

/// Recover `(E_i, φ_i, ω)` from a codebook set laid out on `template`.
///
/// On the first active row the codeword at column `M/2 - 1` is `z·ω_1 = z`
/// and column 0 is `z·ω_{M/2}`; on the second active row column 0 is
/// `-z·ω_1 = -z`. Ratios of magnitudes give ω, the anchor entries give `z_i`.
pub fn fit_design_point(set: &CodebookSet, template: &SignatureTemplate) -> Result<FittedDesign> {
    let dims = set.dims();
    if template.users() != dims.users || template.resources() != dims.resources {
        return Err(Error::DimensionMismatch {
            what: "template users",
            expected: template.users(),
            found: dims.users,
        });
    }
    let order = dims.order;
    let half = order / 2;
    if half < 2 {
        return Err(Error::InvalidOrder(order));
    }
    let df = template.df();
    let mut energy_acc = vec![(0.0, 0usize); df];
    let mut z_acc = vec![(Complex64::new(0.0, 0.0), 0usize); df];
    let mut omega_acc = (0.0, 0usize);

    for cb in set.codebooks() {
        let [first, second] = template.active_resources(cb.user());
        let [wa, wb] = template.user_weight_indices(cb.user());
        let r0 = cb.row(first);
        let r1 = cb.row(second);

        let za = r0[half - 1];
        let zb = -r1[0];
        // ω_{M/2} / ω_1 on row 0; row 1 holds ω_{M/2} at column M/2 - 1.
        for ratio in [r0[0].norm() / za.norm(), r1[half - 1].norm() / zb.norm()] {
            omega_acc.0 += 1.0 + (ratio - 1.0) / (half as f64 - 1.0);
            omega_acc.1 += 1;
        }
        for (w, row, z) in [(wa, r0, za), (wb, r1, zb)] {
            let e: f64 = row.iter().map(|x| x.norm_sqr()).sum();
            energy_acc[w - 1].0 += e;
            energy_acc[w - 1].1 += 1;
            z_acc[w - 1].0 += z;
            z_acc[w - 1].1 += 1;
        }
    }
    let omega = omega_acc.0 / omega_acc.1 as f64;
    let mc_energy = mother_constellation::dimension_energy(order, omega)?;
    Ok(FittedDesign {
        energies: energy_acc.iter().map(|(s, n)| s / *n as f64).collect(),
        phases: z_acc
            .iter()
            .map(|(s, _)| {
                let p = s.arg();
                if p.abs() < 1e-12 { 0.0 } else { p }
            })
            .collect(),
        omega,
        mc_energy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn uniform_set() -> CodebookSet {
        let t = SignatureTemplate::builtin("S4x6").unwrap();
        let dp = DesignPoint {
            energies: vec![2.0; 3],
            phases: vec![std::f64::consts::FRAC_PI_4; 3],
            omega: 2.0,
        };
        build_from_design(&t, 4, &dp).unwrap()
    }

    #[test]
    fn uniform_build_has_total_energy_mj() {
        let set = uniform_set();
        assert_relative_eq!(set.total_energy(), 24.0, max_relative = 1e-12);
        assert_eq!(set.codebook(0).active_resources(), [1, 3]);
        assert_eq!(set.dims().df, 3);
    }

    #[test]
    fn per_dimension_energy_identity() {
        let t = SignatureTemplate::builtin("S5x10").unwrap();
        let dp = DesignPoint {
            energies: vec![2.4, 2.5, 2.4, 0.7],
            phases: vec![2.3, 2.1, 0.5, 0.0],
            omega: 3.0,
        };
        let set = build_from_design(&t, 4, &dp).unwrap();
        for cb in set.codebooks() {
            let w = t.user_weight_indices(cb.user());
            for (slot, k) in cb.active_resources().into_iter().enumerate() {
                let e: f64 = cb.row(k).iter().map(|z| z.norm_sqr()).sum();
                assert_relative_eq!(e, dp.energies[w[slot] - 1], max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn superimpose_antipodal_and_errors() {
        let set = uniform_set();
        let a = set.superimpose(&[0, 1, 2, 3, 0, 1]).unwrap();
        let b = set.superimpose(&[3, 2, 1, 0, 3, 2]).unwrap();
        for (x, y) in a.vector.iter().zip(&b.vector) {
            assert_relative_eq!(x.re, -y.re, epsilon = 1e-12);
            assert_relative_eq!(x.im, -y.im, epsilon = 1e-12);
        }
        assert!(matches!(
            set.superimpose(&[0, 0, 0, 0, 0, 4]),
            Err(Error::IndexOutOfRange { index: 4, order: 4 })
        ));
        assert!(set.superimpose(&[0, 0]).is_err());
    }

    #[test]
    fn single_user_superposition_is_the_codeword() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let cb = Codebook::from_rows(
            0,
            vec![
                vec![Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
                vec![Complex64::new(0.0, h), Complex64::new(0.0, -h)],
            ],
        )
        .unwrap();
        let set = CodebookSet::new(vec![cb.clone()], None, None, Provenance::Generated, 1e-9).unwrap();
        for m in 0..2 {
            assert_eq!(set.superimpose(&[m]).unwrap().vector, cb.codeword(m));
        }
    }

    #[test]
    fn enumeration_counts_and_order() {
        let set = uniform_set();
        let all: Vec<_> = set.enumerate_superimposed(DEFAULT_ENUMERATION_CAP).unwrap().collect();
        assert_eq!(all.len(), 4096);
        assert_eq!(all[1].indices, vec![0, 0, 0, 0, 0, 1]);
        assert_eq!(all[4095].indices, vec![3; 6]);

        let cloud = set.point_cloud(DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(cloud.len(), 4096);
        for n in [0, 1, 77, 4095] {
            let p = cloud.point(n);
            for (k, z) in all[n].vector.iter().enumerate() {
                assert_relative_eq!(p[2 * k], z.re, epsilon = 1e-12);
                assert_relative_eq!(p[2 * k + 1], z.im, epsilon = 1e-12);
            }
        }

        let part: Vec<_> = set.enumerate_range(100..103, DEFAULT_ENUMERATION_CAP).unwrap().collect();
        assert_eq!(part[0], all[100]);
        assert_eq!(part.len(), 3);
    }

    #[test]
    fn budget_is_exclusive() {
        let set = uniform_set();
        assert!(set.enumerate_superimposed(4096).is_err());
        assert!(set.enumerate_superimposed(4097).is_ok());
        let t = SignatureTemplate::builtin("S4x6").unwrap();
        let dp = DesignPoint {
            energies: vec![7.0, 9.0, 8.0],
            phases: vec![0.5; 3],
            omega: 1.5,
        };
        let big = build_from_design(&t, 16, &dp).unwrap();
        assert_eq!(big.dims().constellation_size(), 16_777_216);
        assert!(matches!(
            big.enumerate_superimposed(DEFAULT_ENUMERATION_CAP),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn codebook_rejects_three_rows() {
        let z = Complex64::new(1.0, 0.0);
        let err = Codebook::from_rows(0, vec![vec![z, -z], vec![z, -z], vec![z, -z]]).unwrap_err();
        assert!(err.to_string().contains("N=2 nonzero rows"));
    }

    #[test]
    fn normalization_violation() {
        let set = uniform_set();
        let half = set.scaled(std::f64::consts::FRAC_1_SQRT_2);
        let err = CodebookSet::new(
            half.codebooks().to_vec(),
            None,
            None,
            Provenance::Generated,
            ROUNDED_ENERGY_TOLERANCE,
        )
        .unwrap_err();
        assert!(err.to_string().contains("total energy"), "{err}");
    }

    #[test]
    fn fit_recovers_built_design() {
        let t = SignatureTemplate::builtin("S4x6").unwrap();
        let dp = DesignPoint {
            energies: vec![2.59, 1.30, 2.11],
            phases: vec![1.79, 0.51, 0.2],
            omega: 3.4756,
        };
        let set = build_from_design(&t, 4, &dp).unwrap();
        let fit = fit_design_point(&set, &t).unwrap();
        assert_relative_eq!(fit.omega, dp.omega, max_relative = 1e-12);
        for i in 0..3 {
            assert_relative_eq!(fit.energies[i], dp.energies[i], max_relative = 1e-12);
            assert_relative_eq!(fit.phases[i], dp.phases[i], max_relative = 1e-12);
        }
    }
}
