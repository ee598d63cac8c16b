//! Signature templates, factor graphs and signature matrices.
//!
//! A template fixes which of the `d_f` complex weights `z_i` sits on each
//! (resource, user) cell. The weights are `z_i = sqrt(E_i / E) · e^{jφ_i}`
//! where `E` is the per-dimension energy of the mother constellation.

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nonzero cells per user column.
pub const USER_DIMENSIONS: usize = 2;

pub const BUILTIN_TEMPLATES: [&str; 2] = ["S4x6", "S5x10"];

#[rustfmt::skip]
const S4X6: [[u8; 6]; 4] = [
    [0, 1, 2, 0, 3, 0],
    [1, 0, 2, 0, 0, 3],
    [0, 3, 0, 2, 0, 1],
    [3, 0, 0, 2, 1, 0],
];

#[rustfmt::skip]
const S5X10: [[u8; 10]; 5] = [
    [1, 2, 3, 4, 0, 0, 0, 0, 0, 0],
    [4, 0, 0, 0, 1, 2, 3, 0, 0, 0],
    [0, 3, 0, 0, 4, 0, 0, 1, 2, 0],
    [0, 0, 2, 0, 0, 3, 0, 4, 0, 1],
    [0, 0, 0, 1, 0, 0, 2, 0, 3, 4],
];

/// Placement of the weight indices over a K×J grid. `0` marks an idle cell,
/// `i > 0` means `z_i` occupies it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureTemplate {
    name: String,
    resources: usize,
    users: usize,
    df: usize,
    placement: Vec<u8>,
}

impl SignatureTemplate {
    /// Validate a custom placement given as rows.
    pub fn new(name: impl Into<String>, rows: &[Vec<u8>]) -> Result<Self> {
        let resources = rows.len();
        if resources == 0 {
            return Err(Error::InvalidTemplate("no resources".into()));
        }
        let users = rows[0].len();
        if users == 0 || rows.iter().any(|r| r.len() != users) {
            return Err(Error::InvalidTemplate("ragged or empty rows".into()));
        }
        let placement: Vec<u8> = rows.iter().flatten().copied().collect();
        let row_counts: Vec<usize> = rows
            .iter()
            .map(|r| r.iter().filter(|&&v| v > 0).count())
            .collect();
        let df = row_counts[0];
        if df == 0 || row_counts.iter().any(|&c| c != df) {
            return Err(Error::InvalidTemplate(format!(
                "every resource must carry the same number of users, got {row_counts:?}"
            )));
        }
        for j in 0..users {
            let count = (0..resources).filter(|&k| placement[k * users + j] > 0).count();
            if count != USER_DIMENSIONS {
                return Err(Error::InvalidTemplate(format!(
                    "user {} occupies {count} resources, expected {USER_DIMENSIONS}",
                    j + 1
                )));
            }
        }
        if let Some(&bad) = placement.iter().find(|&&v| v as usize > df) {
            return Err(Error::InvalidTemplate(format!(
                "weight index {bad} exceeds d_f = {df}"
            )));
        }
        Ok(Self {
            name: name.into(),
            resources,
            users,
            df,
            placement,
        })
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let rows: Vec<Vec<u8>> = match name {
            "S4x6" => S4X6.iter().map(|r| r.to_vec()).collect(),
            "S5x10" => S5X10.iter().map(|r| r.to_vec()).collect(),
            _ => {
                return Err(Error::UnknownTemplate {
                    name: name.to_string(),
                    known: BUILTIN_TEMPLATES.join(", "),
                })
            }
        };
        Self::new(name, &rows)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// K
    pub fn resources(&self) -> usize {
        self.resources
    }

    /// J
    pub fn users(&self) -> usize {
        self.users
    }

    pub fn df(&self) -> usize {
        self.df
    }

    /// Overloading factor J/K.
    pub fn overload(&self) -> f64 {
        self.users as f64 / self.resources as f64
    }

    /// Weight index at (resource, user), both 0-based.
    pub fn at(&self, resource: usize, user: usize) -> u8 {
        self.placement[resource * self.users + user]
    }

    /// The two resources of `user` in ascending order.
    pub fn active_resources(&self, user: usize) -> [usize; 2] {
        let mut it = (0..self.resources).filter(|&k| self.at(k, user) > 0);
        let a = it.next().expect("validated template");
        let b = it.next().expect("validated template");
        [a, b]
    }

    /// 1-based weight indices `(i, j)` carried by `user` on its first and
    /// second active resource.
    pub fn user_weight_indices(&self, user: usize) -> [usize; 2] {
        self.active_resources(user)
            .map(|k| self.at(k, user) as usize)
    }

    pub fn indicator(&self) -> IndicatorMatrix {
        IndicatorMatrix {
            rows: self.resources,
            cols: self.users,
            data: self.placement.iter().map(|&v| u8::from(v > 0)).collect(),
        }
    }

    /// K×J matrix with `E_i` wherever `z_i` is placed.
    pub fn energy_matrix(&self, energies: &[f64]) -> Result<Vec<Vec<f64>>> {
        if energies.len() != self.df {
            return Err(Error::DimensionMismatch {
                what: "energy vector length",
                expected: self.df,
                found: energies.len(),
            });
        }
        Ok((0..self.resources)
            .map(|k| {
                (0..self.users)
                    .map(|j| match self.at(k, j) {
                        0 => 0.0,
                        i => energies[i as usize - 1],
                    })
                    .collect()
            })
            .collect())
    }

    /// True when the users do not all carry the same total energy, i.e. the
    /// column sums of the energy matrix differ. For `S4x6` this is
    /// `E1 + E3 != 2 E2`; for `S5x10` it is `E1 + E4 != E2 + E3`.
    pub fn is_power_imbalanced(&self, energies: &[f64]) -> Result<bool> {
        let em = self.energy_matrix(energies)?;
        let totals: Vec<f64> = (0..self.users)
            .map(|j| em.iter().map(|row| row[j]).sum())
            .collect();
        let scale = totals.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(f64::MIN_POSITIVE);
        Ok(totals.iter().any(|t| (t - totals[0]).abs() > 1e-9 * scale))
    }
}

/// Binary K×J resource/user incidence matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndicatorMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl IndicatorMatrix {
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidTemplate("ragged indicator rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().map(|&v| u8::from(v != 0)).collect(),
        })
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.cols + c] != 0
    }

    pub fn row_sums(&self) -> Vec<usize> {
        (0..self.rows)
            .map(|r| (0..self.cols).filter(|&c| self.get(r, c)).count())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        (0..self.cols)
            .map(|c| (0..self.rows).filter(|&r| self.get(r, c)).count())
            .collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        self.data.chunks(self.cols.max(1)).map(|c| c.to_vec()).collect()
    }

    /// Shortest cycle length of the bipartite factor graph, `None` if the
    /// graph is a forest.
    ///
    /// For every edge (r, c) the edge is removed and the shortest r→c path
    /// is found by BFS; the cycle through that edge is one longer.
    pub fn girth(&self) -> Option<usize> {
        let n = self.rows + self.cols;
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    adj[r].push(self.rows + c);
                    adj[self.rows + c].push(r);
                }
            }
        }
        let mut best: Option<usize> = None;
        let mut dist = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for r in 0..self.rows {
            for &target in &adj[r] {
                dist.iter_mut().for_each(|d| *d = usize::MAX);
                dist[r] = 0;
                queue.clear();
                queue.push_back(r);
                'bfs: while let Some(u) = queue.pop_front() {
                    for &v in &adj[u] {
                        if (u == r && v == target) || (u == target && v == r) {
                            continue;
                        }
                        if dist[v] == usize::MAX {
                            dist[v] = dist[u] + 1;
                            if v == target {
                                break 'bfs;
                            }
                            queue.push_back(v);
                        }
                    }
                }
                if dist[target] != usize::MAX {
                    let len = dist[target] + 1;
                    best = Some(best.map_or(len, |b| b.min(len)));
                }
            }
        }
        best
    }
}

/// Per-weight energies `E_i` and phases `φ_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceWeights {
    pub energies: Vec<f64>,
    pub phases: Vec<f64>,
}

impl ResourceWeights {
    pub fn new(energies: Vec<f64>, phases: Vec<f64>) -> Result<Self> {
        let w = Self { energies, phases };
        w.validate()?;
        Ok(w)
    }

    /// Energies must be positive; phases must lie in `[0, π)`. The closed
    /// lower end admits reference codebooks whose fitted phase is zero.
    pub fn validate(&self) -> Result<()> {
        if self.energies.len() != self.phases.len() {
            return Err(Error::DimensionMismatch {
                what: "phase vector length",
                expected: self.energies.len(),
                found: self.phases.len(),
            });
        }
        if let Some(e) = self.energies.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return Err(Error::InvalidWeights(format!("energy {e} is not positive")));
        }
        if let Some(p) = self.phases.iter().find(|p| !(p.is_finite() && (0.0..PI).contains(*p))) {
            return Err(Error::InvalidWeights(format!("phase {p} outside [0, pi)")));
        }
        Ok(())
    }

    pub fn energy_sum(&self) -> f64 {
        self.energies.iter().sum()
    }

    pub fn is_normalized(&self, target: f64) -> bool {
        (self.energy_sum() - target).abs() <= 1e-9 * target.abs()
    }
}

/// Energy budget per resource, `M·J/K`.
pub fn energy_target(order: usize, users: usize, resources: usize) -> f64 {
    (order * users) as f64 / resources as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureMatrix {
    entries: Vec<Complex64>,
    template: SignatureTemplate,
    weights: ResourceWeights,
    mc_energy: f64,
}

impl SignatureMatrix {
    /// Place `z_i = sqrt(E_i / E)·e^{jφ_i}` on the template. The energies must
    /// sum to `M·J/K` for the given modulation order.
    pub fn build(
        template: &SignatureTemplate,
        weights: &ResourceWeights,
        order: usize,
        mc_energy: f64,
    ) -> Result<Self> {
        if weights.energies.len() != template.df() {
            return Err(Error::DimensionMismatch {
                what: "energy vector length",
                expected: template.df(),
                found: weights.energies.len(),
            });
        }
        weights.validate()?;
        if !(mc_energy.is_finite() && mc_energy > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mother constellation energy must be positive, got {mc_energy}"
            )));
        }
        let target = energy_target(order, template.users(), template.resources());
        if !weights.is_normalized(target) {
            return Err(Error::NotNormalized {
                sum: weights.energy_sum(),
                target,
            });
        }
        let z: Vec<Complex64> = weights
            .energies
            .iter()
            .zip(&weights.phases)
            .map(|(&e, &phi)| Complex64::from_polar((e / mc_energy).sqrt(), phi))
            .collect();
        let entries = template
            .placement
            .iter()
            .map(|&i| match i {
                0 => Complex64::new(0.0, 0.0),
                i => z[i as usize - 1],
            })
            .collect();
        Ok(Self {
            entries,
            template: template.clone(),
            weights: weights.clone(),
            mc_energy,
        })
    }

    pub fn template(&self) -> &SignatureTemplate {
        &self.template
    }

    pub fn weights(&self) -> &ResourceWeights {
        &self.weights
    }

    pub fn mc_energy(&self) -> f64 {
        self.mc_energy
    }

    pub fn entry(&self, resource: usize, user: usize) -> Complex64 {
        self.entries[resource * self.template.users() + user]
    }

    pub fn column(&self, user: usize) -> Vec<Complex64> {
        (0..self.template.resources())
            .map(|k| self.entry(k, user))
            .collect()
    }
}

/// Diagonalize a signature column and drop the all-zero columns, giving the
/// K×2 spreading-and-rotation matrix of that user.
pub fn ezc(column: &[Complex64]) -> Result<Vec<[Complex64; 2]>> {
    let active: Vec<usize> = (0..column.len())
        .filter(|&k| column[k] != Complex64::new(0.0, 0.0))
        .collect();
    if active.len() != USER_DIMENSIONS {
        return Err(Error::NonzeroCount {
            expected: USER_DIMENSIONS,
            found: active.len(),
        });
    }
    let zero = Complex64::new(0.0, 0.0);
    Ok(column
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            if k == active[0] {
                [v, zero]
            } else if k == active[1] {
                [zero, v]
            } else {
                [zero, zero]
            }
        })
        .collect())
}
