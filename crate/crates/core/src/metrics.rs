//! Distance metrics of a codebook set.
//!
//! * MED: minimum Euclidean distance between distinct superimposed codewords,
//!   exactly (all `M^J (M^J - 1) / 2` pairs) or by Monte Carlo batches.
//! * MPD: per-user minimum product distance over the nonzero dimensions, the
//!   system minimum, and the closed-form `min √(E_a E_b) / E · MPD(C)`.

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codebook::{Codebook, CodebookSet, DEFAULT_ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::mother_constellation::{self, MotherConstellation};
use crate::rng;
use crate::signature::SignatureTemplate;

/// Distances at or below this are reported as colliding codewords.
pub const COLLISION_DISTANCE: f64 = 1e-9;

/// Rows of the exact pair loop handed to a worker at a time.
const EXACT_ROWS_PER_CHUNK: usize = 32;

const MED_STREAM: u64 = 0x004d_4544;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Minimum over every batch.
    #[default]
    RunningMin,
    /// Value of the final batch only.
    LastBatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum MedMethod {
    Exact,
    MonteCarlo {
        #[serde(rename = "Q")]
        samples: usize,
        t_max: usize,
        seed: u64,
        #[serde(default)]
        aggregation: Aggregation,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedEstimate {
    pub value: f64,
    #[serde(flatten)]
    pub method: MedMethod,
    pub pairs_examined: u128,
    /// Index tuples (0-based) of a pair attaining `value`.
    pub witness: Option<[Vec<usize>; 2]>,
    /// Two distinct index tuples map onto the same superimposed codeword.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct ExactOptions {
    pub cap: u64,
    pub exec: Execution,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_ENUMERATION_CAP,
            exec: Execution::default(),
        }
    }
}

/// Best pair so far: squared distance, then the smaller flat indices win ties
/// so that the witness is independent of chunking.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Closest {
    dist_sq: f64,
    a: usize,
    b: usize,
}

impl Closest {
    const NONE: Closest = Closest {
        dist_sq: f64::INFINITY,
        a: usize::MAX,
        b: usize::MAX,
    };

    fn better(self, other: Closest) -> Closest {
        let key = |c: &Closest| (c.dist_sq, c.a, c.b);
        if key(&other).partial_cmp(&key(&self)) == Some(std::cmp::Ordering::Less) {
            other
        } else {
            self
        }
    }
}

#[inline]
fn closest_after(coords: &[f64], stride: usize, p: usize, mut best: Closest) -> Closest {
    let a = &coords[p * stride..(p + 1) * stride];
    let rest = &coords[(p + 1) * stride..];
    for (offset, b) in rest.chunks_exact(stride).enumerate() {
        let d0 = (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]);
        if d0 > best.dist_sq {
            continue;
        }
        let mut d = d0;
        for i in 2..stride {
            let t = a[i] - b[i];
            d += t * t;
        }
        if d < best.dist_sq || (d == best.dist_sq && (p, p + 1 + offset) < (best.a, best.b)) {
            best = Closest {
                dist_sq: d,
                a: p,
                b: p + 1 + offset,
            };
        }
    }
    best
}

fn finish(set: &CodebookSet, best: Closest, method: MedMethod, pairs: u128) -> MedEstimate {
    let distance = best.dist_sq.sqrt();
    let degenerate = distance <= COLLISION_DISTANCE;
    let witness = (best.a != usize::MAX)
        .then(|| [set.decode_index(best.a as u128), set.decode_index(best.b as u128)]);
    MedEstimate {
        value: if degenerate { 0.0 } else { distance },
        method,
        pairs_examined: pairs,
        witness,
        degenerate,
    }
}

/// Exact MED over the full superimposed constellation.
pub fn med_exact(set: &CodebookSet) -> Result<MedEstimate> {
    med_exact_with(set, ExactOptions::default())
}

/// Exact MED by branch and bound over per-user index pairs.
///
/// A pair of superimposed codewords is built one user at a time, choosing
/// `(a_j, b_j)` for each user. Once every user on resource `k` is fixed, the
/// term `|s_k(a) - s_k(b)|²` is final and adds to a lower bound on the pair's
/// squared distance, so whole families of pairs are discarded against the best
/// distance so far. Users are visited in an order that completes resources as
/// early as possible. The result (value and witness) matches
/// [`med_exact_pairwise`].
pub fn med_exact_with(set: &CodebookSet, opts: ExactOptions) -> Result<MedEstimate> {
    let n = set.check_budget(opts.cap)?;
    let pairs = n as u128 * (n as u128).saturating_sub(1) / 2;
    if n < 2 {
        return Ok(finish(set, Closest::NONE, MedMethod::Exact, pairs));
    }
    let search = PairSearch::new(set);
    let seed = search.initial_bound();
    let prefixes = search.prefixes();
    let best = exec::map_reduce_chunks(
        opts.exec,
        prefixes.len(),
        1,
        || seed,
        |range| {
            range.fold(seed, |best, p| search.run_prefix(&prefixes[p], best))
        },
        Closest::better,
    );
    Ok(finish(set, best, MedMethod::Exact, pairs))
}

/// Exact MED by scanning every pair of the packed point cloud.
pub fn med_exact_pairwise(set: &CodebookSet, opts: ExactOptions) -> Result<MedEstimate> {
    let cloud = set.point_cloud(opts.cap)?;
    let n = cloud.len();
    let stride = cloud.stride();
    let coords = cloud.coords();
    let best = exec::map_reduce_chunks(
        opts.exec,
        n,
        EXACT_ROWS_PER_CHUNK,
        || Closest::NONE,
        |rows| rows.fold(Closest::NONE, |best, p| closest_after(coords, stride, p, best)),
        Closest::better,
    );
    let pairs = n as u128 * (n as u128).saturating_sub(1) / 2;
    Ok(finish(set, best, MedMethod::Exact, pairs))
}

/// Relative slack on pruning so that pairs tied with the best distance are
/// still reached despite different rounding in the partial sums.
const PRUNE_SLACK: f64 = 1e-9;

/// Search depth handed out as one parallel task.
const PREFIX_DEPTH: usize = 2;

/// Points in the pairwise scan that seeds the pruning bound.
const BOUND_SAMPLES: u64 = 512;

struct PairSearch<'a> {
    set: &'a CodebookSet,
    order: usize,
    resources: usize,
    /// Users in visiting order.
    visit: Vec<usize>,
    /// Resources whose last user is `visit[t]`.
    completes: Vec<Vec<usize>>,
    /// `diff[t][(x * M + y) * 2 + i]`: entry difference of user `visit[t]`
    /// on its `i`-th active resource for the index pair `(x, y)`.
    diff: Vec<Vec<num_complex::Complex64>>,
    active: Vec<[usize; 2]>,
}

/// Working buffers of one depth-first walk; level `t` holds the state
/// after `t` users are fixed.
struct Walk {
    a: Vec<usize>,
    b: Vec<usize>,
    delta: Vec<num_complex::Complex64>,
    bound: Vec<f64>,
    differ: Vec<bool>,
}

impl<'a> PairSearch<'a> {
    fn new(set: &'a CodebookSet) -> Self {
        let users = set.dims().users;
        let resources = set.dims().resources;
        let order = set.dims().order;
        let on = set.resource_users();
        let mut placed = vec![false; users];
        let mut visit = Vec::with_capacity(users);
        while visit.len() < users {
            let open = |k: usize| on[k].iter().filter(|&&j| !placed[j]).count();
            let next = (0..resources)
                .filter(|&k| open(k) > 0)
                .min_by_key(|&k| (open(k), k))
                .expect("every user occupies a resource");
            for &j in &on[next] {
                if !placed[j] {
                    placed[j] = true;
                    visit.push(j);
                }
            }
        }
        let mut position = vec![0; users];
        for (t, &j) in visit.iter().enumerate() {
            position[j] = t;
        }
        let mut completes = vec![Vec::new(); users];
        for (k, js) in on.iter().enumerate() {
            if let Some(last) = js.iter().map(|&j| position[j]).max() {
                completes[last].push(k);
            }
        }
        let mut diff = Vec::with_capacity(users);
        let mut active = Vec::with_capacity(users);
        for &j in &visit {
            let cb = &set.codebooks()[j];
            let ks = cb.active_resources();
            let mut d = Vec::with_capacity(order * order * 2);
            for x in 0..order {
                for y in 0..order {
                    for k in ks {
                        d.push(cb.entry(k, x) - cb.entry(k, y));
                    }
                }
            }
            diff.push(d);
            active.push(ks);
        }
        Self {
            set,
            order,
            resources,
            visit,
            completes,
            diff,
            active,
        }
    }

    /// Distance exactly as the pairwise scan computes it, with `(a, b)` in
    /// flat index order.
    fn leaf(&self, a: &[usize], b: &[usize]) -> Closest {
        let flat = |t: &[usize]| t.iter().fold(0usize, |acc, &m| acc * self.order + m);
        let (fa, fb) = (flat(a), flat(b));
        let (lo, hi, fl, fh) = if fa < fb { (a, b, fa, fb) } else { (b, a, fb, fa) };
        let mut sa = vec![num_complex::Complex64::new(0.0, 0.0); self.resources];
        let mut sb = sa.clone();
        for (j, cb) in self.set.codebooks().iter().enumerate() {
            for k in cb.active_resources() {
                sa[k] += cb.entry(k, lo[j]);
                sb[k] += cb.entry(k, hi[j]);
            }
        }
        let mut d = 0.0;
        for (x, y) in sa.iter().zip(&sb) {
            d += (x.re - y.re) * (x.re - y.re);
            d += (x.im - y.im) * (x.im - y.im);
        }
        Closest {
            dist_sq: d,
            a: fl,
            b: fh,
        }
    }

    /// An attainable distance to start pruning from: pairs differing in one
    /// user, and a pairwise scan of a fixed pseudo-random subset.
    fn initial_bound(&self) -> Closest {
        let users = self.visit.len();
        let mut best = Closest::NONE;
        let mut a = vec![0; users];
        let mut b = vec![0; users];
        for j in 0..users {
            for m in 0..self.order {
                for n in m + 1..self.order {
                    a.fill(0);
                    b.fill(0);
                    a[j] = m;
                    b[j] = n;
                    best = best.better(self.leaf(&a, &b));
                }
            }
        }
        let size = self.set.dims().constellation_size() as u64;
        let mut rng = rng::stream(0, &[MED_STREAM, u64::MAX]);
        let picks: Vec<Vec<usize>> = (0..size.min(BOUND_SAMPLES))
            .map(|_| self.set.decode_index(rng.random_range(0..size) as u128))
            .collect();
        for p in 0..picks.len() {
            for q in p + 1..picks.len() {
                if picks[p] != picks[q] {
                    best = best.better(self.leaf(&picks[p], &picks[q]));
                }
            }
        }
        best
    }

    fn walk(&self) -> Walk {
        let users = self.visit.len();
        Walk {
            a: vec![0; users],
            b: vec![0; users],
            delta: vec![num_complex::Complex64::new(0.0, 0.0); (users + 1) * self.resources],
            bound: vec![0.0; users + 1],
            differ: vec![false; users + 1],
        }
    }

    /// Fix `(x, y)` for the user at depth `t`, filling level `t + 1`.
    /// Returns the new lower bound.
    #[inline]
    fn step(&self, w: &mut Walk, t: usize, x: usize, y: usize) -> f64 {
        let k = self.resources;
        let j = self.visit[t];
        w.a[j] = x;
        w.b[j] = y;
        w.differ[t + 1] = w.differ[t] || x != y;
        let (cur, next) = w.delta.split_at_mut((t + 1) * k);
        let next = &mut next[..k];
        next.copy_from_slice(&cur[t * k..]);
        let d = &self.diff[t][(x * self.order + y) * 2..];
        let [r0, r1] = self.active[t];
        next[r0] += d[0];
        next[r1] += d[1];
        let mut bound = w.bound[t];
        for &r in &self.completes[t] {
            bound += next[r].norm_sqr();
        }
        w.bound[t + 1] = bound;
        bound
    }

    fn cutoff(best: &Closest) -> f64 {
        best.dist_sq * (1.0 + PRUNE_SLACK)
    }

    /// Index-pair prefixes for the first `PREFIX_DEPTH` users. The mirror
    /// image of every pair is skipped: the first user that differs must have
    /// `a_j < b_j`.
    fn prefixes(&self) -> Vec<Vec<(usize, usize)>> {
        let depth = PREFIX_DEPTH.min(self.visit.len());
        let mut level: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
        for _ in 0..depth {
            let mut next = Vec::new();
            for p in &level {
                let differ = p.iter().any(|(x, y)| x != y);
                for x in 0..self.order {
                    for y in 0..self.order {
                        if differ || x <= y {
                            let mut q = p.clone();
                            q.push((x, y));
                            next.push(q);
                        }
                    }
                }
            }
            level = next;
        }
        level
    }

    fn run_prefix(&self, prefix: &[(usize, usize)], mut best: Closest) -> Closest {
        let mut w = self.walk();
        for (t, &(x, y)) in prefix.iter().enumerate() {
            if self.step(&mut w, t, x, y) > Self::cutoff(&best) {
                return best;
            }
        }
        self.descend(&mut w, prefix.len(), &mut best);
        best
    }

    fn descend(&self, w: &mut Walk, t: usize, best: &mut Closest) {
        if t == self.visit.len() {
            if w.differ[t] {
                *best = best.better(self.leaf(&w.a, &w.b));
            }
            return;
        }
        let differ = w.differ[t];
        for x in 0..self.order {
            for y in 0..self.order {
                if !differ && x > y {
                    continue;
                }
                if self.step(w, t, x, y) <= Self::cutoff(best) {
                    self.descend(w, t + 1, best);
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MonteCarloOptions {
    /// Points per batch (Q).
    pub samples: usize,
    /// Number of batches (t_max).
    pub iterations: usize,
    pub seed: u64,
    pub aggregation: Aggregation,
    pub exec: Execution,
}

impl MonteCarloOptions {
    pub fn new(samples: usize, iterations: usize, seed: u64) -> Self {
        Self {
            samples,
            iterations,
            seed,
            aggregation: Aggregation::RunningMin,
            exec: Execution::default(),
        }
    }
}

/// Draw the flat indices of one batch: `Q` distinct points, or the whole
/// constellation when it has no more than `Q` points.
fn sample_batch(set: &CodebookSet, samples: usize, seed: u64, batch: usize) -> Result<Vec<u64>> {
    let size = set.dims().constellation_size();
    if size > u64::MAX as u128 {
        return Err(Error::InvalidParameter(format!(
            "constellation of {size} points is too large to sample"
        )));
    }
    let size = size as u64;
    if size <= samples as u64 {
        return Ok((0..size).collect());
    }
    let mut rng = rng::stream(seed, &[MED_STREAM, batch as u64]);
    let mut seen = HashSet::with_capacity(samples);
    let mut out = Vec::with_capacity(samples);
    while out.len() < samples {
        let n = rng.random_range(0..size);
        if seen.insert(n) {
            out.push(n);
        }
    }
    Ok(out)
}

/// Monte Carlo MED: each of `t_max` batches takes `Q` distinct random points
/// and computes their exact MED; batches are combined per `aggregation`.
/// Batch `b` draws from a stream keyed on `(seed, b)`.
pub fn med_monte_carlo(set: &CodebookSet, opts: MonteCarloOptions) -> Result<MedEstimate> {
    if opts.samples < 2 {
        return Err(Error::InvalidParameter("Q must be at least 2".into()));
    }
    if opts.iterations < 1 {
        return Err(Error::InvalidParameter("t_max must be at least 1".into()));
    }
    let k = set.dims().resources;
    let stride = 2 * k;
    let batches = exec::map_collect(opts.exec, opts.iterations, |b| -> Result<(Closest, u128)> {
        let picks = sample_batch(set, opts.samples, opts.seed, b)?;
        let mut coords = Vec::with_capacity(picks.len() * stride);
        for &n in &picks {
            let word = set.superimpose(&set.decode_index(n as u128))?;
            coords.extend(word.vector.iter().flat_map(|z| [z.re, z.im]));
        }
        let mut best = Closest::NONE;
        for p in 0..picks.len() {
            best = closest_after(&coords, stride, p, best);
        }
        // map batch positions back to flat constellation indices
        if best.a != usize::MAX {
            let (a, b) = (picks[best.a] as usize, picks[best.b] as usize);
            best.a = a.min(b);
            best.b = a.max(b);
        }
        let q = picks.len() as u128;
        Ok((best, q * (q - 1) / 2))
    });
    let batches = batches.into_iter().collect::<Result<Vec<_>>>()?;
    let pairs = batches.iter().map(|(_, p)| p).sum();
    let best = match opts.aggregation {
        Aggregation::RunningMin => batches
            .iter()
            .fold(Closest::NONE, |acc, (c, _)| acc.better(*c)),
        Aggregation::LastBatch => batches.last().map(|(c, _)| *c).unwrap_or(Closest::NONE),
    };
    let method = MedMethod::MonteCarlo {
        samples: opts.samples,
        t_max: opts.iterations,
        seed: opts.seed,
        aggregation: opts.aggregation,
    };
    Ok(finish(set, best, method, pairs))
}

/// Minimum over codeword pairs of the product of `|x_p^k - x_q^k|` over the
/// dimensions where the two codewords differ. Identical codewords give 0.
pub fn codebook_mpd(cb: &Codebook) -> Result<f64> {
    let m = cb.order();
    if m < 2 {
        return Err(Error::TooFewCodewords);
    }
    let mut best = f64::INFINITY;
    for p in 0..m {
        for q in p + 1..m {
            let mut product = 1.0;
            let mut differs = false;
            for k in 0..cb.resources() {
                let d = (cb.entry(k, p) - cb.entry(k, q)).norm();
                if d > 0.0 {
                    product *= d;
                    differs = true;
                }
            }
            best = best.min(if differs { product } else { 0.0 });
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MpdReport {
    pub per_user: Vec<f64>,
    pub system: f64,
    /// Closed-form value from the set's design point, when it carries one.
    pub closed_form: Option<f64>,
    /// 0-based users with duplicate codewords.
    pub degenerate_users: Vec<usize>,
}

pub fn system_mpd(set: &CodebookSet) -> Result<MpdReport> {
    let per_user = set
        .codebooks()
        .iter()
        .map(codebook_mpd)
        .collect::<Result<Vec<_>>>()?;
    let system = per_user.iter().copied().fold(f64::INFINITY, f64::min);
    let degenerate_users = per_user
        .iter()
        .enumerate()
        .filter(|(_, v)| **v == 0.0)
        .map(|(j, _)| j)
        .collect();
    let closed_form = match (set.template(), set.design_point()) {
        (Some(name), Some(dp)) => {
            let t = SignatureTemplate::builtin(name)?;
            Some(gamma_mpd_closed_form(&t, &dp.energies, set.dims().order, dp.omega)?)
        }
        _ => None,
    };
    Ok(MpdReport {
        per_user,
        system,
        closed_form,
        degenerate_users,
    })
}

/// `min_j √(E_a E_b)` over the weight pairs `(a, b)` each user carries.
fn weakest_pair_energy(template: &SignatureTemplate, energies: &[f64]) -> Result<f64> {
    if energies.len() != template.df() {
        return Err(Error::DimensionMismatch {
            what: "energy vector length",
            expected: template.df(),
            found: energies.len(),
        });
    }
    Ok((0..template.users())
        .map(|j| {
            let [a, b] = template.user_weight_indices(j);
            (energies[a - 1] * energies[b - 1]).sqrt()
        })
        .fold(f64::INFINITY, f64::min))
}

/// System MPD in closed form: `min_j √(E_a E_b) / E · MPD(C)` with the
/// piecewise `MPD(C)`. For `S4x6` the minimum is over `{√(E1 E3), E2}`, for
/// `S5x10` over `{√(E1 E4), √(E2 E3)}`.
pub fn gamma_mpd_closed_form(
    template: &SignatureTemplate,
    energies: &[f64],
    order: usize,
    omega: f64,
) -> Result<f64> {
    let e = mother_constellation::dimension_energy(order, omega)?;
    let pair = weakest_pair_energy(template, energies)?;
    Ok(pair / e * mother_constellation::mpd_closed_form(order, omega)?)
}

/// Same scaling with the enumerated `MPD(C)`.
pub fn gamma_mpd_brute_force(
    template: &SignatureTemplate,
    energies: &[f64],
    order: usize,
    omega: f64,
) -> Result<f64> {
    let mc = MotherConstellation::new(order, omega)?;
    let pair = weakest_pair_energy(template, energies)?;
    Ok(pair / mc.dimension_energy() * mc.mpd_brute_force())
}

/// Constraint-side MPD: the closed form where it is exact (`M = 4`), the
/// enumerated value otherwise.
pub fn gamma_mpd(template: &SignatureTemplate, energies: &[f64], order: usize, omega: f64) -> Result<f64> {
    if order == 4 {
        gamma_mpd_closed_form(template, energies, order, omega)
    } else {
        gamma_mpd_brute_force(template, energies, order, omega)
    }
}

/// Combined report written by the `metrics` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub med: MedEstimate,
    pub mpd: MpdReport,
    /// Design point recovered from the entries when the set has a template
    /// but carries none.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fitted: Option<crate::optimizer::DesignPoint>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::{build_from_design, reference_codebooks, Provenance};
    use crate::optimizer::DesignPoint;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn uniform() -> CodebookSet {
        let t = SignatureTemplate::builtin("S4x6").unwrap();
        let dp = DesignPoint {
            energies: vec![2.0; 3],
            phases: vec![0.3, 1.1, 2.0],
            omega: 2.0,
        };
        build_from_design(&t, 4, &dp).unwrap()
    }

    /// Plain double loop over enumerated codewords.
    fn med_naive(set: &CodebookSet) -> f64 {
        let pts: Vec<_> = set.enumerate_superimposed(DEFAULT_ENUMERATION_CAP).unwrap().collect();
        let mut best = f64::INFINITY;
        for p in 0..pts.len() {
            for q in p + 1..pts.len() {
                let d: f64 = pts[p]
                    .vector
                    .iter()
                    .zip(&pts[q].vector)
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum();
                best = best.min(d);
            }
        }
        best.sqrt()
    }

    #[test]
    fn exact_matches_naive_enumeration() {
        let set = uniform();
        let fast = med_exact(&set).unwrap();
        assert_relative_eq!(fast.value, med_naive(&set), max_relative = 1e-12);
        assert_eq!(fast.pairs_examined, 4096 * 4095 / 2);
        let [a, b] = fast.witness.clone().unwrap();
        let xa = set.superimpose(&a).unwrap().vector;
        let xb = set.superimpose(&b).unwrap().vector;
        let d: f64 = xa.iter().zip(&xb).map(|(x, y)| (x - y).norm_sqr()).sum();
        assert_relative_eq!(d.sqrt(), fast.value, max_relative = 1e-12);
    }

    #[test]
    fn exact_is_execution_independent() {
        let set = reference_codebooks("A_4x6_M4").unwrap();
        let seq = med_exact_with(&set, ExactOptions { exec: Execution::Sequential, ..Default::default() }).unwrap();
        let par = med_exact_with(&set, ExactOptions { exec: Execution::Parallel, ..Default::default() }).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn branch_and_bound_matches_pairwise_scan() {
        let t = SignatureTemplate::builtin("S4x6").unwrap();
        let mut sets = vec![uniform(), reference_codebooks("A_4x6_M4").unwrap()];
        for (e, phi, omega) in [
            ([1.0, 2.5, 2.5], [0.1, 0.2, 0.3], 1.3),
            ([2.0, 2.0, 2.0], [0.5, 0.5, 0.5], 1.05),
            ([0.5, 4.0, 1.5], [2.9, 0.01, 1.7], 7.5),
        ] {
            let dp = DesignPoint { energies: e.to_vec(), phases: phi.to_vec(), omega };
            sets.push(build_from_design(&t, 4, &dp).unwrap());
        }
        for set in &sets {
            let fast = med_exact(set).unwrap();
            let scan = med_exact_pairwise(set, ExactOptions::default()).unwrap();
            assert_eq!(fast, scan);
        }
    }

    #[test]
    fn exact_budget_error() {
        let set = uniform();
        let err = med_exact_with(&set, ExactOptions { cap: 100, ..Default::default() }).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
        assert!(err.to_string().contains("Monte Carlo"));
    }

    #[test]
    fn colliding_codewords_are_flagged() {
        // users 1 and 2 carry the same single resource pattern → x1(0)+x2(1) == x1(1)+x2(0)
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = |re| Complex64::new(re, 0.0);
        let rows = vec![vec![z(h), z(-h)], vec![z(h), z(-h)]];
        let a = Codebook::from_rows(0, rows.clone()).unwrap();
        let b = Codebook::from_rows(1, rows).unwrap();
        let set = CodebookSet::new(vec![a, b], None, None, Provenance::Generated, 1e-9).unwrap();
        let med = med_exact(&set).unwrap();
        assert_eq!(med.value, 0.0);
        assert!(med.degenerate);
        assert_eq!(med.witness, Some([vec![0, 1], vec![1, 0]]));
    }

    #[test]
    fn monte_carlo_two_points() {
        let set = uniform();
        let est = med_monte_carlo(&set, MonteCarloOptions::new(2, 1, 42)).unwrap();
        assert_eq!(est.pairs_examined, 1);
        let [a, b] = est.witness.clone().unwrap();
        assert_ne!(a, b);
        let xa = set.superimpose(&a).unwrap().vector;
        let xb = set.superimpose(&b).unwrap().vector;
        let d: f64 = xa.iter().zip(&xb).map(|(x, y)| (x - y).norm_sqr()).sum();
        assert_relative_eq!(d.sqrt(), est.value, max_relative = 1e-12);
    }

    #[test]
    fn monte_carlo_bounds_and_determinism() {
        let set = uniform();
        let exact = med_exact(&set).unwrap().value;
        let mut opts = MonteCarloOptions::new(300, 5, 7);
        let a = med_monte_carlo(&set, opts).unwrap();
        opts.exec = Execution::Sequential;
        let b = med_monte_carlo(&set, opts).unwrap();
        assert_eq!(a, b);
        assert!(a.value >= exact);
        opts.aggregation = Aggregation::LastBatch;
        let last = med_monte_carlo(&set, opts).unwrap();
        assert!(last.value >= a.value);
        assert!(med_monte_carlo(&set, MonteCarloOptions::new(1, 5, 7)).is_err());
        assert!(med_monte_carlo(&set, MonteCarloOptions::new(10, 0, 7)).is_err());
    }

    #[test]
    fn codebook_mpd_of_unit_mc_matches_brute_force() {
        let mc = MotherConstellation::new(4, 3.0).unwrap();
        let rows = (0..2)
            .map(|r| mc.row(r).iter().map(|&v| Complex64::new(v, 0.0)).collect())
            .chain(std::iter::once(vec![Complex64::new(0.0, 0.0); 4]))
            .collect();
        let cb = Codebook::from_rows(0, rows).unwrap();
        assert_relative_eq!(codebook_mpd(&cb).unwrap(), mc.mpd_brute_force(), max_relative = 1e-12);
    }

    #[test]
    fn codebook_mpd_errors_and_duplicates() {
        let one = Codebook::from_rows(0, vec![vec![Complex64::new(1.0, 0.0)], vec![Complex64::new(1.0, 0.0)]]).unwrap();
        assert!(matches!(codebook_mpd(&one), Err(Error::TooFewCodewords)));
        let z = Complex64::new(1.0, 0.0);
        let dup = Codebook::from_rows(0, vec![vec![z, z, -z, -z], vec![z, z, -z, -z]]).unwrap();
        assert_eq!(codebook_mpd(&dup).unwrap(), 0.0);
    }

    #[test]
    fn uniform_set_has_equal_user_mpds() {
        let report = system_mpd(&uniform()).unwrap();
        for v in &report.per_user {
            assert_relative_eq!(*v, report.per_user[0], max_relative = 1e-9);
        }
        // (2/10)·3
        assert_relative_eq!(report.system, 0.6, max_relative = 1e-9);
        assert_relative_eq!(report.closed_form.unwrap(), 0.6, max_relative = 1e-9);
    }

    #[test]
    fn closed_form_gamma_examples() {
        let t = SignatureTemplate::builtin("S4x6").unwrap();
        let v = gamma_mpd_closed_form(&t, &[2.59, 1.30, 2.11], 4, 3.4756).unwrap();
        assert!((v - 0.551).abs() < 0.005, "{v}");
        assert_relative_eq!(gamma_mpd_closed_form(&t, &[2.0; 3], 4, 2.0).unwrap(), 0.6, max_relative = 1e-12);

        let t = SignatureTemplate::builtin("S5x10").unwrap();
        let e = 2.0;
        let v = gamma_mpd_closed_form(&t, &[e; 4], 4, 3.0).unwrap();
        assert_relative_eq!(v, e / 20.0 * 8.0, max_relative = 1e-12);
        assert!(gamma_mpd_closed_form(&t, &[1.0; 3], 4, 3.0).is_err());
    }

    #[test]
    fn scaling_identity_on_built_codebooks() {
        let t = SignatureTemplate::builtin("S5x10").unwrap();
        let dp = DesignPoint {
            energies: vec![2.4, 2.5, 2.4, 0.7],
            phases: vec![2.3, 2.1, 0.5, 0.0],
            omega: 3.0,
        };
        let set = build_from_design(&t, 4, &dp).unwrap();
        let mc = MotherConstellation::new(4, dp.omega).unwrap();
        for cb in set.codebooks() {
            let [a, b] = t.user_weight_indices(cb.user());
            let expected = (dp.energies[a - 1] * dp.energies[b - 1]).sqrt() / mc.dimension_energy()
                * mc.mpd_brute_force();
            assert_relative_eq!(codebook_mpd(cb).unwrap(), expected, max_relative = 1e-9);
        }
    }
}
