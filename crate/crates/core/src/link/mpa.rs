//! Sum-product message passing on the user/resource factor graph.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::check_received;
use crate::codebook::CodebookSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MpaDomain {
    Probability,
    /// Exact log-sum-exp, no max-log approximation.
    #[default]
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MpaConfig {
    pub iterations: usize,
    /// Weight of the previous resource-to-user message, in `[0, 1)`.
    pub damping: f64,
    pub domain: MpaDomain,
}

impl Default for MpaConfig {
    fn default() -> Self {
        Self {
            iterations: 8,
            damping: 0.0,
            domain: MpaDomain::Log,
        }
    }
}

impl MpaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations < 1 {
            return Err(Error::Config("MPA iterations must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.damping) {
            return Err(Error::Config(format!("MPA damping must lie in [0, 1), got {}", self.damping)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MpaOutput {
    /// Per-user probabilities over the M codewords; each row sums to 1.
    pub posteriors: Vec<Vec<f64>>,
    /// Argmax of each posterior, lowest index on ties.
    pub decisions: Vec<usize>,
}

#[derive(Debug, Clone)]
struct ResourceNode {
    k: usize,
    /// Edge ids of the users on this resource, in user order.
    edges: Vec<usize>,
    /// Noiseless superposition for every joint index of the users here; the
    /// last user's index varies fastest.
    sums: Vec<Complex64>,
}

/// Factor graph with the per-resource superposition tables precomputed.
#[derive(Debug, Clone)]
pub struct MpaDecoder {
    order: usize,
    users: usize,
    resources: usize,
    nodes: Vec<ResourceNode>,
    /// `user_edges[j] = [e0, e1]`.
    user_edges: Vec<[usize; 2]>,
    /// A user forwards on each edge what arrived on its other edge.
    partner: Vec<usize>,
    /// `digits[d][c * d + i]`: index of the `i`-th user in combination `c`
    /// of a degree-`d` resource.
    digits: Vec<Vec<usize>>,
}

impl MpaDecoder {
    pub fn new(set: &CodebookSet) -> Self {
        let dims = set.dims();
        let m = dims.order;
        let mut nodes = Vec::with_capacity(dims.resources);
        let mut user_edges = vec![[usize::MAX; 2]; dims.users];
        let mut next_edge = 0;
        let mut max_degree = 0;
        for (k, users) in set.resource_users().into_iter().enumerate() {
            let d = users.len();
            max_degree = max_degree.max(d);
            let mut edges = Vec::with_capacity(d);
            for &j in &users {
                let slot = if user_edges[j][0] == usize::MAX { 0 } else { 1 };
                user_edges[j][slot] = next_edge;
                edges.push(next_edge);
                next_edge += 1;
            }
            let combos = m.pow(d as u32);
            let sums = (0..combos)
                .map(|mut c| {
                    let mut s = Complex64::new(0.0, 0.0);
                    let mut idx = vec![0; d];
                    for slot in idx.iter_mut().rev() {
                        *slot = c % m;
                        c /= m;
                    }
                    for (&j, &mj) in users.iter().zip(&idx) {
                        s += set.codebooks()[j].entry(k, mj);
                    }
                    s
                })
                .collect();
            nodes.push(ResourceNode { k, edges, sums });
        }
        let digits = (0..=max_degree)
            .map(|d| {
                let combos = m.pow(d as u32);
                let mut out = vec![0; combos * d];
                for c in 0..combos {
                    let mut r = c;
                    for i in (0..d).rev() {
                        out[c * d + i] = r % m;
                        r /= m;
                    }
                }
                out
            })
            .collect();
        let mut partner = vec![usize::MAX; next_edge];
        for &[a, b] in &user_edges {
            partner[a] = b;
            partner[b] = a;
        }
        Self {
            order: m,
            users: dims.users,
            resources: dims.resources,
            nodes,
            user_edges,
            partner,
            digits,
        }
    }

    pub fn decode(&self, y: &[Complex64], h: &[Complex64], sigma2: f64, cfg: &MpaConfig) -> Result<MpaOutput> {
        if y.len() != self.resources || h.len() != self.resources {
            return Err(Error::DimensionMismatch {
                what: "received vector",
                expected: self.resources,
                found: y.len().min(h.len()),
            });
        }
        Ok(match cfg.domain {
            MpaDomain::Log => self.decode_log(y, h, sigma2, cfg),
            MpaDomain::Probability => self.decode_probability(y, h, sigma2, cfg),
        })
    }

    /// `-|y_k - h_k s|² / σ²` for every combination on every resource.
    fn log_likelihoods(&self, y: &[Complex64], h: &[Complex64], sigma2: f64) -> Vec<Vec<f64>> {
        self.nodes
            .iter()
            .map(|node| {
                let (yk, hk) = (y[node.k], h[node.k]);
                node.sums.iter().map(|s| -(yk - hk * s).norm_sqr() / sigma2).collect()
            })
            .collect()
    }

    fn decode_log(&self, y: &[Complex64], h: &[Complex64], sigma2: f64, cfg: &MpaConfig) -> MpaOutput {
        let m = self.order;
        let f = self.log_likelihoods(y, h, sigma2);
        let edges = self.partner.len();
        let uniform = -(m as f64).ln();
        let mut to_res = vec![uniform; edges * m];
        let mut to_user = vec![uniform; edges * m];
        let mut total = Vec::with_capacity(f.iter().map(Vec::len).max().unwrap_or(0));
        let mut peak = vec![0.0; m];
        let mut acc = vec![0.0; m];
        let mut msg = vec![0.0; m];
        for iter in 0..cfg.iterations {
            for (node, fk) in self.nodes.iter().zip(&f) {
                let d = node.edges.len();
                let digits = &self.digits[d];
                // likelihood plus every incoming message; each outgoing
                // message then removes its own user's contribution
                total.clear();
                total.extend(fk.iter().enumerate().map(|(c, &v)| {
                    let dc = &digits[c * d..(c + 1) * d];
                    v + node
                        .edges
                        .iter()
                        .zip(dc)
                        .map(|(&e, &mi)| to_res[e * m + mi])
                        .sum::<f64>()
                }));
                for (i, &e) in node.edges.iter().enumerate() {
                    peak.fill(f64::NEG_INFINITY);
                    for (c, &v) in total.iter().enumerate() {
                        let p = &mut peak[digits[c * d + i]];
                        if v > *p {
                            *p = v;
                        }
                    }
                    acc.fill(0.0);
                    for (c, &v) in total.iter().enumerate() {
                        let mi = digits[c * d + i];
                        acc[mi] += (v - peak[mi]).exp();
                    }
                    for mi in 0..m {
                        msg[mi] = peak[mi] + acc[mi].ln() - to_res[e * m + mi];
                    }
                    normalize_log(&mut msg);
                    let out = &mut to_user[e * m..(e + 1) * m];
                    if cfg.damping > 0.0 && iter > 0 {
                        for (o, v) in out.iter_mut().zip(&msg) {
                            *o = cfg.damping * *o + (1.0 - cfg.damping) * v;
                        }
                        normalize_log(out);
                    } else {
                        out.copy_from_slice(&msg);
                    }
                }
            }
            for (e, &src) in self.partner.iter().enumerate() {
                to_res[e * m..(e + 1) * m].copy_from_slice(&to_user[src * m..(src + 1) * m]);
            }
        }
        let posteriors: Vec<Vec<f64>> = self
            .user_edges
            .iter()
            .map(|[a, b]| {
                let mut l: Vec<f64> = (0..m).map(|mi| to_user[a * m + mi] + to_user[b * m + mi]).collect();
                normalize_log(&mut l);
                l.iter().map(|v| v.exp()).collect()
            })
            .collect();
        finish(posteriors)
    }

    fn decode_probability(&self, y: &[Complex64], h: &[Complex64], sigma2: f64, cfg: &MpaConfig) -> MpaOutput {
        let m = self.order;
        let f: Vec<Vec<f64>> = self
            .log_likelihoods(y, h, sigma2)
            .into_iter()
            .map(|fk| {
                let top = fk.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                fk.iter().map(|v| (v - top).exp()).collect()
            })
            .collect();
        let edges = self.partner.len();
        let uniform = 1.0 / m as f64;
        let mut to_res = vec![uniform; edges * m];
        let mut to_user = vec![uniform; edges * m];
        for iter in 0..cfg.iterations {
            for (node, fk) in self.nodes.iter().zip(&f) {
                let d = node.edges.len();
                let digits = &self.digits[d];
                for (i, &e) in node.edges.iter().enumerate() {
                    let mut msg = vec![0.0; m];
                    for (c, &v) in fk.iter().enumerate() {
                        let dc = &digits[c * d..(c + 1) * d];
                        let mut p = v;
                        for (i2, &e2) in node.edges.iter().enumerate() {
                            if i2 != i {
                                p *= to_res[e2 * m + dc[i2]];
                            }
                        }
                        msg[dc[i]] += p;
                    }
                    normalize_probability(&mut msg);
                    let out = &mut to_user[e * m..(e + 1) * m];
                    if cfg.damping > 0.0 && iter > 0 {
                        for (o, v) in out.iter_mut().zip(&msg) {
                            *o = cfg.damping * *o + (1.0 - cfg.damping) * v;
                        }
                        normalize_probability(out);
                    } else {
                        out.copy_from_slice(&msg);
                    }
                }
            }
            for (e, &src) in self.partner.iter().enumerate() {
                to_res[e * m..(e + 1) * m].copy_from_slice(&to_user[src * m..(src + 1) * m]);
            }
        }
        let posteriors = self
            .user_edges
            .iter()
            .map(|[a, b]| {
                let mut p: Vec<f64> = (0..m).map(|mi| to_user[a * m + mi] * to_user[b * m + mi]).collect();
                normalize_probability(&mut p);
                p
            })
            .collect();
        finish(posteriors)
    }

    pub fn users(&self) -> usize {
        self.users
    }
}

fn normalize_log(v: &mut [f64]) {
    let top = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        let u = -(v.len() as f64).ln();
        v.fill(u);
        return;
    }
    let lse = top + v.iter().map(|x| (x - top).exp()).sum::<f64>().ln();
    for x in v.iter_mut() {
        *x -= lse;
    }
}

/// Scale to unit sum; an all-zero (underflowed) message becomes uniform.
fn normalize_probability(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    if s > 0.0 && s.is_finite() {
        for x in v.iter_mut() {
            *x /= s;
        }
    } else {
        let u = 1.0 / v.len() as f64;
        v.fill(u);
    }
}

fn finish(posteriors: Vec<Vec<f64>>) -> MpaOutput {
    let decisions = posteriors
        .iter()
        .map(|p| {
            p.iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best })
                .0
        })
        .collect();
    MpaOutput { posteriors, decisions }
}

/// One-shot MPA detection; builds the factor graph on every call.
pub fn mpa_decode(
    y: &[Complex64],
    h: &[Complex64],
    set: &CodebookSet,
    sigma2: f64,
    cfg: &MpaConfig,
) -> Result<MpaOutput> {
    cfg.validate()?;
    check_received(set, y, h, sigma2)?;
    MpaDecoder::new(set).decode(y, h, sigma2, cfg)
}
